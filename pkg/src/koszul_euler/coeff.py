"""Exact arithmetic in Z/p^k and Smith normal form over it.

Scalars are plain integers kept canonical in ``[0, p**k)``; matrices are
``int64`` numpy arrays with canonical entries.  Since ``p**k <= 2**31`` every
product of two entries fits in a signed 64-bit word, which is what the
elimination kernel below relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

MAX_MODULUS = 2**31


class NotAUnit(ArithmeticError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class CoeffRing:
    """The ring Z/p^k.  ``k >= 2`` gives a ring containing no field."""

    p: int
    k: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.k < 1:
            raise ValueError(f"k={self.k} must be >= 1")
        if self.p**self.k > MAX_MODULUS:
            raise ValueError(f"p^k = {self.p}^{self.k} exceeds desk-scale bound 2^31")

    @property
    def q(self) -> int:
        return self.p**self.k

    def __str__(self):
        return f"Z/{self.p}^{self.k}"

    def __call__(self, value: int) -> int:
        return int(value) % self.q

    def valuation(self, s: int) -> int:
        """Largest ``a <= k`` with ``p**a`` dividing the canonical representative."""
        s = self(s)
        if s == 0:
            return self.k
        v = 0
        while s % self.p == 0:
            s //= self.p
            v += 1
        return v

    def is_unit(self, s: int) -> bool:
        return self(s) % self.p != 0

    def invert_unit(self, s: int) -> int:
        s = self(s)
        if s % self.p == 0:
            raise NotAUnit(f"{s} has valuation {self.valuation(s)} in {self}")
        return pow(s, -1, self.q)

    def matrix(self, data, shape: tuple[int, int] | None = None) -> np.ndarray:
        """Canonical int64 matrix from nested sequences (``shape`` fixes empty cases)."""
        arr = np.array(data, dtype=object)
        if shape is not None:
            arr = arr.reshape(shape)
        elif arr.ndim != 2:
            if arr.size == 0:
                arr = arr.reshape(0, 0)
            else:
                raise ValueError("matrix data must be two-dimensional")
        out = np.zeros(arr.shape, dtype=np.int64)
        if arr.size:
            out[...] = np.vectorize(lambda x: int(x) % self.q, otypes=[np.int64])(arr)
        return out

    def valuations(self, A: np.ndarray) -> np.ndarray:
        """Elementwise valuation of a canonical matrix."""
        A = np.asarray(A, dtype=np.int64)
        v = np.zeros(A.shape, dtype=np.int64)
        pa = 1
        for _ in range(self.k):
            pa *= self.p
            v += A % pa == 0
        return v


def matmul_mod(A: np.ndarray, B: np.ndarray, q: int) -> np.ndarray:
    """Matrix product reduced mod ``q`` without int64 overflow."""
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    inner = A.shape[1]
    if inner == 0:
        return np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    bound = (q - 1) ** 2 * inner
    if bound < 2**53:
        # exact in double precision, and BLAS is far faster than integer matmul
        return (A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % q
    if bound < 2**63:
        return (A @ B) % q
    return _matmul_mod_loop(A, B, q)


@njit(cache=True)
def _matmul_mod_loop(A, B, q):
    r, m = A.shape
    c = B.shape[1]
    out = np.zeros((r, c), dtype=np.int64)
    for i in range(r):
        for l in range(m):
            a = A[i, l]
            if a == 0:
                continue
            for j in range(c):
                out[i, j] = (out[i, j] + a * B[l, j]) % q
    return out


@njit(cache=True)
def _inverse_mod(a, q):
    g, x, g1, x1 = a, 1, q, 0
    while g1 != 0:
        t = g // g1
        g, g1 = g1, g - t * g1
        x, x1 = x1, x - t * x1
    return x % q


@njit(cache=True)
def _valuation(x, p, k):
    if x == 0:
        return k
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@njit(cache=True)
def _snf_kernel(W, p, k, q, U, Uinv, V, track):
    """In-place elimination of ``W``; returns the diagonal valuation exponents.

    With ``track`` set, ``U``, ``Uinv`` and ``V`` are updated so that
    ``U @ W_original @ V`` equals the final ``W`` and ``Uinv = U^-1``.
    """
    r, c = W.shape
    m = min(r, c)
    exps = np.full(m, k, dtype=np.int64)
    for t in range(m):
        best = k
        bi = -1
        bj = -1
        for i in range(t, r):
            for j in range(t, c):
                x = W[i, j]
                if x != 0:
                    v = _valuation(x, p, k)
                    if v < best:
                        best = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if best == 0:
                break
        if bi < 0:
            break
        if bi != t:
            for j in range(c):
                W[t, j], W[bi, j] = W[bi, j], W[t, j]
            if track:
                for j in range(r):
                    U[t, j], U[bi, j] = U[bi, j], U[t, j]
                    Uinv[j, t], Uinv[j, bi] = Uinv[j, bi], Uinv[j, t]
        if bj != t:
            for i in range(r):
                W[i, t], W[i, bj] = W[i, bj], W[i, t]
            if track:
                for i in range(c):
                    V[i, t], V[i, bj] = V[i, bj], V[i, t]
        pk = 1
        for _ in range(best):
            pk *= p
        w = W[t, t] // pk
        inv = _inverse_mod(w, q)
        for j in range(t, c):
            W[t, j] = (W[t, j] * inv) % q
        if track:
            for j in range(r):
                U[t, j] = (U[t, j] * inv) % q
                Uinv[j, t] = (Uinv[j, t] * w) % q
        for i in range(t + 1, r):
            x = W[i, t]
            if x == 0:
                continue
            mult = x // pk
            for j in range(t, c):
                W[i, j] = (W[i, j] - mult * W[t, j]) % q
            if track:
                for j in range(r):
                    U[i, j] = (U[i, j] - mult * U[t, j]) % q
                    Uinv[j, t] = (Uinv[j, t] + mult * Uinv[j, i]) % q
        for j in range(t + 1, c):
            x = W[t, j]
            if x == 0:
                continue
            mult = x // pk
            W[t, j] = 0
            if track:
                for i in range(c):
                    V[i, j] = (V[i, j] - mult * V[i, t]) % q
        exps[t] = best
    return exps


@dataclass(frozen=True)
class SNFResult:
    """``U @ A @ V == diagonal()`` with ``exponents`` non-decreasing.

    An exponent equal to ``k`` stands for a zero diagonal entry.
    """

    ring: CoeffRing
    shape: tuple[int, int]
    exponents: tuple[int, ...]
    U: np.ndarray
    V: np.ndarray
    U_inv: np.ndarray

    def diagonal(self) -> np.ndarray:
        D = np.zeros(self.shape, dtype=np.int64)
        for i, a in enumerate(self.exponents):
            D[i, i] = self.ring.p**a % self.ring.q
        return D


def smith_normal_form(ring: CoeffRing, A) -> SNFResult:
    A = _as_array(ring, A)
    r, c = A.shape
    U = np.eye(r, dtype=np.int64)
    Uinv = np.eye(r, dtype=np.int64)
    V = np.eye(c, dtype=np.int64)
    if r == 0 or c == 0:
        return SNFResult(ring, (r, c), (), U, V, Uinv)
    W = A.copy()
    exps = _snf_kernel(W, ring.p, ring.k, ring.q, U, Uinv, V, True)
    return SNFResult(ring, (r, c), tuple(int(a) for a in exps), U, V, Uinv)


_EMPTY = np.zeros((0, 0), dtype=np.int64)


def snf_exponents(ring: CoeffRing, A) -> tuple[int, ...]:
    """Diagonal exponents only; skips the transforms."""
    A = _as_array(ring, A)
    if A.shape[0] == 0 or A.shape[1] == 0:
        return ()
    exps = _snf_kernel(A.copy(), ring.p, ring.k, ring.q, _EMPTY, _EMPTY, _EMPTY, False)
    return tuple(int(a) for a in exps)


def image_length(ring: CoeffRing, A) -> int:
    """Length of the column span of ``A`` inside ``(Z/p^k)^rows``."""
    A = _as_array(ring, A)
    if A.size == 0:
        return 0
    # zero rows and columns do not change the span
    A = A[np.any(A != 0, axis=1)][:, np.any(A != 0, axis=0)]
    return sum(ring.k - a for a in snf_exponents(ring, A))


def kernel_basis(ring: CoeffRing, A) -> np.ndarray:
    """Columns generating ``{v : A v = 0}`` in ``(Z/p^k)^cols``."""
    A = _as_array(ring, A)
    r, c = A.shape
    snf = smith_normal_form(ring, A)
    cols = []
    for j in range(c):
        a = snf.exponents[j] if j < len(snf.exponents) else ring.k
        if a == 0:
            continue
        cols.append(snf.V[:, j] * (ring.p ** (ring.k - a) % ring.q) % ring.q)
    if not cols:
        return np.zeros((c, 0), dtype=np.int64)
    return np.stack(cols, axis=1)


def is_invertible(ring: CoeffRing, A) -> bool:
    A = _as_array(ring, A)
    if A.shape[0] != A.shape[1]:
        return False
    return all(a == 0 for a in snf_exponents(ring, A))


def _as_array(ring: CoeffRing, A) -> np.ndarray:
    if isinstance(A, np.ndarray) and A.dtype == np.int64 and A.ndim == 2:
        return A % ring.q
    return ring.matrix(A)
