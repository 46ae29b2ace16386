"""Finite-length modules over Z/p^k in elementary-divisor form.

A module ``⊕ Z/p^{e_i}`` is handled through its embedding into the free
module ``(Z/p^k)^s`` sending the i-th generator to ``p^{k-e_i}`` times the
i-th basis vector.  Under that embedding the image of a morphism is the
column span of ``diag(p^{k-f}) @ matrix`` and its length is read off a Smith
normal form, so no element is ever enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coeff import CoeffRing, image_length, kernel_basis, matmul_mod, smith_normal_form


class NotAComplex(ValueError):
    pass


class IllDefinedMorphism(ValueError):
    pass


@dataclass(frozen=True)
class FinModule:
    ring: CoeffRing
    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        for e in self.exponents:
            if not 1 <= e <= self.ring.k:
                raise ValueError(f"exponent {e} outside [1, {self.ring.k}]")

    @property
    def rank(self) -> int:
        """Number of cyclic summands."""
        return len(self.exponents)

    def length(self) -> int:
        return sum(self.exponents)

    def order(self) -> int:
        return self.ring.p ** self.length()

    def is_zero(self) -> bool:
        return not self.exponents

    def iso_type(self) -> IsoType:
        return IsoType(self.exponents)

    def embedding(self) -> np.ndarray:
        """Diagonal ``p^{k-e_i}``: generator coordinates to free coordinates."""
        p, k = self.ring.p, self.ring.k
        return np.diag(np.array([p ** (k - e) for e in self.exponents], dtype=np.int64)).reshape(
            self.rank, self.rank
        )

    def moduli(self) -> np.ndarray:
        return np.array([self.ring.p**e for e in self.exponents], dtype=np.int64)

    def __str__(self):
        if not self.exponents:
            return "0"
        return " ⊕ ".join(f"Z/{self.ring.p}^{e}" for e in self.exponents)


def zero_module(ring: CoeffRing) -> FinModule:
    return FinModule(ring, ())


def direct_sum(modules) -> FinModule:
    modules = list(modules)
    if not modules:
        raise ValueError("direct_sum needs at least one module to fix the ring")
    exps: list[int] = []
    for M in modules:
        exps.extend(M.exponents)
    return FinModule(modules[0].ring, tuple(exps))


@dataclass(frozen=True)
class IsoType:
    """Canonical form of a finite-length module: exponents in non-increasing order."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(sorted((int(e) for e in self.exponents), reverse=True)))

    def length(self) -> int:
        return sum(self.exponents)


@dataclass(frozen=True, eq=False)
class FinMorphism:
    """A map ``source -> target`` given by its matrix on the cyclic generators.

    Rows of the matrix are stored reduced modulo the order of the matching
    target generator, so equal maps have equal matrices.
    """

    source: FinModule
    target: FinModule
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        ring = self.source.ring
        if self.target.ring != ring:
            raise ValueError("source and target live over different rings")
        A = np.asarray(self.matrix, dtype=np.int64).reshape(self.target.rank, self.source.rank)
        A = A % self.target.moduli()[:, None] if A.size else A.copy()
        e = np.array(self.source.exponents, dtype=np.int64)
        f = np.array(self.target.exponents, dtype=np.int64)
        need = np.maximum(0, f[:, None] - e[None, :])
        have = ring.valuations(A)
        bad = np.argwhere(have < need)
        if bad.size:
            i, j = (int(x) for x in bad[0])
            raise IllDefinedMorphism(
                f"entry ({i},{j}) = {A[i, j]} has valuation {have[i, j]} < {need[i, j]}: "
                f"generator of order p^{e[j]} cannot map onto a multiple of a generator of order p^{f[i]}"
            )
        A.setflags(write=False)
        object.__setattr__(self, "matrix", A)

    @classmethod
    def _trusted(cls, source: FinModule, target: FinModule, matrix: np.ndarray) -> FinMorphism:
        # for maps built from already-validated ones (sums, composites, blocks)
        f = object.__new__(cls)
        A = matrix % target.moduli()[:, None] if matrix.size else matrix.reshape(target.rank, source.rank)
        A.setflags(write=False)
        object.__setattr__(f, "source", source)
        object.__setattr__(f, "target", target)
        object.__setattr__(f, "matrix", A)
        return f

    @property
    def ring(self) -> CoeffRing:
        return self.source.ring

    def __eq__(self, other):
        if not isinstance(other, FinMorphism):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and np.array_equal(self.matrix, other.matrix)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def __add__(self, other: FinMorphism) -> FinMorphism:
        _same_shape(self, other)
        return FinMorphism._trusted(self.source, self.target, (self.matrix + other.matrix) % self.ring.q)

    def __neg__(self) -> FinMorphism:
        return FinMorphism._trusted(self.source, self.target, (-self.matrix) % self.ring.q)

    def __sub__(self, other: FinMorphism) -> FinMorphism:
        return self + (-other)

    def scale(self, c: int) -> FinMorphism:
        return FinMorphism._trusted(self.source, self.target, self.matrix * (int(c) % self.ring.q) % self.ring.q)

    def __matmul__(self, other: FinMorphism) -> FinMorphism:
        return compose(self, other)

    def image_length(self) -> int:
        scale = (self.ring.q // self.target.moduli())[:, None]
        embedded = self.matrix * scale % self.ring.q
        return image_length(self.ring, embedded)

    def kernel_length(self) -> int:
        return self.source.length() - self.image_length()

    def __repr__(self):
        return f"FinMorphism({self.source} -> {self.target}, {self.matrix.tolist()})"


def _same_shape(f: FinMorphism, g: FinMorphism):
    if f.source != g.source or f.target != g.target:
        raise ValueError("morphisms have different source/target")


def identity(M: FinModule) -> FinMorphism:
    return FinMorphism(M, M, np.eye(M.rank, dtype=np.int64))


def zero_map(source: FinModule, target: FinModule) -> FinMorphism:
    return FinMorphism(source, target, np.zeros((target.rank, source.rank), dtype=np.int64))


def compose(f: FinMorphism, g: FinMorphism) -> FinMorphism:
    """``f ∘ g``."""
    if g.target != f.source:
        raise ValueError(f"cannot compose: {g.target} != {f.source}")
    return FinMorphism._trusted(g.source, f.target, matmul_mod(f.matrix, g.matrix, f.ring.q))


def block_morphism(sources, targets, blocks) -> FinMorphism:
    """Assemble ``⊕ sources -> ⊕ targets`` from a dict ``{(row, col): FinMorphism}``."""
    src = direct_sum(sources)
    tgt = direct_sum(targets)
    r_off = np.cumsum([0] + [M.rank for M in targets])
    c_off = np.cumsum([0] + [M.rank for M in sources])
    A = np.zeros((tgt.rank, src.rank), dtype=np.int64)
    for (i, j), f in blocks.items():
        if f.source != sources[j] or f.target != targets[i]:
            raise ValueError(f"block ({i},{j}) has the wrong shape")
        A[r_off[i] : r_off[i + 1], c_off[j] : c_off[j + 1]] = f.matrix
    return FinMorphism._trusted(src, tgt, A)


def _check_complex(d_in: FinMorphism, d_out: FinMorphism):
    if d_in.target != d_out.source:
        raise NotAComplex(f"d_in lands in {d_in.target} but d_out starts at {d_out.source}")
    if not compose(d_out, d_in).is_zero():
        raise NotAComplex("d_out ∘ d_in is not zero")


def homology_length_at(d_in: FinMorphism, d_out: FinMorphism) -> int:
    """λ(ker d_out / im d_in)."""
    _check_complex(d_in, d_out)
    return d_in.target.length() - d_out.image_length() - d_in.image_length()


def iso_type(d_in: FinMorphism, d_out: FinMorphism) -> IsoType:
    """Elementary divisors of ``ker d_out / im d_in``.

    Both submodules are lifted to the free cover ``F = (Z/p^k)^s`` of the
    middle module (``K`` = preimage of ker, ``I`` = im + relations), and the
    number of summands of exponent > j is ``λ(p^j Q) - λ(p^{j+1} Q)`` with
    ``λ(p^j Q) = λ(p^j K + I) - λ(I)``.
    """
    _check_complex(d_in, d_out)
    M = d_in.target
    ring = M.ring
    p, k, q = ring.p, ring.k, ring.q
    s = M.rank
    if s == 0:
        return IsoType(())
    relations = np.diag(M.moduli() % q).reshape(s, s)
    tgt = d_out.target
    target_relations = np.diag(tgt.moduli() % q).reshape(tgt.rank, tgt.rank)
    # preimage of ker d_out in F: kernel of [A | relations of target], first block
    aug = np.concatenate([d_out.matrix, target_relations], axis=1)
    K = kernel_basis(ring, aug)[:s]
    I = np.concatenate([d_in.matrix % q, relations], axis=1)
    base = image_length(ring, I)
    layers = []
    for j in range(k + 1):
        pj = p**j % q
        layers.append(image_length(ring, np.concatenate([K * pj % q, I], axis=1)) - base)
    layers.append(0)
    exps = []
    for j in range(k):
        count = (layers[j] - layers[j + 1]) - (layers[j + 1] - layers[j + 2])
        exps.extend([j + 1] * count)
    return IsoType(exps)


def cokernel_module(ring: CoeffRing, relations: np.ndarray):
    """Normalize ``(Z/p^k)^t / colspan(relations)`` to elementary-divisor form.

    Returns ``(module, to_coords, from_coords)``: ``to_coords`` (s x t) sends
    free vectors to generator coordinates, ``from_coords`` (t x s) lifts
    generators back to free vectors.
    """
    t = relations.shape[0]
    snf = smith_normal_form(ring, relations)
    keep, exps = [], []
    for i in range(t):
        # diagonal entry p^a leaves Z/p^a; rows past the diagonal stay free
        a = snf.exponents[i] if i < len(snf.exponents) else ring.k
        if a > 0:
            keep.append(i)
            exps.append(a)
    M = FinModule(ring, exps)
    to_coords = snf.U[keep, :] % M.moduli()[:, None] if keep else np.zeros((0, t), dtype=np.int64)
    from_coords = snf.U_inv[:, keep] if keep else np.zeros((t, 0), dtype=np.int64)
    return M, to_coords, from_coords


def image_module(ring: CoeffRing, generators: np.ndarray):
    """Normalize the column span of ``generators`` inside ``(Z/p^k)^t``.

    Returns ``(module, to_coords, from_coords)`` where ``to_coords`` is a
    callable sending free vectors lying in the span (columns of a matrix) to
    generator coordinates, and ``from_coords`` (t x s) embeds the generators.
    """
    p, k, q = ring.p, ring.k, ring.q
    t = generators.shape[0]
    snf = smith_normal_form(ring, generators)
    keep = [i for i, a in enumerate(snf.exponents) if a < k]
    M = FinModule(ring, [k - snf.exponents[i] for i in keep])
    scale = np.array([p ** snf.exponents[i] for i in keep], dtype=np.int64)
    from_coords = snf.U_inv[:, keep] * scale[None, :] % q if keep else np.zeros((t, 0), dtype=np.int64)
    U_keep = snf.U[keep, :]
    U_rest = np.delete(snf.U, keep, axis=0)

    def to_coords(W: np.ndarray) -> np.ndarray:
        W = np.asarray(W, dtype=np.int64)
        if not keep:
            return np.zeros((0, W.shape[1]), dtype=np.int64)
        Y = matmul_mod(U_keep, W, q)
        if np.any(Y % scale[:, None]) or np.any(matmul_mod(U_rest, W, q)):
            raise ValueError("vector does not lie in the submodule")
        return (Y // scale[:, None]) % M.moduli()[:, None]

    return M, to_coords, from_coords
