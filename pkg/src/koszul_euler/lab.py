"""Reproducible random action systems and a brute-force homology oracle.

The oracle shares no code with the Smith-form pipeline: it rebuilds the
Koszul differentials from the raw action matrices and measures every image
by enumerating the subgroup it generates.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np

from .coeff import CoeffRing, matmul_mod
from .finlength import FinModule, FinMorphism
from .koszul import ActionSystem

RNG_ALGORITHM = "numpy.PCG64"
DEFAULT_ORACLE_BOUND = 4096
# element cap for a single enumerated subgroup
DEFAULT_SUBGROUP_CAP = 1 << 22

SHAPES = ("elementary", "p-monomial")


class OracleBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    p_values: tuple[int, ...] = (2,)
    k_values: tuple[int, ...] = (2,)
    n_values: tuple[int, ...] = (1,)
    max_length: int = 16
    shapes: tuple[str, ...] = SHAPES
    # optional cap on |M| = p^length, e.g. to stay within the oracle bound
    max_order: int | None = None

    def __post_init__(self):
        for name in ("p_values", "k_values", "n_values", "shapes"):
            val = getattr(self, name)
            if isinstance(val, (int, str)):
                val = (val,)
            object.__setattr__(self, name, tuple(val))
            if not getattr(self, name):
                raise ValueError(f"{name} is empty")
        if self.max_length < 0:
            raise ValueError("max_length must be >= 0")
        for s in self.shapes:
            if s not in SHAPES:
                raise ValueError(f"unknown shape {s!r}")
        if min(self.n_values) < 1:
            raise ValueError("n must be >= 1")

    def provenance(self) -> dict:
        return {
            "rng": RNG_ALGORITHM,
            "seed": self.seed,
            "p": list(self.p_values),
            "k": list(self.k_values),
            "n": list(self.n_values),
            "max_length": self.max_length,
            "shapes": list(self.shapes),
            "max_order": self.max_order,
        }


def generate(spec: GeneratorSpec, count: int | None = None):
    """Yield action systems; the i-th one depends only on ``(seed, i)``."""
    index = 0
    while count is None or index < count:
        yield instance_at(spec, index)
        index += 1


def instance_at(spec: GeneratorSpec, index: int) -> ActionSystem:
    """The ``index``-th system of the stream, without generating its predecessors."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(index,))))
    ring = CoeffRing(int(rng.choice(spec.p_values)), int(rng.choice(spec.k_values)))
    n = int(rng.choice(spec.n_values))
    shape = str(rng.choice(spec.shapes))
    if shape == "elementary":
        sys = random_elementary_system(rng, ring, n, spec.max_length, spec.max_order)
    else:
        sys, _ = random_p_monomial_system(rng, ring, n, spec.max_length, spec.max_order)
    sys.origin.update({"seed": spec.seed, "index": index, "rng": RNG_ALGORITHM})
    return sys


def _max_length_for(ring: CoeffRing, max_length: int, max_order: int | None) -> int:
    if max_order is None:
        return max_length
    L = 0
    while ring.p ** (L + 1) <= max_order:
        L += 1
    return min(L, max_length)


def random_exponents(rng, ring: CoeffRing, length: int) -> list[int]:
    exps = []
    while length > 0:
        e = int(rng.integers(1, min(ring.k, length) + 1))
        exps.append(e)
        length -= e
    return exps


def random_nilpotent(rng, M: FinModule, density: float | None = None) -> np.ndarray:
    """An endomorphism that is strictly upper triangular modulo p."""
    ring = M.ring
    p, q, s = ring.p, ring.q, M.rank
    if density is None:
        density = float(rng.uniform(0.2, 1.0))
    N = rng.integers(0, q, size=(s, s), dtype=np.int64)
    N[np.tril_indices(s)] = N[np.tril_indices(s)] * p % q
    e = np.array(M.exponents, dtype=np.int64)
    shift = np.maximum(0, e[:, None] - e[None, :]) if s else np.zeros((0, 0), dtype=np.int64)
    N = N * (p**shift % q) % q
    N[rng.random((s, s)) > density] = 0
    return N


def random_elementary_system(rng, ring: CoeffRing, n: int, max_length: int, max_order: int | None = None):
    """Actions are polynomials in one nilpotent matrix plus p-multiples of the identity."""
    length = int(rng.integers(0, _max_length_for(ring, max_length, max_order) + 1))
    M = FinModule(ring, random_exponents(rng, ring, length))
    q, p = ring.q, ring.p
    N = random_nilpotent(rng, M)
    powers = [np.eye(M.rank, dtype=np.int64)]
    for _ in range(max(M.length(), 1)):
        powers.append(matmul_mod(powers[-1], N, q))
    degree = int(rng.integers(1, 4))
    actions = []
    for _ in range(n):
        A = (int(rng.integers(0, q)) * p % q) * powers[0] % q if rng.random() < 0.3 else np.zeros_like(powers[0])
        for d in range(1, min(degree, len(powers) - 1) + 1):
            c = int(rng.integers(0, q)) if rng.random() < 0.7 else 0
            A = (A + c * powers[d]) % q
        actions.append(FinMorphism(M, M, A))
    return ActionSystem(M, tuple(actions), {"shape": "elementary"})


def standard_monomials(generators, nvars: int):
    """Monomials in the box cut out by the pure powers with unit coefficient."""
    bounds = [None] * nvars
    for a, beta in generators:
        beta = tuple(beta)
        if a != 0:
            continue
        if not any(beta):
            return []
        support = [i for i, b in enumerate(beta) if b]
        if len(support) == 1:
            i = support[0]
            bounds[i] = beta[i] if bounds[i] is None else min(bounds[i], beta[i])
    if any(b is None for b in bounds):
        raise ValueError("p-monomial ideal is not cofinite: some variable has no pure power with unit coefficient")
    return [alpha for alpha in product(*(range(b) for b in bounds))]


def monomial_coefficient_exponent(alpha, generators, k: int) -> int:
    """The quotient has a summand ``Z/p^e`` at ``X^alpha``; 0 means alpha is in J."""
    c = k
    for a, beta in generators:
        if all(b <= x for b, x in zip(beta, alpha)):
            c = min(c, a)
    return c


def combinatorial_length(generators, k: int, nvars: int | None = None) -> int:
    """λ(Z/p^k[X]/J) for J generated by terms ``p^a X^beta`` given as ``(a, beta)``."""
    generators = [(int(a), tuple(beta)) for a, beta in generators]
    if nvars is None:
        nvars = len(generators[0][1]) if generators else 0
    return sum(monomial_coefficient_exponent(alpha, generators, k) for alpha in standard_monomials(generators, nvars))


def p_monomial_system(ring: CoeffRing, nvars: int, generators) -> ActionSystem:
    """``Z/p^k[X_1..X_n]/J`` with multiplication by the variables."""
    generators = [(int(a), tuple(int(b) for b in beta)) for a, beta in generators]
    basis = []
    exps = []
    for alpha in standard_monomials(generators, nvars):
        e = monomial_coefficient_exponent(alpha, generators, ring.k)
        if e > 0:
            basis.append(alpha)
            exps.append(e)
    index = {alpha: i for i, alpha in enumerate(basis)}
    M = FinModule(ring, exps)
    actions = []
    for v in range(nvars):
        A = np.zeros((M.rank, M.rank), dtype=np.int64)
        for j, alpha in enumerate(basis):
            target = alpha[:v] + (alpha[v] + 1,) + alpha[v + 1 :]
            if target in index:
                A[index[target], j] = 1
        actions.append(FinMorphism(M, M, A))
    origin = {"shape": "p-monomial", "generators": [{"pexp": a, "monomial": list(b)} for a, b in generators], "basis": [list(a) for a in basis]}
    return ActionSystem(M, tuple(actions), origin)


def random_p_monomial_system(rng, ring: CoeffRing, n: int, max_length: int, max_order: int | None = None):
    limit = _max_length_for(ring, max_length, max_order)
    if limit == 0:
        gens = [(0, (0,) * n)]
        return p_monomial_system(ring, n, gens), gens
    while True:
        bounds = [int(rng.integers(1, 5)) for _ in range(n)]
        gens = [(0, tuple(b if j == i else 0 for j in range(n))) for i, b in enumerate(bounds)]
        for _ in range(int(rng.integers(0, 4))):
            if ring.k == 1:
                break
            a = int(rng.integers(1, ring.k))
            beta = tuple(int(rng.integers(0, b)) for b in bounds)
            gens.append((a, beta))
        if combinatorial_length(gens, ring.k, n) <= limit:
            return p_monomial_system(ring, n, gens), gens


# --- brute-force oracle -----------------------------------------------------


class _Group:
    """A finite abelian group ``⊕ Z/radix_i`` with elements encoded as integers."""

    def __init__(self, radices):
        self.radices = np.array(radices, dtype=np.int64)
        order = 1
        for r in radices:
            order *= int(r)
        self.order = order
        if order >= 2**62:
            raise OracleBoundExceeded(f"group of order {order} is too large to encode")
        self.place = np.ones(len(radices), dtype=np.int64)
        for i in range(len(radices) - 2, -1, -1):
            self.place[i] = self.place[i + 1] * self.radices[i + 1]

    def encode(self, digits: np.ndarray) -> np.ndarray:
        return (digits % self.radices) @ self.place if len(self.radices) else np.zeros(len(digits), dtype=np.int64)

    def decode(self, codes: np.ndarray) -> np.ndarray:
        return (codes[:, None] // self.place[None, :]) % self.radices[None, :]

    def subgroup_order(self, generators: np.ndarray, cap: int) -> int:
        """Enumerate the subgroup generated by the rows of ``generators``."""
        elems = np.zeros(1, dtype=np.int64)
        for g in generators:
            g = g % self.radices
            if not np.any(g):
                continue
            # smallest m with m*g already inside the current subgroup
            multiples = [np.zeros_like(g)]
            m = 1
            while True:
                mg = (g * m) % self.radices
                code = int(mg @ self.place)
                pos = np.searchsorted(elems, code)
                if pos < len(elems) and elems[pos] == code:
                    break
                multiples.append(mg)
                m += 1
            if len(elems) * len(multiples) > cap:
                raise OracleBoundExceeded(f"subgroup exceeds {cap} elements")
            digits = self.decode(elems)
            parts = [self.encode(digits + c[None, :]) for c in multiples]
            elems = np.sort(np.concatenate(parts))
        return len(elems)


def _log_p(order: int, p: int) -> int:
    e = 0
    while order > 1:
        if order % p:
            raise AssertionError(f"{order} is not a power of {p}")
        order //= p
        e += 1
    return e


@dataclass(frozen=True)
class OracleResult:
    homology_lengths: tuple[int, ...]
    term_orders: tuple[int, ...]
    image_orders: tuple[int, ...]


def oracle_homology(sys: ActionSystem, bound: int = DEFAULT_ORACLE_BOUND, cap: int = DEFAULT_SUBGROUP_CAP) -> OracleResult:
    """λ(H_i(x, M)) by explicit subgroup enumeration; needs ``|M| <= bound``."""
    ring = sys.ring
    p, q = ring.p, ring.q
    moduli = [p**e for e in sys.module.exponents]
    order_M = 1
    for m in moduli:
        order_M *= m
    if order_M > bound:
        raise OracleBoundExceeded(f"|M| = {order_M} exceeds oracle bound {bound}")
    n, s = sys.n, len(moduli)
    mats = [np.array(x.matrix, dtype=np.int64) for x in sys.actions]

    def act(i, v):
        return (mats[i] @ v) % q

    # image of d_i: K_i -> K_{i-1} generated by e_S ⊗ g for S of size i, g a generator of M
    term_orders = [order_M ** comb(n, i) for i in range(n + 1)]
    image_orders = [1] * (n + 2)
    for i in range(1, n + 1):
        big = list(combinations(range(n), i))
        small = list(combinations(range(n), i - 1))
        pos = {T: r for r, T in enumerate(small)}
        G = _Group(moduli * len(small))
        gens = []
        for S in big:
            for g in range(s):
                unit = np.zeros(s, dtype=np.int64)
                unit[g] = 1
                vec = np.zeros(s * len(small), dtype=np.int64)
                for t, x in enumerate(S):
                    sign = -1 if t % 2 else 1
                    T = tuple(y for y in S if y != x)
                    r = pos[T]
                    vec[r * s : (r + 1) * s] += sign * act(x, unit)
                gens.append(vec)
        image_orders[i] = G.subgroup_order(np.array(gens, dtype=np.int64).reshape(len(gens), s * len(small)), cap)
    lengths = []
    for i in range(n + 1):
        # |ker d_i| = |K_i| / |im d_i|
        kernel_len = _log_p(term_orders[i], p) - _log_p(image_orders[i], p) if i > 0 else _log_p(term_orders[0], p)
        lengths.append(kernel_len - _log_p(image_orders[i + 1], p))
    return OracleResult(tuple(lengths), tuple(term_orders), tuple(image_orders[1 : n + 1]))


def enumerate_module_length(sys: ActionSystem) -> int:
    """log_p of the number of elements, counted one by one."""
    count = 0
    for _ in product(*(range(sys.ring.p**e) for e in sys.module.exponents)):
        count += 1
    return _log_p(count, sys.ring.p)


def random_unimodular(rng, ring: CoeffRing, n: int) -> np.ndarray:
    """Random invertible n x n matrix: unit diagonal times elementary operations."""
    q, p = ring.q, ring.p
    U = np.eye(n, dtype=np.int64)
    for i in range(n):
        u = int(rng.integers(0, q))
        while u % p == 0:
            u = int(rng.integers(0, q))
        U[i, i] = u
    for _ in range(3 * n):
        i, j = (int(v) for v in rng.integers(0, n, size=2))
        if i == j:
            continue
        c = int(rng.integers(0, q))
        U[i] = (U[i] + c * U[j]) % q
    return U[rng.permutation(n)]
