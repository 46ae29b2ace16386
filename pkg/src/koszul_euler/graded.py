"""Graded modules over B = Z/p^k[X_1..X_m] and their degree-strand Koszul homology.

Each degree-d strand of a finitely generated graded module is a finite
Z/p^k-module, so Koszul homology can be computed strand by strand with the
finite-length machinery.  Polynomials are dicts ``{exponent tuple: coeff}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, factorial

import numpy as np

from .coeff import CoeffRing
from .finlength import (
    FinModule,
    FinMorphism,
    cokernel_module,
    direct_sum,
    homology_length_at,
    image_module,
    zero_map,
    zero_module,
)
from .coeff import matmul_mod
from .koszul import Verdict, koszul_differential


class InhomogeneousError(ValueError):
    pass


class DegreeBudgetExceeded(RuntimeError):
    pass


# --- polynomials --------------------------------------------------------------


def poly(ring: CoeffRing, terms) -> dict:
    """Canonical polynomial from ``{exponents: coeff}`` or ``[(coeff, exponents), ...]``."""
    if isinstance(terms, dict):
        items = terms.items()
    else:
        items = ((tuple(e), c) for c, e in terms)
    out: dict = {}
    for e, c in items:
        e = tuple(int(x) for x in e)
        out[e] = (out.get(e, 0) + int(c)) % ring.q
    return {e: c for e, c in out.items() if c}


def variable(nvars: int, i: int, power: int = 1) -> dict:
    return {tuple(power if j == i else 0 for j in range(nvars)): 1}


def constant(nvars: int, c: int) -> dict:
    return {(0,) * nvars: c} if c else {}


def poly_degree(f: dict):
    """Total degree of a homogeneous polynomial; ``None`` for zero."""
    degs = {sum(e) for e in f}
    if len(degs) > 1:
        raise InhomogeneousError(f"polynomial {f} is not homogeneous")
    return degs.pop() if degs else None


def poly_mul(ring: CoeffRing, f: dict, g: dict) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = (out.get(e, 0) + c1 * c2) % ring.q
    return {e: c for e, c in out.items() if c}


def poly_pow(ring: CoeffRing, f: dict, t: int) -> dict:
    nvars = len(next(iter(f))) if f else 0
    out = constant(nvars, 1) if nvars else {(): 1}
    for _ in range(t):
        out = poly_mul(ring, out, f)
    return out


@lru_cache(maxsize=None)
def monomials(nvars: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors of total degree ``d``, lexicographically decreasing."""
    if d < 0:
        return ()
    if nvars == 0:
        return ((),) if d == 0 else ()
    out = []
    for first in range(d, -1, -1):
        for rest in monomials(nvars - 1, d - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, d: int) -> dict:
    return {m: i for i, m in enumerate(monomials(nvars, d))}


# --- graded modules -------------------------------------------------------------


@dataclass(frozen=True)
class Strand:
    """Degree-d piece: a finite module together with its coordinates in a free ambient.

    ``ambient`` lists the free basis as ``(row, monomial)`` pairs.
    ``to_coords`` maps ambient column vectors of elements to generator
    coordinates; ``from_coords`` lifts generators to ambient vectors.
    """

    degree: int
    module: FinModule
    ambient: tuple
    to_coords: object
    from_coords: np.ndarray


class GradedModule:
    """Common strand/multiplication machinery for modules inside or over free B-modules."""

    ring: CoeffRing
    nvars: int
    row_degrees: tuple[int, ...]

    def __init__(self):
        self._strands: dict[int, Strand] = {}

    def ambient_basis(self, d: int) -> tuple:
        return tuple((r, m) for r, deg in enumerate(self.row_degrees) for m in monomials(self.nvars, d - deg))

    def ambient_index(self, d: int) -> dict:
        return {b: i for i, b in enumerate(self.ambient_basis(d))}

    def min_degree(self) -> int:
        return min(self.row_degrees) if self.row_degrees else 0

    def strand_data(self, d: int) -> Strand:
        if d not in self._strands:
            self._strands[d] = self._build_strand(d)
        return self._strands[d]

    def strand(self, d: int) -> FinModule:
        return self.strand_data(d).module

    def _build_strand(self, d: int) -> Strand:
        raise NotImplementedError

    def ambient_multiplication(self, f: dict, d: int) -> np.ndarray:
        """Matrix of multiplication by homogeneous ``f`` from ambient degree d to d + deg f."""
        df = poly_degree(f) or 0
        src = self.ambient_basis(d)
        tgt = self.ambient_index(d + df)
        A = np.zeros((len(tgt), len(src)), dtype=np.int64)
        for j, (r, m) in enumerate(src):
            for e, c in f.items():
                key = (r, tuple(a + b for a, b in zip(m, e)))
                i = tgt[key]
                A[i, j] = (A[i, j] + c) % self.ring.q
        return A

    def multiply(self, f: dict, d: int) -> FinMorphism:
        """Multiplication by ``f`` as a morphism of strands ``M_d -> M_{d + deg f}``."""
        df = poly_degree(f) or 0
        s, t = self.strand_data(d), self.strand_data(d + df)
        if s.module.is_zero() or t.module.is_zero():
            return zero_map(s.module, t.module)
        lifted = matmul_mod(self.ambient_multiplication(f, d), s.from_coords, self.ring.q)
        return FinMorphism(s.module, t.module, t.to_coords(lifted))

    def degree_bound_hint(self) -> int:
        return max(self.row_degrees, default=0)


class GradedPresentation(GradedModule):
    """Cokernel of a homogeneous matrix ``⊕_j B(-col_j) -> ⊕_i B(-row_i)``.

    ``entries[i][j]`` is a polynomial homogeneous of degree
    ``col_degrees[j] - row_degrees[i]`` (or zero).
    """

    def __init__(self, ring: CoeffRing, nvars: int, row_degrees, col_degrees=(), entries=None):
        super().__init__()
        self.ring = ring
        self.nvars = int(nvars)
        self.row_degrees = tuple(int(x) for x in row_degrees)
        self.col_degrees = tuple(int(x) for x in col_degrees)
        if entries is None:
            entries = [[{} for _ in self.col_degrees] for _ in self.row_degrees]
        self.entries = tuple(tuple(poly(ring, f) for f in row) for row in entries)
        if len(self.entries) != len(self.row_degrees) or any(len(r) != len(self.col_degrees) for r in self.entries):
            raise ValueError("entries do not match the row/column degree lists")
        for i, row in enumerate(self.entries):
            for j, f in enumerate(row):
                if any(len(e) != self.nvars for e in f):
                    raise ValueError(f"entry ({i},{j}) has the wrong number of variables")
                want = self.col_degrees[j] - self.row_degrees[i]
                for e in f:
                    if sum(e) != want:
                        raise InhomogeneousError(
                            f"entry ({i},{j}) has a term of degree {sum(e)}, expected {want}"
                        )

    @classmethod
    def free(cls, ring: CoeffRing, nvars: int, row_degrees=(0,)) -> GradedPresentation:
        return cls(ring, nvars, row_degrees)

    @classmethod
    def quotient(cls, ring: CoeffRing, nvars: int, generators) -> GradedPresentation:
        """``B/J`` for an ideal J given by homogeneous generators."""
        gens = [poly(ring, g) for g in generators]
        gens = [g for g in gens if g]
        degs = [poly_degree(g) for g in gens]
        return cls(ring, nvars, (0,), degs, [gens])

    def relation_matrix(self, d: int) -> np.ndarray:
        index = self.ambient_index(d)
        cols = []
        for j, cd in enumerate(self.col_degrees):
            for beta in monomials(self.nvars, d - cd):
                v = np.zeros(len(index), dtype=np.int64)
                for i, f in enumerate(self.entries):
                    for e, c in f[j].items():
                        key = (i, tuple(a + b for a, b in zip(beta, e)))
                        v[index[key]] = (v[index[key]] + c) % self.ring.q
                cols.append(v)
        if not cols:
            return np.zeros((len(index), 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def _build_strand(self, d: int) -> Strand:
        R = self.relation_matrix(d)
        M, to_c, from_c = cokernel_module(self.ring, R)
        q = self.ring.q
        moduli = M.moduli()[:, None]

        def to_coords(W):
            return matmul_mod(to_c, W, q) % moduli if M.rank else np.zeros((0, W.shape[1]), dtype=np.int64)

        return Strand(d, M, self.ambient_basis(d), to_coords, from_c)

    def degree_bound_hint(self) -> int:
        return max(self.row_degrees + self.col_degrees, default=0)

    def is_monomial(self) -> bool:
        """Every column has exactly one nonzero entry and it is a single term."""
        for j in range(len(self.col_degrees)):
            nz = [self.entries[i][j] for i in range(len(self.row_degrees)) if self.entries[i][j]]
            if len(nz) > 1 or (nz and len(nz[0]) > 1):
                return False
        return True


class GradedIdeal(GradedModule):
    """A homogeneous ideal J ⊂ B with the grading induced from B."""

    def __init__(self, ring: CoeffRing, nvars: int, generators):
        super().__init__()
        self.ring = ring
        self.nvars = int(nvars)
        self.row_degrees = (0,)
        self.generators = tuple(g for g in (poly(ring, g) for g in generators) if g)
        self.generator_degrees = tuple(poly_degree(g) for g in self.generators)

    def generator_matrix(self, d: int) -> np.ndarray:
        index = self.ambient_index(d)
        cols = []
        for g, gd in zip(self.generators, self.generator_degrees):
            for beta in monomials(self.nvars, d - gd):
                v = np.zeros(len(index), dtype=np.int64)
                for e, c in g.items():
                    key = (0, tuple(a + b for a, b in zip(beta, e)))
                    v[index[key]] = (v[index[key]] + c) % self.ring.q
                cols.append(v)
        if not cols:
            return np.zeros((len(index), 0), dtype=np.int64)
        return np.stack(cols, axis=1)

    def _build_strand(self, d: int) -> Strand:
        M, to_c, from_c = image_module(self.ring, self.generator_matrix(d))
        return Strand(d, M, self.ambient_basis(d), to_c, from_c)

    def min_degree(self) -> int:
        return min(self.generator_degrees, default=0)

    def degree_bound_hint(self) -> int:
        return max(self.generator_degrees, default=0)

    def quotient(self) -> GradedPresentation:
        return GradedPresentation.quotient(self.ring, self.nvars, self.generators)


class TorsionModule(GradedModule):
    """A finite-length module sitting in degree 0, acted on by the variables.

    ``X_i`` acts by the given endomorphism; all structure maps have degree 0.
    """

    def __init__(self, module: FinModule, actions):
        super().__init__()
        self.ring = module.ring
        self.nvars = len(actions)
        self.row_degrees = (0,)
        self.module = module
        self.actions = tuple(actions)

    def strand(self, d: int) -> FinModule:
        return self.module if d == 0 else zero_module(self.ring)

    def strand_data(self, d: int) -> Strand:
        return Strand(d, self.strand(d), (), None, np.zeros((0, 0), dtype=np.int64))

    def multiply(self, f: dict, d: int) -> FinMorphism:
        """Polynomials act through the actions, ``X^a ↦ x_1^{a_1}...``; degree is ignored."""
        if d != 0:
            return zero_map(self.strand(d), self.strand(d))
        M = self.module
        acc = zero_map(M, M)
        for e, c in f.items():
            term = FinMorphism(M, M, np.eye(M.rank, dtype=np.int64))
            for i, a in enumerate(e):
                for _ in range(a):
                    term = self.actions[i] @ term
            acc = acc + term.scale(c)
        return acc

    def min_degree(self) -> int:
        return 0


# --- Koszul strands -------------------------------------------------------------


@dataclass(frozen=True)
class KoszulSequenceEntry:
    polynomial: dict
    degree: int

    @classmethod
    def of(cls, ring: CoeffRing, f, nvars: int | None = None) -> KoszulSequenceEntry:
        f = poly(ring, f)
        if not f:
            if nvars is None:
                raise ValueError("zero entry needs nvars")
            return cls({}, 1)
        d = poly_degree(f)
        if d == 0:
            c = next(iter(f.values()))
            if ring.valuation(c) == 0:
                raise ValueError(f"degree-0 entry {c} is a unit, not in the maximal homogeneous ideal")
        return cls(f, d)


def as_sequence(ring: CoeffRing, y, nvars: int | None = None) -> tuple[KoszulSequenceEntry, ...]:
    return tuple(e if isinstance(e, KoszulSequenceEntry) else KoszulSequenceEntry.of(ring, e, nvars) for e in y)


def default_window(degrees) -> int:
    return max(degrees, default=0) + 2


def default_degree_bound(M: GradedModule, degrees) -> int:
    W = default_window(degrees)
    return M.degree_bound_hint() + len(degrees) * max(degrees, default=0) + 2 * W


@dataclass(frozen=True)
class StrandReport:
    """Per-degree homology lengths ``table[d][i] = λ(H_i(y, M)_d)``."""

    degree_bound: int
    window: int
    min_degree: int
    n: int
    table: dict = field(repr=False)
    term_lengths: dict = field(repr=False)

    @property
    def totals(self) -> tuple[int, ...]:
        return tuple(sum(row[i] for row in self.table.values()) for i in range(self.n + 1))

    @property
    def stabilized(self) -> bool:
        tail = [d for d in self.table if d > self.degree_bound - self.window]
        return all(not any(self.table[d]) for d in tail)

    @property
    def chis(self) -> tuple[int, ...]:
        tot = self.totals
        return tuple(sum((-1) ** (i - j) * tot[i] for i in range(j, self.n + 1)) for j in range(self.n + 1))

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "window": self.window,
            "stabilized": self.stabilized,
            "table": {str(d): list(row) for d, row in self.table.items()},
            "totals": list(self.totals),
            "chis": list(self.chis),
        }


def koszul_strand_complex(M: GradedModule, y, d: int):
    """Terms ``(K_i)_d`` and differentials for the sequence ``y`` in degree ``d``."""
    n = len(y)
    degs = [e.degree for e in y]

    def shift(S):
        return d - sum(degs[s] for s in S)

    terms = []
    for i in range(n + 1):
        subsets = list(combinations(range(n), i))
        terms.append(direct_sum([M.strand(shift(S)) for S in subsets]))
    diffs = [
        koszul_differential(
            n,
            i,
            lambda s, S: M.multiply(y[s].polynomial, shift(S)),
            lambda S: M.strand(shift(S)),
            lambda T: M.strand(shift(T)),
        )
        for i in range(1, n + 1)
    ]
    return terms, diffs


def strand_homology(M: GradedModule, y, d: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    terms, diffs = koszul_strand_complex(M, y, d)
    n = len(y)
    ring = M.ring
    zero = zero_module(ring)

    def dd(i):
        if i == 0:
            return zero_map(terms[0], zero)
        if i == n + 1:
            return zero_map(zero, terms[n])
        return diffs[i - 1]

    lengths = tuple(homology_length_at(dd(i + 1), dd(i)) for i in range(n + 1))
    return lengths, tuple(t.length() for t in terms)


def koszul_strand_profile(M: GradedModule, y, degree_bound: int | None = None, window: int | None = None) -> StrandReport:
    y = as_sequence(M.ring, y, M.nvars)
    degs = [e.degree for e in y]
    W = window if window is not None else default_window(degs)
    D = degree_bound if degree_bound is not None else default_degree_bound(M, degs)
    table, terms = {}, {}
    for d in range(M.min_degree(), D + 1):
        table[d], terms[d] = strand_homology(M, y, d)
    return StrandReport(D, W, M.min_degree(), len(y), table, terms)


def quotient_by_sequence(M: GradedPresentation, y) -> GradedPresentation:
    """Presentation of ``M/(y)M``: append ``y_i · e_r`` for every generator e_r."""
    rows = M.row_degrees
    cols = list(M.col_degrees)
    entries = [list(r) for r in M.entries]
    for e in y:
        for r in range(len(rows)):
            cols.append(rows[r] + e.degree)
            for i in range(len(rows)):
                entries[i].append(dict(e.polynomial) if i == r else {})
    return GradedPresentation(M.ring, M.nvars, rows, cols, entries)


def quotient_strand_length(M: GradedModule, y, d: int) -> int:
    """λ((M/(y)M)_d) as the cokernel of the first Koszul differential."""
    terms, diffs = koszul_strand_complex(M, y, d)
    if not diffs:
        return terms[0].length()
    return terms[0].length() - diffs[0].image_length()


def _monomial_cofinite(Q: GradedPresentation) -> bool:
    """Exact finiteness test for monomial presentations.

    Row i of the quotient is Z/p^k[X] modulo the terms ``c X^a`` in that row;
    it has finite length iff the unit-coefficient terms include a pure power
    of every variable.
    """
    m = Q.nvars
    for i in range(len(Q.row_degrees)):
        found = [False] * m
        for f in Q.entries[i]:
            for e, c in f.items():
                if Q.ring.valuation(c) != 0:
                    continue
                support = [v for v, a in enumerate(e) if a]
                if not support:
                    found = [True] * m
                elif len(support) == 1:
                    found[support[0]] = True
        if not all(found):
            return False
    return True


def validate_multiplicity_system(M: GradedModule, y, degree_bound: int | None = None) -> bool:
    """Whether ``M/(y)M`` has finite length.

    Monomial presentations with monomial ``y`` get an exact combinatorial
    answer; otherwise the quotient strands must vanish on the last ``W``
    degrees up to the bound, which is a certificate only up to that bound.
    """
    y = as_sequence(M.ring, y, M.nvars)
    if isinstance(M, TorsionModule):
        return True
    if isinstance(M, GradedPresentation):
        Q = quotient_by_sequence(M, y)
        if Q.is_monomial():
            return _monomial_cofinite(Q)
    degs = [e.degree for e in y]
    W = default_window(degs)
    D = degree_bound if degree_bound is not None else default_degree_bound(M, degs)
    return all(quotient_strand_length(M, y, d) == 0 for d in range(max(M.min_degree(), D - W + 1), D + 1))


@dataclass(frozen=True)
class LechTable:
    rows: tuple[tuple[int, int], ...]
    n: int
    leading_coefficient: Fraction
    ratios: tuple[Fraction, ...]

    def scaling_law_holds(self) -> bool:
        """λ(t) = t^n λ(1) for every tabulated t."""
        base = self.rows[0][1]
        return all(length == t**self.n * base for t, length in self.rows)

    def to_dict(self) -> dict:
        return {
            "rows": [list(r) for r in self.rows],
            "leading_coefficient": str(self.leading_coefficient),
            "ratios": [str(r) for r in self.ratios],
            "scaling_law": self.scaling_law_holds(),
        }


def quotient_length(M: GradedModule, y, degree_bound: int | None = None) -> int:
    """λ(M/(y)M), raising if the strands have not died out by the degree bound."""
    y = as_sequence(M.ring, y, M.nvars)
    degs = [e.degree for e in y]
    W = default_window(degs)
    D = degree_bound if degree_bound is not None else default_degree_bound(M, degs)
    lengths = {d: quotient_strand_length(M, y, d) for d in range(M.min_degree(), D + 1)}
    if any(lengths[d] for d in range(max(M.min_degree(), D - W + 1), D + 1)):
        raise DegreeBudgetExceeded(
            f"M/(y)M still has nonzero strands near degree {D}; raise the degree bound"
        )
    return sum(lengths.values())


def lech_multiplicity_table(M: GradedModule, y, t_max: int, degree_bound: int | None = None) -> LechTable:
    """λ(M/(y_1^t..y_n^t)M) for t = 1..t_max and the leading coefficient of t^n.

    The coefficient is the n-th finite difference over the last n+1 values
    (with λ = 0 at t = 0) divided by n!, which is exact once the length is a
    polynomial of degree <= n in t.
    """
    y = as_sequence(M.ring, y, M.nvars)
    n = len(y)
    if t_max < max(n, 1):
        raise ValueError(f"t_max must be at least n = {n}")
    rows = []
    for t in range(1, t_max + 1):
        yt = [KoszulSequenceEntry(poly_pow(M.ring, e.polynomial, t), e.degree * t) for e in y]
        bound = None if degree_bound is None else degree_bound * t
        rows.append((t, quotient_length(M, yt, bound)))
    return lech_table(rows, n)


def lech_table(rows, n: int) -> LechTable:
    """Wrap ``(t, length)`` rows for t = 1..t_max, with t_max >= n."""
    values = [0] + [length for _, length in rows]
    window = values[-(n + 1) :]
    diff = sum((-1) ** (n - j) * comb(n, j) * window[j] for j in range(n + 1))
    ratios = tuple(Fraction(length, t**n) for t, length in rows)
    return LechTable(tuple(rows), n, Fraction(diff, factorial(n)), ratios)


def is_regular_on(M: GradedModule, y, degree_bound: int | None = None) -> tuple[bool, StrandReport]:
    """H_{>0}(y, M) vanishes in every degree up to the bound."""
    report = koszul_strand_profile(M, y, degree_bound)
    ok = all(not any(row[1:]) for row in report.table.values())
    return ok, report


def shift_check(J: GradedIdeal, y, degree_bound: int | None = None) -> Verdict:
    """Compare H_i(y, B/J) with H_{i-1}(y, J) degree by degree for i >= 2."""
    ring = J.ring
    y = as_sequence(ring, y, J.nvars)
    B = GradedPresentation.free(ring, J.nvars)
    MJ = J.quotient()
    degs = [e.degree for e in y]
    D = degree_bound if degree_bound is not None else default_degree_bound(MJ, degs)
    regular, _ = is_regular_on(B, y, D)
    quot = koszul_strand_profile(MJ, y, D)
    sub = koszul_strand_profile(J, y, D)
    n = len(y)
    mismatches = []
    for d in range(min(quot.min_degree, sub.min_degree), D + 1):
        left = quot.table.get(d, (0,) * (n + 1))
        right = sub.table.get(d, (0,) * (n + 1))
        for i in range(2, n + 1):
            if left[i] != right[i - 1]:
                mismatches.append({"degree": d, "i": i, "B/J": left[i], "J": right[i - 1]})
    stabilized = quot.stabilized and sub.stabilized
    chi_pairs = {j: (quot.chis[j], sub.chis[j - 1]) for j in range(2, n + 1)}
    details = {
        "degree_bound": D,
        "y_regular_on_B": regular,
        "stabilized": stabilized,
        "quotient": quot.to_dict(),
        "ideal": sub.to_dict(),
        "chi_shift": {str(j): list(v) for j, v in chi_pairs.items()},
        "mismatches": mismatches,
    }
    if not regular:
        return Verdict("shift", False, details, status="fail")
    if mismatches:
        return Verdict("shift", False, details)
    if not stabilized:
        return Verdict("shift", False, details, status="inconclusive")
    ok = all(a == b for a, b in chi_pairs.values())
    return Verdict("shift", ok, details)
