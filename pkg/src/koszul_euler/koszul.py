"""Koszul complexes of commuting nilpotent actions on finite-length modules.

Subsets of ``{0..n-1}`` are listed lexicographically inside each degree and
the differential is

    d(e_S ⊗ m) = Σ_t (-1)^(t-1) e_{S - s_t} ⊗ x_{s_t}(m),   S = {s_1 < ... < s_i}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from .coeff import CoeffRing, is_invertible
from .finlength import (
    FinModule,
    FinMorphism,
    IsoType,
    block_morphism,
    compose,
    direct_sum,
    homology_length_at,
    identity,
    iso_type,
    zero_map,
    zero_module,
)


class ActionsDoNotCommute(ValueError):
    pass


class ActionNotInRadical(ValueError):
    pass


def is_nilpotent(f: FinMorphism) -> bool:
    # the nilpotency index of an endomorphism is at most the length
    g = f
    for _ in range(max(f.source.length(), 1)):
        if g.is_zero():
            return True
        g = compose(f, g)
    return g.is_zero()


@dataclass(frozen=True, eq=False)
class ActionSystem:
    """A finite-length module with ``n`` commuting nilpotent endomorphisms."""

    module: FinModule
    actions: tuple[FinMorphism, ...]
    origin: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        actions = tuple(self.actions)
        object.__setattr__(self, "actions", actions)
        if not actions:
            raise ValueError("an action system needs n >= 1 elements")
        for i, x in enumerate(actions):
            if x.source != self.module or x.target != self.module:
                raise ValueError(f"action {i} is not an endomorphism of the module")
        for i in range(len(actions)):
            for j in range(i + 1, len(actions)):
                if compose(actions[i], actions[j]) != compose(actions[j], actions[i]):
                    raise ActionsDoNotCommute(f"x_{i + 1} and x_{j + 1} do not commute")
        for i, x in enumerate(actions):
            if not is_nilpotent(x):
                raise ActionNotInRadical(f"x_{i + 1} is not nilpotent, so it is not in the maximal ideal")

    @classmethod
    def from_matrices(cls, ring: CoeffRing, exponents, matrices, origin=None) -> ActionSystem:
        M = FinModule(ring, exponents)
        return cls(M, tuple(FinMorphism(M, M, np.asarray(A, dtype=np.int64).reshape(M.rank, M.rank)) for A in matrices), origin)

    @property
    def ring(self) -> CoeffRing:
        return self.module.ring

    @property
    def n(self) -> int:
        return len(self.actions)

    def matrices(self) -> list[list[list[int]]]:
        return [x.matrix.tolist() for x in self.actions]

    def __repr__(self):
        return f"ActionSystem({self.ring}, M={self.module}, n={self.n}, actions={self.matrices()})"


@dataclass(frozen=True)
class KoszulRep:
    """Terms ``K_0..K_n`` and differentials ``d_1..d_n`` (``differentials[i-1] = d_i``)."""

    subsets: tuple[tuple[tuple[int, ...], ...], ...]
    terms: tuple[FinModule, ...]
    differentials: tuple[FinMorphism, ...]

    @property
    def n(self) -> int:
        return len(self.terms) - 1

    def d(self, i: int) -> FinMorphism:
        """``d_i: K_i -> K_{i-1}``, with zero maps at both ends."""
        ring = self.terms[0].ring
        if i == 0:
            return zero_map(self.terms[0], zero_module(ring))
        if i == self.n + 1:
            return zero_map(zero_module(ring), self.terms[self.n])
        return self.differentials[i - 1]

    def homology_length(self, i: int) -> int:
        return homology_length_at(self.d(i + 1), self.d(i))

    def homology_iso_type(self, i: int) -> IsoType:
        return iso_type(self.d(i + 1), self.d(i))


def koszul_subsets(n: int, i: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), i))


def koszul_differential(n: int, i: int, act, source_of, target_of) -> FinMorphism:
    """Signed block differential ``K_i -> K_{i-1}``.

    ``act(s, S)`` is the map ``x_s`` out of the summand indexed by ``S``;
    ``source_of(S)`` / ``target_of(T)`` give the summand modules.  Shared
    with the graded strands.
    """
    big = koszul_subsets(n, i)
    small = koszul_subsets(n, i - 1)
    index = {T: r for r, T in enumerate(small)}
    blocks = {}
    for c, S in enumerate(big):
        for t, s in enumerate(S):
            f = act(s, S)
            blocks[(index[S[:t] + S[t + 1 :]], c)] = f if t % 2 == 0 else -f
    return block_morphism([source_of(S) for S in big], [target_of(T) for T in small], blocks)


def build_koszul(sys: ActionSystem) -> KoszulRep:
    n, M = sys.n, sys.module
    subsets = tuple(koszul_subsets(n, i) for i in range(n + 1))
    terms = tuple(direct_sum([M] * comb(n, i)) if comb(n, i) else M for i in range(n + 1))
    diffs = tuple(
        koszul_differential(n, i, lambda s, S: sys.actions[s], lambda S: M, lambda T: M)
        for i in range(1, n + 1)
    )
    rep = KoszulRep(subsets, terms, diffs)
    for i in range(2, n + 1):
        if not compose(rep.d(i - 1), rep.d(i)).is_zero():
            raise AssertionError(f"d_{i - 1} ∘ d_{i} != 0")
    return rep


@dataclass(frozen=True)
class EulerProfile:
    """Homology lengths ``λ(H_0..H_n)`` and partial Euler characteristics ``χ_0..χ_n``."""

    homology_lengths: tuple[int, ...]
    chis: tuple[int, ...]

    @classmethod
    def from_lengths(cls, lengths) -> EulerProfile:
        lengths = tuple(int(x) for x in lengths)
        chis = [0] * len(lengths)
        running = 0
        for j in reversed(range(len(lengths))):
            running = lengths[j] - running
            chis[j] = running
        return cls(lengths, tuple(chis))

    @property
    def n(self) -> int:
        return len(self.homology_lengths) - 1

    def chi(self, j: int) -> int:
        """χ_j, which vanishes for j > n."""
        return self.chis[j] if j <= self.n else 0

    def to_dict(self) -> dict:
        return {"homology_lengths": list(self.homology_lengths), "chis": list(self.chis)}


def partial_euler_characteristic(lengths, j: int) -> int:
    """χ_j straight from the alternating sum."""
    return sum((-1) ** (i - j) * lengths[i] for i in range(j, len(lengths)))


def euler_profile(sys: ActionSystem) -> EulerProfile:
    rep = build_koszul(sys)
    return EulerProfile.from_lengths(rep.homology_length(i) for i in range(rep.n + 1))


@dataclass
class Verdict:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    status: str = ""

    def __post_init__(self):
        if not self.status:
            self.status = "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "details": self.details}


def dump_system(sys: ActionSystem) -> dict:
    """Reproducible counterexample payload."""
    return {
        "p": sys.ring.p,
        "k": sys.ring.k,
        "exponents": list(sys.module.exponents),
        "actions": sys.matrices(),
        "origin": sys.origin,
    }


def verify_serre(sys: ActionSystem, profile: EulerProfile | None = None) -> Verdict:
    profile = profile or euler_profile(sys)
    per_j = [c >= 0 for c in profile.chis]
    details = {"profile": profile.to_dict(), "per_j": per_j}
    if not all(per_j):
        details["counterexample"] = dump_system(sys)
    return Verdict("serre", all(per_j), details)


def chi0_dichotomy_check(sys: ActionSystem, profile: EulerProfile | None = None) -> Verdict:
    profile = profile or euler_profile(sys)
    even = sum(profile.homology_lengths[0::2])
    odd = sum(profile.homology_lengths[1::2])
    ok = even == odd and profile.chis[0] == 0
    details = {"chi0": profile.chis[0], "even_sum": even, "odd_sum": odd}
    if not ok:
        details["counterexample"] = dump_system(sys)
    return Verdict("chi0_dichotomy", ok, details)


def boundary_identities(sys: ActionSystem, rep: KoszulRep | None = None) -> Verdict:
    """H_0 ≅ M/(x)M, H_n ≅ (0 :_M (x)), and H_n ≠ 0 for M ≠ 0."""
    rep = rep or build_koszul(sys)
    M, n, ring = sys.module, sys.n, sys.ring
    sum_map = block_morphism([M] * n, [M], {(0, j): x for j, x in enumerate(sys.actions)})
    coker = iso_type(sum_map, zero_map(M, zero_module(ring)))
    stacked = block_morphism([M], [M] * n, {(j, 0): x for j, x in enumerate(sys.actions)})
    common_kernel = iso_type(zero_map(zero_module(ring), M), stacked)
    h0 = rep.homology_iso_type(0)
    hn = rep.homology_iso_type(n)
    checks = {
        "H0_is_M_mod_xM": h0 == coker,
        "Hn_is_annihilator": hn == common_kernel,
        "Hn_nonzero": M.is_zero() or hn.length() >= 1,
    }
    details = {
        "checks": checks,
        "H0": list(h0.exponents),
        "M_mod_xM": list(coker.exponents),
        "Hn": list(hn.exponents),
        "annihilator": list(common_kernel.exponents),
    }
    ok = all(checks.values())
    if not ok:
        details["counterexample"] = dump_system(sys)
    return Verdict("boundary", ok, details)


def transform_system(sys: ActionSystem, transform) -> ActionSystem:
    """Apply a permutation of the indices or an invertible scalar matrix ``U``.

    A matrix acts as ``x'_i = Σ_j U_ij x_j``.
    """
    ring, n = sys.ring, sys.n
    arr = np.asarray(transform)
    if arr.ndim == 1:
        perm = [int(i) for i in arr]
        if sorted(perm) != list(range(n)):
            raise ValueError(f"{perm} is not a permutation of range({n})")
        return ActionSystem(sys.module, tuple(sys.actions[i] for i in perm), sys.origin)
    U = ring.matrix(arr)
    if U.shape != (n, n) or not is_invertible(ring, U):
        raise ValueError("transform matrix is not invertible over the coefficient ring")
    q = ring.q
    stacked = np.stack([x.matrix for x in sys.actions])
    new = []
    for i in range(n):
        A = np.zeros_like(stacked[0])
        for j in range(n):
            A = (A + int(U[i, j]) * stacked[j]) % q
        new.append(FinMorphism(sys.module, sys.module, A))
    return ActionSystem(sys.module, tuple(new), sys.origin)


def invariance_suite(sys: ActionSystem, transform, profile: EulerProfile | None = None) -> Verdict:
    profile = profile or euler_profile(sys)
    other = euler_profile(transform_system(sys, transform))
    ok = other == profile
    details = {"original": profile.to_dict(), "transformed": other.to_dict()}
    if not ok:
        details["counterexample"] = dump_system(sys)
        details["transform"] = np.asarray(transform).tolist()
    return Verdict("invariance", ok, details)


def direct_sum_system(a: ActionSystem, b: ActionSystem) -> ActionSystem:
    """Block-diagonal actions on ``M ⊕ M'``."""
    if a.n != b.n or a.ring != b.ring:
        raise ValueError("systems must share the ring and sequence length")
    M = direct_sum([a.module, b.module])
    actions = tuple(
        block_morphism([a.module, b.module], [a.module, b.module], {(0, 0): x, (1, 1): y})
        for x, y in zip(a.actions, b.actions)
    )
    return ActionSystem(M, actions)


def scalar_system(ring: CoeffRing, exponents, scalars) -> ActionSystem:
    """Each ``x_i`` is multiplication by a scalar of positive valuation."""
    M = FinModule(ring, exponents)
    return ActionSystem(M, tuple(identity(M).scale(c) for c in scalars))
