"""Lifting a finite-length system to a ring where the sequence is regular.

For a module M killed by p^k with nilpotent commuting actions x_1..x_n the
lift is ``B = Z/p^k[X_1..X_n]`` (the quotient of ``Z_p[[X]]`` by ``p^k``,
truncated to polynomials) with ``y_i = X_i`` acting on M as ``x_i``.  Since
M has finite length only finitely many degrees of the power series ring
ever act, so polynomials lose nothing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .coeff import CoeffRing
from .graded import (
    GradedPresentation,
    KoszulSequenceEntry,
    TorsionModule,
    is_regular_on,
    koszul_strand_profile,
    variable,
)
from .koszul import ActionSystem, EulerProfile, Verdict, build_koszul, dump_system, euler_profile


@dataclass
class LiftCertificate:
    ring: CoeffRing
    n: int
    delta_valuation: int
    checks: dict
    details: dict = field(default_factory=dict)

    @property
    def base(self) -> str:
        names = ",".join(f"X{i + 1}" for i in range(self.n))
        return f"Z/{self.ring.p}^{self.ring.k}[{names}]"

    @property
    def y(self) -> list[str]:
        return [f"X{i + 1}" for i in range(self.n)]

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "y": self.y,
            "delta": f"{self.ring.p}^{self.delta_valuation}",
            "delta_valuation": self.delta_valuation,
            "checks": dict(self.checks),
            "details": self.details,
        }


@lru_cache(maxsize=None)
def _base_regularity(p: int, k: int, n: int, degree_bound: int | None):
    """Regularity and s.o.p. data of the variables on ``Z/p^k[X_1..X_n]``."""
    ring = CoeffRing(p, k)
    B = GradedPresentation.free(ring, n)
    y = [variable(n, i) for i in range(n)]
    regular, report = is_regular_on(B, y, degree_bound)
    return regular, report.stabilized, report.totals[0], report.degree_bound


def construct_lift(sys: ActionSystem, degree_bound: int | None = None) -> LiftCertificate:
    ring, n, M = sys.ring, sys.n, sys.module
    k = ring.k
    lifted = TorsionModule(M, sys.actions)

    # (1) y_i = X_i acts as x_i, and B acts at all: monomials evaluate consistently
    images = [lifted.multiply(variable(n, i), 0) for i in range(n)]
    phi_ok = all(a == x for a, x in zip(images, sys.actions))
    for i in range(n):
        for j in range(n):
            mixed = {tuple(int(v == i) + int(v == j) for v in range(n)): 1}
            phi_ok &= lifted.multiply(mixed, 0) == sys.actions[i] @ sys.actions[j]

    # (2) finite over B: finitely many generators, finite length, killed by Δ = p^k
    killed = all(e <= k for e in M.exponents)
    # Δ ∉ (X): its image p^k in S/(X) = Z_p is nonzero, seen one level up
    delta_outside = CoeffRing(ring.p, k + 1).valuation(ring.p**k) == k

    # (3) X_1..X_n regular and a system of parameters on B
    regular, stabilized, h0_length, D = _base_regularity(ring.p, k, n, degree_bound)
    sop_ok = regular and stabilized and h0_length == k

    checks = {
        "phi_maps_y_to_x": bool(phi_ok),
        "module_finite_over_B": bool(killed and delta_outside),
        "y_regular_sop": bool(sop_ok),
    }
    details = {
        "module_length": M.length(),
        "generators": M.rank,
        "delta_annihilates_M": killed,
        "delta_outside_X": delta_outside,
        "length_B_mod_y": h0_length,
        "degree_bound": D,
        "strands_stabilized": stabilized,
    }
    return LiftCertificate(ring, n, k, checks, details)


def graded_profile(sys: ActionSystem) -> EulerProfile:
    """Koszul profile of M as a B-module, computed through the strand machinery."""
    lifted = TorsionModule(sys.module, sys.actions)
    y = [KoszulSequenceEntry(variable(sys.n, i), 0) for i in range(sys.n)]
    report = koszul_strand_profile(lifted, y, degree_bound=0, window=1)
    return EulerProfile.from_lengths(report.totals)


def verify_base_change(sys: ActionSystem, cert: LiftCertificate, profile: EulerProfile | None = None) -> Verdict:
    if cert.ring != sys.ring or cert.n != sys.n:
        raise ValueError("certificate was not produced from this system")
    direct = profile or euler_profile(sys)
    lifted = graded_profile(sys)
    ok = direct == lifted and cert.passed
    details = {"over_A": direct.to_dict(), "over_B": lifted.to_dict(), "certificate": cert.passed}
    if direct != lifted:
        rep = build_koszul(sys)
        details["counterexample"] = dump_system(sys)
        details["complex"] = [d.matrix.tolist() for d in rep.differentials]
    return Verdict("base_change", ok, details)
