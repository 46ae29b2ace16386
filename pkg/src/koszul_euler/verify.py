"""Run every finite-length check on one action system."""

from __future__ import annotations

import numpy as np

from .koszul import (
    ActionSystem,
    Verdict,
    boundary_identities,
    build_koszul,
    chi0_dichotomy_check,
    dump_system,
    euler_profile,
    invariance_suite,
    verify_serre,
)
from .lab import DEFAULT_ORACLE_BOUND, oracle_homology, random_unimodular
from .lift import construct_lift, verify_base_change


def oracle_check(sys: ActionSystem, profile, bound: int = DEFAULT_ORACLE_BOUND) -> Verdict | None:
    """Compare with enumeration when ``|M|`` is within the bound, else ``None``."""
    if sys.module.order() > bound:
        return None
    oracle = oracle_homology(sys, bound)
    ok = oracle.homology_lengths == profile.homology_lengths
    details = {"oracle": list(oracle.homology_lengths), "pipeline": list(profile.homology_lengths)}
    if not ok:
        details["counterexample"] = dump_system(sys)
    return Verdict("oracle", ok, details)


def check_instance(sys: ActionSystem, oracle_bound: int | None = DEFAULT_ORACLE_BOUND, unimodular_samples: int = 0, seed: int = 0) -> list[Verdict]:
    rep = build_koszul(sys)
    profile = euler_profile(sys)
    verdicts = [
        verify_serre(sys, profile),
        chi0_dichotomy_check(sys, profile),
        boundary_identities(sys, rep),
    ]
    cert = construct_lift(sys)
    lift_verdict = Verdict("lift", cert.passed, cert.to_dict())
    verdicts.append(lift_verdict)
    verdicts.append(verify_base_change(sys, cert, profile))
    if oracle_bound:
        v = oracle_check(sys, profile, oracle_bound)
        if v is not None:
            verdicts.append(v)
    if unimodular_samples:
        rng = np.random.default_rng(seed)
        for _ in range(unimodular_samples):
            v = invariance_suite(sys, random_unimodular(rng, sys.ring, sys.n), profile)
            if not v.passed:
                verdicts.append(v)
                break
        else:
            verdicts.append(Verdict("invariance", True, {"samples": unimodular_samples}))
    return verdicts
