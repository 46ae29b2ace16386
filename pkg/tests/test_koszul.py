from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszul_euler.coeff import CoeffRing
from koszul_euler.finlength import FinModule, FinMorphism, compose
from koszul_euler.koszul import (
    ActionNotInRadical,
    ActionsDoNotCommute,
    ActionSystem,
    EulerProfile,
    boundary_identities,
    build_koszul,
    chi0_dichotomy_check,
    direct_sum_system,
    euler_profile,
    invariance_suite,
    partial_euler_characteristic,
    scalar_system,
    transform_system,
    verify_serre,
)
from koszul_euler.lab import GeneratorSpec, instance_at, oracle_homology, random_unimodular

# Z/4[X]/(X^2, 2X): generators 1 (order 4) and X (order 2); X sends 1 to X
Z4X = ([2, 1], [[[0, 0], [1, 0]]])


def system(p, k, exps, mats):
    return ActionSystem.from_matrices(CoeffRing(p, k), exps, mats)


def small_systems(max_length=8):
    spec = GeneratorSpec(seed=11, p_values=(2, 3, 5), k_values=(1, 2, 3), n_values=(1, 2, 3), max_length=max_length, max_order=4096)
    return st.integers(0, 10**6).map(lambda i: instance_at(spec, i))


def test_build_examples():
    rep = build_koszul(system(2, 2, [2], [[[2]]]))
    assert rep.terms[0].exponents == (2,) and rep.terms[1].exponents == (2,)
    assert rep.differentials[0].matrix.tolist() == [[2]]
    rep = build_koszul(scalar_system(CoeffRing(3, 1), [1], [0, 0]))
    assert [t.rank for t in rep.terms] == [1, 2, 1]
    assert all(d.is_zero() for d in rep.differentials)


def test_sign_convention():
    # d(e_{12} ⊗ m) = e_2 ⊗ x_1 m - e_1 ⊗ x_2 m
    rep = build_koszul(scalar_system(CoeffRing(2, 3), [3], [2, 4]))
    assert rep.subsets[1] == ((0,), (1,))
    assert rep.differentials[1].matrix.tolist() == [[(-4) % 8], [2]]
    assert rep.differentials[0].matrix.tolist() == [[2, 4]]


def test_profile_examples():
    assert euler_profile(system(2, 2, [2], [[[2]]])) == EulerProfile((1, 1), (0, 1))
    assert euler_profile(system(2, 2, [2], [[[0]]])) == EulerProfile((2, 2), (0, 2))
    assert euler_profile(system(2, 2, *Z4X)) == EulerProfile((2, 2), (0, 2))


def test_profile_examples_against_oracle():
    for sys in (system(2, 2, [2], [[[2]]]), system(2, 2, [2], [[[0]]]), system(2, 2, *Z4X)):
        assert oracle_homology(sys).homology_lengths == euler_profile(sys).homology_lengths


def test_verify_serre_examples():
    v = verify_serre(system(2, 2, [2], [[[2]]]))
    assert v.passed and v.details["profile"]["chis"] == [0, 1]
    v = verify_serre(scalar_system(CoeffRing(2, 2), [], [0, 0]))
    assert v.passed and v.details["profile"]["chis"] == [0, 0, 0]


def test_verify_serre_reports_counterexample():
    from koszul_euler.koszul import Verdict

    sys = system(2, 2, [2], [[[2]]])
    v = verify_serre(sys, EulerProfile.from_lengths((0, 1, 0)))
    assert not v.passed and isinstance(v, Verdict)
    assert v.details["counterexample"]["exponents"] == [2]


def test_chi0_examples():
    v = chi0_dichotomy_check(system(2, 2, [2], [[[2]]]))
    assert v.passed and v.details["even_sum"] == 1 == v.details["odd_sum"]
    v = chi0_dichotomy_check(system(2, 2, *Z4X))
    assert v.passed and v.details["even_sum"] == 2 == v.details["odd_sum"]
    for n in (1, 2, 3):
        sys = scalar_system(CoeffRing(3, 2), [2, 1], [0] * n)
        prof = euler_profile(sys)
        assert prof.homology_lengths == tuple(3 * comb(n, i) for i in range(n + 1))
        assert chi0_dichotomy_check(sys).passed


def test_boundary_examples():
    v = boundary_identities(system(2, 2, [2], [[[2]]]))
    assert v.passed and v.details["H0"] == [1] and v.details["Hn"] == [1]
    sys = scalar_system(CoeffRing(2, 2), [2, 1], [0, 0])
    v = boundary_identities(sys)
    assert v.passed and v.details["H0"] == [2, 1] == v.details["Hn"]


def test_construction_errors():
    ring = CoeffRing(2, 2)
    M = FinModule(ring, [2, 2])
    a = FinMorphism(M, M, [[0, 1], [0, 0]])
    b = FinMorphism(M, M, [[0, 0], [1, 0]])
    with pytest.raises(ActionsDoNotCommute):
        ActionSystem(M, (a, b))
    with pytest.raises(ActionNotInRadical):
        ActionSystem(M, (FinMorphism(M, M, [[1, 0], [0, 1]]),))
    with pytest.raises(ActionNotInRadical):
        scalar_system(ring, [2], [3])
    with pytest.raises(ValueError):
        ActionSystem(M, ())


def test_invariance_examples():
    sys = system(2, 2, [2, 1], [[[0, 0], [1, 0]], [[2, 0], [0, 0]]])
    assert invariance_suite(sys, [1, 0]).passed
    assert invariance_suite(sys, np.eye(2, dtype=np.int64)).passed
    with pytest.raises(ValueError):
        transform_system(sys, [[1, 1], [1, 1]])
    with pytest.raises(ValueError):
        transform_system(sys, [0, 0])


@settings(max_examples=150, deadline=None)
@given(small_systems(), st.integers(0, 2**32))
def test_structural_properties(sys, seed):
    rep = build_koszul(sys)
    for i in range(2, sys.n + 1):
        assert compose(rep.d(i - 1), rep.d(i)).is_zero()
    prof = euler_profile(sys)
    lengths = prof.homology_lengths
    for j in range(sys.n + 1):
        assert prof.chis[j] == partial_euler_characteristic(lengths, j)
        assert prof.chis[j] == lengths[j] - prof.chi(j + 1)
        assert prof.chis[j] >= 0
    assert prof.chis[0] == 0
    assert lengths == oracle_homology(sys).homology_lengths
    assert boundary_identities(sys, rep).passed
    rng = np.random.default_rng(seed)
    assert invariance_suite(sys, rng.permutation(sys.n), prof).passed
    assert invariance_suite(sys, random_unimodular(rng, sys.ring, sys.n), prof).passed


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_direct_sum_additivity(i, j):
    spec = GeneratorSpec(seed=5, p_values=(3,), k_values=(2,), n_values=(2,), max_length=12)
    a, b = instance_at(spec, i), instance_at(spec, j)
    pa, pb = euler_profile(a), euler_profile(b)
    both = euler_profile(direct_sum_system(a, b))
    assert both.chis == tuple(x + y for x, y in zip(pa.chis, pb.chis))
    assert both.homology_lengths == tuple(x + y for x, y in zip(pa.homology_lengths, pb.homology_lengths))
