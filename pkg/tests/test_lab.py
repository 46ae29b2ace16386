import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koszul_euler.coeff import CoeffRing
from koszul_euler.finlength import compose
from koszul_euler.koszul import euler_profile
from koszul_euler.lab import (
    GeneratorSpec,
    OracleBoundExceeded,
    combinatorial_length,
    enumerate_module_length,
    generate,
    instance_at,
    oracle_homology,
    p_monomial_system,
)
from koszul_euler.koszul import scalar_system


def test_combinatorial_length_examples():
    assert combinatorial_length([(0, (2,)), (1, (1,))], 2) == 3
    assert combinatorial_length([(0, (1,))], 3) == 3
    assert combinatorial_length([(0, (3,))], 2) == 6
    with pytest.raises(ValueError):
        combinatorial_length([(0, (2, 0))], 2)


def test_p_monomial_quotient_enumeration():
    sys = p_monomial_system(CoeffRing(2, 2), 1, [(0, (2,)), (1, (1,))])
    assert sys.module.order() == 8
    assert enumerate_module_length(sys) == 3


def test_generation_is_reproducible():
    spec = GeneratorSpec(seed=1, p_values=(2,), k_values=(2,), n_values=(1,), max_length=8, shapes=("p-monomial",))
    a = [s.matrices() for s in generate(spec, 20)]
    b = [s.matrices() for s in generate(spec, 20)]
    assert a == b
    assert instance_at(spec, 7).matrices() == a[7]
    first = instance_at(spec, 0)
    gens = [(g["pexp"], tuple(g["monomial"])) for g in first.origin["generators"]]
    assert first.module.length() == combinatorial_length(gens, 2, 1)


def test_zero_length_spec():
    spec = GeneratorSpec(seed=3, p_values=(2, 3), k_values=(1, 2), n_values=(1, 2), max_length=0)
    assert all(s.module.is_zero() for s in generate(spec, 30))


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec(shapes=("bogus",))
    with pytest.raises(ValueError):
        GeneratorSpec(max_length=-1)
    with pytest.raises(ValueError):
        GeneratorSpec(n_values=(0,))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_generated_systems_are_valid(i):
    spec = GeneratorSpec(seed=2, p_values=(2, 3, 5), k_values=(1, 2, 3), n_values=(1, 2, 3), max_length=20)
    sys = instance_at(spec, i)
    assert sys.module.length() <= 20
    for a in sys.actions:
        for b in sys.actions:
            assert compose(a, b) == compose(b, a)
    if sys.origin["shape"] == "p-monomial":
        gens = [(g["pexp"], tuple(g["monomial"])) for g in sys.origin["generators"]]
        assert sys.module.length() == combinatorial_length(gens, sys.ring.k, sys.n)
        if sys.module.order() <= 4096:
            assert enumerate_module_length(sys) == sys.module.length()


def test_oracle_examples():
    from koszul_euler.koszul import ActionSystem

    sys = ActionSystem.from_matrices(CoeffRing(2, 2), [2], [[[2]]])
    assert oracle_homology(sys).homology_lengths == (1, 1)
    assert oracle_homology(scalar_system(CoeffRing(2, 1), [1], [0, 0])).homology_lengths == (1, 2, 1)


def test_oracle_bound():
    sys = scalar_system(CoeffRing(2, 3), [3] * 5, [0])
    with pytest.raises(OracleBoundExceeded):
        oracle_homology(sys)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_oracle_matches_pipeline(i):
    spec = GeneratorSpec(seed=4, p_values=(2, 3, 5), k_values=(1, 2, 3), n_values=(1, 2, 3), max_length=64, max_order=4096)
    sys = instance_at(spec, i)
    assert oracle_homology(sys).homology_lengths == euler_profile(sys).homology_lengths
