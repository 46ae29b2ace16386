"""Acceptance gate: every criterion runs at full scale with exact comparisons.

Each test records a one-line PASS/FAIL summary that is printed at the end of
the pytest session (and immediately with ``-s``).
"""
import itertools
import time
from fractions import Fraction

import numpy as np
import pytest

from koszul_euler.coeff import CoeffRing
from koszul_euler.finlength import compose
from koszul_euler.graded import (
    GradedIdeal,
    GradedPresentation,
    koszul_strand_profile,
    lech_multiplicity_table,
    shift_check,
    variable,
)
from koszul_euler.koszul import (
    EulerProfile,
    boundary_identities,
    build_koszul,
    direct_sum_system,
    euler_profile,
    invariance_suite,
    partial_euler_characteristic,
)
from koszul_euler.lab import GeneratorSpec, instance_at, oracle_homology, random_unimodular
from koszul_euler.lift import construct_lift, verify_base_change

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

P_VALUES, K_VALUES, N_VALUES = (2, 3, 5), (1, 2, 3), (1, 2, 3)
PER_CONFIG = 500
MAX_LENGTH = 64
UNIMODULAR_CHANGES = 20
DIRECT_SUM_PAIRS = 100


def report(number, title, failures, total, elapsed, extra=""):
    status = "PASS" if not failures else "FAIL"
    line = f"[{status}] criterion {number}: {title}: {total - len(failures)}/{total} ok in {elapsed:.1f}s"
    if extra:
        line += f" ({extra})"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def configurations():
    return list(itertools.product(P_VALUES, K_VALUES, N_VALUES))


class Corpus:
    """The criterion-1 instances and their profiles, generated once per session."""

    def __init__(self):
        self.systems, self.profiles = [], []
        start = time.perf_counter()
        for c, (p, k, n) in enumerate(configurations()):
            spec = GeneratorSpec(seed=20_000 + c, p_values=(p,), k_values=(k,), n_values=(n,), max_length=MAX_LENGTH)
            for i in range(PER_CONFIG):
                sys = instance_at(spec, i)
                self.systems.append(sys)
                self.profiles.append(euler_profile(sys))
        self.elapsed = time.perf_counter() - start

    def __len__(self):
        return len(self.systems)

    def items(self):
        return zip(self.systems, self.profiles)


@pytest.fixture(scope="module")
def corpus():
    return Corpus()


def where(sys):
    o = sys.origin or {}
    return f"seed={o.get('seed')} index={o.get('index')} p={sys.ring.p} k={sys.ring.k} n={sys.n}"


def test_1_serre_nonnegativity(corpus):
    failures = [where(s) for s, prof in corpus.items() if min(prof.chis) < 0]
    lengths = [s.module.length() for s in corpus.systems]
    report(1, "χ_j >= 0 on 27 x 500 instances", failures, len(corpus), corpus.elapsed,
           f"max λ(M) = {max(lengths)}, includes generation")
    assert len(corpus) == 27 * PER_CONFIG
    assert max(lengths) <= MAX_LENGTH
    # every configuration is represented with nonzero modules and nonzero homology
    assert sum(1 for prof in corpus.profiles if any(prof.homology_lengths[1:])) > len(corpus) // 4
    assert not failures, failures[:5]


def test_2_chi0_vanishes(corpus):
    start = time.perf_counter()
    failures = []
    for s, prof in corpus.items():
        h = prof.homology_lengths
        if sum(h[0::2]) != sum(h[1::2]) or prof.chis[0] != 0:
            failures.append(where(s))
    report(2, "even homology = odd homology", failures, len(corpus), time.perf_counter() - start)
    assert not failures, failures[:5]


def test_3_multiplicity_branch():
    start = time.perf_counter()
    failures, total = [], 0
    for k, n, t in itertools.product((1, 2), (1, 2), (1, 2, 3)):
        total += 1
        ring = CoeffRing(2, k)
        B = GradedPresentation.free(ring, n)
        y = [variable(n, i, t) for i in range(n)]
        rep = koszul_strand_profile(B, y)
        ok = rep.chis[0] == k * t**n and not any(rep.totals[1:]) and rep.stabilized
        if not ok:
            failures.append((k, n, t, rep.to_dict()))
    # the Lech table of B recovers the same multiplicity as its leading coefficient
    for k, n in itertools.product((1, 2), (1, 2)):
        total += 1
        B = GradedPresentation.free(CoeffRing(2, k), n)
        table = lech_multiplicity_table(B, [variable(n, i) for i in range(n)], t_max=3)
        if table.leading_coefficient != Fraction(k) or not table.scaling_law_holds():
            failures.append((k, n, table.to_dict()))
    elapsed = time.perf_counter() - start
    report(3, "χ_0 = k t^n for y = X^t over Z/2^k[X]", failures, total, elapsed)
    assert not failures, failures
    assert elapsed < 30


def test_4_oracle_equivalence():
    spec = GeneratorSpec(seed=4_004, p_values=P_VALUES, k_values=K_VALUES, n_values=N_VALUES,
                         max_length=MAX_LENGTH, max_order=4096)
    start = time.perf_counter()
    failures, orders = [], []
    for i in range(200):
        sys = instance_at(spec, i)
        orders.append(sys.module.order())
        pipeline = euler_profile(sys).homology_lengths
        oracle = oracle_homology(sys, 4096).homology_lengths
        if pipeline != oracle:
            failures.append((where(sys), pipeline, oracle))
    elapsed = time.perf_counter() - start
    report(4, "SNF pipeline = enumeration oracle", failures, 200, elapsed, f"max |M| = {max(orders)}")
    assert max(orders) <= 4096
    assert not failures, failures[:5]
    assert elapsed < 120


def test_5_base_change(corpus):
    start = time.perf_counter()
    failures = []
    for s, prof in corpus.items():
        v = verify_base_change(s, construct_lift(s), prof)
        if not v.passed:
            failures.append(where(s))
    report(5, "K(y, M) over B matches K(x, M) over A", failures, len(corpus), time.perf_counter() - start)
    assert not failures, failures[:5]


def shift_corpus():
    X, Y = variable(2, 0), variable(2, 1)
    XY = [X, Y]
    out = []
    for p in (2, 3):
        ring = CoeffRing(p, 2)
        ideals = [
            [],  # J = 0, M = B free
            [{(0, 0): 1}],  # J = B
            [{(1, 0): 1}],
            [{(2, 0): 1}],
            [{(1, 1): 1}],
            [{(2, 0): 1}, {(0, 3): 1}],
            [{(2, 1): 1}, {(1, 2): 1}],
            [{(0, 0): p}],
            [{(1, 0): p}],
            [{(1, 0): p}, {(0, 1): p}],
            [{(2, 0): p}, {(1, 1): 1}],
            [{(1, 0): p}, {(0, 2): 1}],
            [{(1, 0): 1, (0, 1): 1}],
            [{(2, 0): 1, (0, 2): p}],
            [{(1, 1): 1, (0, 2): p - 1}],
        ]
        for gens in ideals:
            out.append((ring, gens, XY))
        # a non-linear regular sequence
        out.append((ring, [{(1, 1): 1}], [variable(2, 0, 2), variable(2, 1, 2)]))
    return out


def test_6_dimension_shift():
    cases = shift_corpus()
    start = time.perf_counter()
    failures = []
    for ring, gens, y in cases:
        v = shift_check(GradedIdeal(ring, 2, gens), y)
        if v.status != "pass":
            failures.append((ring.q, gens, v.status, v.details["mismatches"][:3]))
    elapsed = time.perf_counter() - start
    report(6, "H_i(y, B/J) = H_{i-1}(y, J) strandwise", failures, len(cases), elapsed)
    assert len(cases) >= 20
    assert not failures, failures
    assert elapsed < 60


def test_7_structural_identities(corpus):
    start = time.perf_counter()
    rng = np.random.default_rng(7_007)
    failures = {"d∘d": [], "recursion": [], "boundary": [], "permutation": [], "unimodular": [], "direct sum": []}
    for s, prof in corpus.items():
        rep = build_koszul(s)
        for i in range(2, s.n + 1):
            if not compose(rep.d(i - 1), rep.d(i)).is_zero():
                failures["d∘d"].append(where(s))
        h = prof.homology_lengths
        for j in range(s.n + 1):
            if prof.chi(j) != h[j] - prof.chi(j + 1) or prof.chi(j) != partial_euler_characteristic(h, j):
                failures["recursion"].append(where(s))
        if not boundary_identities(s, rep).passed:
            failures["boundary"].append(where(s))
        for perm in itertools.permutations(range(s.n)):
            if not invariance_suite(s, perm, prof).passed:
                failures["permutation"].append((where(s), perm))
        for _ in range(UNIMODULAR_CHANGES):
            U = random_unimodular(rng, s.ring, s.n)
            if not invariance_suite(s, U, prof).passed:
                failures["unimodular"].append((where(s), U.tolist()))
    # direct sums of instances sharing (p, k, n), paired across the corpus
    pairs = 0
    for c in range(len(configurations())):
        block = list(range(c * PER_CONFIG, (c + 1) * PER_CONFIG))
        for a, b in zip(block[:4], block[4:8]):
            if pairs == DIRECT_SUM_PAIRS:
                break
            pairs += 1
            sa, sb = corpus.systems[a], corpus.systems[b]
            got = euler_profile(direct_sum_system(sa, sb)).homology_lengths
            want = tuple(x + y for x, y in zip(corpus.profiles[a].homology_lengths, corpus.profiles[b].homology_lengths))
            if got != want:
                failures["direct sum"].append((where(sa), where(sb)))
    flat = [f for fs in failures.values() for f in fs]
    counts = ", ".join(f"{name}: {len(fs)} bad" for name, fs in failures.items())
    report(7, "d∘d = 0, χ recursion, H_0/H_n, invariance, additivity", flat, len(corpus) + pairs,
           time.perf_counter() - start, counts)
    assert pairs == DIRECT_SUM_PAIRS
    assert not flat, {k: v[:3] for k, v in failures.items() if v}


def test_8_lift_construction(corpus):
    start = time.perf_counter()
    failures = []
    for s in corpus.systems:
        cert = construct_lift(s)
        if not cert.passed or len(cert.checks) != 3:
            failures.append((where(s), cert.checks))
    report(8, "construct_lift: all three checks pass", failures, len(corpus), time.perf_counter() - start)
    assert not failures, failures[:5]
