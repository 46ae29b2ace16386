import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from koszul_euler.coeff import CoeffRing

SMALL_RINGS = [CoeffRing(2, 1), CoeffRing(2, 2), CoeffRing(2, 3), CoeffRing(3, 1), CoeffRing(3, 2), CoeffRing(5, 1)]


def span_length(ring, A):
    """Length of the column span of A by listing every combination of columns."""
    A = np.asarray(A, dtype=np.int64).reshape(len(A), -1) if len(A) else np.zeros((0, 0), dtype=np.int64)
    r, c = A.shape
    seen = set()
    for coeffs in itertools.product(range(ring.q), repeat=c):
        v = tuple(int(x) for x in (A @ np.array(coeffs, dtype=np.int64)) % ring.q) if c else (0,) * r
        seen.add(v)
    order, e = len(seen), 0
    while order > 1:
        assert order % ring.p == 0
        order //= ring.p
        e += 1
    return e


def brute_homology(terms, diffs):
    """λ(H_i) of a finite complex of FinModules by listing all elements.

    ``diffs[i-1]`` is ``d_i: terms[i] -> terms[i-1]``.
    """
    ring = terms[0].ring
    p = ring.p

    def elements(M):
        return [np.array(v, dtype=np.int64) for v in itertools.product(*(range(p**e) for e in M.exponents))]

    def apply(f, v):
        return tuple(int(x) for x in (f.matrix @ v) % f.target.moduli()) if f.target.rank else ()

    def log_p(n):
        e = 0
        while n > 1:
            assert n % p == 0
            n //= p
            e += 1
        return e

    out = []
    for i, M in enumerate(terms):
        elems = elements(M)
        if i > 0:
            kernel = sum(1 for v in elems if not any(apply(diffs[i - 1], v)))
        else:
            kernel = len(elems)
        if i < len(terms) - 1:
            image = len({apply(diffs[i], v) for v in elements(terms[i + 1])})
        else:
            image = 1
        out.append(log_p(kernel) - log_p(image))
    return tuple(out)


@st.composite
def rings(draw):
    return draw(st.sampled_from(SMALL_RINGS))


@st.composite
def ring_and_matrix(draw, max_rows=4, max_cols=4):
    ring = draw(rings())
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    entries = draw(st.lists(st.integers(0, ring.q - 1), min_size=r * c, max_size=r * c))
    return ring, np.array(entries, dtype=np.int64).reshape(r, c)


@pytest.fixture
def z4():
    return CoeffRing(2, 2)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
