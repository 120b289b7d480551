import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from zerocount import expression_model as em, poly_model, scan_count, sturm_count, sturm_multiplicities
from zerocount.errors import SuspectCluster
from zerocount.oracle import RationalPoly, squarefree_decomposition

from conftest import random_poly

P7 = RationalPoly([0, -1, 2, -1, 0, 1, -2, 1])  # x^7-2x^6+x^5-x^3+2x^2-x


def test_poly_arithmetic():
    p = RationalPoly.from_roots([1, 1, -2])
    assert p.coeffs == RationalPoly([2, -3, 0, 1]).coeffs
    q, r = p.divmod(RationalPoly([-1, 1]))
    assert r.is_zero() and q.coeffs == RationalPoly.from_roots([1, -2]).coeffs
    assert p.gcd(p.derivative()).coeffs == RationalPoly([-1, 1]).coeffs
    assert p.sign_at(F(3, 2)) == 1 and p.sign_at(1) == 0 and p.sign_at(-3) == -1


def test_squarefree_decomposition():
    parts = squarefree_decomposition(P7)
    # x (x + 1) (x^2 + x + 1) is the simple part, (x - 1)^3 the triple one
    assert [q.degree for q in parts] == [4, 0, 1]


def test_sturm_examples():
    assert sturm_count(P7, -10, 10) == 3
    assert sturm_multiplicities(P7, -10, 10) == (2, 0, 1)
    assert sturm_count(RationalPoly([1, 0, 1]), -5, 5) == 0
    cubic = RationalPoly([0, -1, 0, 1])
    assert sturm_count(cubic, -1, 1) == 3
    assert sturm_count(cubic, -1, 1, "open") == 1
    assert sturm_count(cubic, 0, 1, "open") == 0
    assert sturm_multiplicities(RationalPoly.from_roots([1, 1, -2]), -3, 3) == (1, 1)


@settings(max_examples=100, deadline=None)
@given(roots=st.lists(st.fractions(-5, 5, max_denominator=16), min_size=1, max_size=6),
       lead=st.sampled_from([F(1), F(-3), F(2, 7)]),
       a=st.fractions(-6, 0, max_denominator=8), b=st.fractions(0, 6, max_denominator=8))
def test_sturm_matches_root_list(roots, lead, a, b):
    if a == b:
        return
    p = RationalPoly.from_roots(roots, lead)
    distinct = set(roots)
    assert sturm_count(p, a, b) == sum(1 for r in distinct if a <= r <= b)
    assert sturm_count(p, a, b, "open") == sum(1 for r in distinct if a < r < b)
    mult = sturm_multiplicities(p, a, b)
    want: list[int] = []
    for r in distinct:
        if a <= r <= b:
            m = roots.count(r)
            want += [0] * (m - len(want))
            want[m - 1] += 1
    while want and want[-1] == 0:
        want.pop()
    assert list(mult) == want


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10**6), k=st.sampled_from([F(1, 3), F(2), F(-5, 2)]))
def test_sturm_scaling_invariance(seed, k):
    p = random_poly(random.Random(seed))
    # q(x) = c p(k x) has the roots of p divided by k
    coeffs = [c * k**i * 7 for i, c in enumerate(p.coeffs)]
    q = RationalPoly(coeffs)
    lo, hi = sorted((F(-6) / k, F(6) / k))
    assert sturm_count(q, lo, hi) == sturm_count(p, -6, 6)


@pytest.mark.parametrize("seed", range(30))
def test_scan_agrees_with_sturm_on_polynomials(seed):
    p = random_poly(random.Random(seed))
    try:
        zs = scan_count(poly_model(p.coeffs), (-6.0, 6.0), grid=12_000, estimate=False)
    except SuspectCluster:
        return
    assert zs.count == sturm_count(p, -6, 6)


def test_scan_examples():
    zs = scan_count(em("sin(x)"), (0, 2 * math.pi))
    assert zs.count == 3
    assert zs.locations() == pytest.approx([0, math.pi, 2 * math.pi], abs=1e-9)
    assert [round(z.multiplicity, 6) for z in zs.zeros] == [1, 1, 1]
    zs = scan_count(em("x^2"), (-1, 1))
    assert zs.count == 1 and zs.zeros[0].multiplicity == pytest.approx(2)
    zs = scan_count(em("(x-0.3)^2*(x+0.2)"), (-1, 1))
    assert zs.count == 2
    zs = scan_count(em("exp(-1/x^2)"), (-1, 1))
    assert zs.count == 1 and zs.zeros[0].kind == "flat" and zs.zeros[0].multiplicity == math.inf


def test_scan_cluster():
    with pytest.raises(SuspectCluster):
        scan_count(em("(x-0.5)*(x-0.50001)"), (0, 1), grid=1000)
