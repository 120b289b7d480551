import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zerocount import (CountRequest, Grid, KERNEL_NAMES, OddMap, admissibility_scan, boundary_terms,
                       count_zeros, count_zeros_generalized, count_zeros_periodic, estimate_Ibound,
                       expression_model as em, generalized_integrand, get_kernel, integrand,
                       poly_model)
from zerocount.counting import rigorous_grid_size, truncation_radius
from zerocount.errors import NonIntegerResult, UnsupportedKernel
from zerocount.models import callable_model

SMOOTH = [k for k in KERNEL_NAMES if get_kernel(k).smooth]


def count(expr, a, b, kernel="cauchy", mode="closed", grid="auto"):
    return count_zeros(CountRequest(em(expr), a, b, kernel, mode, grid))


def test_rigorous_grid_sizes():
    assert rigorous_grid_size(0.0, 2 * math.pi, 1 / math.pi) == 4
    assert rigorous_grid_size(0.0, 100 * math.pi, 1 / math.pi) == 1283
    # (b - a)^3 M / (6 N^2) < 1 with the smallest such N
    for L, M in [(1.0, 6.0), (3.0, 0.5), (10.0, 2.0)]:
        n = rigorous_grid_size(0.0, L, M)
        assert L**3 * M / (6 * n * n) < 1 <= L**3 * M / (6 * (n - 1) ** 2) or n == 1


def test_bessel_rigorous():
    r = count("besselj0(x)", 0.0, 2 * math.pi, grid=Grid.rigorous(1 / math.pi))
    assert (r.grid_points, r.count) == (4, 2)
    assert r.integral == pytest.approx(1.76479, abs=1e-4)
    assert r.boundary_upper - r.boundary_lower == pytest.approx(0.24419, abs=1e-4)


def test_grid_parse():
    assert Grid.parse("auto").kind == "auto"
    assert Grid.parse(256).kind == "fixed"
    assert Grid.parse("rigorous:0.5").kind == "rigorous"
    with pytest.raises(ValueError):
        Grid.parse("sometimes")


@pytest.mark.parametrize("expr, a, b, closed, opened", [
    ("sin(x)", 0.0, math.pi, 2, 0),
    ("sin(x)", 0.1, 3.0, 0, 0),
    ("sin(x)", 0.1, 3.5, 1, 1),
    ("x^2 - 1", -1.0, 1.0, 2, 0),
    ("x^3 - x", -2.0, 2.0, 3, 3),
    ("x^2 + 1", -5.0, 5.0, 0, 0),
    ("1", 0.0, 1.0, 0, 0),
    ("cos(x) - 0.5", 0.0, 6.0, 2, 2),
    ("exp(x) - 2", 0.0, 1.0, 1, 1),
    ("(x - 1)^2 * (x + 2)", -3.0, 3.0, 2, 2),
    ("besselj1(x)", 0.0, 10.0, 3, 2),
])
@pytest.mark.parametrize("kernel", ["cauchy", "gaussian", "sech"])
def test_known_counts(expr, a, b, closed, opened, kernel):
    assert count(expr, a, b, kernel).count == closed
    assert count(expr, a, b, kernel, "open").count == opened


@pytest.mark.parametrize("kernel", KERNEL_NAMES)
def test_all_kernels_same_count(kernel):
    r = count("(x-1)^2*(x+2)*sin(x)", -3.0, 3.0, kernel)
    assert r.count == 3
    assert r.residual < 0.01


def test_boundary_terms_closed_open():
    assert boundary_terms(em("x^2-1"), "cauchy", (-1, 1), "closed") == (-0.5, 0.5)
    assert boundary_terms(em("x^2-1"), "cauchy", (-1, 1), "open") == (0.5, -0.5)
    lo, up = boundary_terms(em("besselj0(x)"), "cauchy", (0, 2 * math.pi))
    assert lo == 0.0


def test_integrand_at_zeros():
    # C / mu at a zero of multiplicity mu
    assert integrand(em("x"), "cauchy", 0.0) == pytest.approx(1 / math.pi)
    assert integrand(em("x^2"), "cauchy", 0.0) == pytest.approx(0.5 / math.pi)
    assert integrand(em("x^2"), "sqrt4", 0.0) == pytest.approx(0.125)
    assert integrand(em("x"), "gaussian", 0.0) == 0.0


@settings(max_examples=200, deadline=None)
@given(x=st.floats(-3.0, 3.0), kernel=st.sampled_from(SMOOTH))
def test_integrand_matches_direct_formula(x, kernel):
    k = get_kernel(kernel)
    f, fp, fpp = math.sin(x) + 0.3, math.cos(x), -math.sin(x)
    if abs(f) < 1e-3:
        return
    u = fp / f
    want = float(k.h_at(u)) * (u * u - fpp / f)
    assert integrand(em("sin(x) + 0.3"), kernel, x) == pytest.approx(want, rel=1e-9, abs=1e-12)


def test_periodic():
    assert count_zeros_periodic(em("sin(x)"), (0, 2 * math.pi)).count == 2
    assert count_zeros_periodic(em("sin(3*x)"), (0, 2 * math.pi)).count == 6
    assert count("cos(x)+0.5*sin(2*x)+0.1", 0, 2 * math.pi, mode="periodic").count == 2


def test_infinite_interval_truncation():
    m = em("x^3 - x")
    assert truncation_radius(m) == 32.0
    r = count_zeros(CountRequest(m, -math.inf, math.inf))
    assert r.count == 3 and r.truncation_radius == 32.0
    p7 = em("x^7-2*x^6+x^5-x^3+2*x^2-x")
    assert truncation_radius(p7) == 128.0
    assert count_zeros(CountRequest(p7, -math.inf, math.inf)).count == 3
    assert count("x^2+1", -math.inf, math.inf).count == 0


def test_poles_count_negative():
    r = count("1/x", -1.0, 1.3)
    assert r.count == -1
    assert any("not admissible" in w for w in r.warnings)


def test_rigorous_needs_smooth_kernel():
    for k in ("unit_box", "unit_triangle"):
        with pytest.raises(UnsupportedKernel):
            count("x", -1.0, 1.0, k, grid=Grid.rigorous(1.0))


def test_non_integer_result():
    def derivs(xs):
        # f' reported without a matching f
        d = np.zeros((5, xs.shape[0]))
        d[0], d[1] = 1.0, 3.0
        return d, np.zeros(xs.shape[0], dtype=np.int8)

    with pytest.raises(NonIntegerResult) as info:
        count_zeros(CountRequest(callable_model(derivs), 0.0, 1.6))
    assert info.value.report.residual > 0.4
    # fixed grids report instead of raising
    r = count_zeros(CountRequest(callable_model(derivs), 0.0, 1.6, grid=64))
    assert r.residual > 0.4 and r.warnings


def test_generalized_counts():
    for gamma in (OddMap.identity(), OddMap.power(3)):
        for kappa in (OddMap.identity(), OddMap.power(3)):
            r = count_zeros_generalized(em("x^3-x"), -2, 2, "cauchy", gamma, kappa)
            assert r.count == 3
    # the identity pair reduces to the plain integrand
    x = 0.37
    assert generalized_integrand(em("sin(x)+0.3"), "cauchy", OddMap.identity(), OddMap.identity(),
                                 x) == pytest.approx(integrand(em("sin(x)+0.3"), "cauchy", x))


def test_ibound_heuristic_is_reasonable():
    M = estimate_Ibound(em("besselj0(x)"), "cauchy", (0, 2 * math.pi))
    assert 0.05 < M < 5.0


def test_admissibility():
    d = admissibility_scan(em("x^3-x"), (-2, 2))
    assert [x.location for x in d] == [-1.0, 0.0, 1.0]
    assert all(x.verdict == "admissible" for x in d)
    d = admissibility_scan(em("exp(-1/x^2)"), (-1, 1))
    assert len(d) == 1 and abs(d[0].location) < 1e-2


@settings(max_examples=40, deadline=None)
@given(roots=st.lists(st.integers(-16, 16), min_size=1, max_size=4, unique=True),
       scale=st.sampled_from([0.5, 1.0, 3.0, -2.0]))
def test_simple_roots_counted(roots, scale):
    # roots k/4 in [-4, 4], counted on [-4.1, 4.1]
    coeffs = [scale]
    for r in roots:
        coeffs = np.convolve(coeffs, [-r / 4, 1.0]).tolist()
    r = count_zeros(CountRequest(poly_model(coeffs), -4.1, 4.1))
    assert r.count == len(roots)


@pytest.mark.parametrize("kernel", SMOOTH)
def test_oracle_equivalence_all_smooth_kernels(kernel):
    import random

    from conftest import random_poly
    from zerocount import sturm_count

    for seed in range(1000, 1040):
        p = random_poly(random.Random(seed))
        for mode in ("closed", "open"):
            r = count_zeros(CountRequest(poly_model(p.coeffs), -6.0, 6.0, kernel, mode))
            assert r.count == sturm_count(p, -6, 6, mode), (seed, mode)


_BACKEND_PROBE = r"""
import json, math
from zerocount import CountRequest, count_zeros, expression_model, poly_model
from zerocount.tape import backend_name
cases = [("besselj0(x)", 0.0, 100 * math.pi), ("x^7-2*x^6+x^5-x^3+2*x^2-x", -10.0, 10.0),
         ("cos(2*x) + x^2*sin(2*x) - sqrt(exp(x))/2 + (x-2)/4", 0.0, 2 * math.pi)]
out = [count_zeros(CountRequest(expression_model(e), a, b)).raw for e, a, b in cases]
print(json.dumps({"backend": backend_name(), "raw": out}))
"""


def test_python_fallback_matches():
    import json
    import os
    import subprocess
    import sys

    from zerocount.tape import available_backends

    res = {}
    for be in available_backends():
        env = dict(os.environ, ZEROCOUNT_BACKEND=be)
        out = subprocess.run([sys.executable, "-c", _BACKEND_PROBE], env=env, capture_output=True,
                             text=True, check=True).stdout
        doc = json.loads(out)
        assert doc["backend"] == be
        res[be] = doc["raw"]
    if len(res) == 2:
        np.testing.assert_allclose(res["python"], res["cython"], rtol=1e-9)


def test_generalized_on_short_sine_intervals():
    # pi lies outside [0.1, 3]
    for b, want in ((3.0, 0), (3.5, 1)):
        g = count_zeros_generalized(em("sin(x)"), 0.1, b, "cauchy", OddMap.identity(), OddMap.power(3))
        assert g.count == want == count("sin(x)", 0.1, b).count
