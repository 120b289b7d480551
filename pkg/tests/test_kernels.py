import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zerocount import KERNEL_NAMES, builtin_kernels, custom_kernel, get_kernel, kernel_mass
from zerocount.errors import KernelError

KERNELS = builtin_kernels()
IDS = [k.name for k in KERNELS]

finite_u = st.floats(-50.0, 50.0, allow_nan=False)


def away_from_breaks(k, u, gap=1e-4):
    return all(abs(u - p) > gap for p in k.breakpoints)


def test_eight_builtins_in_order():
    assert KERNEL_NAMES == ("cauchy", "algebraic", "gaussian", "sqrt4", "sech", "logistic",
                            "unit_box", "unit_triangle")


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
def test_unit_mass(k):
    assert abs(kernel_mass(k) - 1.0) < 1e-8


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
def test_limits_match_mass(k):
    assert k.H_pos_inf - k.H_neg_inf == pytest.approx(1.0, abs=1e-15)
    big = np.array([-1e9, 1e9])
    H = k.H_at(big)
    assert abs(H[0] - k.H_neg_inf) < 1e-8
    assert abs(H[1] - k.H_pos_inf) < 1e-8


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
@settings(max_examples=200, deadline=None)
@given(u=finite_u)
def test_H_derivative_is_h(k, u):
    if not away_from_breaks(k, u):
        return
    eps = 1e-5
    fd = (k.H_at(u + eps) - k.H_at(u - eps)) / (2 * eps)
    assert abs(fd - k.h_at(u)) < 1e-6


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
@settings(max_examples=200, deadline=None)
@given(u=finite_u, v=finite_u)
def test_H_monotone(k, u, v):
    lo, hi = min(u, v), max(u, v)
    assert k.H_at(lo) <= k.H_at(hi)
    assert k.h_at(u) >= 0.0


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
@settings(max_examples=100, deadline=None)
@given(r=st.floats(1e-2, 10.0), sign=st.sampled_from([-1.0, 1.0]))
def test_tail_is_inverted_h(k, r, sign):
    r = sign * r
    if not away_from_breaks(k, 1.0 / r):
        return
    want = k.h_at(1.0 / r) / (r * r)
    assert k.tail(np.array([r]))[0] == pytest.approx(want, rel=1e-10, abs=1e-300)


@pytest.mark.parametrize("k", KERNELS, ids=IDS)
def test_tail_at_zero_is_constant(k):
    assert k.tail(np.array([0.0]))[0] == pytest.approx(k.tail_constant, abs=1e-15)
    assert k.tail(np.array([1e-9]))[0] == pytest.approx(k.tail_constant, abs=1e-6)


def test_tail_constants():
    assert get_kernel("cauchy").tail_constant == pytest.approx(1 / math.pi)
    assert get_kernel("sqrt4").tail_constant == pytest.approx(0.25)
    for name in ("algebraic", "gaussian", "sech", "logistic", "unit_box", "unit_triangle"):
        assert get_kernel(name).tail_constant == 0.0


@pytest.mark.parametrize("k", [k for k in KERNELS if k.smooth], ids=[k.name for k in KERNELS if k.smooth])
@settings(max_examples=100, deadline=None)
@given(u=st.floats(-20.0, 20.0))
def test_derivs_consistent(k, u):
    h0, h1, h2 = (float(np.asarray(v).reshape(-1)[0]) for v in k.derivs(np.array([u])))
    eps = 1e-4
    assert h0 == pytest.approx(float(k.h_at(u)), rel=1e-12, abs=1e-300)
    assert abs((k.h_at(u + eps) - k.h_at(u - eps)) / (2 * eps) - h1) < 1e-6
    assert abs((k.h_at(u + eps) - 2 * k.h_at(u) + k.h_at(u - eps)) / eps**2 - h2) < 1e-4


def test_nonsmooth_kernels():
    assert not get_kernel("unit_box").smooth
    assert not get_kernel("unit_box").continuous
    assert not get_kernel("unit_triangle").smooth


def test_unknown_kernel():
    with pytest.raises(KeyError):
        get_kernel("epanechnikov")


def test_custom_kernel_roundtrip():
    k = custom_kernel("my_cauchy", lambda u: 1 / (math.pi * (1 + u * u)),
                      lambda u: np.arctan(u) / math.pi, -0.5, 0.5, "quadratic",
                      tail_constant=1 / math.pi)
    assert kernel_mass(k) == pytest.approx(1.0, abs=1e-8)
    assert k.tail(np.array([0.0]))[0] == pytest.approx(1 / math.pi)


def test_custom_kernel_bad_mass():
    with pytest.raises(KernelError):
        custom_kernel("half", lambda u: 0.5 / (math.pi * (1 + u * u)),
                      lambda u: 0.5 * np.arctan(u) / math.pi, -0.5, 0.5, "quadratic")


def test_sqrt4_removable_singularity():
    k = get_kernel("sqrt4")
    assert k.h_at(0.0) == pytest.approx(0.5, rel=1e-15)
    for x in (1e-9, 1e-5, 1e-3):
        # h(x) = 1 / (s (s + 1)) with s = sqrt(4x^2 + 1)
        s = math.sqrt(4 * x * x + 1)
        assert k.h_at(x) == pytest.approx(1 / (s * (s + 1)), rel=1e-14)
    assert k.H_at(0.0) == 0.0
    assert k.H_at(1e-8) == pytest.approx(1e-8 / 2, rel=1e-8)
