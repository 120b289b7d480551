"""Acceptance criteria, one test per criterion.

Each test prints a single ``[criterion N] PASS|FAIL ...`` line (shown with
``pytest -s`` or in the final summary of ``pytest -v``) and then asserts.
"""

import math
import os
import random
import subprocess
import sys
import time

import numpy as np
import pytest

from zerocount import (CountRequest, Grid, MultiplicitySums, builtin_kernels, count_zeros,
                       decode_profile, estimate_multiplicity, expression_model, injectivity_gap,
                       kernel_mass, poly_model, sturm_count, sturm_multiplicities)
from zerocount.errors import NonIntegerResult
from zerocount.multiplicity import DEFAULT_DECODE_TOL, endpoint_conclusion, multiplicity_sums
from zerocount.oracle import RationalPoly

from conftest import random_poly
from gen import agrees, random_expr, fd_check

LINES: list[str] = []


def report(n: int, ok: bool, detail: str):
    line = f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}"
    LINES.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module", autouse=True)
def summary(request):
    yield
    tr = request.config.pluginmanager.get_plugin("terminalreporter")
    if tr is not None and LINES:
        tr.write_sep("-", "acceptance criteria")
        for line in sorted(LINES):
            tr.write_line(line)


def best_time(fn, repeat=5):
    out, t = None, math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        t = min(t, time.perf_counter() - t0)
    return out, t


def bessel(b):
    return count_zeros(CountRequest(expression_model("besselj0(x)"), 0.0, b, "cauchy", "closed",
                                    Grid.rigorous(1 / math.pi)))


def test_criterion_01_bessel_small():
    r, t = best_time(lambda: bessel(2 * math.pi))
    ok = r.grid_points == 4 and abs(r.raw - 2.00898) < 1e-4 and r.count == 2 and t < 0.010
    report(1, ok, f"N={r.grid_points} raw={r.raw:.7f} count={r.count} time={1e3 * t:.2f} ms")


def test_criterion_02_bessel_large():
    r, t = best_time(lambda: bessel(100 * math.pi))
    ok = r.grid_points == 1283 and abs(r.raw - 100.0) < 1e-3 and r.count == 100 and t < 1.0
    report(2, ok, f"N={r.grid_points} raw={r.raw:.9f} count={r.count} time={1e3 * t:.2f} ms")


EX1 = "cos(2*x) + x^2*sin(2*x) - sqrt(exp(x))/2 + (x-2)/4"


def test_criterion_03_first_example():
    m, iv = expression_model(EX1), (0.0, 2 * math.pi)
    closed, rc = multiplicity_sums(m, iv, mode="closed")
    opened, ro = multiplicity_sums(m, iv, mode="open")
    got = (closed.S0, opened.S0, closed.S1, opened.S1)
    want = (3, 2, 4, 2)
    near = all(abs(g - w) < 1e-2 for g, w in zip(got, want))
    text = endpoint_conclusion(closed, opened)
    ok = near and "double zero on the boundary" in text
    report(3, ok, "closed/open/g1 closed/g1 open = " + ", ".join(f"{g:.5f}" for g in got)
           + f"; {text!r}")


P7 = "x^7-2*x^6+x^5-x^3+2*x^2-x"


def test_criterion_04_polynomial_profile():
    s, _ = multiplicity_sums(expression_model(P7), (-math.inf, math.inf))
    prof = decode_profile(s)
    exact = sturm_multiplicities(RationalPoly([0, -1, 2, -1, 0, 1, -2, 1]), -math.inf, math.inf)
    ok = (abs(s.S0 - 3) < 1e-2 and abs(s.S1 - 5) < 1e-2 and abs(s.S2 - 6.8322) < 5e-4
          and prof.counts == (2, 0, 1) and exact == (2, 0, 1))
    report(4, ok, f"S0={s.S0:.6f} S1={s.S1:.6f} S2={s.S2:.6f} profile={prof.counts} "
           f"sturm={exact}")


@pytest.mark.parametrize("kernel", ["cauchy", "gaussian", "sech"])
def test_criterion_05_oracle_equivalence(kernel):
    agree, total, bad = 0, 0, []
    for seed in range(200):
        p = random_poly(random.Random(seed))
        m = poly_model(p.coeffs)
        for mode in ("closed", "open"):
            total += 1
            want = sturm_count(p, -6, 6, mode)
            try:
                got = count_zeros(CountRequest(m, -6.0, 6.0, kernel, mode)).count
            except NonIntegerResult:
                got = None
            if got == want:
                agree += 1
            else:
                bad.append((seed, mode, want, got))
    report(5, agree == total, f"{kernel}: {agree}/{total} (200 polynomials x closed/open)"
           + (f" first mismatch {bad[0]}" if bad else ""))


def test_criterion_06_multiplicity_estimator():
    em = expression_model
    powers = [estimate_multiplicity(em(f"x^{k}"), 0.0) for k in range(1, 6)]
    half = estimate_multiplicity(em("sqrt(abs(x))"), 0.0)
    flat = estimate_multiplicity(em("exp(-1/x^2)"), 0.0)
    log0 = estimate_multiplicity(em("1/ln(abs(x))"), 0.0)
    ok = (all(abs(mu - k) < 1e-6 for k, mu in enumerate(powers, start=1))
          and abs(half - 0.5) < 1e-4 and flat == math.inf and abs(log0) < 1e-6)
    report(6, ok, f"x^k: {[round(v, 9) for v in powers]} sqrt|x|={half:.8f} "
           f"exp(-1/x^2)={flat} 1/ln|x|={log0:.2e}")


def test_criterion_07_kernel_suite():
    rng = np.random.default_rng(7)
    fails = []
    for k in builtin_kernels():
        if abs(kernel_mass(k) - 1.0) >= 1e-8:
            fails.append((k.name, "mass"))
        u = np.sort(rng.uniform(-50, 50, 1000))
        u = u[np.all(np.abs(u[:, None] - np.array(k.breakpoints or [1e9])) > 1e-3, axis=1)]
        eps = 1e-5
        fd = (k.H_at(u + eps) - k.H_at(u - eps)) / (2 * eps)
        if np.any(np.abs(fd - k.h_at(u)) > 1e-6 * (1 + k.h_at(u))):
            fails.append((k.name, "H'"))
        if np.any(np.diff(k.H_at(u)) < 0) or np.any(k.h_at(u) < 0):
            fails.append((k.name, "monotone"))
    report(7, not fails, f"{len(builtin_kernels())} kernels: mass, H' = h, monotone H"
           + (f" failures {fails}" if fails else ""))


def test_criterion_08_injectivity_gap():
    gap = injectivity_gap(10)
    report(8, gap > 2 * DEFAULT_DECODE_TOL,
           f"min gap over profiles with S1 <= 10 is {gap:.6f} vs 2*tol = {2 * DEFAULT_DECODE_TOL}")


def test_criterion_09_jet_finite_differences():
    rng = random.Random(2024)
    checks, fails, seen = 0, [], set()
    while checks < 1000:
        src = random_expr(rng)
        model = expression_model(src)
        seen.add(src)
        for _ in range(5):
            x = rng.uniform(-2.0, 2.0)
            for k in range(4):
                jet, fd, scale = fd_check(model, x, k)
                if not math.isfinite(jet) or scale > 1e8:
                    continue
                checks += 1
                if not agrees(jet, fd, scale):
                    fails.append((src, x, k, jet, fd))
    report(9, not fails, f"{checks - len(fails)}/{checks} agreements at rel 1e-5 over "
           f"{len(seen)} random expressions" + (f" first failure {fails[0]}" if fails else ""))


CLI_RUNS = [
    ["count", "--expr", "besselj0(x)", "--a", "0", "--b", "100pi", "--json"],
    ["count", "--expr", "sin(3*x)", "--a", "0", "--b", "2pi", "--periodic", "--json"],
    ["multiplicity", "--expr", EX1, "--a", "0", "--b", "2pi", "--boundary", "--json"],
    ["verify", "--expr", P7, "--a", "-inf", "--b", "inf", "--json"],
    ["scan", "--expr", "x*sin(x)-1", "--a", "-10", "--b", "10", "--diagnose", "--json"],
    ["kernels", "--json"],
]


def test_criterion_10_cli_determinism():
    diffs = []
    for argv in CLI_RUNS:
        outs = [subprocess.run([sys.executable, "-m", "zerocount", *argv], capture_output=True,
                               env=dict(os.environ)).stdout for _ in range(2)]
        if outs[0] != outs[1] or not outs[0]:
            diffs.append(argv[0])
    report(10, not diffs, f"{len(CLI_RUNS)} commands run twice, byte-identical JSON"
           + (f"; differing: {diffs}" if diffs else ""))
