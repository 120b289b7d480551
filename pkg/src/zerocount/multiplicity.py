"""Zero counts split by multiplicity.

Two weights turn the counting integral into other sums over the zeros:

* ``g1 = f'^2 / (f'^2 - f f'' + c f^2)`` tends to the multiplicity ``l`` at a
  zero, so the weighted count is ``S1 = sum_l n_l l``;
* ``g2 = exp((f'^2 - f f'') / (f'^2 + f^2))`` tends to ``e^{1/l}``, giving
  ``S2 = sum_l n_l e^{1/l}``.

Together with the plain count ``S0 = sum_l n_l`` the numbers
``e^{1/l}`` pin down the profile ``(n_1, n_2, ...)``; :func:`decode_profile`
searches the partitions compatible with ``S0`` and ``S1`` for the one matching
``S2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .counting import (
    AUTO_CAP, AUTO_START, DEFAULT_GUARD, Grid, _core, _endpoint_state, _nodes, _ratio_H,
    _sample, _Samples, _Tally, _trapezoid, _nudged, _unresolved_cells, _check_grid_kernel,
    resolve_interval, RISE_MIN_N,
)
from .errors import (AmbiguousDecode, EvaluationError, IllDefinedMultiplicity, InfeasibleSums,
                     NonConvergence, SelectionFailure)
from .kernels import Kernel, get_kernel
from .models import FunctionModel, as_model
from .tape import STATUS_DOMAIN, STATUS_OK

log = logging.getLogger(__name__)

__all__ = [
    "MultiplicityEstimate", "probe_multiplicity", "estimate_multiplicity",
    "select_c", "GWeight", "weighted_integrand", "weighted_count", "weighted_count_report",
    "WeightedCountReport", "MultiplicitySums", "MultiplicityProfile", "decode_profile",
    "injectivity_gap", "profile_value", "multiplicity_sums", "endpoint_conclusion",
    "DEFAULT_DECODE_TOL",
]

DEFAULT_DECODE_TOL = 1e-3
WEIGHTED_TOL = 1e-4
WEIGHTED_NUDGE = 1e-6
RATIO_CAP = 1e6
SIDE_AGREEMENT = 1e-3
LADDER = 21
NOISE_REL = 1e-6


# multiplicity estimator -------------------------------------------------------

@dataclass(frozen=True)
class MultiplicityEstimate:
    """``value`` is finite, ``inf``, ``0.0`` or ``nan``; ``status`` says which."""

    value: float
    left: float
    right: float
    status: str  # finite | infinite | zero | ill_defined


def _aitken(r0: float, r1: float, r2: float) -> float:
    d1, d2 = r1 - r0, r2 - r1
    den = d2 - d1
    if den == 0.0:
        return r2
    return r2 - d2 * d2 / den


def _ladder(model: FunctionModel, x0: float, side: int, h0: float) -> list[float]:
    ts = h0 / 2.0 ** np.arange(LADDER)
    xs = x0 + side * ts
    # a few points a handful of ulps away expose values lost to cancellation
    step = 8.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(xs))
    offs = np.array([-2.0, -1.0, 1.0, 2.0])
    probes = (xs[:, None] + offs[None, :] * step[:, None]).reshape(-1)
    d, st = model.derivs(np.concatenate([xs, probes]))
    fp = d[0, LADDER:].reshape(LADDER, offs.shape[0])
    dx = probes.reshape(LADDER, -1) - xs[:, None]
    out = []
    for k in range(LADDER):
        f0, f1, f2 = float(d[0, k]), float(d[1, k]), float(d[2, k])
        if st[k] != STATUS_OK or not (math.isfinite(f0) and math.isfinite(f1) and math.isfinite(f2)):
            continue
        if xs[k] == x0 or f0 == 0.0:
            continue
        with np.errstate(all="ignore"):
            noise = np.abs(fp[k] - f0 - f1 * dx[k] - 0.5 * f2 * dx[k] ** 2).max()
        if not noise <= NOISE_REL * abs(f0):
            continue
        num = f1 * f1
        den = num - f0 * f2
        if den == 0.0:
            out.append(math.inf if num > 0 else math.nan)
            continue
        out.append(num / den)
    return [r for r in out if not math.isnan(r)]


def _one_side(rs: list[float]) -> float:
    """Limit of the ratio sequence; ``inf`` / ``0.0`` sentinels, ``nan`` if unusable."""
    if not rs:
        return math.nan
    if any(math.isinf(r) for r in rs[-3:]):
        return math.inf
    if len(rs) >= 3 and all(r > RATIO_CAP for r in rs[-3:]):
        return math.inf
    if len(rs) == 1:
        return rs[0] if rs[0] <= RATIO_CAP else math.inf
    if len(rs) == 2:
        return rs[1] if abs(rs[1] - rs[0]) <= 1e-9 * abs(rs[1]) else math.nan
    # the last contracting triple before rounding noise takes over
    best, best_d = None, math.inf
    for k in range(len(rs) - 2):
        r0, r1, r2 = rs[k], rs[k + 1], rs[k + 2]
        d1, d2 = r1 - r0, r2 - r1
        if max(abs(d1), abs(d2)) <= 1e-12 * abs(r2):
            # flat up to rounding
            if abs(d2) <= best_d:
                best, best_d = r2, abs(d2)
            continue
        if d1 != 0.0 and 0.0 <= d2 / d1 < 0.9 and abs(d2) <= best_d:
            best, best_d = _aitken(r0, r1, r2), abs(d2)
    inv = [1.0 / r if r != 0 else math.inf for r in rs]
    tail = inv[-3:]
    # 1/r shrinking geometrically to 0: the ratio diverges
    d1, d2 = tail[1] - tail[0], tail[2] - tail[1]
    if all(0 < v for v in tail) and d1 < 0 and d2 < 0 and d2 / d1 < 0.9:
        lim = _aitken(*tail)
        if abs(lim) < 1e-6 * max(1.0, tail[0]) or lim < 0:
            if best is None or best > RATIO_CAP or 1.0 / max(best, 1e-300) < 1e-6:
                return math.inf
            if abs(_aitken(*rs[-3:])) > RATIO_CAP:
                return math.inf
    # 1/r growing by a constant step: logarithmic decay of the ratio to 0
    if d1 > 0 and d2 > 0 and abs(d2 - d1) <= 1e-3 * abs(d1) and tail[2] > 3.0:
        return 0.0
    if best is None:
        return math.nan
    if best > RATIO_CAP:
        return math.inf
    return best


def probe_multiplicity(model, x0: float, side: str = "both",
                       h0: float | None = None) -> MultiplicityEstimate:
    """Estimate ``lim f'^2 / (f'^2 - f f'')`` at ``x0`` from either or both sides.

    The ratio is sampled at ``x0 ± h0 2^-k`` (k = 0..20, ``h0`` defaults to
    ``max(1, |x0|) / 2``) and extrapolated with Aitken's process on the last
    contracting triple.
    """
    model = as_model(model)
    h0 = 0.5 * max(1.0, abs(x0)) if h0 is None else float(h0)
    left = _one_side(_ladder(model, x0, -1, h0)) if side in ("both", "left") else math.nan
    right = _one_side(_ladder(model, x0, 1, h0)) if side in ("both", "right") else math.nan
    vals = [v for v in (left, right) if not math.isnan(v)]
    if not vals:
        return MultiplicityEstimate(math.nan, left, right, "ill_defined")
    if len(vals) == 2:
        l, r = vals
        if math.isinf(l) or math.isinf(r):
            if not (math.isinf(l) and math.isinf(r)):
                return MultiplicityEstimate(math.nan, left, right, "ill_defined")
            value = math.inf
        elif abs(l - r) > SIDE_AGREEMENT * max(1.0, abs(l), abs(r)):
            return MultiplicityEstimate(math.nan, left, right, "ill_defined")
        else:
            value = 0.5 * (l + r)
    else:
        value = vals[0]
    if math.isinf(value):
        return MultiplicityEstimate(math.inf, left, right, "infinite")
    if value == 0.0:
        return MultiplicityEstimate(0.0, left, right, "zero")
    return MultiplicityEstimate(value, left, right, "finite")


def estimate_multiplicity(model, x0: float, side: str = "both", h0: float | None = None) -> float:
    """Multiplicity of the zero at ``x0``.

    Returns a float; ``inf`` marks an infinite multiplicity, ``0.0`` a zero of
    multiplicity zero and ``nan`` an ill-defined one (the sides disagree or the
    ladder gives no usable limit).  Use :func:`probe_multiplicity` for details.
    """
    return probe_multiplicity(model, x0, side, h0).value


# weights ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GWeight:
    which: str  # g1 | g2
    c: float = 0.0

    @classmethod
    def g1(cls, c: float) -> "GWeight":
        return cls("g1", float(c))

    @classmethod
    def g2(cls) -> "GWeight":
        return cls("g2", 0.0)

    def values(self, d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """``(g, g')`` from rows ``f, f', f'', f'''`` of ``d``."""
        f0, f1, f2, f3 = d[0], d[1], d[2], d[3]
        with np.errstate(all="ignore"):
            if self.which == "g1":
                D = f1 * f1 - f0 * f2 + self.c * f0 * f0
                Dp = f1 * f2 - f0 * f3 + 2.0 * self.c * f0 * f1
                g = f1 * f1 / D
                gp = (2.0 * f1 * f2 * D - f1 * f1 * Dp) / (D * D)
                return g, gp
            P = f1 * f1 - f0 * f2
            Q = f1 * f1 + f0 * f0
            E = P / Q
            Ep = ((f1 * f2 - f0 * f3) * Q - 2.0 * f1 * P * (f2 + f0)) / (Q * Q)
            g = np.exp(E)
            return g, g * Ep

    def limit_at_zero(self, mu: float) -> float:
        """Limit of the weight at a zero of multiplicity ``mu``."""
        if self.which == "g1":
            return mu
        return math.exp(1.0 / mu)

    def describe(self) -> str:
        return f"g1(c={self.c!r})" if self.which == "g1" else "g2"


def select_c(model, interval: Sequence[float], grid: int = 10_000, cap: float = 2.0**60) -> float:
    """A ``c`` that keeps ``f'^2 - f f'' + c f^2`` positive on the interval.

    On a ``grid``-node mesh, ``c_need = max(-(f'^2 - f f'') / f^2)`` over nodes
    where the first part is negative; the choice is ``1 + 2 c_need``, doubled
    until the denominator is positive everywhere on the mesh.
    """
    model = as_model(model)
    a, b = map(float, interval)
    a, b, _ = resolve_interval(model, a, b)
    xs = _nodes(a, b, grid)
    d, st = model.derivs(xs)
    if (st == STATUS_DOMAIN).any():
        i = int(np.flatnonzero(st == STATUS_DOMAIN)[0])
        raise EvaluationError("f is not defined on the whole interval", float(xs[i]))
    f0, f1, f2 = d[0], d[1], d[2]
    D0 = f1 * f1 - f0 * f2
    neg = (D0 < 0) & (f0 != 0)
    with np.errstate(all="ignore"):
        need = float(np.max(-D0[neg] / (f0[neg] * f0[neg]))) if neg.any() else 0.0
    if not math.isfinite(need):
        raise SelectionFailure("f'^2 - f f'' is negative where f vanishes")
    c = 1.0 + 2.0 * need
    while c <= cap:
        D = D0 + c * f0 * f0
        scale = f1 * f1 + np.abs(f0 * f2) + c * f0 * f0
        zero_node = (f0 == 0) & (f1 == 0)
        if bool(((D > 1e-12 * scale) | zero_node).all()):
            return c
        c *= 2.0
    raise SelectionFailure(f"no c up to {cap:g} keeps the g1 denominator positive")


def _weighted_core(kernel: Kernel, w: GWeight, d: np.ndarray) -> np.ndarray:
    g, gp = w.values(d)
    I = _core(kernel, d[0], d[1], d[2])
    Hu = _ratio_H(kernel, d[0], d[1])
    with np.errstate(all="ignore"):
        return g * I - Hu * gp


def weighted_integrand(model, kernel, w: GWeight, x: float, guard: float = DEFAULT_GUARD) -> float:
    """``h(u) g (f'^2 - f f'')/f^2 - H(u) g'`` at ``x`` with ``u = f'/f``.

    At a near-zero of ``f`` the value is the mean of the two one-sided values
    at ``x ± 1e-6 (1 + |x|)``.
    """
    model, kernel = as_model(model), get_kernel(kernel)
    s = _sample(model, np.array([x]), guard)
    if s.regular[0]:
        return float(_weighted_core(kernel, w, s.d)[0])
    step = 1e-6 * (1.0 + abs(x))
    return float(_nudged(model, np.array([x]), np.array([0]), -math.inf, math.inf, step,
                         lambda t: _weighted_core(kernel, w, t.d), guard, _Tally(), "")[0])


@dataclass
class WeightedCountReport:
    value: float
    integral: float
    boundary_lower: float
    boundary_upper: float
    weight: str
    grid_points: int
    change: float          # |T_N - T_{N/2}| of the last refinement (nan for fixed grids)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _endpoint_weighted(model, kernel, w, p, inward, closed_side, guard, tally):
    """Limit of ``H(u) g`` at an endpoint; ``closed_side`` picks ``H(-inf)`` (-1) or ``H(+inf)``."""
    z, f0, f1, _ = _endpoint_state(model, p, inward, guard)
    if not z:
        d, st = model.derivs(np.array([p]))
        g, _ = w.values(d)
        return float(_ratio_H(kernel, d[0], d[1])[0] * g[0])
    side = "right" if inward > 0 else "left"
    mu = estimate_multiplicity(model, p, side=side)
    if not (math.isfinite(mu) and mu > 0):
        raise IllDefinedMultiplicity(f"multiplicity at the endpoint {p!r} is {mu!r}")
    tally.note(f"endpoint zero at {p!r} with multiplicity {mu:.6g}")
    return kernel.H_limit(closed_side) * w.limit_at_zero(mu)


def _check_g2_zeros(model, a, b):
    from .oracle import scan_count

    try:
        zl = scan_count(model, (a, b), grid=4096, raise_on_cluster=False)
    except EvaluationError:
        return
    for z in zl:
        mu = z.multiplicity
        if not (mu > 0) or math.isnan(mu):
            raise IllDefinedMultiplicity(
                f"the g2 weight needs positive multiplicities; zero near {z.location!r} has {mu!r}")


def weighted_count_report(model, interval: Sequence[float], kernel="cauchy",
                          w: GWeight | None = None, mode: str = "closed", grid=None,
                          tol: float = WEIGHTED_TOL, guard: float = DEFAULT_GUARD) -> WeightedCountReport:
    """``integral of I_g`` plus the endpoint limits of ``H(f'/f) g``.

    Auto grids double from 64 nodes until two sums differ by less than ``tol``.

    Raises:
        NonConvergence: the cap of 2^22 panels was reached with a change above 1e-2.
        IllDefinedMultiplicity: ``g2`` requested although a zero has multiplicity
            zero or an ill-defined one.
    """
    model, kernel, grid = as_model(model), get_kernel(kernel), Grid.parse(grid)
    if mode not in ("closed", "open"):
        raise ValueError("weighted counts exist for closed and open modes only")
    _check_grid_kernel(grid, kernel)
    a, b, _ = resolve_interval(model, *map(float, interval))
    if w is None:
        w = GWeight.g1(select_c(model, (a, b)))
    if w.which == "g2":
        _check_g2_zeros(model, a, b)
    tally = _Tally()
    span = b - a
    lo_side, hi_side = (-1, 1) if mode == "closed" else (1, -1)
    lower = _endpoint_weighted(model, kernel, w, a, span / 64.0, lo_side, guard, tally)
    upper = _endpoint_weighted(model, kernel, w, b, -span / 64.0, hi_side, guard, tally)

    def values(s: _Samples) -> np.ndarray:
        vals = np.full(s.xs.shape[0], np.nan)
        reg = s.regular
        vals[reg] = _weighted_core(kernel, w, s.d[:, reg])
        idx = np.flatnonzero(~reg)
        if idx.shape[0]:
            vals[idx] = _nudged(model, s.xs, idx, a, b, span * WEIGHTED_NUDGE,
                                lambda t: _weighted_core(kernel, w, t.d), guard, tally,
                                "degenerate node evaluated by a shifted average")
        if not np.isfinite(vals).all():
            i = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError("weighted integrand is not finite (pole of the weight?)",
                                  float(s.xs[i]))
        return vals

    def level(n):
        tally.counts.clear()
        s = _sample(model, _nodes(a, b, n), guard)
        return _trapezoid(values(s), a, b, n), s

    change = math.nan
    if grid.kind != "auto":
        n = grid.n if grid.kind == "fixed" else None
        if n is None:
            from .counting import rigorous_grid_size
            n = rigorous_grid_size(a, b, grid.bound)
        t, _ = level(n)
    else:
        n = AUTO_START
        t_old, _ = level(n)
        while True:
            n2 = 2 * n
            t, s = level(n2)
            change = abs(t - t_old)
            rise = _unresolved_cells(kernel, s)
            if change < tol and (rise == 0 or n2 >= RISE_MIN_N):
                n = n2
                break
            if n2 >= AUTO_CAP:
                n = n2
                if change > 1e-2:
                    raise NonConvergence(f"weighted quadrature did not settle: change {change:.3g} "
                                         f"at N={n}")
                tally.note(f"weighted quadrature stopped at the cap N={n} with change {change:.3g}")
                break
            n, t_old = n2, t
    value = t + upper - lower
    return WeightedCountReport(value, t, lower, upper, w.describe(), n, change, tally.render())


def weighted_count(model, interval: Sequence[float], kernel="cauchy", w: GWeight | None = None,
                   mode: str = "closed", grid=None, tol: float = WEIGHTED_TOL) -> float:
    """Sum over the zeros of the limits of the weight (see :func:`weighted_count_report`)."""
    return weighted_count_report(model, interval, kernel, w, mode, grid, tol).value


# sums and decoding ---------------------------------------------------------------------

@dataclass
class MultiplicitySums:
    S0: float
    S1: float
    S2: float
    open_or_closed: str = "closed"
    residuals: tuple[float, float, float] = (0.0, 0.0, 0.0)
    warnings: list[str] = field(default_factory=list)

    def check(self) -> list[str]:
        """Consistency of the three sums, as warnings."""
        out = []
        if self.S0 > self.S1 + 0.5:
            out.append("S0 exceeds S1: some multiplicity is below 1")
        if not (self.S0 - 0.5 <= self.S2 <= math.e * self.S0 + 0.5):
            out.append("S2 outside [S0, e S0]")
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        d["residuals"] = list(self.residuals)
        return d


@dataclass
class MultiplicityProfile:
    counts: tuple[int, ...]
    margin: float
    exact: bool
    residual: float = 0.0
    runner_up: tuple[int, ...] | None = None

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def weighted_total(self) -> int:
        return sum((l + 1) * n for l, n in enumerate(self.counts))

    def describe(self) -> str:
        parts = []
        for l, n in enumerate(self.counts, start=1):
            if n:
                parts.append(f"{n} {_mult_word(l)} zero{'s' if n != 1 else ''}")
        return ", ".join(parts) if parts else "no zeros"


def _mult_word(l: int) -> str:
    return {1: "simple", 2: "double", 3: "triple", 4: "quadruple"}.get(l, f"multiplicity-{l}")


def profile_value(counts: Sequence[int]) -> float:
    """``sum_l n_l e^{1/l}``."""
    return math.fsum(n * math.exp(1.0 / l) for l, n in enumerate(counts, start=1) if n)


def _partitions(total: int, parts: int, max_part: int | None = None):
    """Partitions of ``total`` into exactly ``parts`` positive parts, non-increasing."""
    if max_part is None:
        max_part = total
    if parts == 0:
        if total == 0:
            yield ()
        return
    if total < parts or max_part <= 0:
        return
    for first in range(min(max_part, total - parts + 1), 0, -1):
        for rest in _partitions(total - first, parts - 1, first):
            yield (first,) + rest


def _to_counts(partition: Sequence[int]) -> tuple[int, ...]:
    if not partition:
        return ()
    out = [0] * max(partition)
    for p in partition:
        out[p - 1] += 1
    return tuple(out)


def decode_profile(sums: MultiplicitySums, tol: float = DEFAULT_DECODE_TOL) -> MultiplicityProfile:
    """Profile ``(n_1, n_2, ...)`` with ``sum n_l = round(S0)``, ``sum l n_l = round(S1)``
    whose value ``sum n_l e^{1/l}`` is closest to ``S2``.

    ``margin`` is how much farther the runner-up is from ``S2``; the result is
    ``exact`` when the margin exceeds ``2 tol``.

    Raises:
        AmbiguousDecode: two candidates lie within ``tol`` of ``S2``.
        InfeasibleSums: no profile meets the two integer constraints.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    n0 = int(math.floor(sums.S0 + 0.5))
    n1 = int(math.floor(sums.S1 + 0.5))
    if n0 < 0 or n1 < 0:
        raise InfeasibleSums(f"negative sums S0={sums.S0!r}, S1={sums.S1!r}")
    cands = [_to_counts(p) for p in _partitions(n1, n0)]
    if not cands:
        raise InfeasibleSums(f"no profile has {n0} zeros with multiplicity sum {n1}")
    scored = sorted(((abs(profile_value(c) - sums.S2), c) for c in cands),
                    key=lambda t: (t[0], t[1]))
    best_d, best = scored[0]
    if len(scored) == 1:
        return MultiplicityProfile(best, math.inf, True, best_d, None)
    second_d, second = scored[1]
    if best_d <= tol and second_d <= tol:
        raise AmbiguousDecode(f"profiles {best} and {second} both match S2={sums.S2!r}",
                              (best, second), sums)
    margin = second_d - best_d
    return MultiplicityProfile(best, margin, margin > 2.0 * tol, best_d, second)


def _all_profiles(s1_max: int):
    yield ()
    for m in range(1, s1_max + 1):
        for k in range(1, m + 1):
            for p in _partitions(m, k):
                yield _to_counts(p)


def injectivity_gap(S1_max: int) -> float:
    """Smallest distance between ``sum n_l e^{1/l}`` of two distinct profiles
    with ``sum l n_l <= S1_max`` (the empty profile has value 0)."""
    if S1_max > 20:
        raise ValueError("S1_max must be at most 20")
    if S1_max < 1:
        return math.inf
    vals = sorted(profile_value(c) for c in _all_profiles(S1_max))
    return min(b - a for a, b in zip(vals, vals[1:]))


def multiplicity_sums(model, interval: Sequence[float], kernel="cauchy", mode: str = "closed",
                      c: float | None = None, grid=None, tol: float = WEIGHTED_TOL,
                      ) -> tuple[MultiplicitySums, dict]:
    """``S0``, ``S1`` and ``S2`` for ``f`` on the interval; also returns the reports."""
    from .counting import CountRequest, count_zeros

    model, kernel = as_model(model), get_kernel(kernel)
    a, b, R = resolve_interval(model, *map(float, interval))
    rep0 = count_zeros(CountRequest(model, a, b, kernel, mode, Grid.parse(grid)))
    if c is None:
        c = select_c(model, (a, b))
    rep1 = weighted_count_report(model, (a, b), kernel, GWeight.g1(c), mode, grid, tol)
    rep2 = weighted_count_report(model, (a, b), kernel, GWeight.g2(), mode, grid, tol)
    S1, S2 = rep1.value, rep2.value
    finest = max(rep1.grid_points, rep2.grid_points)
    if Grid.parse(grid).kind == "auto" and rep0.grid_points < finest:
        # the weighted sums needed a finer grid; resolve S0 at the same N
        rep0 = count_zeros(CountRequest(model, a, b, kernel, mode, Grid.fixed(finest)))
    res = (rep0.residual, abs(S1 - math.floor(S1 + 0.5)),
           rep2.change if math.isfinite(rep2.change) else 0.0)
    warnings = list(rep0.warnings) + list(rep1.warnings) + list(rep2.warnings)
    sums = MultiplicitySums(rep0.raw, S1, S2, mode, res, [])
    sums.warnings = sorted(set(warnings)) + sums.check()
    return sums, {"count": rep0, "g1": rep1, "g2": rep2, "c": c, "truncation_radius": R,
                  "interval": (a, b)}


def endpoint_conclusion(closed: MultiplicitySums, opened: MultiplicitySums,
                        tol: float = DEFAULT_DECODE_TOL) -> str:
    """Describe the zeros sitting on the endpoints from closed minus open sums."""
    d0 = int(math.floor(closed.S0 - opened.S0 + 0.5))
    d1 = int(math.floor(closed.S1 - opened.S1 + 0.5))
    if d0 <= 0:
        return "no zero on the boundary"
    diff = MultiplicitySums(closed.S0 - opened.S0, closed.S1 - opened.S1,
                            closed.S2 - opened.S2, "closed")
    if d0 == 1:
        counts = _to_counts((d1,))
    else:
        counts = decode_profile(diff, tol).counts
    parts = []
    for l, n in enumerate(counts, start=1):
        if n:
            word = _mult_word(l)
            parts.append(f"{'a' if n == 1 else n} {word} zero{'s' if n != 1 else ''}")
    return " and ".join(parts) + " on the boundary"
