"""Zero counting by trapezoidal quadrature of ``h(f'/f) (f'^2 - f f'')/f^2``.

The count over ``[a, b]`` is ``integral + H(u(b)) - H(u(a))`` with ``u = f'/f``;
endpoint zeros enter through one-sided limits of ``H`` (``H(-inf)`` or
``H(+inf)``), which is what separates the closed from the open count.

Grid choices:

* ``auto``: ``N = 64, 128, ...`` until two successive sums agree to 0.125,
  round to the same integer and no cell looks unresolved.
* ``fixed(N)``.
* ``rigorous(M)``: the smallest ``N`` with ``(b - a)^3 M / (6 N^2) < 1``; with
  ``M >= max |I''|`` the trapezoid error is then below 1/2.

Node sums are compensated (Neumaier in the compiled core, ``math.fsum``
otherwise) so results barely depend on evaluation order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import jets
from .errors import EvaluationError, NonConvergence, NonIntegerResult, UnsupportedKernel
from .kernels import Kernel, get_kernel
from .models import FunctionModel, as_model
from .tape import STATUS_DOMAIN, STATUS_KINK, STATUS_OK, accurate_sum

log = logging.getLogger(__name__)

__all__ = [
    "Grid", "CountRequest", "CountReport", "OddMap", "Diagnostic",
    "integrand", "integrand_values", "boundary_terms", "count_zeros", "count_zeros_periodic",
    "generalized_integrand", "count_zeros_generalized", "estimate_Ibound",
    "admissibility_scan", "rigorous_grid_size", "truncation_radius", "resolve_interval",
]

DEFAULT_GUARD = 1e-12
AUTO_START = 64
AUTO_CAP = 1 << 22
AUTO_TOL = 0.125
RISE_MIN_N = 1 << 17
CHUNK = 1 << 16
NUDGE = 1e-9


# requests and reports -------------------------------------------------------

@dataclass(frozen=True)
class Grid:
    kind: str = "auto"  # auto | fixed | rigorous
    n: int | None = None
    bound: float | None = None

    @classmethod
    def auto(cls) -> "Grid":
        return cls("auto")

    @classmethod
    def fixed(cls, n: int) -> "Grid":
        if int(n) < 1:
            raise ValueError("fixed grid needs N >= 1")
        return cls("fixed", int(n))

    @classmethod
    def rigorous(cls, bound: float) -> "Grid":
        if not bound > 0:
            raise ValueError("rigorous grid needs a positive bound")
        return cls("rigorous", None, float(bound))

    @classmethod
    def parse(cls, spec: "str | int | Grid | None") -> "Grid":
        if spec is None:
            return cls.auto()
        if isinstance(spec, Grid):
            return spec
        if isinstance(spec, int):
            return cls.fixed(spec)
        s = str(spec).strip().lower()
        if s == "auto":
            return cls.auto()
        if s.startswith("rigorous:"):
            return cls.rigorous(float(s.split(":", 1)[1]))
        try:
            return cls.fixed(int(s))
        except ValueError:
            raise ValueError(f"bad grid spec {spec!r}; use auto, N or rigorous:<M>") from None

    def describe(self) -> str:
        if self.kind == "fixed":
            return str(self.n)
        if self.kind == "rigorous":
            return f"rigorous:{self.bound!r}"
        return "auto"


@dataclass
class CountRequest:
    model: FunctionModel
    a: float
    b: float
    kernel: Kernel | str = "cauchy"
    mode: str = "closed"  # closed | open | periodic
    grid: Grid = field(default_factory=Grid.auto)
    zero_guard_tol: float = DEFAULT_GUARD

    def __post_init__(self):
        self.model = as_model(self.model)
        self.kernel = get_kernel(self.kernel)
        self.grid = Grid.parse(self.grid)
        if self.mode not in ("closed", "open", "periodic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not self.a < self.b:
            raise ValueError("interval needs a < b")


@dataclass
class CountReport:
    """Result of a count.

    ``grid_points`` is the number ``N`` of trapezoid panels (``N + 1`` nodes).
    ``truncation_radius`` is set when infinite endpoints were replaced by ``±R``.
    """

    integral: float
    boundary_upper: float
    boundary_lower: float
    raw: float
    count: int
    residual: float
    grid_points: int
    warnings: list[str] = field(default_factory=list)
    mode: str = "closed"
    kernel: str = "cauchy"
    interval: tuple[float, float] = (0.0, 1.0)
    truncation_radius: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["interval"] = list(self.interval)
        return d


# odd maps for the generalized integrand --------------------------------------

@dataclass(frozen=True)
class OddMap:
    """Odd-signed map ``y -> phi(y)`` with ``phi(y) ~ C |y|^alpha sgn y`` near 0.

    ``fn(y)`` returns ``(phi(y), phi'(y))`` for an array ``y``.
    """

    fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]
    alpha: float = 1.0
    C: float = 1.0
    name: str = ""

    @classmethod
    def identity(cls) -> "OddMap":
        return cls(lambda y: (y, np.ones_like(y)), 1.0, 1.0, "id")

    @classmethod
    def power(cls, k: int) -> "OddMap":
        if k < 1 or k % 2 == 0:
            raise ValueError("odd power expected")
        return cls(lambda y, _k=k: (y**_k, _k * y ** (_k - 1)), float(k), 1.0, f"y^{k}")


# stable integrand core --------------------------------------------------------

def _ratio_H(kernel: Kernel, f0: np.ndarray, f1: np.ndarray) -> np.ndarray:
    """``H(f1/f0)`` with infinite ratios mapped to the kernel's limits."""
    with np.errstate(all="ignore"):
        u = f1 / f0
        out = kernel.H(np.where(np.isfinite(u), u, 0.0))
    inf = np.isinf(u)
    if inf.any():
        out = np.where(inf, np.where(u > 0, kernel.H_pos_inf, kernel.H_neg_inf), out)
    return out


def _core(kernel: Kernel, f0: np.ndarray, f1: np.ndarray, f2: np.ndarray) -> np.ndarray:
    """Counting integrand without guarding; uses ``r = f/f'`` when ``|f| < |f'|``."""
    out = np.empty_like(f0)
    far = np.abs(f0) >= np.abs(f1)
    near = ~far
    with np.errstate(all="ignore"):
        if far.any():
            a0, a1, a2 = f0[far], f1[far], f2[far]
            u = a1 / a0
            out[far] = kernel.h(u) * (u * u - a2 / a0)
        if near.any():
            a0, a1, a2 = f0[near], f1[near], f2[near]
            r = a0 / a1
            out[near] = kernel.tail(r) * (1.0 - r * (a2 / a1))
    return out


def _nodes(a: float, b: float, n: int) -> np.ndarray:
    k = np.arange(n + 1, dtype=np.float64)
    xs = a + ((b - a) * k) / n
    xs[0], xs[-1] = a, b
    return xs


def _derivs_chunked(model: FunctionModel, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if xs.shape[0] <= CHUNK:
        return model.derivs(xs)
    ds, sts = [], []
    for s in range(0, xs.shape[0], CHUNK):
        d, st = model.derivs(xs[s:s + CHUNK])
        ds.append(d[:4])
        sts.append(st)
    return np.concatenate(ds, axis=1), np.concatenate(sts)


def _local_max(v: np.ndarray) -> np.ndarray:
    a = np.nan_to_num(np.abs(v), nan=0.0, posinf=0.0)
    m = a.copy()
    m[1:] = np.maximum(m[1:], a[:-1])
    m[:-1] = np.maximum(m[:-1], a[1:])
    return m


@dataclass
class _Samples:
    xs: np.ndarray
    d: np.ndarray
    status: np.ndarray
    near: np.ndarray   # |f| below the relative guard
    bad: np.ndarray    # derivatives unavailable (domain error or kink) and not near

    @property
    def regular(self) -> np.ndarray:
        return ~(self.near | self.bad)


def _sample(model: FunctionModel, xs: np.ndarray, guard: float) -> _Samples:
    d, st = _derivs_chunked(model, xs)
    f0 = d[0]
    valued = (st == STATUS_OK) | (st == STATUS_KINK)
    near = valued & (np.abs(f0) < guard * (1.0 + _local_max(np.where(valued, f0, 0.0))))
    bad = ~near & ((st != STATUS_OK) | ~np.isfinite(d[:3]).all(axis=0))
    return _Samples(xs, d, st, near, bad)


class _Tally:
    """Collects repeated diagnostics as one line each."""

    def __init__(self):
        self.counts: dict[str, int] = {}
        self.lines: list[str] = []

    def add(self, key: str, n: int = 1):
        self.counts[key] = self.counts.get(key, 0) + n

    def note(self, line: str):
        if line not in self.lines:
            self.lines.append(line)

    def render(self) -> list[str]:
        out = list(self.lines)
        for key in sorted(self.counts):
            out.append(f"{key} ({self.counts[key]} node{'s' if self.counts[key] != 1 else ''})")
        return out


def _side_values(model, xs, fn, guard):
    """``fn`` evaluated at shifted points; raises if it is not finite there.

    A shifted point may still be below the zero guard (next to a multiple zero
    the shift is tiny); the unguarded integrand is used as long as it is finite.
    """
    s = _sample(model, xs, guard)
    vals = fn(s)
    if (s.bad & (s.status != STATUS_OK)).any() or not np.isfinite(vals).all():
        i = int(np.flatnonzero((s.bad & (s.status != STATUS_OK)) | ~np.isfinite(vals))[0])
        raise EvaluationError("integrand undefined near a degenerate node", float(xs[i]))
    return vals


def _nudged(model, xs, idx, lo, hi, step, fn, guard, tally, label):
    """Average of ``fn`` just left and right of ``xs[idx]``; inward only at ends."""
    out = np.empty(idx.shape[0])
    x = xs[idx]
    left = np.clip(x - step, lo, hi)
    right = np.clip(x + step, lo, hi)
    at_lo = x <= lo
    at_hi = x >= hi
    vr = _side_values(model, right[~at_hi], fn, guard) if (~at_hi).any() else np.empty(0)
    vl = _side_values(model, left[~at_lo], fn, guard) if (~at_lo).any() else np.empty(0)
    r_full = np.full(idx.shape[0], np.nan)
    l_full = np.full(idx.shape[0], np.nan)
    r_full[~at_hi] = vr
    l_full[~at_lo] = vl
    both = ~at_lo & ~at_hi
    out[both] = 0.5 * (l_full[both] + r_full[both])
    out[at_lo] = r_full[at_lo]
    out[at_hi] = l_full[at_hi]
    tally.add(label, idx.shape[0])
    return out


def _plain_values(s: _Samples, kernel: Kernel) -> np.ndarray:
    return _core(kernel, s.d[0], s.d[1], s.d[2])


def _counting_values(model: FunctionModel, kernel: Kernel, s: _Samples, lo: float, hi: float,
                     guard: float, tally: _Tally, periodic: bool = False) -> np.ndarray:
    vals = np.full(s.xs.shape[0], np.nan)
    reg = s.regular
    vals[reg] = _core(kernel, s.d[0][reg], s.d[1][reg], s.d[2][reg])
    todo = np.flatnonzero(~reg)
    if todo.shape[0] == 0:
        return vals
    step = (hi - lo) * NUDGE
    rest = []
    if kernel.decay == "quadratic":
        from .multiplicity import estimate_multiplicity

        for i in todo:
            if not s.near[i]:
                rest.append(i)
                continue
            x = float(s.xs[i])
            side = "both"
            if not periodic:
                side = "right" if x <= lo else "left" if x >= hi else "both"
            mu = estimate_multiplicity(model, x, side=side)
            if math.isfinite(mu) and mu > 0:
                vals[i] = kernel.tail_constant / mu
                tally.add("near-zero node replaced by its continuous extension")
            else:
                rest.append(i)
    else:
        rest = list(todo)
    if rest:
        idx = np.asarray(rest, dtype=np.int64)
        vals[idx] = _nudged(model, s.xs, idx, -math.inf if periodic else lo,
                            math.inf if periodic else hi, step,
                            lambda t: _plain_values(t, kernel), guard, tally,
                            "degenerate node evaluated by a shifted average")
    return vals


CELL_TOL = 0.1


def _unresolved_cells(kernel: Kernel, s: _Samples, vals: np.ndarray | None = None) -> int:
    """Cells whose end data do not fit a grid that resolves the zeros of ``f``.

    Two checks, both from the samples alone:

    * Since ``I = -d/dx H(f'/f)`` away from zeros, the trapezoid value of a cell
      minus ``H(u_L) - H(u_R)`` must be close to the number of zeros inside
      (0 or 1 on a resolved grid, 0 next to a zero node, at least 1 across a
      sign change, 0 without one).  A missed spike, a hidden pair or a
      near-touch of ``|f|`` breaks this.
    * With ``u = f'/f``, ``h / (1/|u_L| + 1/|u_R|)`` estimates the number of
      zeros between ends that point towards each other (``u_L < 0 < u_R``).
      It must stay below 1.5 across a sign change and below 0.5 without one;
      the second case also flags touching zeros, so refinement stops at
      ``RISE_MIN_N`` even when such cells remain.
    """
    n = s.xs.shape[0] - 1
    if n < 1:
        return 0
    h = float(s.xs[1] - s.xs[0])
    f0, f1 = s.d[0], s.d[1]
    reg, near = s.regular, s.near
    with np.errstate(all="ignore"):
        q = np.abs(f0 / f1)
        u = f1 / f0
    if vals is None:
        vals = np.full(n + 1, kernel.tail_constant)
        vals[reg] = _core(kernel, f0[reg], f1[reg], s.d[2][reg])
    P = np.full(n + 1, np.nan)
    P[reg] = _ratio_H(kernel, f0[reg], f1[reg])
    # a zero node has u -> +inf on its right and -inf on its left
    PL = np.where(near, kernel.H_pos_inf, P)[:-1]
    PR = np.where(near, kernel.H_neg_inf, P)[1:]
    with np.errstate(all="ignore"):
        D = 0.5 * h * (vals[:-1] + vals[1:]) - (PL - PR)
    k = np.floor(D + 0.5)
    off = np.abs(D - k) > CELL_TOL
    both = reg[:-1] & reg[1:]
    one_near = (near[:-1] & reg[1:]) | (reg[:-1] & near[1:])
    change = np.sign(f0[:-1]) != np.sign(f0[1:])
    toward = (u[:-1] < 0) & (u[1:] > 0)
    with np.errstate(all="ignore"):
        est = h / (q[:-1] + q[1:])
    flagged = both & (off | (k < 0) | (change & (k < 1)) | (~change & (k >= 1))
                      | (change & ~(toward & (est <= 1.5)))
                      | (~change & toward & (est > 0.5)))
    flagged |= one_near & (off | (k != 0))
    return int(np.count_nonzero(flagged & np.isfinite(D) | (both & ~np.isfinite(D))))


def _trapezoid(vals: np.ndarray, a: float, b: float, n: int) -> float:
    w = (b - a) / n
    inner = np.concatenate(([0.5 * float(vals[0]), 0.5 * float(vals[-1])], vals[1:-1]))
    return w * accurate_sum(inner)


def _periodic_trapezoid(vals: np.ndarray, a: float, b: float, n: int) -> float:
    return (b - a) / n * accurate_sum(vals[:-1])


# public integrand -------------------------------------------------------------

def integrand_values(model, kernel, xs, guard: float = DEFAULT_GUARD) -> np.ndarray:
    """Guarded counting integrand at sorted points ``xs`` (neighbours set the scale)."""
    model = as_model(model)
    kernel = get_kernel(kernel)
    xs = np.asarray(xs, dtype=float).reshape(-1)
    s = _sample(model, xs, guard)
    lo, hi = float(xs[0]), float(xs[-1])
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    return _counting_values(model, kernel, s, lo, hi, guard, _Tally())


def integrand(model, kernel, x: float, guard: float = DEFAULT_GUARD) -> float:
    """Counting integrand at a single point.

    The local scale of ``|f|`` is taken from ``x`` and ``x ± 1e-3 (1 + |x|)``.
    """
    model = as_model(model)
    kernel = get_kernel(kernel)
    dx = 1e-3 * (1.0 + abs(x))
    xs = np.array([x - dx, x, x + dx])
    s = _sample(model, xs, guard)
    if s.regular[1]:
        return float(_core(kernel, s.d[0][1:2], s.d[1][1:2], s.d[2][1:2])[0])
    s1 = _Samples(xs[1:2], s.d[:, 1:2], s.status[1:2], s.near[1:2], s.bad[1:2])
    return float(_counting_values(model, kernel, s1, x - dx, x + dx, guard, _Tally())[0])


# boundary terms ---------------------------------------------------------------

def _endpoint_state(model: FunctionModel, p: float, inward: float, guard: float):
    """``(is_zero, f0, f1, exact_zero)`` at an endpoint ``p``."""
    xs = np.array([p, p + inward]) if inward > 0 else np.array([p + inward, p])
    s = _sample(model, xs, guard)
    i = 0 if inward > 0 else 1
    st = int(s.status[i])
    f0, f1 = float(s.d[0][i]), float(s.d[1][i])
    if bool(s.near[i]):
        return True, f0, f1, f0 == 0.0
    if st == STATUS_DOMAIN or not math.isfinite(f0):
        raise EvaluationError("f is not defined at the endpoint", p)
    if st == STATUS_KINK:
        raise EvaluationError("f' is undefined at the endpoint", p)
    return False, f0, f1, False


def _endpoint_terms(model, kernel, a, b, mode, guard, tally):
    span = b - a
    za, fa0, fa1, exa = _endpoint_state(model, a, span / 64.0, guard)
    zb, fb0, fb1, exb = _endpoint_state(model, b, -span / 64.0, guard)
    for z, ex, name, f in ((za, exa, "a", fa0), (zb, exb, "b", fb0)):
        if z and not ex:
            tally.note(f"endpoint {name} classified as a zero (|f| = {abs(f):.3g})")
    if za:
        lower = kernel.H_neg_inf if mode == "closed" else kernel.H_pos_inf
    else:
        lower = float(_ratio_H(kernel, np.array([fa0]), np.array([fa1]))[0])
    if zb:
        upper = kernel.H_pos_inf if mode == "closed" else kernel.H_neg_inf
    else:
        upper = float(_ratio_H(kernel, np.array([fb0]), np.array([fb1]))[0])
    return lower, upper, za, zb


def boundary_terms(model, kernel, interval: Sequence[float], mode: str = "closed",
                   guard: float = DEFAULT_GUARD) -> tuple[float, float]:
    """``(boundary_lower, boundary_upper)``.

    A nonzero endpoint contributes ``H(f'(p)/f(p))``.  At an endpoint zero the
    antisymmetric continuation of ``f`` fixes the one-sided limits: the closed
    count uses ``H(-inf)`` at ``a`` and ``H(+inf)`` at ``b``, the open count the
    reverse.
    """
    if mode not in ("closed", "open"):
        raise ValueError("boundary terms exist for closed and open modes only")
    a, b = map(float, interval)
    lower, upper, _, _ = _endpoint_terms(as_model(model), get_kernel(kernel), a, b, mode,
                                         guard, _Tally())
    return lower, upper


# grid sizes and truncation ------------------------------------------------------

def rigorous_grid_size(a: float, b: float, bound: float) -> int:
    """Smallest ``N`` with ``(b - a)^3 bound / (6 N^2) < 1``, i.e. a trapezoid
    error below 1/2 when ``bound >= max |I''|``."""
    q = math.sqrt((b - a) ** 3 * bound / 6.0)
    n = max(1, math.floor(q) + 1)
    return n


def truncation_radius(model: FunctionModel) -> float:
    """Power-of-two ``R`` with ``|f'/f| < 0.1`` on ``|x| >= R`` for a polynomial.

    With ``rho = 1 + max |c_i / c_n|`` every root lies in ``|x| < rho`` and
    ``|f'/f| <= deg / (|x| - rho)``, so ``R >= rho + 10 deg`` suffices.
    """
    if model.poly is None:
        raise ValueError("infinite endpoints need a polynomial expression")
    c = list(model.poly)
    deg = len(c) - 1
    if deg == 0:
        return 1.0
    lead = c[-1]
    rho = 1 + max(abs(Fraction(ci) / lead) for ci in c[:-1])
    target = float(rho) + 10.0 * deg
    return float(2.0 ** math.ceil(math.log2(target)))


def resolve_interval(model: FunctionModel, a: float, b: float):
    """Replace infinite endpoints by ``∓R``; returns ``(a, b, R or None)``."""
    if math.isfinite(a) and math.isfinite(b):
        return a, b, None
    R = truncation_radius(model)
    a2 = -R if a == -math.inf else a
    b2 = R if b == math.inf else b
    if not a2 < b2:
        raise ValueError("interval is empty after truncation")
    return a2, b2, R


# quadrature engine ----------------------------------------------------------------

@dataclass
class _QuadResult:
    integral: float
    n: int
    converged: bool
    samples: _Samples | None


def _integrate(model: FunctionModel, kernel: Kernel, a: float, b: float, grid: Grid,
               guard: float, tally: _Tally, values_fn, periodic: bool = False,
               accept: Callable[[float, float], bool] | None = None,
               plain: bool = True) -> _QuadResult:
    rule = _periodic_trapezoid if periodic else _trapezoid

    def level(n: int):
        tally.counts.clear()  # per-node diagnostics refer to the final grid only
        s = _sample(model, _nodes(a, b, n), guard)
        vals = values_fn(s)
        if not np.isfinite(vals).all():
            i = int(np.flatnonzero(~np.isfinite(vals))[0])
            raise EvaluationError("integrand is not finite", float(s.xs[i]))
        return rule(vals, a, b, n), s, vals

    if grid.kind in ("fixed", "rigorous"):
        n = grid.n if grid.kind == "fixed" else rigorous_grid_size(a, b, grid.bound)
        t, s, _ = level(n)
        return _QuadResult(t, n, True, s)

    if accept is None:
        def accept(t_new, t_old):
            return abs(t_new - t_old) < AUTO_TOL
    n = AUTO_START
    t_old, s, _ = level(n)
    while True:
        if n >= AUTO_CAP:
            tally.note(f"auto grid reached the cap N={AUTO_CAP} without convergence")
            return _QuadResult(t_old, n, False, s)
        n2 = 2 * n
        t_new, s, vals = level(n2)
        rise = _unresolved_cells(kernel, s, vals if plain else None)
        if accept(t_new, t_old) and (rise == 0 or n2 >= RISE_MIN_N):
            if rise:
                tally.note(f"{rise} cell(s) still look unresolved at N={n2}")
            return _QuadResult(t_new, n2, True, s)
        n, t_old = n2, t_new


# counting ---------------------------------------------------------------------------

def _count_converged(raw_new: float, raw_old: float) -> bool:
    """Stop rule for auto grids on a count.

    Two grids must agree within ``AUTO_TOL`` and round to the same integer.
    The raw value must also sit within ``2 AUTO_TOL`` of that integer, unless
    the two grids agree so closely that the quadrature has visibly converged
    to a non-integer (which is then reported as such).
    """
    if abs(raw_new - raw_old) >= AUTO_TOL:
        return False
    if math.floor(raw_new + 0.5) != math.floor(raw_old + 0.5):
        return False
    near_integer = abs(raw_new - math.floor(raw_new + 0.5)) < 2.0 * AUTO_TOL
    return near_integer or abs(raw_new - raw_old) < 1e-6 * max(1.0, abs(raw_new))


def _finish(integral, lower, upper, n, tally, mode, kernel, a, b, R, raise_non_integer):
    raw = integral + upper - lower
    count = int(math.floor(raw + 0.5))
    residual = abs(raw - count)
    if count < 0:
        tally.note("negative count: the input is probably not admissible")
    warnings = tally.render()
    rep = CountReport(integral, upper, lower, raw, count, residual, n, warnings, mode,
                      kernel.name, (a, b), R)
    if residual > 0.4:
        msg = f"raw value {raw:.6g} is not close to an integer"
        if raise_non_integer:
            raise NonIntegerResult(msg, rep)
        rep.warnings.append(msg)
    return rep


def _check_grid_kernel(grid: Grid, kernel: Kernel):
    if grid.kind == "rigorous" and not kernel.smooth:
        raise UnsupportedKernel(f"rigorous mode needs a twice differentiable kernel, "
                                f"{kernel.name} is not")


def count_zeros(req: CountRequest | None = None, **kwargs) -> CountReport:
    """Count zeros of ``req.model`` on ``[req.a, req.b]`` (closed or open).

    Also callable as ``count_zeros(model=..., a=..., b=..., kernel=..., mode=...,
    grid=...)``.

    Raises:
        NonIntegerResult: in auto mode when the raw value is more than 0.4 away
            from an integer; the report is attached.
        EvaluationError: when the function cannot be evaluated.
    """
    if req is None:
        req = CountRequest(**kwargs)
    if req.mode == "periodic":
        return count_zeros_periodic(req.model, (req.a, req.b), req.kernel, req.grid,
                                    req.zero_guard_tol)
    kernel, model = req.kernel, req.model
    _check_grid_kernel(req.grid, kernel)
    a, b, R = resolve_interval(model, float(req.a), float(req.b))
    guard = req.zero_guard_tol
    tally = _Tally()
    lower, upper, _, _ = _endpoint_terms(model, kernel, a, b, req.mode, guard, tally)

    def values(s):
        return _counting_values(model, kernel, s, a, b, guard, tally)

    def accept(t_new, t_old):
        return _count_converged(t_new + upper - lower, t_old + upper - lower)

    q = _integrate(model, kernel, a, b, req.grid, guard, tally, values, accept=accept)
    return _finish(q.integral, lower, upper, q.n, tally, req.mode, kernel, a, b, R,
                   req.grid.kind == "auto")


def count_zeros_periodic(model, period_interval: Sequence[float], kernel="cauchy",
                         grid: Grid | str | int | None = None,
                         guard: float = DEFAULT_GUARD) -> CountReport:
    """Count zeros of a periodic ``f`` over one period ``[a, a + T)``.

    The boundary terms cancel, so the count is the periodic trapezoid sum alone.
    """
    model, kernel, grid = as_model(model), get_kernel(kernel), Grid.parse(grid)
    _check_grid_kernel(grid, kernel)
    a, b = map(float, period_interval)
    if not a < b:
        raise ValueError("interval needs a < b")
    tally = _Tally()

    def values(s):
        return _counting_values(model, kernel, s, a, b, guard, tally, periodic=True)

    def accept(t_new, t_old):
        return _count_converged(t_new, t_old)

    q = _integrate(model, kernel, a, b, grid, guard, tally, values, periodic=True, accept=accept)
    return _finish(q.integral, 0.0, 0.0, q.n, tally, "periodic", kernel, a, b, None,
                   grid.kind == "auto")


# generalized integrand -----------------------------------------------------------

def _generalized_core(kernel, gamma: OddMap, kappa: OddMap, f0, f1, f2):
    g, gd = gamma.fn(f1)
    k, kd = kappa.fn(f0)
    out = np.empty_like(f0)
    far = np.abs(k) >= np.abs(g)
    near = ~far
    with np.errstate(all="ignore"):
        if far.any():
            v = g[far] / k[far]
            kk = k[far]
            out[far] = kernel.h(v) * (g[far] * f1[far] * kd[far] - gd[far] * f2[far] * kk) / (kk * kk)
        if near.any():
            gg = g[near]
            r = k[near] / gg
            out[near] = kernel.tail(r) * (f1[near] * kd[near] / gg - gd[near] * f2[near] * r / gg)
    return out


def generalized_integrand(model, kernel, gamma: OddMap, kappa: OddMap, x: float) -> float:
    """``h(g(f')/k(f)) (g(f') f' k'(f) - g'(f') f'' k(f)) / k(f)^2`` at ``x``."""
    model, kernel = as_model(model), get_kernel(kernel)
    j = model.jet(x)
    c = j.coeffs
    return float(_generalized_core(kernel, gamma, kappa, c[0:1], c[1:2], c[2:3])[0])


def count_zeros_generalized(model, a: float, b: float, kernel="cauchy",
                            gamma: OddMap | None = None, kappa: OddMap | None = None,
                            mode: str = "closed", grid=None,
                            guard: float = DEFAULT_GUARD) -> CountReport:
    """Count with the generalized integrand; boundary function ``H(g(f')/k(f))``."""
    model, kernel, grid = as_model(model), get_kernel(kernel), Grid.parse(grid)
    gamma = gamma or OddMap.identity()
    kappa = kappa or OddMap.identity()
    _check_grid_kernel(grid, kernel)
    a, b, R = resolve_interval(model, float(a), float(b))
    tally = _Tally()
    span = b - a
    za, fa0, fa1, _ = _endpoint_state(model, a, span / 64.0, guard)
    zb, fb0, fb1, _ = _endpoint_state(model, b, -span / 64.0, guard)

    def bterm(f0, f1):
        g, _ = gamma.fn(np.array([f1]))
        k, _ = kappa.fn(np.array([f0]))
        return float(_ratio_H(kernel, k, g)[0])

    if za:
        lower = kernel.H_neg_inf if mode == "closed" else kernel.H_pos_inf
    else:
        lower = bterm(fa0, fa1)
    if zb:
        upper = kernel.H_pos_inf if mode == "closed" else kernel.H_neg_inf
    else:
        upper = bterm(fb0, fb1)

    def core(s):
        return _generalized_core(kernel, gamma, kappa, s.d[0], s.d[1], s.d[2])

    def values(s):
        vals = np.full(s.xs.shape[0], np.nan)
        reg = s.regular
        sub = _Samples(s.xs[reg], s.d[:, reg], s.status[reg], s.near[reg], s.bad[reg])
        vals[reg] = core(sub)
        idx = np.flatnonzero(~reg)
        if idx.shape[0]:
            vals[idx] = _nudged(model, s.xs, idx, a, b, span * NUDGE, core, guard, tally,
                                "degenerate node evaluated by a shifted average")
        return vals

    def accept(t_new, t_old):
        return _count_converged(t_new + upper - lower, t_old + upper - lower)

    q = _integrate(model, kernel, a, b, grid, guard, tally, values, accept=accept, plain=False)
    return _finish(q.integral, lower, upper, q.n, tally, mode, kernel, a, b, R,
                   grid.kind == "auto")


# second-derivative estimate ---------------------------------------------------------

def _second_derivative_of_integrand(kernel: Kernel, d: np.ndarray) -> np.ndarray:
    """``I''`` from ``f..f''''`` by truncated series arithmetic (order 2 suffices)."""
    n = d.shape[1]
    T = jets.to_taylor
    F0 = T(d)
    F1 = np.zeros_like(F0)
    F1[:4] = T(d[1:5])
    F2 = np.zeros_like(F0)
    F2[:3] = T(d[2:5])
    U = jets.t_div(F1, F0)
    Q = jets.t_mul(U, U) - jets.t_div(F2, F0)
    h0, h1, h2 = kernel.derivs(U[0])
    z = np.zeros(n)
    HU = jets.t_compose(U, [h0, h1, h2, z, z])
    I = jets.t_mul(HU, Q)
    return 2.0 * I[2]


def estimate_Ibound(model, kernel, interval: Sequence[float], samples: int = 2000,
                    safety: float = 2.0, return_raw: bool = False):
    """Heuristic estimate of ``max |I''|`` on the interval, times ``safety``.

    ``I''`` is evaluated on ``samples + 1`` equidistant nodes, then on a 10x
    finer grid over the two cells around the largest value.  Nodes where ``f``
    nearly vanishes are skipped; the value there follows from its neighbours.
    This is an estimate, not a certified bound.
    """
    if samples < 100:
        raise ValueError("samples must be at least 100")
    model, kernel = as_model(model), get_kernel(kernel)
    if not kernel.smooth:
        raise UnsupportedKernel(f"{kernel.name} is not twice differentiable")
    a, b = map(float, interval)

    def scan(xs):
        d, st = model.derivs(xs)
        ok = (st == STATUS_OK) & (np.abs(d[0]) > 1e-8 * (1.0 + _local_max(d[0])))
        with np.errstate(all="ignore"):
            v = np.abs(_second_derivative_of_integrand(kernel, d))
        v = np.where(ok & np.isfinite(v), v, 0.0)
        return v

    xs = _nodes(a, b, samples)
    v = scan(xs)
    i = int(np.argmax(v))
    step = (b - a) / samples
    lo, hi = max(a, xs[i] - step), min(b, xs[i] + step)
    fine = scan(np.linspace(lo, hi, 21))
    raw = float(max(v.max(), fine.max()))
    return (raw * safety, raw) if return_raw else raw * safety


# admissibility diagnostics -----------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    location: float
    kind: str        # sign_change | small_minimum | exact_zero | undefined
    verdict: str     # admissible | suspicious
    detail: str = ""


def _diverges(model: FunctionModel, x0: float, delta0: float, side: int) -> tuple[bool, str]:
    """``f'/f`` grows monotonically without sign flip as ``x -> x0`` from ``side``."""
    xs = np.array([x0 + side * delta0 / 2.0**k for k in range(3)])
    d, st = model.derivs(xs)
    if (st == STATUS_DOMAIN).any() or not np.isfinite(d[:2]).all() or (d[0] == 0).any():
        return False, "undefined near the point"
    with np.errstate(all="ignore"):
        u = d[1] / d[0]
    want = side  # -inf from the left, +inf from the right
    if not (np.sign(u) == want).all():
        return False, "f'/f has the wrong sign"
    a = np.abs(u)
    if not (a[1] > a[0] and a[2] > a[1]):
        return False, "f'/f is not growing"
    # roughly 1/t growth: each halving of the distance should at least ~double |u| times mu
    if not (a[2] / a[1] > 1.2 and a[1] / a[0] > 1.2):
        return False, "f'/f grows too slowly"
    return True, ""


def admissibility_scan(model, interval: Sequence[float], grid: int = 1024) -> list[Diagnostic]:
    """Locate near-zeros of ``f`` and test the divergence of ``f'/f`` around each.

    A candidate is admissible when ``f'/f`` runs monotonically to ``-inf`` from
    the left and ``+inf`` from the right over three dyadic approach scales.
    """
    if grid < 16:
        raise ValueError("grid must be at least 16")
    model = as_model(model)
    a, b = map(float, interval)
    xs = _nodes(a, b, grid)
    d, st = model.derivs(xs)
    f0 = d[0]
    h = (b - a) / grid
    valued = (st == STATUS_OK) | (st == STATUS_KINK)
    f = np.where(valued, f0, np.nan)
    scale = np.nanmax(np.abs(f)) if np.isfinite(f).any() else 1.0
    cands: list[tuple[float, str]] = []
    tiny = valued & (np.abs(np.where(valued, f, 1.0)) < 1e-12 * (1.0 + scale))
    tiny[1:-1] |= ~valued[1:-1] & tiny[:-2] & tiny[2:]
    for i in range(grid + 1):
        if not valued[i] and not tiny[i]:
            cands.append((float(xs[i]), "undefined"))
        elif tiny[i] and not (i > 0 and tiny[i - 1]):
            j = i
            while j < grid and tiny[j + 1]:
                j += 1
            # one candidate per run of vanishing nodes
            cands.append((float(0.5 * (xs[i] + xs[j])), "exact_zero"))
    for i in range(grid):
        if valued[i] and valued[i + 1] and f[i] != 0 and f[i + 1] != 0 and np.sign(f[i]) != np.sign(f[i + 1]):
            lo, hi = float(xs[i]), float(xs[i + 1])
            flo = f[i]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                fm = model.derivs(np.array([mid]))[0][0, 0]
                if fm == 0 or not np.isfinite(fm):
                    lo = hi = mid
                    break
                if np.sign(fm) == np.sign(flo):
                    lo, flo = mid, fm
                else:
                    hi = mid
            cands.append((0.5 * (lo + hi), "sign_change"))
    af = np.abs(f)
    for i in range(1, grid):
        if (valued[i - 1:i + 2].all() and af[i] <= af[i - 1] and af[i] <= af[i + 1]
                and af[i] < 1e-3 * (1.0 + scale) and af[i] > 1e-12 * (1.0 + scale)
                and np.sign(f[i - 1]) == np.sign(f[i + 1]) == np.sign(f[i])):
            cands.append((float(xs[i]), "small_minimum"))
    cands.sort()
    merged: list[tuple[float, str]] = []
    for x, kind in cands:
        if merged and abs(x - merged[-1][0]) <= h:
            if merged[-1][1] in ("small_minimum",) and kind != "small_minimum":
                merged[-1] = (x, kind)
            continue
        merged.append((x, kind))
    out = []
    for x, kind in merged:
        delta0 = h / 2.0
        notes = []
        ok = True
        for side, name in ((-1, "left"), (1, "right")):
            if (side < 0 and x - delta0 < a) or (side > 0 and x + delta0 > b):
                continue
            good, why = _diverges(model, x, delta0, side)
            if not good:
                ok = False
                notes.append(f"{name}: {why}")
        if kind == "small_minimum" and ok:
            # an ordinary local minimum away from zero does not make f'/f diverge
            notes.append("small local minimum of |f|")
        out.append(Diagnostic(x, kind, "admissible" if ok else "suspicious", "; ".join(notes)))
    return out
