"""Reference zero counters used to check the integral counts.

* Sturm chains over exact rationals for polynomials.
* A sign-change scan with bisection for anything else.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import SuspectCluster
from .models import FunctionModel, as_model
from .tape import STATUS_OK, STATUS_KINK

__all__ = [
    "RationalPoly", "SturmChain", "sturm_chain", "sturm_count", "sturm_multiplicities",
    "squarefree_decomposition", "Zero", "ZeroList", "scan_count",
]


class RationalPoly:
    """Polynomial with exact rational coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        c = [Fraction(x) for x in coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c) if c else (Fraction(0),)

    @classmethod
    def from_roots(cls, roots: Sequence, lead=1) -> "RationalPoly":
        p = cls([lead])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other):
        return isinstance(other, RationalPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs])

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return RationalPoly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                             for i in range(n)])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, RationalPoly):
            return RationalPoly([c * Fraction(other) for c in self.coeffs])
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = RationalPoly([1])
        for _ in range(n):
            out = out * self
        return out

    def derivative(self) -> "RationalPoly":
        return RationalPoly([k * c for k, c in enumerate(self.coeffs)][1:] or [0])

    def divmod(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return RationalPoly([0]), RationalPoly(rem)
        q = [Fraction(0)] * (dq + 1)
        lead = other.lead
        for k in range(dq, -1, -1):
            coef = rem[k + len(other.coeffs) - 1] / lead
            q[k] = coef
            if coef:
                for j, b in enumerate(other.coeffs):
                    rem[k + j] -= coef * b
        return RationalPoly(q), RationalPoly(rem[: len(other.coeffs) - 1] or [0])

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def monic(self) -> "RationalPoly":
        if self.is_zero():
            return self
        return RationalPoly([c / self.lead for c in self.coeffs])

    def gcd(self, other: "RationalPoly") -> "RationalPoly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def sign_at(self, x) -> int:
        """Sign at a rational ``x`` or at ``±inf`` (given as float)."""
        if isinstance(x, float) and math.isinf(x):
            if self.is_zero():
                return 0
            s = 1 if self.lead > 0 else -1
            return s if (x > 0 or self.degree % 2 == 0) else -s
        v = self(x)
        return (v > 0) - (v < 0)

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]


def _as_poly(p) -> RationalPoly:
    if isinstance(p, RationalPoly):
        return p
    if isinstance(p, FunctionModel):
        if p.poly is None:
            raise ValueError("model is not a polynomial")
        return RationalPoly(p.poly)
    return RationalPoly(p)


@dataclass(frozen=True)
class SturmChain:
    polys: tuple[RationalPoly, ...]

    def variations(self, x) -> int:
        signs = [q.sign_at(x) for q in self.polys]
        signs = [s for s in signs if s != 0]
        return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def sturm_chain(p) -> SturmChain:
    """Chain of the square-free part: ``p0, p0', -rem(p0, p1), ...``."""
    p = _as_poly(p)
    if p.is_zero():
        raise ValueError("the zero polynomial has no Sturm chain")
    g = p.gcd(p.derivative()) if p.degree > 0 else RationalPoly([1])
    p0 = p // g
    chain = [p0]
    if p0.degree > 0:
        chain.append(p0.derivative())
        while True:
            r = -(chain[-2] % chain[-1])
            if r.is_zero():
                break
            chain.append(r)
    return SturmChain(tuple(chain))


def _frac(x):
    if isinstance(x, float) and math.isinf(x):
        return x
    return Fraction(x)


def sturm_count(p, a, b, mode: str = "closed") -> int:
    """Distinct real roots of ``p`` on ``[a, b]`` (closed) or ``(a, b)`` (open), exactly.

    Endpoints may be ``±inf`` floats.  Float endpoints are read exactly.
    """
    p = _as_poly(p)
    a, b = _frac(a), _frac(b)
    if not a < b:
        raise ValueError("need a < b")
    if p.degree <= 0:
        return 0
    ch = sturm_chain(p)
    n = ch.variations(a) - ch.variations(b)  # roots in (a, b]
    at_a = not (isinstance(a, float)) and p(a) == 0
    at_b = not (isinstance(b, float)) and p(b) == 0
    if mode == "closed":
        return n + int(at_a)
    if mode == "open":
        return n - int(at_b)
    raise ValueError(f"unknown mode {mode!r}")


def squarefree_decomposition(p) -> list[RationalPoly]:
    """Yun's algorithm: ``[q1, q2, ...]`` with ``p = lead * prod q_k^k``, ``q_k`` monic."""
    p = _as_poly(p).monic()
    if p.degree <= 0:
        return []
    dp = p.derivative()
    a0 = p.gcd(dp)
    b = p // a0
    c = dp // a0
    d = c - b.derivative()
    out = []
    while b.degree > 0:
        a = b.gcd(d)
        out.append(a)
        b = b // a
        c = d // a
        d = c - b.derivative()
    while out and out[-1].degree == 0:
        out.pop()
    return out


def sturm_multiplicities(p, a, b, mode: str = "closed") -> tuple[int, ...]:
    """Exact profile ``(n_1, n_2, ...)``: distinct roots of each multiplicity."""
    parts = squarefree_decomposition(p)
    counts = [sturm_count(q, a, b, mode) if q.degree > 0 else 0 for q in parts]
    while counts and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


# scanning oracle ----------------------------------------------------------------------

@dataclass(frozen=True)
class Zero:
    lo: float
    hi: float
    multiplicity: float
    kind: str  # sign_change | node | touch | flat (a run of vanishing nodes)

    @property
    def location(self) -> float:
        return 0.5 * (self.lo + self.hi)


@dataclass
class ZeroList:
    zeros: list[Zero] = field(default_factory=list)
    grid: int = 0

    def __len__(self) -> int:
        return len(self.zeros)

    def __iter__(self) -> Iterator[Zero]:
        return iter(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]

    @property
    def count(self) -> int:
        return len(self.zeros)

    def locations(self) -> list[float]:
        return [z.location for z in self.zeros]


def _bracket_tol(x: float) -> float:
    return 1e-10 * (1.0 + abs(x))


def _f(model: FunctionModel, x: float, row: int = 0) -> float:
    d, st = model.derivs(np.array([x]))
    if st[0] not in (STATUS_OK, STATUS_KINK):
        return math.nan
    return float(d[row, 0])


def _bisect(model, lo, hi, flo, row=0):
    for _ in range(400):
        if hi - lo <= _bracket_tol(0.5 * (lo + hi)):
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _f(model, mid, row)
        if fm == 0.0 or math.isnan(fm):
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


TOUCH_TOL = 1e-12


def _hides_neighbour(xs, f, fp, ok, i, n) -> bool:
    """A zero sitting exactly on node ``i`` masks a sign change in an adjacent cell.

    With a simple zero the neighbours take the sign of ``f'(x_i) (x_j - x_i)``;
    the wrong sign there means another zero inside that cell.  Slopes far below
    the neighbour values (even multiplicity, rounding) are ignored.
    """
    if not math.isfinite(fp[i]) or fp[i] == 0.0:
        return False
    for j in (i - 1, i + 1):
        if j < 0 or j > n or not ok[j] or f[j] == 0.0:
            continue
        step = xs[j] - xs[i]
        if abs(fp[i] * step) <= 1e-6 * abs(f[j]):
            continue
        if (f[j] > 0) != (fp[i] * step > 0):
            return True
    return False


def scan_count(model, interval: Sequence[float], grid: int = 10_000,
               raise_on_cluster: bool = True, estimate: bool = True) -> ZeroList:
    """Zeros of ``f`` on the closed interval from a ``grid``-panel scan.

    Sign changes are bisected to width ``1e-10 (1 + |x|)``.  Nodes with
    ``|f| < 1e-12`` at a local minimum of ``|f|`` count as zeros, and so do
    interior minima where ``f'`` changes sign and the refined ``|f|`` is below
    the same threshold (touch zeros).

    Raises:
        SuspectCluster: two distinct zeros are closer than one grid cell.
    """
    from .multiplicity import estimate_multiplicity

    model = as_model(model)
    a, b = map(float, interval)
    if not a < b:
        raise ValueError("need a < b")
    n = int(grid)
    k = np.arange(n + 1, dtype=np.float64)
    xs = a + ((b - a) * k) / n
    xs[0], xs[-1] = a, b
    d, st = model.derivs(xs)
    ok = (st == STATUS_OK) | (st == STATUS_KINK)
    f = np.where(ok, d[0], np.nan)
    fp = np.where(st == STATUS_OK, d[1], np.nan)
    af = np.abs(f)
    h = (b - a) / n
    found: list[tuple[float, float, str]] = []
    hidden: list[float] = []

    tiny = ok & (af < TOUCH_TOL)
    # an undefined node inside a vanishing run (exp(-1/x^2) at 0) belongs to the run
    tiny[1:-1] |= ~ok[1:-1] & tiny[:-2] & tiny[2:]
    i = 0
    while i <= n:
        if not tiny[i]:
            i += 1
            continue
        j = i
        while j < n and tiny[j + 1]:
            j += 1
        if j > i:
            # a run of vanishing nodes: f is flat to rounding there, report one zero
            found.append((float(xs[i]), float(xs[j]), "flat"))
        else:
            left = af[i - 1] if i > 0 and ok[i - 1] else math.inf
            right = af[i + 1] if i < n and ok[i + 1] else math.inf
            if af[i] <= left and af[i] <= right:
                found.append((float(xs[i]), float(xs[i]), "node"))
                if _hides_neighbour(xs, f, fp, ok, i, n):
                    hidden.append(float(xs[i]))
        i = j + 1

    for i in range(n):
        if not (ok[i] and ok[i + 1]) or f[i] == 0 or f[i + 1] == 0:
            continue
        if (f[i] > 0) != (f[i + 1] > 0):
            lo, hi = _bisect(model, float(xs[i]), float(xs[i + 1]), float(f[i]))
            found.append((lo, hi, "sign_change"))

    for i in range(1, n):
        if not ok[i - 1:i + 2].all() or not np.isfinite(fp[i - 1:i + 2]).all():
            continue
        if not (af[i] <= af[i - 1] and af[i] <= af[i + 1]) or af[i] < TOUCH_TOL:
            continue
        if not ((f[i - 1] > 0) == (f[i] > 0) == (f[i + 1] > 0)):
            continue
        # the minimum of |f| sits where f' changes sign
        for j0, j1 in ((i - 1, i), (i, i + 1)):
            if (fp[j0] > 0) != (fp[j1] > 0) and fp[j0] != 0 and fp[j1] != 0:
                lo, hi = _bisect(model, float(xs[j0]), float(xs[j1]), float(fp[j0]), row=1)
                xm = 0.5 * (lo + hi)
                if abs(_f(model, xm)) < TOUCH_TOL:
                    found.append((lo, hi, "touch"))
                break

    found.sort()
    merged: list[tuple[float, float, str]] = []
    for lo, hi, kind in found:
        if merged:
            plo, phi, pkind = merged[-1]
            if lo <= phi + _bracket_tol(hi) * 10:
                if pkind == "flat":
                    merged[-1] = (plo, max(phi, hi), pkind)
                elif pkind == "node" and kind != "node":
                    merged[-1] = (lo, hi, kind)
                continue
        merged.append((lo, hi, kind))

    zeros = []
    for lo, hi, kind in merged:
        mid = 0.5 * (lo + hi)
        mu = math.nan
        if estimate:
            side = "right" if mid <= a else "left" if mid >= b else "both"
            mu = estimate_multiplicity(model, mid, side=side)
        zeros.append(Zero(lo, hi, mu, kind))
    out = ZeroList(zeros, n)
    if raise_on_cluster and hidden:
        raise SuspectCluster(f"the zero at {hidden[0]!r} sits on a node next to another zero "
                             f"in the same cell (grid step {h:.3g})", tuple(zeros))
    if raise_on_cluster:
        for z0, z1 in zip(zeros, zeros[1:]):
            # two zeros inside one cell cannot both be resolved by the scan
            if math.floor((z0.location - a) / h) == math.floor((z1.location - a) / h):
                raise SuspectCluster(f"zeros near {z0.location!r} and {z1.location!r} are closer "
                                     f"than the grid step {h:.3g}", (z0, z1))
    return out
