"""Order-4 Taylor jets.

Two conventions are in play and are kept strictly apart:

* ``Jet.coeffs[k]`` is the k-th *derivative* ``f^{(k)}(x0)``.
* The array kernels in this module (``t_mul``, ``t_compose``, ...) work on
  *Taylor coefficients* ``t[k] = f^{(k)}(x0) / k!``; products are then plain
  truncated Cauchy products.  ``to_taylor``/``to_derivs`` convert with ``k!``.

Array kernels take arrays of shape ``(5, n)`` so a whole quadrature grid is
propagated at once; a scalar jet is the ``n = 1`` case.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np
from scipy.special import erf as _erf

from .special import bessel_j_derivatives

ORDER = 4
FACT = np.array([1.0, 1.0, 2.0, 6.0, 24.0])
_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)

__all__ = [
    "ORDER", "FACT", "Jet", "VALUE_FUNCS", "to_taylor", "to_derivs", "t_const", "t_var",
    "t_mul", "t_div", "t_compose", "t_function", "t_powi", "powi_values",
    "value_domain_violation", "derivative_table",
]


def to_taylor(d: np.ndarray) -> np.ndarray:
    return d / FACT.reshape((-1,) + (1,) * (d.ndim - 1))[: d.shape[0]]


def to_derivs(t: np.ndarray) -> np.ndarray:
    return t * FACT.reshape((-1,) + (1,) * (t.ndim - 1))[: t.shape[0]]


def t_const(c: float, n: int) -> np.ndarray:
    t = np.zeros((ORDER + 1, n))
    t[0] = c
    return t


def t_var(x: np.ndarray) -> np.ndarray:
    t = np.zeros((ORDER + 1, x.shape[0]))
    t[0] = x
    t[1] = 1.0
    return t


def t_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    c = np.empty_like(a)
    with np.errstate(all="ignore"):
        c[0] = a[0] * b[0]
        c[1] = a[0] * b[1] + a[1] * b[0]
        c[2] = a[0] * b[2] + a[1] * b[1] + a[2] * b[0]
        c[3] = a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0]
        c[4] = a[0] * b[4] + a[1] * b[3] + a[2] * b[2] + a[3] * b[1] + a[4] * b[0]
    return c


def t_div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Series quotient; caller screens ``b[0] == 0``."""
    q = np.empty_like(a)
    with np.errstate(all="ignore"):
        q[0] = a[0] / b[0]
        q[1] = (a[1] - b[1] * q[0]) / b[0]
        q[2] = (a[2] - b[1] * q[1] - b[2] * q[0]) / b[0]
        q[3] = (a[3] - b[1] * q[2] - b[2] * q[1] - b[3] * q[0]) / b[0]
        q[4] = (a[4] - b[1] * q[3] - b[2] * q[2] - b[3] * q[1] - b[4] * q[0]) / b[0]
    return q


def t_compose(u: np.ndarray, g: list[np.ndarray]) -> np.ndarray:
    """Jet of ``G(u)`` given the derivatives ``g[k] = G^{(k)}(u0)``."""
    v1, v2, v3, v4 = u[1], u[2], u[3], u[4]
    c1, c2, c3, c4 = g[1], g[2] / 2.0, g[3] / 6.0, g[4] / 24.0
    r = np.empty_like(u)
    r[0] = g[0]
    with np.errstate(all="ignore"):
        r[1] = c1 * v1
        r[2] = c1 * v2 + c2 * v1 * v1
        r[3] = c1 * v3 + 2.0 * c2 * v1 * v2 + c3 * v1 * v1 * v1
        r[4] = (c1 * v4 + c2 * (2.0 * v1 * v3 + v2 * v2) + 3.0 * c3 * v1 * v1 * v2
                + c4 * v1 * v1 * v1 * v1)
    return r


def powi_values(a, n: int, like=None):
    """``a**n`` by repeated multiplication; mirrors ``t_powi`` on the value channel."""
    if n == 0:
        return np.ones_like(a if like is None else like)
    p = a
    for _ in range(abs(n) - 1):
        p = p * a
    if n < 0:
        with np.errstate(all="ignore"):
            return 1.0 / p
    return p


def t_powi(a: np.ndarray, n: int) -> np.ndarray:
    if n == 0:
        return t_const(1.0, a.shape[1])
    p = a
    for _ in range(abs(n) - 1):
        p = t_mul(p, a)
    if n < 0:
        return t_div(t_const(1.0, a.shape[1]), p)
    return p


VALUE_FUNCS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "erf": _erf,
    "atan": np.arctan,
    "besselj0": lambda u: bessel_j_derivatives(0, u, 0)[0],
    "besselj1": lambda u: bessel_j_derivatives(1, u, 0)[0],
}


def value_domain_violation(name: str, u: np.ndarray) -> np.ndarray:
    if name == "ln":
        return ~(u > 0)
    if name == "sqrt":
        return u < 0
    return np.zeros(u.shape, dtype=bool)


def _kink(name: str, u: np.ndarray) -> np.ndarray:
    if name in ("abs", "sqrt"):
        return u == 0
    return np.zeros(u.shape, dtype=bool)


def derivative_table(name: str, u0: np.ndarray) -> list[np.ndarray]:
    """``[G(u0), G'(u0), ..., G''''(u0)]`` for a built-in function ``G``."""
    f = VALUE_FUNCS
    with np.errstate(all="ignore"):
        if name == "exp":
            e = f["exp"](u0)
            return [e, e, e, e, e]
        if name == "ln":
            w = 1.0 / u0
            return [f["ln"](u0), w, -w * w, 2.0 * w**3, -6.0 * w**4]
        if name == "sqrt":
            s = f["sqrt"](u0)
            w = 1.0 / u0
            return [s, 0.5 / s, -0.25 * w / s, 0.375 * w * w / s, -0.9375 * w**3 / s]
        if name == "sin":
            s, c = f["sin"](u0), np.cos(u0)
            return [s, c, -s, -c, s]
        if name == "cos":
            s, c = np.sin(u0), f["cos"](u0)
            return [c, -s, -c, s, c]
        if name == "sinh":
            s, c = f["sinh"](u0), np.cosh(u0)
            return [s, c, s, c, s]
        if name == "cosh":
            s, c = np.sinh(u0), f["cosh"](u0)
            return [c, s, c, s, c]
        if name == "tan":
            t = f["tan"](u0)
            t2 = t * t
            return [t, 1.0 + t2, 2.0 * t * (1.0 + t2), 2.0 + 8.0 * t2 + 6.0 * t2 * t2,
                    t * (16.0 + 40.0 * t2 + 24.0 * t2 * t2)]
        if name == "tanh":
            # in terms of s = sech^2, which 1 - tanh^2 loses to cancellation for large |u|
            t = f["tanh"](u0)
            with np.errstate(over="ignore"):
                s = 1.0 / np.cosh(u0) ** 2
            return [t, s, -2.0 * t * s, s * (4.0 * t * t - 2.0 * s),
                    8.0 * t * s * (2.0 * s - t * t)]
        if name == "atan":
            w = 1.0 / (1.0 + u0 * u0)
            return [f["atan"](u0), w, -2.0 * u0 * w * w, (6.0 * u0 * u0 - 2.0) * w**3,
                    -24.0 * u0 * (u0 * u0 - 1.0) * w**4]
        if name == "erf":
            d1 = _TWO_OVER_SQRT_PI * np.exp(-u0 * u0)
            return [f["erf"](u0), d1, -2.0 * u0 * d1, (4.0 * u0 * u0 - 2.0) * d1,
                    (12.0 * u0 - 8.0 * u0**3) * d1]
        if name == "abs":
            z = np.zeros_like(u0)
            return [f["abs"](u0), np.sign(u0), z, z, z]
        if name == "besselj0":
            return bessel_j_derivatives(0, u0, ORDER)
        if name == "besselj1":
            return bessel_j_derivatives(1, u0, ORDER)
    raise KeyError(name)


def t_function(name: str, u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Apply a built-in to a jet array.

    Returns ``(jet, domain_mask, kink_mask)``; masked nodes carry NaN.
    """
    u0 = u[0]
    bad = value_domain_violation(name, u0)
    kink = _kink(name, u0) & ~bad
    r = t_compose(u, derivative_table(name, u0))
    if kink.any():
        # the value channel stays exact at a kink; only the derivatives are undefined
        r[0, kink] = VALUE_FUNCS[name](u0[kink])
        r[1:, kink] = np.nan
    r[:, bad] = np.nan
    return r, bad, kink


class Jet:
    """Value and derivatives 1..4 of a function at one point.

    ``coeffs[k]`` holds the k-th derivative, *not* the Taylor coefficient
    (which is ``coeffs[k] / k!``).
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.zeros(ORDER + 1)
        arr = np.asarray(coeffs, dtype=float).reshape(-1)
        c[: arr.shape[0]] = arr
        self.coeffs = c

    @classmethod
    def constant(cls, c: float) -> "Jet":
        return cls([c])

    @classmethod
    def variable(cls, x: float) -> "Jet":
        return cls([x, 1.0])

    @classmethod
    def _from_taylor(cls, t: np.ndarray) -> "Jet":
        return cls(to_derivs(t.reshape(ORDER + 1)))

    def _taylor(self) -> np.ndarray:
        return to_taylor(self.coeffs).reshape(ORDER + 1, 1)

    @staticmethod
    def _lift(other) -> "Jet":
        return other if isinstance(other, Jet) else Jet.constant(float(other))

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def derivative(self, k: int) -> float:
        return float(self.coeffs[k])

    def __add__(self, other):
        return Jet(self.coeffs + self._lift(other).coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        return Jet(self.coeffs - self._lift(other).coeffs)

    def __rsub__(self, other):
        return Jet(self._lift(other).coeffs - self.coeffs)

    def __neg__(self):
        return Jet(-self.coeffs)

    def __mul__(self, other):
        return Jet._from_taylor(t_mul(self._taylor(), self._lift(other)._taylor()))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other.coeffs[0] == 0:
            raise ZeroDivisionError("jet division by a jet with zero value")
        return Jet._from_taylor(t_div(self._taylor(), other._taylor()))

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        if isinstance(n, int) or (isinstance(n, float) and n.is_integer()):
            return Jet._from_taylor(t_powi(self._taylor(), int(n)))
        if self.coeffs[0] <= 0:
            raise ValueError("non-integer power of a non-positive jet")
        return (self._lift(n) * self.apply("ln")).apply("exp")

    def apply(self, name: str) -> "Jet":
        r, bad, kink = t_function(name, self._taylor())
        if bad.any() or kink.any():
            raise ValueError(f"{name} not differentiable at {self.value!r}")
        return Jet._from_taylor(r)

    def __eq__(self, other):
        return isinstance(other, Jet) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __iter__(self):
        return iter(float(c) for c in self.coeffs)

    def __repr__(self) -> str:
        return "Jet(" + ", ".join(repr(float(c)) for c in self.coeffs) + ")"
