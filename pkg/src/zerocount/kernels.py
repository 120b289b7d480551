"""Weight functions ``h`` with antiderivatives ``H`` for the counting integral.

Every kernel has unit mass, so ``H(+inf) - H(-inf) = 1``.  Each ``H`` is stored
with the additive constant of its closed form; downstream code only uses
differences and the two limits, which do not depend on that constant.

Besides ``h`` and ``H`` a kernel carries its *tail form*
``tail(r) = h(1/r) / r**2``.  Near a zero of ``f`` the ratio ``u = f'/f`` blows
up, and the integrand is evaluated through ``r = f/f'`` instead; the tail form is
bounded there and its value at ``r = 0`` is ``lim u**2 h(u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy import integrate
from scipy.special import erf

from .errors import KernelError, NonConvergence

__all__ = [
    "Kernel",
    "builtin_kernels",
    "get_kernel",
    "kernel_mass",
    "custom_kernel",
    "KERNEL_NAMES",
]

Decay = Literal["quadratic", "super_quadratic", "compact_support"]
ArrayFn = Callable[[np.ndarray], np.ndarray]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class Kernel:
    """A unit-mass weight ``h`` and its antiderivative ``H``.

    ``tail_constant`` is ``lim_{|u|->inf} u**2 h(u)``; it is the constant ``C``
    of the continuous extension ``C/mu`` of the integrand at a zero of
    multiplicity ``mu``.  ``derivs`` returns ``(h, h', h'')`` and is ``None``
    for kernels that are not twice differentiable.
    """

    name: str
    h: ArrayFn
    H: ArrayFn
    H_neg_inf: float
    H_pos_inf: float
    decay: Decay
    continuous: bool
    tail: ArrayFn
    tail_constant: float = 0.0
    derivs: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray, np.ndarray]] | None = None
    breakpoints: tuple[float, ...] = ()
    formula_h: str = ""
    formula_H: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def smooth(self) -> bool:
        return self.derivs is not None

    def h_at(self, u):
        return self.h(np.asarray(u, dtype=float))

    def H_at(self, u):
        return self.H(np.asarray(u, dtype=float))

    def H_limit(self, sign: int) -> float:
        return self.H_pos_inf if sign > 0 else self.H_neg_inf


def _errstate(fn):
    def wrapped(u):
        with np.errstate(all="ignore"):
            return fn(np.asarray(u, dtype=float))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


# cauchy ---------------------------------------------------------------------

@_errstate
def _cauchy_h(u):
    return 1.0 / (math.pi * (1.0 + u * u))


@_errstate
def _cauchy_H(u):
    return np.arctan(u) / math.pi


@_errstate
def _cauchy_tail(r):
    return 1.0 / (math.pi * (1.0 + r * r))


def _cauchy_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        w = 1.0 / (1.0 + u * u)
        return (w / math.pi, -2.0 * u * w * w / math.pi, (6.0 * u * u - 2.0) * w**3 / math.pi)


# algebraic ------------------------------------------------------------------

@_errstate
def _algebraic_h(u):
    return 0.5 * (1.0 + u * u) ** -1.5


@_errstate
def _algebraic_H(u):
    out = u / (2.0 * np.sqrt(u * u + 1.0))
    return np.where(np.isinf(u), 0.5 * np.sign(u), out)


@_errstate
def _algebraic_tail(r):
    return np.abs(r) / (2.0 * (1.0 + r * r) ** 1.5)


def _algebraic_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        w = 1.0 + u * u
        return (0.5 * w**-1.5, -1.5 * u * w**-2.5, 1.5 * (4.0 * u * u - 1.0) * w**-3.5)


# gaussian -------------------------------------------------------------------

@_errstate
def _gaussian_h(u):
    return np.exp(-u * u) / _SQRT_PI


@_errstate
def _gaussian_H(u):
    return 0.5 * erf(u)


@_errstate
def _gaussian_tail(r):
    r2 = r * r
    out = np.exp(-1.0 / r2) / (_SQRT_PI * r2)
    return np.where(r2 < 1e-3, 0.0, out)


def _gaussian_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        g = np.exp(-u * u) / _SQRT_PI
        return (g, -2.0 * u * g, (4.0 * u * u - 2.0) * g)


# sqrt4 ----------------------------------------------------------------------
# 1/(4u^2) - 1/(4u^2 s) with s = sqrt(4u^2+1) equals 1/(s(s+1)); the rationalised
# form has no removable singularity at 0 and no cancellation.

@_errstate
def _sqrt4_h(u):
    s = np.sqrt(4.0 * u * u + 1.0)
    return 1.0 / (s * (s + 1.0))


@_errstate
def _sqrt4_H(u):
    out = u / (np.sqrt(4.0 * u * u + 1.0) + 1.0)
    return np.where(np.isinf(u), 0.5 * np.sign(u), out)


@_errstate
def _sqrt4_tail(r):
    s = np.sqrt(4.0 + r * r)
    return 1.0 / ((s + np.abs(r)) * s)


def _sqrt4_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        s = np.sqrt(4.0 * u * u + 1.0)
        s1 = 4.0 * u / s
        s2 = 4.0 / s**3
        p = s * s + s
        p1 = (2.0 * s + 1.0) * s1
        p2 = 2.0 * s1 * s1 + (2.0 * s + 1.0) * s2
        return (1.0 / p, -p1 / p**2, -p2 / p**2 + 2.0 * p1 * p1 / p**3)


# sech -----------------------------------------------------------------------

@_errstate
def _sech_h(u):
    return 1.0 / np.cosh(2.0 * u) ** 2


@_errstate
def _sech_H(u):
    return 0.5 * np.tanh(2.0 * u)


@_errstate
def _sech_tail(r):
    out = 1.0 / (np.cosh(2.0 / r) ** 2 * r * r)
    return np.where(np.abs(r) < 1e-3, 0.0, out)


def _sech_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        s = 1.0 / np.cosh(2.0 * u) ** 2
        t = np.tanh(2.0 * u)
        return (s, -4.0 * s * t, 16.0 * s * t * t - 8.0 * s * s)


# logistic -------------------------------------------------------------------

@_errstate
def _logistic_h(u):
    return 0.25 / np.cosh(0.5 * u) ** 2


@_errstate
def _logistic_H(u):
    return -1.0 / (1.0 + np.exp(u))


@_errstate
def _logistic_tail(r):
    out = 0.25 / (np.cosh(0.5 / r) ** 2 * r * r)
    return np.where(np.abs(r) < 1e-3, 0.0, out)


def _logistic_derivs(u):
    u = np.asarray(u, dtype=float)
    with np.errstate(all="ignore"):
        sig = 0.5 * (1.0 + np.tanh(0.5 * u))
        h = 0.25 / np.cosh(0.5 * u) ** 2
        return (h, h * (1.0 - 2.0 * sig), h * (1.0 - 2.0 * sig) ** 2 - 2.0 * h * h)


# unit box / unit triangle ---------------------------------------------------

@_errstate
def _box_h(u):
    return np.where(np.abs(u) <= 0.5, 1.0, 0.0)


@_errstate
def _box_H(u):
    return np.clip(u + 0.5, 0.0, 1.0)


@_errstate
def _box_tail(r):
    return np.where(np.abs(r) >= 2.0, 1.0 / (r * r), 0.0)


@_errstate
def _triangle_h(u):
    return np.maximum(0.0, 1.0 - np.abs(u))


@_errstate
def _triangle_H(u):
    u = np.clip(u, -1.0, 1.0)
    return np.where(u <= 0.0, 0.5 * (1.0 + u) ** 2, 1.0 - 0.5 * (1.0 - u) ** 2)


@_errstate
def _triangle_tail(r):
    a = np.abs(r)
    return np.where(a > 1.0, (a - 1.0) / a**3, 0.0)


_BUILTINS: tuple[Kernel, ...] = (
    Kernel("cauchy", _cauchy_h, _cauchy_H, -0.5, 0.5, "quadratic", True, _cauchy_tail,
           1.0 / math.pi, _cauchy_derivs, (), "1/(pi*(1+x^2))", "atan(x)/pi"),
    Kernel("algebraic", _algebraic_h, _algebraic_H, -0.5, 0.5, "quadratic", True,
           _algebraic_tail, 0.0, _algebraic_derivs, (), "1/(2*(x^2+1)^(3/2))",
           "x/(2*sqrt(x^2+1))"),
    Kernel("gaussian", _gaussian_h, _gaussian_H, -0.5, 0.5, "super_quadratic", True,
           _gaussian_tail, 0.0, _gaussian_derivs, (), "exp(-x^2)/sqrt(pi)", "erf(x)/2"),
    Kernel("sqrt4", _sqrt4_h, _sqrt4_H, -0.5, 0.5, "quadratic", True, _sqrt4_tail, 0.25,
           _sqrt4_derivs, (), "1/(4x^2) - 1/(4x^2*sqrt(4x^2+1))", "(sqrt(4x^2+1)-1)/(4x)"),
    Kernel("sech", _sech_h, _sech_H, -0.5, 0.5, "super_quadratic", True, _sech_tail, 0.0,
           _sech_derivs, (), "sech(2x)^2", "tanh(2x)/2"),
    Kernel("logistic", _logistic_h, _logistic_H, -1.0, 0.0, "super_quadratic", True,
           _logistic_tail, 0.0, _logistic_derivs, (), "e^x/(1+e^x)^2", "-1/(1+e^x)"),
    Kernel("unit_box", _box_h, _box_H, 0.0, 1.0, "compact_support", False, _box_tail, 0.0,
           None, (-0.5, 0.5), "UnitBox(x)", "0 | x+1/2 | 1"),
    Kernel("unit_triangle", _triangle_h, _triangle_H, 0.0, 1.0, "compact_support", True,
           _triangle_tail, 0.0, None, (-1.0, 0.0, 1.0), "UnitTriangle(x)",
           "0 | (1+x)^2/2 | 1-(1-x)^2/2 | 1"),
)

KERNEL_NAMES = tuple(k.name for k in _BUILTINS)


def builtin_kernels() -> list[Kernel]:
    """Return the eight built-in kernels in table order."""
    return list(_BUILTINS)


def get_kernel(name: str | Kernel) -> Kernel:
    if isinstance(name, Kernel):
        return name
    for k in _BUILTINS:
        if k.name == name:
            return k
    raise KeyError(f"unknown kernel {name!r}; choose one of {', '.join(KERNEL_NAMES)}")


def kernel_mass(k: Kernel, quad_tol: float = 1e-10) -> float:
    """Integrate ``h`` over the real line.

    The tails ``|x| > 1`` are mapped onto ``[-1, 1]`` with ``x = 1/t``, under
    which ``h(x) dx`` becomes ``tail(t) dt``, so the mass is
    ``int_{-1}^{1} h(x) + tail(x) dx``.
    """
    if quad_tol <= 0:
        raise ValueError("quad_tol must be positive")

    def integrand(x):
        return float(k.h(np.array([x]))[0] + k.tail(np.array([x]))[0])

    cuts = {-1.0, 1.0, 0.0}
    for p in k.breakpoints:
        cuts.add(p)
        if p != 0:
            cuts.add(1.0 / p)
    edges = sorted(c for c in cuts if -1.0 <= c <= 1.0)
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        val, err = integrate.quad(integrand, lo, hi, epsabs=quad_tol * 1e-2, epsrel=quad_tol,
                                  limit=200)
        total += val
        err_total += err
    if not math.isfinite(total) or err_total > quad_tol:
        raise NonConvergence(f"mass quadrature for kernel {k.name!r} reached error "
                             f"{err_total:.3g} > {quad_tol:.3g}")
    return total


def custom_kernel(name: str, h: ArrayFn, H: ArrayFn, H_neg_inf: float, H_pos_inf: float,
                  decay: Decay = "super_quadratic", continuous: bool = True, *,
                  tail_constant: float = 0.0, derivs=None,
                  breakpoints: tuple[float, ...] = (), mass_tol: float = 1e-6) -> Kernel:
    """Build and validate a user kernel.

    Raises:
        KernelError: if ``h`` does not integrate to 1 within ``mass_tol`` or the
            supplied limits are inconsistent with unit mass.
    """
    if decay not in ("quadratic", "super_quadratic", "compact_support"):
        raise KernelError(f"unknown decay class {decay!r}")

    def tail(r, _h=h, _c=tail_constant):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            out = _h(1.0 / r) / (r * r)
        return np.where(r == 0.0, _c, out)

    k = Kernel(name, h, H, float(H_neg_inf), float(H_pos_inf), decay, continuous, tail,
               float(tail_constant), derivs, tuple(breakpoints))
    if abs((k.H_pos_inf - k.H_neg_inf) - 1.0) > mass_tol:
        raise KernelError(f"H limits of {name!r} differ by {k.H_pos_inf - k.H_neg_inf}, not 1")
    try:
        mass = kernel_mass(k, quad_tol=min(mass_tol, 1e-8))
    except NonConvergence as exc:
        raise KernelError(f"could not verify the mass of {name!r}: {exc}") from exc
    if abs(mass - 1.0) > mass_tol:
        raise KernelError(f"kernel {name!r} has mass {mass!r}, expected 1")
    return k
