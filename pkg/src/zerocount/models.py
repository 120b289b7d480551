"""Jet-evaluable functions on an interval.

A :class:`FunctionModel` wraps anything that can produce ``f, f', ..., f''''``
on a vector of points: a parsed expression (through a compiled tape) or a
polynomial with rational coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from .errors import DomainError, NonSmoothPoint
from .jets import ORDER, Jet
from .tape import STATUS_DOMAIN, STATUS_KINK, Tape, _jetcore, backend_name, compile_ast, run_tape

__all__ = ["FunctionModel", "expression_model", "poly_model", "callable_model", "as_model",
           "eval_jet"]

DerivFn = Callable[[np.ndarray], "tuple[np.ndarray, np.ndarray]"]


def _poly_derivatives(coeffs: Sequence[Fraction]) -> list[list[Fraction]]:
    out = [list(coeffs)]
    for _ in range(ORDER):
        p = out[-1]
        out.append([k * p[k] for k in range(1, len(p))] or [Fraction(0)])
    return out


@dataclass(frozen=True)
class FunctionModel:
    """A function ``f`` together with a vectorized jet evaluator.

    ``derivs_fn(xs)`` returns ``(d, status)`` with ``d[k, i] = f^{(k)}(xs[i])``;
    ``status`` follows :mod:`zerocount.tape` (0 ok, 1 domain error, 2 kink).
    """

    derivs_fn: DerivFn
    domain: tuple[float, float] = (-math.inf, math.inf)
    smooth: bool = True
    poly: tuple[Fraction, ...] | None = None
    source: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def derivs(self, xs) -> tuple[np.ndarray, np.ndarray]:
        xs = np.ascontiguousarray(np.asarray(xs, dtype=np.float64).reshape(-1))
        return self.derivs_fn(xs)

    def jet(self, x: float) -> Jet:
        d, st = self.derivs(np.array([x]))
        if st[0] == STATUS_DOMAIN:
            raise DomainError(f"{self.source or 'f'} is not defined at x={x!r}", x)
        if st[0] == STATUS_KINK:
            raise NonSmoothPoint(f"{self.source or 'f'} is not differentiable at x={x!r}", x)
        return Jet(d[:, 0])

    def value(self, x: float) -> float:
        d, st = self.derivs(np.array([x]))
        if st[0] == STATUS_DOMAIN:
            raise DomainError(f"{self.source or 'f'} is not defined at x={x!r}", x)
        return float(d[0, 0])

    def __call__(self, x):
        return self.value(x)

    def with_domain(self, a: float, b: float) -> "FunctionModel":
        return FunctionModel(self.derivs_fn, (float(a), float(b)), self.smooth, self.poly,
                             self.source, self.meta)


def _calls(node) -> set[str]:
    if isinstance(node, _expr.Call):
        return {node.name} | _calls(node.arg)
    if isinstance(node, _expr.Unary):
        return _calls(node.arg)
    if isinstance(node, _expr.Binary):
        return _calls(node.left) | _calls(node.right)
    return set()


def expression_model(src_or_ast, domain=(-math.inf, math.inf)) -> FunctionModel:
    ast = _expr.parse(src_or_ast) if isinstance(src_or_ast, str) else src_or_ast
    tape: Tape = compile_ast(ast)
    poly = _expr.to_polynomial(ast)
    smooth = not (_calls(ast) & {"abs", "sqrt"})

    def fn(xs, _tape=tape):
        return run_tape(_tape, xs)

    return FunctionModel(fn, tuple(map(float, domain)), smooth,
                         None if poly is None else tuple(poly), _expr.pretty(ast),
                         {"ast": ast, "tape": tape})


_SPLITTER = 134217729.0  # 2^27 + 1


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _comp_horner(hi: np.ndarray, lo: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Compensated Horner with double-double coefficients ``hi + lo``.

    Accurate to about ``eps + cond * eps^2`` instead of ``cond * eps``, which
    keeps the noise band around a multiple root narrow.
    """
    s = np.full(xs.shape[0], hi[-1])
    c = np.full(xs.shape[0], lo[-1])
    for a, e in zip(hi[-2::-1], lo[-2::-1]):
        p, pe = _two_prod(s, xs)
        s, se = _two_sum(p, a)
        c = c * xs + (pe + se + e)
    return s + c


def poly_model(coeffs: Sequence, domain=(-math.inf, math.inf)) -> FunctionModel:
    """Polynomial model from ascending coefficients (ints, Fractions or decimal strings).

    The derivative polynomials are formed exactly in rationals and stored as
    double-double coefficients; evaluation uses compensated Horner on each.
    """
    fr = [Fraction(c) for c in coeffs]
    while len(fr) > 1 and fr[-1] == 0:
        fr.pop()
    if not any(fr):
        raise ValueError("polynomial needs a nonzero coefficient")
    table = []
    for p in _poly_derivatives(fr):
        hi = np.array([float(c) for c in p])
        lo = np.array([float(c - Fraction(h)) for c, h in zip(p, hi.tolist())])
        table.append((hi, lo))

    def fn(xs, _table=table):
        d = np.empty((ORDER + 1, xs.shape[0]))
        horner = _comp_horner if backend_name() == "python" else _jetcore.comp_horner
        with np.errstate(over="ignore", invalid="ignore"):
            for k, (hi, lo) in enumerate(_table):
                v = horner(hi, lo, xs)
                # the error-free transforms overflow before Horner does; fall back there
                bad = ~np.isfinite(v)
                if bad.any():
                    acc = np.full(int(bad.sum()), hi[-1])
                    for cf in hi[-2::-1]:
                        acc = acc * xs[bad] + cf
                    v[bad] = acc
                d[k] = v
        return d, np.zeros(xs.shape[0], dtype=np.int8)

    terms = []
    for k, c in enumerate(fr):
        if c:
            terms.append(f"({c})*x^{k}" if k else f"({c})")
    return FunctionModel(fn, tuple(map(float, domain)), True, tuple(fr), " + ".join(terms))


def callable_model(derivs_fn: DerivFn, domain=(-math.inf, math.inf), smooth: bool = True,
                   source: str = "") -> FunctionModel:
    return FunctionModel(derivs_fn, tuple(map(float, domain)), smooth, None, source)


def as_model(obj) -> FunctionModel:
    if isinstance(obj, FunctionModel):
        return obj
    if isinstance(obj, str):
        return expression_model(obj)
    raise TypeError(f"cannot build a function model from {type(obj).__name__}")


def eval_jet(ast_or_model, x: float) -> Jet:
    """Jet of an expression (text, AST or model) at ``x``.

    Raises DomainError outside the domain and NonSmoothPoint at kinks.
    """
    if isinstance(ast_or_model, FunctionModel):
        return ast_or_model.jet(x)
    return expression_model(ast_or_model).jet(x)
