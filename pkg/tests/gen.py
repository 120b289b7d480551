"""Seeded random expressions for finite-difference checks.

Every function of the grammar appears; the domain-limited ones are wrapped so
that their argument stays inside the domain for every real x.
"""

import math
import random

import numpy as np

from zerocount.tape import STATUS_OK

WRAPPED = {
    "sqrt": "sqrt(1.5 + ({})^2)",
    "ln": "ln(1.25 + ({})^2)",
    "tan": "tan(atan({})/2)",
    "abs": "abs(2 + sin({}))",
    "div": "({})/(1 + ({})^2)",
    "rpow": "(1 + ({})^2)^0.75",
}
ENTIRE = ("sin", "cos", "exp", "sinh", "cosh", "tanh", "erf", "besselj0", "besselj1", "atan")


def random_expr(rng: random.Random, depth: int = 3) -> str:
    if depth == 0 or rng.random() < 0.2:
        return rng.choice(["x", "x", "0.5*x", "pi", "e", str(rng.randint(1, 5) / 2)])
    kind = rng.random()
    a = random_expr(rng, depth - 1)
    if kind < 0.3:
        return f"{rng.choice(ENTIRE)}({a})"
    if kind < 0.5:
        w = rng.choice(list(WRAPPED))
        b = random_expr(rng, depth - 1) if w == "div" else a
        return WRAPPED[w].format(a, b) if w == "div" else WRAPPED[w].format(a)
    if kind < 0.6:
        return f"-({a})"
    if kind < 0.7:
        return f"({a})^{rng.randint(2, 3)}"
    b = random_expr(rng, depth - 1)
    return f"({a}) {rng.choice('+-*')} ({b})"


def fd_check(model, x: float, k: int) -> tuple[float, float, float]:
    """(jet value of f^(k+1), central difference of f^(k), scale of f^(k)).

    Step ``1e-6 max(1, |x|)``.
    """
    h = 1e-6 * max(1.0, abs(x))
    pts = np.array([x - h, x + h, x])
    d, status = model.derivs(pts)
    if (status != STATUS_OK).any():
        return math.nan, math.nan, math.nan
    g = d[k]
    fd = (g[1] - g[0]) / (2 * h)
    return float(d[k + 1, 2]), float(fd), float(np.max(np.abs(g[:2])))


def agrees(jet: float, fd: float, scale: float, rel: float = 1e-5) -> bool:
    # the floor is the rounding error of the difference quotient, eps |f^(k)| / h
    return abs(jet - fd) <= rel * max(abs(jet), abs(fd)) + 1e-9 * scale
