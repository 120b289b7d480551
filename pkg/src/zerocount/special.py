"""Bessel functions of integer order and their derivatives.

Values come from ``scipy.special.jv`` (AMOS/Cephes, ~1e-15 absolute on the
ranges used here).  Derivatives use
``J_n^{(k)} = 2^{-k} sum_m (-1)^m C(k, m) J_{n-k+2m}``.
"""

from __future__ import annotations

from math import comb

import numpy as np
from scipy.special import jv

__all__ = ["bessel_j", "bessel_j_derivatives"]


def bessel_j(n: int, x):
    """``J_n(x)`` for integer ``n`` (negative orders via ``J_{-n} = (-1)^n J_n``)."""
    x = np.asarray(x, dtype=float)
    if n < 0:
        return (-1.0) ** n * jv(-n, x)
    return jv(n, x)


def bessel_j_derivatives(n: int, x, order: int = 4) -> list[np.ndarray]:
    """``[J_n(x), J_n'(x), ..., J_n^{(order)}(x)]``."""
    x = np.asarray(x, dtype=float)
    cache: dict[int, np.ndarray] = {}

    def J(m: int) -> np.ndarray:
        if m not in cache:
            cache[m] = bessel_j(m, x)
        return cache[m]

    out = [J(n)]
    for k in range(1, order + 1):
        acc = np.zeros_like(x)
        for m in range(k + 1):
            acc = acc + (-1.0) ** m * comb(k, m) * J(n - k + 2 * m)
        out.append(acc / 2.0**k)
    return out
