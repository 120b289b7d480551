import random
from fractions import Fraction

import pytest

from zerocount.oracle import RationalPoly


def random_poly(rng: random.Random) -> RationalPoly:
    """Product of rational linear factors (roots k/8 in [-5, 5], multiplicity up to 3)
    and the occasional irreducible quadratic; degree at most 8."""
    deg = rng.randint(1, 8)
    p = RationalPoly([Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 2, 4]))])
    d = 0
    while d < deg:
        if deg - d >= 2 and rng.random() < 0.25:
            re = Fraction(rng.randint(-20, 20), 4)
            im = Fraction(rng.randint(1, 8), 4)
            p = p * RationalPoly([re * re + im * im, -2 * re, 1])
            d += 2
        else:
            r = Fraction(rng.randint(-40, 40), 8)
            m = min(rng.choice([1, 1, 1, 2, 2, 3]), deg - d)
            for _ in range(m):
                p = p * RationalPoly([-r, 1])
            d += m
    return p


@pytest.fixture
def make_poly():
    return random_poly
