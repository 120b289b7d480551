import math

import pytest
from hypothesis import assume, given, settings

from zerocount import evaluate, parse, pretty
from zerocount.errors import DomainError, ExpressionSyntaxError, UnknownIdentifier
from zerocount.expr import to_polynomial

from strategies import any_asts


@pytest.mark.parametrize("src, x, want", [
    ("-x^2", 3.0, -9.0),
    ("x^2^3", 2.0, 256.0),
    ("2^-x", 1.0, 0.5),
    ("1 - 2 - 3", 0.0, -4.0),
    ("8/4/2", 0.0, 1.0),
    ("2*pi", 0.0, 2 * math.pi),
    ("e^x", 1.0, math.e),
    ("besselj0(x)", 0.0, 1.0),
    ("abs(x - 3)", 1.0, 2.0),
    ("1.5e2 + .5", 0.0, 150.5),
    ("atan(x)*4", 1.0, math.pi),
])
def test_values(src, x, want):
    assert evaluate(parse(src), x) == pytest.approx(want, rel=1e-15)


@pytest.mark.parametrize("src, offset", [("x+", 2), ("2x", 1), ("sin(x", 5), ("", 0), ("x*)", 2)])
def test_syntax_errors(src, offset):
    with pytest.raises(ExpressionSyntaxError) as info:
        parse(src)
    assert info.value.offset == offset
    assert info.value.expected == tuple(sorted(info.value.expected))


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as info:
        parse("1 + y")
    assert info.value.offset == 4


@pytest.mark.parametrize("src", ["ln(x)", "sqrt(x)", "1/x"])
def test_domain_errors(src):
    with pytest.raises(DomainError):
        evaluate(parse(src), -1.0 if "1/x" not in src else 0.0)


def test_polynomial_extraction():
    assert to_polynomial(parse("(x+1)*(x-1)")) == [-1, 0, 1]
    assert to_polynomial(parse("-x^2 + x/2")) == [0, 0.5, -1]
    assert to_polynomial(parse("sin(x)")) is None
    assert to_polynomial(parse("x^-1")) is None


@settings(max_examples=300, deadline=None)
@given(ast=any_asts)
def test_pretty_roundtrip(ast):
    text = pretty(ast)
    assert parse(text) == ast
    assert pretty(parse(text)) == text


@settings(max_examples=200, deadline=None)
@given(ast=any_asts)
def test_roundtrip_preserves_values(ast):
    try:
        v = evaluate(ast, 0.7)
    except DomainError:
        return
    assume(math.isfinite(v))
    w = evaluate(parse(pretty(ast)), 0.7)
    assert w == v or (math.isnan(v) and math.isnan(w))
