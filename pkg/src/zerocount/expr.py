"""Infix expression front end: tokenizer, recursive-descent parser, printer.

Grammar (one free variable ``x``)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | power
    power := atom ('^' unary)?          # right-associative, binds tighter than unary '-'
    atom  := NUMBER | 'x' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

so ``-x^2`` is ``-(x^2)``, ``2^3^2`` is ``2^(3^2)`` and ``x^-1`` is allowed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier
from . import jets

__all__ = [
    "Num", "Const", "Var", "Unary", "Binary", "Call", "Node",
    "FUNCTIONS", "CONSTANTS", "parse", "pretty", "evaluate", "to_polynomial",
    "integer_exponent",
]

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs", "sinh", "cosh", "tanh",
             "erf", "besselj0", "besselj1", "atan")
CONSTANTS = {"pi": float(np.pi), "e": float(np.e)}


@dataclass(frozen=True)
class Num:
    text: str

    @property
    def value(self) -> float:
        return float(self.text)


@dataclass(frozen=True)
class Const:
    name: str

    @property
    def value(self) -> float:
        return CONSTANTS[self.name]


@dataclass(frozen=True)
class Var:
    name: str = "x"


@dataclass(frozen=True)
class Unary:
    op: str
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Const, Var, Unary, Binary, Call]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_ATOM_START = ("'('", "'-'", "identifier", "number")


@dataclass
class _Tok:
    kind: str  # num | ident | op | eof
    text: str
    offset: int


def _byte_offset(src: str, i: int) -> int:
    return len(src[:i].encode("utf-8"))


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            pos = n
            break
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            j = pos
            while j < n and src[j].isspace():
                j += 1
            raise ExpressionSyntaxError(f"unexpected character {src[j]!r}", _byte_offset(src, j),
                                        _ATOM_START + ("operator",))
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), _byte_offset(src, start)))
        pos = m.end()
    toks.append(_Tok("eof", "", _byte_offset(src, n)))
    return toks


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, expected: tuple[str, ...]):
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        raise ExpressionSyntaxError(f"unexpected {what}", t.offset, expected)

    def is_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "eof":
            self.fail(("'*'", "'+'", "'-'", "'/'", "'^'", "end of input"))
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.is_op("+", "-"):
            op = self.advance().text
            node = Binary(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.advance().text
            node = Binary(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.is_op("-"):
            self.advance()
            return Unary("-", self.unary())
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.is_op("^"):
            self.advance()
            return Binary("^", base, self.unary())
        return base

    def atom(self) -> Node:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(t.text)
        if t.kind == "ident":
            self.advance()
            if t.text == "x":
                return Var()
            if t.text in CONSTANTS:
                return Const(t.text)
            if t.text in FUNCTIONS:
                if not self.is_op("("):
                    self.fail(("'('",))
                self.advance()
                arg = self.expr()
                if not self.is_op(")"):
                    self.fail(("')'",) + ("'*'", "'+'", "'-'", "'/'", "'^'"))
                self.advance()
                return Call(t.text, arg)
            raise UnknownIdentifier(f"unknown identifier {t.text!r}", t.offset,
                                    ("x",) + tuple(CONSTANTS) + FUNCTIONS)
        if self.is_op("("):
            self.advance()
            node = self.expr()
            if not self.is_op(")"):
                self.fail(("')'", "'*'", "'+'", "'-'", "'/'", "'^'"))
            self.advance()
            return node
        self.fail(_ATOM_START)


def parse(src: str) -> Node:
    """Parse ``src`` into an AST.

    Raises:
        ExpressionSyntaxError: with the byte offset of the failure.
        UnknownIdentifier: for names outside the grammar.
    """
    if not src or not src.strip():
        raise ExpressionSyntaxError("empty expression", 0, _ATOM_START)
    return _Parser(src).parse()


# printing -------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_UNARY_PREC = 3
_ATOM_PREC = 5


def _prec(node: Node) -> int:
    if isinstance(node, Binary):
        return _PREC[node.op]
    if isinstance(node, Unary):
        return _UNARY_PREC
    return _ATOM_PREC


def _wrap(s: str, cond: bool) -> str:
    return f"({s})" if cond else s


def pretty(node: Node) -> str:
    """Canonical text with the minimum number of parentheses."""
    if isinstance(node, Num):
        return node.text
    if isinstance(node, Const):
        return node.name
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Call):
        return f"{node.name}({pretty(node.arg)})"
    if isinstance(node, Unary):
        return "-" + _wrap(pretty(node.arg), _prec(node.arg) < _UNARY_PREC)
    p = _PREC[node.op]
    if node.op == "^":
        left = _wrap(pretty(node.left), _prec(node.left) <= p)
        right = _wrap(pretty(node.right), _prec(node.right) < _UNARY_PREC)
        return f"{left}^{right}"
    left = _wrap(pretty(node.left), _prec(node.left) < p)
    right = _wrap(pretty(node.right), _prec(node.right) <= p)
    sep = f" {node.op} " if p == 1 else node.op
    return f"{left}{sep}{right}"


# evaluation -----------------------------------------------------------------

def integer_exponent(node: Node) -> int | None:
    """Return ``n`` if ``node`` is an integer literal (powered by repeated products)."""
    if isinstance(node, Num):
        v = node.value
        if v.is_integer() and abs(v) <= 1 << 16:
            return int(v)
    return None


def evaluate(node: Node, x: float) -> float:
    """Plain value of the expression at ``x`` (same primitives as the jet path)."""
    return float(_eval(node, np.array([float(x)]))[0])


def _eval(node: Node, x: np.ndarray) -> np.ndarray:
    if isinstance(node, (Num, Const)):
        return np.full_like(x, node.value)
    if isinstance(node, Var):
        return x.copy()
    if isinstance(node, Unary):
        return -_eval(node.arg, x)
    if isinstance(node, Call):
        u = _eval(node.arg, x)
        bad = jets.value_domain_violation(node.name, u)
        if bad.any():
            raise DomainError(f"{node.name} outside its domain", float(x[bad][0]))
        return jets.VALUE_FUNCS[node.name](u)
    a = _eval(node.left, x)
    if node.op == "^":
        n = integer_exponent(node.right)
        if n is not None:
            return jets.powi_values(a, n, x)
        b = _eval(node.right, x)
        if (a <= 0).any():
            raise DomainError("non-integer power of a non-positive base", float(x[a <= 0][0]))
        return jets.VALUE_FUNCS["exp"](b * jets.VALUE_FUNCS["ln"](a))
    b = _eval(node.right, x)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if (b == 0).any():
        raise DomainError("division by zero", float(x[b == 0][0]))
    return a / b


# polynomial extraction --------------------------------------------------------

def _padd(p, q):
    n = max(len(p), len(q))
    return [(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)]


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _trim(p):
    while len(p) > 1 and p[-1] == 0:
        p = p[:-1]
    return p


def to_polynomial(node: Node) -> list[Fraction] | None:
    """Exact ascending rational coefficients if ``node`` is a polynomial in x.

    Decimal literals are read exactly (``0.1`` is 1/10).  Returns ``None`` for
    anything involving functions, pi, e, or division by a non-constant.
    """
    if isinstance(node, Num):
        return [Fraction(node.text)]
    if isinstance(node, Var):
        return [Fraction(0), Fraction(1)]
    if isinstance(node, (Const, Call)):
        return None
    if isinstance(node, Unary):
        p = to_polynomial(node.arg)
        return None if p is None else [-c for c in p]
    p = to_polynomial(node.left)
    if p is None:
        return None
    if node.op == "^":
        n = integer_exponent(node.right)
        if n is None or n < 0:
            return None
        out = [Fraction(1)]
        for _ in range(n):
            out = _pmul(out, p)
        return _trim(out)
    q = to_polynomial(node.right)
    if q is None:
        return None
    if node.op == "+":
        return _trim(_padd(p, q))
    if node.op == "-":
        return _trim(_padd(p, [-c for c in q]))
    if node.op == "*":
        return _trim(_pmul(p, q))
    q = _trim(q)
    if len(q) != 1 or q[0] == 0:
        return None
    return [c / q[0] for c in p]
