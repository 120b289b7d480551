"""Straight-line jet programs compiled from expression ASTs.

An AST is flattened into a tape of SSA instructions (common subexpressions are
shared).  The tape is run over a whole grid of points at once, either by the
compiled extension ``zerocount._jetcore`` or by the numpy interpreter below.
The backend is picked at import time; ``ZEROCOUNT_BACKEND=python`` forces the
numpy path.
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass

import numpy as np

from . import jets
from .expr import Call, Const, FUNCTIONS, Node, Num, Unary, Var, integer_exponent

log = logging.getLogger(__name__)

OP_CONST, OP_VAR, OP_ADD, OP_SUB, OP_MUL, OP_DIV, OP_NEG, OP_POWI = range(8)
OP_FUNC0 = 16  # opcode OP_FUNC0 + FUNCTIONS.index(name)

STATUS_OK, STATUS_DOMAIN, STATUS_KINK = 0, 1, 2

__all__ = ["Tape", "compile_ast", "run_tape", "accurate_sum", "backend_name", "available_backends",
           "STATUS_OK", "STATUS_DOMAIN", "STATUS_KINK"]


@dataclass(frozen=True)
class Tape:
    codes: np.ndarray   # int32 opcode per instruction
    arg0: np.ndarray    # int32 operand register
    arg1: np.ndarray    # int32 operand register, or the exponent of OP_POWI
    consts: np.ndarray  # float64 literal for OP_CONST

    def __len__(self) -> int:
        return int(self.codes.shape[0])


def compile_ast(ast: Node) -> Tape:
    codes: list[int] = []
    a0: list[int] = []
    a1: list[int] = []
    cs: list[float] = []
    memo: dict[tuple, int] = {}

    def emit(code: int, x: int = -1, y: int = -1, c: float = 0.0) -> int:
        key = (code, x, y, c)
        if key in memo:
            return memo[key]
        codes.append(code)
        a0.append(x)
        a1.append(y)
        cs.append(c)
        memo[key] = len(codes) - 1
        return memo[key]

    def walk(node: Node) -> int:
        if isinstance(node, (Num, Const)):
            return emit(OP_CONST, c=node.value)
        if isinstance(node, Var):
            return emit(OP_VAR)
        if isinstance(node, Unary):
            return emit(OP_NEG, walk(node.arg))
        if isinstance(node, Call):
            return emit(OP_FUNC0 + FUNCTIONS.index(node.name), walk(node.arg))
        left = walk(node.left)
        if node.op == "^":
            n = integer_exponent(node.right)
            if n is not None:
                return emit(OP_POWI, left, n)
            ln = emit(OP_FUNC0 + FUNCTIONS.index("ln"), left)
            return emit(OP_FUNC0 + FUNCTIONS.index("exp"), emit(OP_MUL, walk(node.right), ln))
        right = walk(node.right)
        code = {"+": OP_ADD, "-": OP_SUB, "*": OP_MUL, "/": OP_DIV}[node.op]
        return emit(code, left, right)

    walk(ast)
    return Tape(np.asarray(codes, dtype=np.int32), np.asarray(a0, dtype=np.int32),
                np.asarray(a1, dtype=np.int32), np.asarray(cs, dtype=np.float64))


def _run_numpy(tape: Tape, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(all="ignore"):  # bad nodes are flagged in status, not by warnings
        return _run_numpy_inner(tape, xs)


def _run_numpy_inner(tape: Tape, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = xs.shape[0]
    regs: list[np.ndarray] = []
    status = np.zeros(n, dtype=np.int8)
    for code, x, y, c in zip(tape.codes.tolist(), tape.arg0.tolist(), tape.arg1.tolist(),
                             tape.consts.tolist()):
        if code == OP_CONST:
            r = jets.t_const(c, n)
        elif code == OP_VAR:
            r = jets.t_var(xs)
        elif code == OP_ADD:
            r = regs[x] + regs[y]
        elif code == OP_SUB:
            r = regs[x] - regs[y]
        elif code == OP_MUL:
            r = jets.t_mul(regs[x], regs[y])
        elif code == OP_DIV:
            zero = regs[y][0] == 0
            r = jets.t_div(regs[x], regs[y])
            if zero.any():
                r[:, zero] = np.nan
                status[zero] = STATUS_DOMAIN
        elif code == OP_NEG:
            r = -regs[x]
        elif code == OP_POWI:
            base = regs[x]
            r = jets.t_powi(base, y)
            if y < 0:
                zero = base[0] == 0
                if zero.any():
                    r[:, zero] = np.nan
                    status[zero] = STATUS_DOMAIN
        else:
            r, bad, kink = jets.t_function(FUNCTIONS[code - OP_FUNC0], regs[x])
            status[kink & (status == STATUS_OK)] = STATUS_KINK
            status[bad] = STATUS_DOMAIN
        regs.append(r)
    return jets.to_derivs(regs[-1]), status


try:  # pragma: no cover - depends on the build
    from . import _jetcore
except ImportError:  # pragma: no cover
    _jetcore = None


def available_backends() -> tuple[str, ...]:
    return ("cython", "python") if _jetcore is not None else ("python",)


def _select_backend() -> str:
    want = os.environ.get("ZEROCOUNT_BACKEND", "auto").lower()
    if want == "python" or _jetcore is None:
        if want == "cython":
            log.warning("ZEROCOUNT_BACKEND=cython requested but the extension is not built")
        return "python"
    return "cython"


_BACKEND = _select_backend()


def backend_name() -> str:
    return _BACKEND


def accurate_sum(v: np.ndarray) -> float:
    """Sum in index order with error ``O(eps |sum| + n eps^2 sum |v|)``.

    Compensated summation in the compiled core; ``math.fsum`` (exactly rounded)
    on the numpy path.  Either way the result does not depend on threading.
    """
    v = np.ascontiguousarray(v, dtype=np.float64)
    if _BACKEND == "cython":
        return float(_jetcore.neumaier_sum(v))
    return math.fsum(v.tolist())


def run_tape(tape: Tape, xs, backend: str | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the tape at every point of ``xs``.

    Returns ``(derivs, status)`` where ``derivs[k, i]`` is the k-th derivative at
    ``xs[i]`` and ``status[i]`` is ``STATUS_OK``, ``STATUS_DOMAIN`` or
    ``STATUS_KINK``.  Entries of non-OK nodes are NaN except the value, which is
    kept at kinks.
    """
    xs = np.ascontiguousarray(np.asarray(xs, dtype=np.float64).reshape(-1))
    which = backend or _BACKEND
    if which == "cython":
        if _jetcore is None:
            raise RuntimeError("the compiled jet core is not available")
        return _jetcore.run_tape(tape.codes, tape.arg0, tape.arg1, tape.consts, xs)
    return _run_numpy(tape, xs)
