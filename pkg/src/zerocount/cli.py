"""Command-line front end.

Subcommands: ``count``, ``multiplicity``, ``verify``, ``scan`` and ``kernels``.
Every subcommand prints human-readable text by default and a canonical JSON
envelope with ``--json``.

Exit codes: 0 success, 1 evaluation or verification failure, 2 usage error,
3 a result that is printed but not trusted (non-integer count, ambiguous decode).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import re
import sys
import time
from typing import Any, Sequence

from . import __version__
from .counting import CountRequest, Grid, admissibility_scan, count_zeros
from .errors import (AmbiguousDecode, ExpressionSyntaxError, NonIntegerResult, SuspectCluster,
                     ZeroCountError)
from .kernels import KERNEL_NAMES, builtin_kernels, get_kernel
from .models import FunctionModel, expression_model
from .multiplicity import (DEFAULT_DECODE_TOL, decode_profile, endpoint_conclusion,
                           multiplicity_sums)
from .oracle import RationalPoly, scan_count, sturm_count, sturm_multiplicities

log = logging.getLogger("zerocount")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNTRUSTED = 0, 1, 2, 3

_PI_RE = re.compile(r"^([+-]?)(\d+(?:\.\d*)?|\.\d+)?\*?pi$")


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        self.flag = flag
        super().__init__(f"{flag}: {message}")


# canonical JSON --------------------------------------------------------------

def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return "%.17g" % x


def emit_json(obj: Any, indent: int = 2) -> str:
    """Canonical JSON: sorted keys, floats at 17 significant digits.

    Non-finite floats become the strings ``"inf"``, ``"-inf"`` and ``"nan"``;
    tuples are written as arrays.  Parsing the output and emitting it again
    reproduces it byte for byte.
    """
    out: list[str] = []

    def walk(v, depth):
        pad = "\n" + " " * (indent * (depth + 1))
        end = "\n" + " " * (indent * depth)
        if v is None or isinstance(v, bool):
            out.append("null" if v is None else ("true" if v else "false"))
        elif isinstance(v, int):
            out.append(str(v))
        elif isinstance(v, float):
            out.append(_fmt_float(v))
        elif isinstance(v, str):
            out.append(json.dumps(v, ensure_ascii=True))
        elif isinstance(v, dict):
            if not v:
                out.append("{}")
                return
            out.append("{")
            for i, k in enumerate(sorted(v, key=str)):
                out.append(("," if i else "") + pad + json.dumps(str(k), ensure_ascii=True) + ": ")
                walk(v[k], depth + 1)
            out.append(end + "}")
        elif isinstance(v, (list, tuple)):
            if not v:
                out.append("[]")
                return
            out.append("[")
            for i, item in enumerate(v):
                out.append(("," if i else "") + pad)
                walk(item, depth + 1)
            out.append(end + "]")
        elif hasattr(v, "item"):  # numpy scalars
            walk(v.item(), depth)
        else:
            raise TypeError(f"cannot serialize {type(v).__name__}")

    walk(obj, 0)
    return "".join(out)


# argument parsing ------------------------------------------------------------

def parse_endpoint(text: str, flag: str = "--a") -> float:
    """Decimal literal, a multiple of pi (``pi``, ``2pi``, ``-0.5*pi``) or ``±inf``."""
    s = text.strip().lower().replace(" ", "")
    if s in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if s in ("-inf", "-infinity"):
        return -math.inf
    m = _PI_RE.match(s)
    if m:
        k = float(m.group(2)) if m.group(2) else 1.0
        return (-k if m.group(1) == "-" else k) * math.pi
    try:
        v = float(s)
    except ValueError:
        raise UsageError(flag, f"cannot read endpoint {text!r}; use a decimal, Npi or inf") from None
    if math.isnan(v):
        raise UsageError(flag, "endpoint is NaN")
    return v


def _common(p: argparse.ArgumentParser, open_flag: bool = True, kernel: bool = True):
    p.add_argument("--expr", required=True, help="function of x, e.g. 'besselj0(x)'")
    p.add_argument("--a", required=True, help="left endpoint: decimal, Npi, -inf")
    p.add_argument("--b", required=True, help="right endpoint: decimal, Npi, inf")
    if open_flag:
        p.add_argument("--open", action="store_true", help="count on the open interval (a, b)")
    if kernel:
        p.add_argument("--kernel", default="cauchy", choices=KERNEL_NAMES,
                       help="kernel name (default cauchy)")
    p.add_argument("--json", action="store_true", help="print a canonical JSON report")
    p.add_argument("--timing", action="store_true",
                   help="include the wall time (ms) in the report; breaks byte-identical output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zerocount",
        description="Count real zeros of f on an interval from kernel-weighted integrals of f'/f.",
        epilog="Set ZEROS_LOG=debug|info|warning|error for log output on stderr.",
    )
    parser.add_argument("--version", action="version", version=f"zerocount {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("count", help="number of zeros on [a, b] or (a, b)",
                       description="Number of zeros of f on the interval.")
    _common(p)
    p.add_argument("--periodic", action="store_true",
                   help="f is periodic with period b - a; count over one period")
    p.add_argument("--grid", default="auto", help="auto | N | rigorous:<M> with M >= sup |I''|")
    p.add_argument("--guard", type=float, default=1e-12,
                   help="relative threshold below which a node counts as a zero (default 1e-12)")

    p = sub.add_parser("multiplicity", help="S0, S1, S2 and the decoded multiplicity profile",
                       description="Zero counts split by multiplicity.")
    _common(p)
    p.add_argument("--c", default="auto", help="auto | value of the g1 constant c")
    p.add_argument("--grid", default="auto", help="auto | N")
    p.add_argument("--tol", type=float, default=DEFAULT_DECODE_TOL,
                   help=f"decode tolerance on S2 (default {DEFAULT_DECODE_TOL:g})")
    p.add_argument("--boundary", action="store_true",
                   help="also run the other interval mode and describe zeros on the endpoints")

    p = sub.add_parser("verify", help="compare the integral count with an independent oracle",
                       description="Integral count against Sturm chains (polynomials) or a scan.")
    _common(p)
    p.add_argument("--grid", default="auto", help="auto | N | rigorous:<M>")
    p.add_argument("--scan-grid", type=int, default=100_000,
                   help="panels of the scan oracle for non-polynomials (default 100000)")

    p = sub.add_parser("scan", help="locate zeros by sign changes and bisection",
                       description="Zeros found by a grid scan with bisection refinement.")
    _common(p, open_flag=False, kernel=False)
    p.add_argument("--scan-grid", type=int, default=10_000,
                   help="number of scan panels, at least 1000 (default 10000)")
    p.add_argument("--diagnose", action="store_true",
                   help="add the admissibility diagnostics of each candidate zero")

    p = sub.add_parser("kernels", help="list the built-in kernels",
                       description="Built-in kernels with their decay class and limits.")
    p.add_argument("--json", action="store_true", help="print a canonical JSON report")
    p.add_argument("--timing", action="store_true", help="include the wall time (ms)")
    return parser


def _model(args) -> FunctionModel:
    try:
        return expression_model(args.expr)
    except ExpressionSyntaxError as e:
        raise UsageError("--expr", str(e)) from None


def _interval(args) -> tuple[float, float]:
    a, b = parse_endpoint(args.a, "--a"), parse_endpoint(args.b, "--b")
    if not a < b:
        raise UsageError("--b", f"need a < b, got a={args.a} b={args.b}")
    return a, b


def _grid(args, kernel) -> Grid:
    try:
        g = Grid.parse(args.grid)
    except ValueError as e:
        raise UsageError("--grid", str(e)) from None
    if g.kind == "rigorous" and not get_kernel(kernel).smooth:
        raise UsageError("--grid", f"rigorous grids need a smooth kernel; {kernel} is not")
    return g


def _mode(args) -> str:
    if getattr(args, "periodic", False):
        if args.open:
            raise UsageError("--periodic", "cannot be combined with --open")
        return "periodic"
    return "open" if getattr(args, "open", False) else "closed"


# subcommands -----------------------------------------------------------------

class Outcome:
    def __init__(self, result: dict, warnings: Sequence[str] = (), status: str = "ok",
                 code: int = EXIT_OK, text: str = ""):
        self.result, self.warnings, self.status = result, list(warnings), status
        self.code, self.text = code, text


def _count_text(r: dict) -> str:
    lines = [f"count     {r['count']}",
             f"raw       {r['raw']!r}",
             f"integral  {r['integral']!r}",
             f"boundary  upper {r['boundary_upper']!r}  lower {r['boundary_lower']!r}",
             f"residual  {r['residual']:.3g}",
             f"N         {r['grid_points']}",
             f"kernel    {r['kernel']} ({r['mode']})"]
    if r.get("truncation_radius") is not None:
        lines.append(f"R         {r['truncation_radius']!r}")
    return "\n".join(lines)


def cmd_count(args) -> Outcome:
    model, (a, b), mode = _model(args), _interval(args), _mode(args)
    grid = _grid(args, args.kernel)
    if mode == "periodic" and not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError("--periodic", "needs a finite period interval")
    req = CountRequest(model, a, b, args.kernel, mode, grid, args.guard)
    try:
        rep = count_zeros(req)
    except NonIntegerResult as e:
        r = e.report.to_dict()
        return Outcome(r, r["warnings"] + [str(e)], "non_integer", EXIT_UNTRUSTED, _count_text(r))
    r = rep.to_dict()
    return Outcome(r, r["warnings"], text=_count_text(r))


def _parse_c(text: str) -> float | None:
    if text.strip().lower() == "auto":
        return None
    try:
        v = float(text)
    except ValueError:
        raise UsageError("--c", f"cannot read {text!r}; use auto or a number") from None
    if not math.isfinite(v):
        raise UsageError("--c", "must be finite")
    return v


def _sums_payload(sums, reports) -> dict:
    return {
        "S0": sums.S0, "S1": sums.S1, "S2": sums.S2, "mode": sums.open_or_closed,
        "residuals": list(sums.residuals), "c": reports["c"],
        "grid_points": {"S0": reports["count"].grid_points, "S1": reports["g1"].grid_points,
                        "S2": reports["g2"].grid_points},
        "interval": list(reports["interval"]),
        "truncation_radius": reports["truncation_radius"],
    }


def cmd_multiplicity(args) -> Outcome:
    model, (a, b) = _model(args), _interval(args)
    mode = "open" if args.open else "closed"
    c = _parse_c(args.c)
    grid = _grid(args, args.kernel)
    if grid.kind == "rigorous":
        raise UsageError("--grid", "multiplicity sums take auto or N")
    sums, reports = multiplicity_sums(model, (a, b), args.kernel, mode, c, grid)
    result = _sums_payload(sums, reports)
    warnings = list(sums.warnings)
    status, code = "ok", EXIT_OK
    try:
        prof = decode_profile(sums, args.tol)
        result.update(profile=list(prof.counts), margin=prof.margin, exact=prof.exact,
                      runner_up=None if prof.runner_up is None else list(prof.runner_up),
                      description=prof.describe())
    except AmbiguousDecode as e:
        result.update(profile=None, margin=None, exact=False,
                      candidates=[list(cand) for cand in e.candidates])
        warnings.append(str(e))
        status, code = "ambiguous", EXIT_UNTRUSTED
    if args.boundary:
        other, _ = multiplicity_sums(model, (a, b), args.kernel,
                                     "closed" if mode == "open" else "open", reports["c"], grid)
        closed, opened = (sums, other) if mode == "closed" else (other, sums)
        result["other_mode"] = {"S0": other.S0, "S1": other.S1, "S2": other.S2,
                                "mode": other.open_or_closed}
        result["boundary"] = endpoint_conclusion(closed, opened, args.tol)
        warnings.extend(w for w in other.warnings if w not in warnings)
    lines = [f"S0        {sums.S0!r}", f"S1        {sums.S1!r}", f"S2        {sums.S2!r}",
             f"c         {reports['c']!r}"]
    if result.get("profile") is not None:
        lines.append("profile   (" + ", ".join(map(str, result["profile"])) + ")")
        lines.append(f"margin    {result['margin']:.6g}  ({result['description']})")
    else:
        lines.append("profile   ambiguous")
    if "boundary" in result:
        lines.append(f"boundary  {result['boundary']}")
    return Outcome(result, warnings, status, code, "\n".join(lines))


def _poly(model: FunctionModel) -> RationalPoly | None:
    return None if model.poly is None else RationalPoly(model.poly)


def cmd_verify(args) -> Outcome:
    model, (a, b) = _model(args), _interval(args)
    mode = "open" if args.open else "closed"
    grid = _grid(args, args.kernel)
    warnings: list[str] = []
    try:
        rep = count_zeros(CountRequest(model, a, b, args.kernel, mode, grid))
        integral = rep.to_dict()
    except NonIntegerResult as e:
        integral = e.report.to_dict()
        warnings.append(str(e))
    warnings.extend(integral["warnings"])
    p = _poly(model)
    if p is not None:
        oracle = "sturm"
        expected = sturm_count(p, a, b, mode)
        a_eff, b_eff = integral["interval"]
        detail = {"profile": list(sturm_multiplicities(p, a_eff, b_eff, mode)),
                  "count_on_truncated_interval": sturm_count(p, a_eff, b_eff, mode)}
    else:
        if not (math.isfinite(a) and math.isfinite(b)):
            raise UsageError("--a", "the scan oracle needs a finite interval")
        oracle = "scan"
        try:
            zl = scan_count(model, (a, b), args.scan_grid)
        except SuspectCluster as e:
            warnings.append(str(e))
            zl = scan_count(model, (a, b), args.scan_grid, raise_on_cluster=False)
        locs = zl.locations()
        if mode == "open":
            tol = 1e-9 * (1.0 + max(abs(a), abs(b)))
            locs = [x for x in locs if a + tol < x < b - tol]
        expected = len(locs)
        detail = {"zeros": locs, "scan_grid": zl.grid}
    agree = integral["count"] == expected
    result = {"integral": integral, "oracle": oracle, "oracle_count": expected,
              "oracle_detail": detail, "agree": agree}
    text = (f"integral  {integral['count']} (raw {integral['raw']!r}, N {integral['grid_points']})\n"
            f"{oracle:<9} {expected}\n"
            f"verdict   {'agree' if agree else 'DISAGREE'}")
    return Outcome(result, warnings, "ok" if agree else "disagree",
                   EXIT_OK if agree else EXIT_FAIL, text)


def cmd_scan(args) -> Outcome:
    model, (a, b) = _model(args), _interval(args)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise UsageError("--a", "scan needs a finite interval")
    if args.scan_grid < 1000:
        raise UsageError("--scan-grid", "must be at least 1000")
    warnings: list[str] = []
    status, code = "ok", EXIT_OK
    try:
        zl = scan_count(model, (a, b), args.scan_grid)
    except SuspectCluster as e:
        warnings.append(str(e))
        status = "cluster"
        zl = scan_count(model, (a, b), args.scan_grid, raise_on_cluster=False)
    zeros = [{"bracket": [z.lo, z.hi], "location": z.location, "multiplicity": z.multiplicity,
              "kind": z.kind, "on_boundary": z.location <= a or z.location >= b} for z in zl]
    result: dict = {"zeros": zeros, "count": len(zeros), "scan_grid": zl.grid,
                    "interval": [a, b]}
    if args.diagnose:
        result["diagnostics"] = [{"location": d.location, "kind": d.kind, "verdict": d.verdict,
                                  "detail": d.detail} for d in admissibility_scan(model, (a, b))]
    lines = [f"{len(zeros)} zero(s)"]
    for z in zeros:
        lines.append(f"  x = {z['location']!r:<24} mu ~ {z['multiplicity']:.6g}  {z['kind']}"
                     + ("  (boundary)" if z["on_boundary"] else ""))
    for d in result.get("diagnostics", []):
        lines.append(f"  diagnostic {d['kind']} at {d['location']!r}: {d['verdict']} {d['detail']}")
    return Outcome(result, warnings, status, code, "\n".join(lines))


def cmd_kernels(args) -> Outcome:
    rows = []
    for k in builtin_kernels():
        rows.append({"name": k.name, "decay": k.decay, "continuous": k.continuous,
                     "smooth": k.smooth, "H_neg_inf": k.H_neg_inf, "H_pos_inf": k.H_pos_inf,
                     "tail_constant": k.tail_constant, "h": k.formula_h, "H": k.formula_H,
                     "rigorous": k.smooth})
    lines = [f"{'name':<14}{'decay':<17}{'H(-inf)':>8}{'H(inf)':>8}  h"]
    for r in rows:
        lines.append(f"{r['name']:<14}{r['decay']:<17}{r['H_neg_inf']:>8g}{r['H_pos_inf']:>8g}"
                     f"  {r['h']}")
    return Outcome({"kernels": rows}, text="\n".join(lines))


COMMANDS = {"count": cmd_count, "multiplicity": cmd_multiplicity, "verify": cmd_verify,
            "scan": cmd_scan, "kernels": cmd_kernels}


def _request_echo(args) -> dict:
    skip = {"json", "timing", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _setup_logging():
    level = os.environ.get("ZEROS_LOG", "").strip()
    if not level:
        return
    num = getattr(logging, level.upper(), None)
    if not isinstance(num, int):
        try:
            num = int(level)
        except ValueError:
            num = logging.WARNING
    logging.basicConfig(stream=sys.stderr, level=num,
                        format="%(levelname)s %(name)s: %(message)s")


def _glue_negative_endpoints(argv: list[str]) -> list[str]:
    # "--a -inf" and "--a -2pi" would otherwise be read as unknown options
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in ("--a", "--b") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Run one command; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    _setup_logging()
    parser = build_parser()
    argv = _glue_negative_endpoints(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse already printed the diagnostic
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    if not args.command:
        parser.print_usage(stderr)
        return EXIT_USAGE
    t0 = time.perf_counter()
    try:
        out = COMMANDS[args.command](args)
    except UsageError as e:
        print(f"zerocount {args.command}: error: {e}", file=stderr)
        return EXIT_USAGE
    except ZeroCountError as e:
        out = Outcome({"error": type(e).__name__, "message": str(e)}, [], "error", EXIT_FAIL,
                      f"error: {type(e).__name__}: {e}")
    envelope = {"tool": "zerocount", "version": __version__, "command": args.command,
                "request": _request_echo(args), "status": out.status, "result": out.result,
                "warnings": out.warnings}
    if args.timing:
        envelope["wall_time_ms"] = 1e3 * (time.perf_counter() - t0)
    if args.json:
        print(emit_json(envelope), file=stdout)
    else:
        print(out.text, file=stdout)
        for w in out.warnings:
            print(f"warning: {w}", file=stdout)
        if args.timing:
            print(f"time      {envelope['wall_time_ms']:.3f} ms", file=stdout)
    return out.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
