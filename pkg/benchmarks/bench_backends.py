"""Compare the compiled jet core with the numpy interpreter.

Run with ``python3 benchmarks/bench_backends.py``.  Kernel-level timings call
both backends in-process; end-to-end counts run in a subprocess per backend
because the backend is fixed at import.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import subprocess
import sys
import timeit

import numpy as np

from zerocount import expression_model
from zerocount.models import _comp_horner
from zerocount.tape import _jetcore, available_backends, compile_ast, run_tape
from zerocount.expr import parse

EXPRS = {
    "bessel": "besselj0(x)",
    "mixed": "cos(2*x) + x^2*sin(2*x) - sqrt(exp(x))/2 + (x-2)/4",
    "poly7": "x^7-2*x^6+x^5-x^3+2*x^2-x",
}

COUNTS = [
    ("besselj0(x)", 0.0, 100 * math.pi, "cauchy"),
    ("x^7-2*x^6+x^5-x^3+2*x^2-x", -10.0, 10.0, "cauchy"),
    ("cos(2*x) + x^2*sin(2*x) - sqrt(exp(x))/2 + (x-2)/4", 0.0, 2 * math.pi, "gaussian"),
]


def best(fn, repeat: int) -> float:
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_tapes(n: int, repeat: int) -> list[dict]:
    xs = np.linspace(-3.0, 3.0, n) + 1e-3
    rows = []
    for name, src in EXPRS.items():
        tape = compile_ast(parse(src))
        row = {"case": f"tape:{name}", "n": n}
        for be in available_backends():
            row[be] = best(lambda: run_tape(tape, xs, backend=be), repeat)
        rows.append(row)
    return rows


def bench_horner(n: int, repeat: int) -> list[dict]:
    xs = np.linspace(-3.0, 3.0, n)
    hi = np.array([1.0, -2.0, 1.0, 0.0, -1.0, 2.0, -1.0, 0.0])
    lo = np.zeros_like(hi)
    row = {"case": "comp_horner", "n": n, "python": best(lambda: _comp_horner(hi, lo, xs), repeat)}
    if _jetcore is not None:
        row["cython"] = best(lambda: _jetcore.comp_horner(hi, lo, xs), repeat)
    return [row]


_CHILD = r"""
import json, sys, time
from zerocount import CountRequest, count_zeros, expression_model
from zerocount.tape import backend_name
out = []
for src, a, b, k in json.loads(sys.argv[1]):
    m = expression_model(src)
    t = time.perf_counter()
    r = count_zeros(CountRequest(m, a, b, k))
    out.append({"expr": src, "count": r.count, "n": r.grid_points, "t": time.perf_counter() - t})
print(json.dumps({"backend": backend_name(), "rows": out}))
"""


def bench_counts() -> list[dict]:
    results = {}
    for be in available_backends():
        env = dict(os.environ, ZEROCOUNT_BACKEND=be)
        proc = subprocess.run([sys.executable, "-c", _CHILD, json.dumps(COUNTS)], env=env,
                              capture_output=True, text=True, check=True)
        results[be] = json.loads(proc.stdout)["rows"]
    rows = []
    for i, (src, *_rest) in enumerate(COUNTS):
        row = {"case": f"count:{src[:24]}", "n": results["python"][i]["n"]}
        for be, rs in results.items():
            row[be] = rs[i]["t"]
            row[f"{be}_count"] = rs[i]["count"]
        rows.append(row)
    return rows


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100_000, help="points per kernel-level call")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args()
    rows = bench_tapes(args.n, args.repeat) + bench_horner(args.n, args.repeat) + bench_counts()
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    print(f"{'case':40s} {'n':>8s} {'python ms':>10s} {'cython ms':>10s} {'speedup':>8s}")
    for r in rows:
        py, cy = r["python"], r.get("cython")
        cys = f"{1e3 * cy:10.2f}" if cy is not None else f"{'-':>10s}"
        sp = f"{py / cy:8.1f}" if cy else f"{'-':>8s}"
        print(f"{r['case']:40s} {r['n']:8d} {1e3 * py:10.2f} {cys} {sp}")
        if "python_count" in r and r.get("cython_count", r["python_count"]) != r["python_count"]:
            print("  backends disagree on the count", file=sys.stderr)


if __name__ == "__main__":
    main()
