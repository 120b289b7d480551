import io
import json
import math
import os
import subprocess
import sys

import pytest

from zerocount.cli import build_parser, emit_json, parse_endpoint, run, UsageError


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv, "--json")
    return code, json.loads(out), out


@pytest.mark.parametrize("text, want", [
    ("0", 0.0), ("-2.5", -2.5), ("2pi", 2 * math.pi), ("100*pi", 100 * math.pi), ("pi", math.pi),
    ("-pi", -math.pi), ("inf", math.inf), ("-inf", -math.inf), ("+infinity", math.inf), (".5pi", math.pi / 2),
])
def test_parse_endpoint(text, want):
    assert parse_endpoint(text) == want


@pytest.mark.parametrize("text", ["", "pie", "2pi2", "nan", "1e", "x"])
def test_parse_endpoint_rejects(text):
    with pytest.raises(UsageError):
        parse_endpoint(text)


def test_emit_json_canonical():
    s = emit_json({"b": [1.0, math.inf, -math.inf, math.nan], "a": 0.1, "c": None, "d": True})
    assert s == ('{\n  "a": 0.10000000000000001,\n  "b": [\n    1,\n    "inf",\n    "-inf",\n'
                 '    "nan"\n  ],\n  "c": null,\n  "d": true\n}')
    assert json.loads(s)["a"] == 0.1


def test_count_json():
    code, doc, _ = call_json("count", "--expr", "besselj0(x)", "--a", "0", "--b", "2pi",
                             "--grid", f"rigorous:{1 / math.pi!r}")
    assert code == 0
    assert set(doc) == {"tool", "version", "command", "request", "status", "result", "warnings"}
    assert doc["status"] == "ok"
    assert doc["result"]["count"] == 2 and doc["result"]["grid_points"] == 4


def test_json_roundtrip_is_byte_identical():
    _, doc, text = call_json("count", "--expr", "sin(x)", "--a", "0", "--b", "2pi")
    assert emit_json(doc) + "\n" == text


def test_timing_only_on_request():
    _, doc, _ = call_json("count", "--expr", "sin(x)", "--a", "0", "--b", "2pi", "--timing")
    assert doc["wall_time_ms"] >= 0
    _, doc, _ = call_json("count", "--expr", "sin(x)", "--a", "0", "--b", "2pi")
    assert "wall_time_ms" not in doc


def test_constant_and_open_counts():
    assert call_json("count", "--expr", "1", "--a", "0", "--b", "1")[1]["result"]["count"] == 0
    _, doc, _ = call_json("count", "--expr", "x^2-1", "--a", "-1", "--b", "1", "--open")
    assert doc["result"]["count"] == 0
    _, doc, _ = call_json("count", "--expr", "sin(3*x)", "--a", "0", "--b", "2pi", "--periodic")
    assert doc["result"]["count"] == 6


def test_negative_endpoints_as_separate_tokens():
    _, doc, _ = call_json("count", "--expr", "x^3-x", "--a", "-inf", "--b", "inf")
    assert doc["result"]["count"] == 3
    assert doc["result"]["truncation_radius"] == 32
    _, doc, _ = call_json("count", "--expr", "sin(x)", "--a", "-2pi", "--b", "-0.5")
    assert doc["result"]["count"] == 2


@pytest.mark.parametrize("argv", [
    ("count", "--expr", "x+", "--a", "0", "--b", "1"),
    ("count", "--expr", "y", "--a", "0", "--b", "1"),
    ("count", "--expr", "x", "--a", "1", "--b", "0"),
    ("count", "--expr", "x", "--a", "zero", "--b", "1"),
    ("count", "--expr", "x", "--a", "0", "--b", "1", "--periodic", "--open"),
    ("count", "--expr", "x", "--a", "0", "--b", "1", "--kernel", "unit_box", "--grid", "rigorous:1"),
    ("count", "--expr", "x", "--a", "0", "--b", "1", "--grid", "often"),
    ("count", "--expr", "x", "--a", "0", "--b", "1", "--kernel", "nope"),
    ("scan", "--expr", "x", "--a", "0", "--b", "1", "--scan-grid", "10"),
    ("count", "--a", "0", "--b", "1"),
    (),
])
def test_usage_errors_exit_2(argv):
    assert call(*argv)[0] == 2


def test_evaluation_error_exits_1():
    code, doc, _ = call_json("count", "--expr", "ln(x)", "--a", "-1", "--b", "1")
    assert code == 1
    assert doc["status"] == "error" and doc["result"]["error"] == "EvaluationError"


def test_verify():
    code, doc, _ = call_json("verify", "--expr", "x^3-x", "--a", "0", "--b", "1", "--open")
    assert code == 0 and doc["result"]["agree"] is True
    assert doc["result"]["oracle"] == "sturm" and doc["result"]["oracle_count"] == 0
    code, doc, _ = call_json("verify", "--expr", "besselj0(x)", "--a", "0", "--b", "100pi")
    assert code == 0 and doc["result"]["integral"]["count"] == 100
    assert doc["result"]["oracle"] == "scan" and doc["result"]["oracle_count"] == 100


def test_multiplicity_with_boundary():
    code, doc, _ = call_json("multiplicity", "--expr",
                             "cos(2*x) + x^2*sin(2*x) - sqrt(exp(x))/2 + (x-2)/4",
                             "--a", "0", "--b", "2pi", "--boundary")
    assert code == 0
    assert doc["result"]["profile"] == [2, 1]
    assert "a double zero on the boundary" in doc["result"]["boundary"]


def test_multiplicity_polynomial():
    code, doc, _ = call_json("multiplicity", "--expr", "x^7-2*x^6+x^5-x^3+2*x^2-x",
                             "--a", "-inf", "--b", "inf")
    assert code == 0 and doc["result"]["profile"] == [2, 0, 1]


def test_scan_and_diagnose():
    code, doc, _ = call_json("scan", "--expr", "sin(x)", "--a", "0", "--b", "2pi", "--diagnose")
    assert code == 0 and doc["result"]["count"] == 3
    assert len(doc["result"]["diagnostics"]) == 3


def test_kernels_listing():
    code, doc, _ = call_json("kernels")
    assert code == 0 and len(doc["result"]["kernels"]) == 8


def test_text_output():
    code, out, _ = call("count", "--expr", "sin(x)", "--a", "0", "--b", "2pi")
    assert code == 0 and out.startswith("count     3")


def test_help_covers_every_flag():
    parser = build_parser()
    sub = next(a for a in parser._actions if a.dest == "command")
    for name, p in sub.choices.items():
        text = p.format_help()
        for action in p._actions:
            for opt in action.option_strings:
                assert opt in text, (name, opt)
            assert action.help, (name, action.dest)


@pytest.mark.parametrize("argv", [
    ["count", "--expr", "besselj0(x)", "--a", "0", "--b", "100pi", "--json"],
    ["multiplicity", "--expr", "x^7-2*x^6+x^5-x^3+2*x^2-x", "--a", "-inf", "--b", "inf", "--json"],
    ["scan", "--expr", "sin(x)*exp(-x)", "--a", "0", "--b", "10", "--json", "--diagnose"],
])
def test_subprocess_runs_are_byte_identical(argv):
    cmd = [sys.executable, "-m", "zerocount", *argv]
    outs = [subprocess.run(cmd, capture_output=True, env=dict(os.environ), check=True).stdout
            for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]
