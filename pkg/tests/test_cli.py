from __future__ import annotations

import io
import json
import subprocess
from importlib import resources
import sys

import pytest

from taylorad.cli import run
from taylorad.macro import MacroConfig, d_type
from taylorad.syntax import ast as A
from taylorad.syntax import parse, parse_type
from taylorad.typecheck import infer

PROGRAMS = str(resources.files("taylorad") / "programs")


@pytest.fixture
def src(tmp_path):
    def write(text, name="prog.tl"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_jet_product(src):
    code, out = call("jet", src("x * y"), "--k", "1", "--r", "1", "--point", "3,5",
                     "--directions", "1,0")
    assert code == 0
    assert json.loads(out)["coeffs"] == {"0": 15, "1": 5}


def test_jet_default_directions_and_restricted(src):
    code, out = call("jet", src("x * y"), "--k", "2", "--r", "2", "--mode", "restricted22",
                     "--point", "3 5")
    assert code == 0
    assert json.loads(out)["coeffs"] == {"00": 15, "01": 3, "02": None, "10": 5, "11": 1, "20": None}


def test_jet_opens_closed_functions():
    code, out = call("jet", f"{PROGRAMS}/inner_product2.tl", "--k", "2", "--r", "2",
                     "--point", "1,2,3,4")
    assert code == 0
    assert json.loads(out)["coeffs"]["00"] == 11.0


def test_transform_sigmoid(src):
    code, out = call("transform", src("sigmoid(x)"), "--context", "x: real")
    assert code == 0
    assert "let y = sigmoid(x1_0) in y * (1.0 + (-1.0) * y)" in out


@pytest.mark.parametrize("flags", [[], ["--normalize"]])
def test_transform_roundtrip(flags):
    code, out = call("transform", f"{PROGRAMS}/missing_data.tl", "--k", "2", "--r", "2", *flags)
    assert code == 0
    fn = parse(open(f"{PROGRAMS}/missing_data.tl").read())
    assert infer({}, parse(out)) == d_type(MacroConfig(2, 2), infer({}, fn))


def test_check_network():
    code, out = call("check", f"{PROGRAMS}/network.tl")
    assert code == 0
    ty = parse_type(out)
    assert isinstance(ty, A.Fun) and ty.cod == A.REAL
    assert ty.dom.items[0] == A.real_power(2)


def test_eval(src, tmp_path):
    inputs = tmp_path / "in.json"
    inputs.write_text(json.dumps({"t": [1, 2], "u": [3, 4]}))
    prog = src("match t with <a, b> -> match u with <c, d> -> <a * c + b * d, cons(a, nil)>")
    code, out = call("eval", prog, "--inputs", str(inputs))
    assert code == 0 and json.loads(out) == [11.0, {"list": [1.0]}]


def test_eval_variant_needs_context(src, tmp_path):
    inputs = tmp_path / "in.json"
    inputs.write_text(json.dumps({"m": {"ctor": "J", "value": 2}}))
    prog = src("case m of N u -> 0 | J v -> v")
    assert call("eval", prog, "--inputs", str(inputs))[0] == 64
    code, out = call("eval", prog, "--inputs", str(inputs), "--context",
                     "m: [N : unit | J : real]")
    assert code == 0 and json.loads(out) == 2.0


def test_user_ops(src):
    ops = src("op exp/1 (x) impl math.exp\nderiv 1 = exp(x)\nderiv 2 = exp(x)\n", "exp.ops")
    code, out = call("jet", src("exp(x)"), "--ops", ops, "--r", "2", "--point", "0")
    assert code == 0 and json.loads(out)["coeffs"] == {"0": 1.0, "1": 1.0, "2": 1.0}


@pytest.mark.parametrize(
    "argv, code",
    [
        (["check", "BAD"], 2),
        (["check", "TYPE"], 1),
        (["jet", "OK", "--k", "0", "--point", "1"], 64),
        (["jet", "OK", "--point", "1,2,3"], 64),
        (["transform", "OK", "--context", "x: real, y: real", "--k", "1", "--r", "2",
          "--mode", "restricted22"], 64),
        (["check", "/nonexistent.tl"], 64),
    ],
)
def test_exit_codes(src, argv, code):
    files = {"BAD": src("x +", "bad.tl"), "TYPE": src("sigmoid(<1, 2>)", "type.tl"),
             "OK": src("x * y", "ok.tl")}
    assert call(*[files.get(a, a) for a in argv])[0] == code


def test_usage_error_exit_code():
    proc = subprocess.run([sys.executable, "-m", "taylorad", "frobnicate"], capture_output=True)
    assert proc.returncode == 64


def test_selftest_json():
    code, out = call("selftest", "--report", "json", "--points", "2")
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["n_failed"] == 0
