import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from sunprod.cli import run_command

ROOT = Path(__file__).resolve().parent.parent
CONFIGS = ROOT / "configs"
GOLDEN = Path(__file__).resolve().parent / "golden"

GOLDEN_CASES = {
    "moyal_star_mul": (["--config", str(CONFIGS / "moyal_r2.json"), "star-mul", "x1", "x2"], "x1*x2 + nu"),
    "heisenberg_sun_mul": (["--config", str(CONFIGS / "heisenberg.json"), "--star", "gutt", "sun-mul", "x1", "x2"],
                           "x1*x2"),
    "su2_verify_eco": (["--config", str(CONFIGS / "su2.json"), "--star", "gutt", "verify", "eco"],
                       "verify eco: PASS"),
}

REPORT = {
    "type": "object",
    "required": ["check", "passed", "checked", "witness", "order", "residual", "detail"],
    "properties": {
        "check": {"type": "string"},
        "passed": {"type": "boolean"},
        "checked": {"type": "integer", "minimum": 0},
        "witness": {"anyOf": [{"type": "null"}, {"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
        "order": {"type": ["integer", "null"]},
        "residual": {"type": ["string", "null"]},
        "detail": {"type": "string"},
    },
}
TERMS = {
    "type": "array",
    "items": {
        "type": "object",
        "required": ["coeff", "derivs"],
        "properties": {"coeff": {"type": "string"}, "derivs": {"type": "array", "items": {"type": "integer"}}},
    },
}
OPERATORS = {
    "type": "array",
    "items": {"type": "object", "required": ["order", "terms"],
              "properties": {"order": {"type": "integer", "minimum": 1}, "terms": TERMS}},
}
SERIES = {
    "type": "array",
    "items": {"type": "object", "required": ["order", "poly"],
              "properties": {"order": {"type": "integer"}, "poly": {"type": "string"}}},
}


def _obj(required, **props):
    return {"type": "object", "required": ["command"] + required,
            "properties": {"command": {"type": "string"}, **props}}


SCHEMAS = {
    "error": _obj(["error"], error={"type": "string"}),
    "star-mul": _obj(["star", "order", "result", "coefficients"], result={"type": "string"}, coefficients=SERIES),
    "sun-mul": _obj(["star", "order", "result", "coefficients"], result={"type": "string"}, coefficients=SERIES),
    "cochains": _obj(["star", "order", "degree", "cochains"], cochains={
        "type": "array",
        "items": {"type": "object", "required": ["r", "zero", "operator", "table"],
                  "properties": {"r": {"type": "integer"}, "zero": {"type": "boolean"}, "operator": TERMS,
                                 "table": {"type": "array", "items": {
                                     "type": "object", "required": ["monomial", "value"]}}}},
    }),
    "in-ep": _obj(["star", "order", "degree", "in_ep", "report"], in_ep={"type": "boolean"}, report=REPORT),
    "equiv-to-ep": _obj(["star", "order", "degree", "operators", "result", "in_ep"],
                        operators=OPERATORS, result={"type": "object", "required": ["type", "label"]},
                        in_ep={"type": "boolean"}),
    "weak-trivializer": _obj(["star", "order", "degree", "operators", "check"], operators=OPERATORS, check=REPORT),
    "verify": _obj(["suite", "star", "seed", "passed", "reports"], passed={"type": "boolean"},
                   reports={"type": "array", "minItems": 1, "items": REPORT}),
}


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def validate(text):
    payload = json.loads(text)
    key = "error" if "error" in payload else payload["command"]
    jsonschema.validate(payload, SCHEMAS[key])
    return payload


@pytest.fixture
def twist3(tmp_path):
    path = tmp_path / "twist3.json"
    path.write_text(json.dumps([{"order": 1, "terms": [{"coeff": "1", "derivs": [2, 0, 0]}]}]))
    return str(path)


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_human(name):
    argv, line = GOLDEN_CASES[name]
    code, out, _ = run(*argv)
    assert code == 0
    assert line in out.splitlines()
    assert out == (GOLDEN / f"{name}.txt").read_text()


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_json(name):
    argv, _ = GOLDEN_CASES[name]
    code, out, _ = run(*argv, "--format", "json")
    assert code == 0
    validate(out)
    assert out == (GOLDEN / f"{name}.json").read_text()


MOYAL = str(CONFIGS / "moyal_r2.json")
TWIST = "twist:" + str(CONFIGS / "twist_d1sq.json")


@pytest.mark.parametrize("argv", [
    ["star-mul", "x1^2", "x2^2"],
    ["sun-mul", "x1", "x1"],
    ["cochains", "--order", "2", "--degree", "3"],
    ["in-ep"],
    ["equiv-to-ep", "--order", "2"],
    ["weak-trivializer", "--order", "2"],
    ["verify", "weak", "--order", "2", "--degree", "3"],
])
def test_every_command_json_validates(argv):
    code, out, _ = run("--config", MOYAL, "--star", TWIST, "--format", "json", *argv)
    assert code == 0
    validate(out)


def test_cochains_human_output():
    code, out, _ = run("--config", MOYAL, "--star", TWIST, "cochains", "--order", "2", "--degree", "3")
    assert code == 0
    assert out.splitlines()[:2] == ["rho_1: -d1^2", "  rho_1(x1^2) = -2"]


def test_in_ep_reports_membership():
    assert run("--config", MOYAL, "in-ep")[1] == "in E(P): yes\n"
    code, out, _ = run("--config", MOYAL, "--star", TWIST, "in-ep")
    assert code == 0 and out.startswith("in E(P): no")


def test_flags_accepted_before_and_after_command():
    a = run("--config", MOYAL, "--order", "2", "star-mul", "x1", "x2")
    b = run("star-mul", "x1", "x2", "--config", MOYAL, "--order", "2")
    assert a == b and a[0] == 0


def test_verify_failure_exits_one(twist3):
    code, out, _ = run("--config", str(CONFIGS / "su2.json"), "--star", "twist:" + twist3,
                       "--order", "3", "--degree", "4", "verify", "eco")
    assert code == 1
    assert out.splitlines()[-1] == "verify eco: FAIL"
    code, out, _ = run("--config", str(CONFIGS / "su2.json"), "--star", "twist:" + twist3,
                       "--order", "3", "--degree", "4", "--format", "json", "verify", "eco")
    assert code == 1 and validate(out)["passed"] is False


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["star-mul", "x1"],
    ["verify", "nosuchsuite", "--config", MOYAL],
    ["star-mul", "x1", "x2"],
    ["--config", "/nonexistent.json", "in-ep"],
    ["--config", MOYAL, "star-mul", "x4", "x1"],
    ["--config", MOYAL, "star-mul", "x1 +", "x1"],
    ["--config", MOYAL, "verify", "eco"],
    ["--config", MOYAL, "--star", "gutt", "in-ep"],
    ["--config", MOYAL, "--star", "weird", "in-ep"],
    ["--config", MOYAL, "--format", "xml", "in-ep"],
    ["--config", MOYAL, "--order", "0", "in-ep"],
])
def test_usage_errors_exit_two(argv):
    assert run(*argv)[0] == 2


def test_error_json_validates():
    code, out, err = run("--config", MOYAL, "--format", "json", "star-mul", "x9", "x1")
    assert code == 2
    assert "out of range" in validate(out)["error"]
    assert err.startswith("sunprod: error:")


def test_bad_config(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "poisson": {"type": "constant", "matrix": [["0", "1"], ["1", "0"]]}}))
    assert run("--config", str(bad), "in-ep")[0] == 2
    bad.write_text("{not json")
    assert run("--config", str(bad), "in-ep")[0] == 2


def test_config_from_stdin(monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO((CONFIGS / "moyal_r2.json").read_text()))
    code, out, _ = run("--config", "-", "star-mul", "x1", "x2")
    assert (code, out) == (0, "x1*x2 + nu\n")


def test_verify_deterministic_under_seed():
    argv = ["--config", str(CONFIGS / "heisenberg.json"), "--order", "2", "--degree", "3",
            "--format", "json", "verify", "associativity"]
    first = run(*argv, "--seed", "7")
    assert first == run(*argv, "--seed", "7")
    assert first[0] == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sunprod", "--config", MOYAL, "star-mul", "x1", "x2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout == "x1*x2 + nu\n"
