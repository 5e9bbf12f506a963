import json
import subprocess
import sys

import pytest

from qkflags import cli
from qkflags.cli import canonical_json, run

from conftest import FIXTURES

COMMANDS = ["solve", "verify-trs", "verify-dual", "verify-qq", "toda", "limit-check", "vertex"]


def job(name="n2"):
    return json.loads((FIXTURES / f"job_{name}.json").read_text())


def write_job(tmp_path, data, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return str(p)


def run_capture(argv, capsys):
    code = run(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def assert_close(a, b, path="", rtol=1e-9, atol=1e-12):
    # goldens are compared structurally with a numeric tolerance, so that
    # last-bit differences between BLAS builds do not break the suite
    assert type(a) is type(b) or {type(a), type(b)} <= {int, float}, path
    if isinstance(a, dict):
        assert sorted(a) == sorted(b), path
        for k in a:
            if k in ("steps", "aux_lstsq"):
                continue
            assert_close(a[k], b[k], f"{path}/{k}", rtol, atol)
    elif isinstance(a, list):
        assert len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            assert_close(x, y, f"{path}[{i}]", rtol, atol)
    elif isinstance(a, float) and not isinstance(a, bool):
        assert abs(a - b) <= atol + rtol * abs(b), f"{path}: {a} vs {b}"
    else:
        assert a == b, path


def test_canonical_json():
    s = canonical_json({"b": 1.0, "a": [1 + 2j, 0.1], "c": True})
    assert s == '{"a":[[1.0,2.0],0.10000000000000001],"b":1.0,"c":true}\n'
    assert json.loads(s)["a"][1] == 0.1


def test_schema_is_versioned():
    schema = cli.load_schema()
    assert schema["$id"].endswith("/v1")
    assert schema["properties"]["version"] == {"const": 1}


def test_solve_n2(capsys):
    code, out, _ = run_capture(["solve", "--spec", str(FIXTURES / "job_n2.json")], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["count"] == 2
    assert all(s["residual"] < 1e-12 for s in rep["results"]["solutions"])
    assert rep["inputs"]["job"] == job("n2")


def test_verify_trs_n3(capsys):
    code, out, _ = run_capture(["verify-trs", "--spec", str(FIXTURES / "job_n3.json"), "--tol", "1e-8"], capsys)
    assert code == 0
    res = json.loads(out)["results"]
    assert len(res["solutions"]) == 6 and res["tol"] == 1e-8 and res["max_residual"] < 1e-8
    for s in res["solutions"]:
        assert {"charpoly_vs_P", "hamiltonian_vs_e", "max_residual", "origin"} <= set(s)


@pytest.mark.parametrize("command", COMMANDS)
@pytest.mark.parametrize("name", ["n2", "n3"])
def test_golden(command, name, capsys):
    code, out, _ = run_capture([command, "--spec", str(FIXTURES / f"job_{name}.json")], capsys)
    assert code == 0
    golden = json.loads((FIXTURES / f"golden_{command}_{name}.json").read_text())
    assert_close(json.loads(out), golden)
    if command.startswith("verify") or command in ("toda", "limit-check"):
        res = json.loads(out)["results"]
        assert "tol" in res and "max_residual" in res


@pytest.mark.parametrize("command", ["solve", "verify-qq"])
def test_deterministic_bytes(command, tmp_path):
    spec = str(FIXTURES / "job_n3.json")
    outs = []
    for threads in ("1", "3", "1"):
        path = tmp_path / f"out{len(outs)}.json"
        assert run([command, "--spec", spec, "--threads", threads, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_missing_field(tmp_path, capsys):
    data = job()
    del data["parameters"]["hbar"]
    out_path = tmp_path / "out.json"
    code, out, err = run_capture(["solve", "--spec", write_job(tmp_path, data), "--out", str(out_path)], capsys)
    assert code == 2 and out == "" and not out_path.exists()
    assert "hbar" in err


@pytest.mark.parametrize("mutate", [
    lambda d: d["options"].update(tol=-1.0),
    lambda d: d["options"].update(cutoff=99),
    lambda d: d.update(version=2),
    lambda d: d["parameters"].update(a=[1.0]),
    lambda d: d["parameters"].update(a=[1.0, 1.0]),
    lambda d: d["parameters"].update(hbar=1.0),
    lambda d: d["quiver"].update(dims=[3]),
    lambda d: d["parameters"].pop("z"),
    lambda d: d.update(extra=1),
])
def test_validation_errors(mutate, tmp_path, capsys):
    data = job()
    mutate(data)
    code, out, _ = run_capture(["verify-trs", "--spec", write_job(tmp_path, data)], capsys)
    assert code == 2 and out == ""


def test_bad_inputs(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run_capture(["solve", "--spec", str(p)], capsys)[0] == 2
    assert run_capture(["solve", "--spec", str(tmp_path / "nope.json")], capsys)[0] == 2
    assert run_capture(["solve"], capsys)[0] == 2
    with pytest.raises(SystemExit) as e:
        run(["frobnicate"])
    assert e.value.code == 2


def test_partial_flag_verify_rejected(tmp_path, capsys):
    data = job()
    data["quiver"] = {"dims": [1], "framing": 3}
    data["parameters"]["a"] = [1.0, [0.5, 1.0], -2.0]
    assert run_capture(["verify-trs", "--spec", write_job(tmp_path, data)], capsys)[0] == 2
    code, out, _ = run_capture(["solve", "--spec", write_job(tmp_path, data)], capsys)
    assert code == 0 and json.loads(out)["results"]["count"] == 3


def test_tolerance_violation(capsys):
    code, out, err = run_capture(["verify-dual", "--spec", str(FIXTURES / "job_n3.json"), "--tol", "1e-30"], capsys)
    assert code == 4
    assert json.loads(out)["results"]["passed"] is False


def test_numerical_failure(tmp_path, capsys):
    # a pole: q^{1} a_1/a_2 = 1 makes a bracket denominator vanish
    data = job()
    data["parameters"]["a"] = [0.3, 1.0]
    data["parameters"]["q"] = 0.3
    data["options"]["cutoff"] = 2
    code, out, err = run_capture(["vertex", "--spec", write_job(tmp_path, data)], capsys)
    assert code == 3 and out == "" and "PoleError" in err


def test_csv_output(capsys):
    code, out, _ = run_capture(["verify-qq", "--spec", str(FIXTURES / "job_n3.json"), "--format", "csv"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "solution,origin,max_residual,tol" and len(lines) == 7


def test_vertex_options(tmp_path, capsys):
    data = job()
    data["options"].update(point="1", insertion={"kind": "monomials", "terms": [{"exponents": [[1]], "coefficient": 2.0}]},
                           q_near_one={"q": 0.999, "z": [0.01]})
    code, out, _ = run_capture(["vertex", "--spec", write_job(tmp_path, data), "--cutoff", "2"], capsys)
    assert code == 0
    pts = json.loads(out)["results"]["points"]
    assert len(pts) == 1 and pts[0]["point"] == "1"
    assert len(pts[0]["coefficients"]) == 3 and "eigenvalue_ratio" in pts[0]
    data["options"]["insertion"] = {"kind": "monomials", "terms": [{"exponents": [[1, 0]], "coefficient": 1.0}]}
    assert run_capture(["vertex", "--spec", write_job(tmp_path, data)], capsys)[0] == 2


def test_limit_check_from_toda_point(tmp_path, capsys):
    data = job()
    data["parameters"]["toda"] = {"tz": [[1.0, 0.5], 0.3], "tp": [0.7, [0.2, -1.1]]}
    code, out, _ = run_capture(["limit-check", "--spec", write_job(tmp_path, data)], capsys)
    res = json.loads(out)["results"]
    assert code == 0 and res["points"][0]["point"] == "input" and res["passed"]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qkflags", "solve", "--spec", str(FIXTURES / "job_n2.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["results"]["count"] == 2


def test_self_test_table(monkeypatch, capsys):
    from qkflags import selftest

    fake = [selftest.CheckResult("a", True, 1e-13, 1e-10, 0.5), selftest.CheckResult("b", False, 1.0, 1e-8, 0.1)]
    monkeypatch.setattr(selftest, "run_all", lambda seed=0: fake)
    code, out, err = run_capture(["self-test", "--seed", "3"], capsys)
    assert code == 4
    assert "[PASS] a" in err and "[FAIL] b" in err
    rep = json.loads(out)
    assert rep["seed"] == 3 and [c["passed"] for c in rep["checks"]] == [True, False]
    assert "seconds" not in rep["checks"][0]
