import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from kropina_einstein.cli import run
from kropina_einstein.report import REPORT_SCHEMA, dumps


def run_json(*argv):
    text, code = run([*argv, "--format", "json"])
    return (json.loads(text) if text else None), code, text


def check_by_name(report, name):
    return next(c for c in report["checks"] if c["name"] == name)


@pytest.mark.parametrize("argv,code", [
    (["inspect", "--builtin", "so_n", "--param", "n=4"], 0),
    (["inspect", "--builtin", "r3_abelian"], 0),
    (["ricci", "--builtin", "so_n", "--param", "n=3"], 0),
    (["ricci", "--builtin", "su2_diag", "--param", "1,2,3"], 2),
    (["ricci", "--builtin", "e0tilde2", "--param", "nu=2", "--oracle"], 0),
    (["killing", "--builtin", "e0tilde2", "--param", "nu=3"], 0),
    (["killing", "--builtin", "su2_diag", "--param", "1,2,3"], 0),
    (["verify", "--builtin", "e0tilde2", "--param", "nu=1", "--w", "W_thm3", "--w-kind", "left"], 0),
    (["verify", "--builtin", "su2_diag", "--param", "1,2,3", "--w", "1,0,0"], 2),
    (["classify3d"], 0),
    (["homog", "--builtin", "sphere_u", "--param", "n=1", "--w", "hopf"], 0),
    (["homog", "--builtin", "sphere_so", "--param", "n=2"], 2),
    (["homog", "--builtin", "sphere_u", "--param", "n=1", "--w", "horizontal"], 2),
])
def test_exit_codes_and_schema(argv, code):
    report, got, _ = run_json(*argv)
    assert got == code
    jsonschema.validate(report, REPORT_SCHEMA)
    assert report["command"] == argv[0]


def test_inspect_details():
    r, _, _ = run_json("inspect", "--builtin", "so_n", "--param", "n=4")
    assert r["details"]["center_dim"] == 0
    assert len(r["details"]["killing_form"]) == 6
    r, _, _ = run_json("inspect", "--builtin", "r3_abelian")
    assert r["details"]["center_dim"] == 3


def test_killing_details():
    r, _, _ = run_json("killing", "--builtin", "e0tilde2", "--param", "nu=3")
    assert r["details"]["killing_dim"] == 1
    basis = np.array(r["details"]["killing_basis"][0])
    np.testing.assert_allclose(basis, [0, 0, 1 / np.sqrt(3)], atol=1e-12)
    r, _, _ = run_json("killing", "--builtin", "r3_abelian")
    assert r["details"]["killing_dim"] == 3
    r, _, _ = run_json("killing", "--builtin", "su2_diag", "--param", "1,2,3")
    assert r["details"]["killing_dim"] == 0


def test_verify_failure_names_checks():
    r, code, _ = run_json("verify", "--builtin", "su2_diag", "--param", "1,2,3", "--w", "1,0,0")
    assert code == 2 and r["verdict"] == "falsified"
    assert "einstein_metric" in r["details"]["failing_checks"]
    assert "killing_left_invariant" in r["details"]["failing_checks"]


def test_ricci_oracle_reports_agreement():
    r, _, _ = run_json("ricci", "--builtin", "e0tilde2", "--param", "nu=2", "--oracle")
    assert r["sigma"] == 0.0
    assert check_by_name(r, "chart_oracle_agreement")["value"] < 1e-6


@pytest.mark.parametrize("argv", [
    ["inspect"],
    ["inspect", "--builtin", "so_n", "--input", "x.json"],
    ["inspect", "--builtin", "unknown"],
    ["ricci", "--builtin", "so_n", "--param", "n=2"],
    ["verify", "--builtin", "su2_round", "--w", "1,0"],
    ["verify", "--builtin", "su2_round", "--w", "hopf"],
    ["verify", "--builtin", "su2_round", "--w", "0,0,0"],
    ["nonsense"],
])
def test_usage_errors_exit_1(argv):
    _, code = run(argv)
    assert code == 1


def test_malformed_and_missing_files(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    _, code = run(["inspect", "--input", str(bad)])
    assert code == 1
    assert "invalid JSON" in capsys.readouterr().err
    _, code = run(["inspect", "--input", str(tmp_path / "missing.json")])
    assert code == 1
    bad.write_text(json.dumps({"algebra": {"dim": 3, "brackets": [{"i": 1, "j": 0, "coeffs": [0, 0, 1]}]}}))
    _, code = run(["inspect", "--input", str(bad)])
    assert code == 1
    bad.write_text(json.dumps({"algebra": {"dim": 3, "brackets": [
        {"i": 0, "j": 1, "coeffs": [0, 0, 1]}, {"i": 0, "j": 2, "coeffs": [1, 0, 0]},
        {"i": 1, "j": 2, "coeffs": [0, 1, 0]}]}}))
    _, code = run(["inspect", "--input", str(bad)])
    assert code == 1
    assert "Jacobi" in capsys.readouterr().err


def test_non_reductive_input_names_invariant(tmp_path, capsys):
    text, _ = run(["export", "--builtin", "sphere_so", "--param", "n=2"])
    doc = json.loads(text)
    doc["subalgebra"] = [[1, 0, 0], [0, 1, 0]]
    doc.pop("metric_m")
    path = tmp_path / "nonred.json"
    path.write_text(json.dumps(doc))
    _, code = run(["homog", "--input", str(path)])
    assert code == 1
    assert "subalgebra" in capsys.readouterr().err


@pytest.mark.parametrize("name,params,command,extra", [
    ("so_n", "n=3", "verify", ["--samples", "4"]),
    ("e0tilde2", "nu=2", "verify", ["--samples", "4"]),
    ("su2_diag", "1,2,3", "ricci", []),
    ("sphere_u", "n=1", "homog", []),
])
def test_export_then_input_matches_builtin(tmp_path, name, params, command, extra):
    text, code = run(["export", "--builtin", name, "--param", params])
    assert code == 0
    path = tmp_path / "inst.json"
    path.write_text(text)
    a, ca, _ = run_json(command, "--builtin", name, "--param", params, *extra)
    b, cb, _ = run_json(command, "--input", str(path), *extra)
    assert ca == cb
    assert a["verdict"] == b["verdict"]
    assert a["checks"] == b["checks"]
    assert a["sigma"] == b["sigma"]


def test_instance_chart_block_is_used(tmp_path):
    text, _ = run(["export", "--builtin", "so_n", "--param", "n=3"])
    doc = json.loads(text)
    doc["chart"] = {"samples": 3, "seed": 9, "radius": 0.2}
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    r, code, _ = run_json("verify", "--input", str(path))
    assert code == 0
    assert r["config"]["chart"]["samples"] == 3 and r["config"]["chart"]["seed"] == 9
    assert r["details"]["samples"] == 3


def test_text_format_lists_checks():
    text, code = run(["ricci", "--builtin", "so_n", "--param", "n=3"])
    assert code == 0
    assert "[PASS] einstein_metric" in text
    assert "verdict: einstein" in text


def test_schema_command_prints_schema():
    text, code = run(["schema"])
    assert code == 0
    assert json.loads(text) == json.loads(json.dumps(REPORT_SCHEMA))


def test_dumps_number_format():
    out = dumps({"a": 0.1, "b": 1.0, "c": float("nan"), "d": [1.0, 2.5e-20]})
    assert json.loads(out) == {"a": 0.1, "b": 1.0, "c": None, "d": [1.0, 2.5e-20]}
    assert '"b": 1.0' in out and "0.10000000000000001" in out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kropina_einstein", "ricci", "--builtin", "so_n",
                           "--param", "n=3", "--format", "json"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["sigma"] == pytest.approx(0.25, abs=1e-14)
