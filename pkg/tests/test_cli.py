from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from stadion.cli import dumps, main

Z_A = "186445124"


@pytest.fixture()
def runner():
    return CliRunner()


def _ok(runner, args, env=None):
    res = runner.invoke(main, args, env=env, catch_exceptions=False)
    assert res.exit_code == 0, res.output
    return res.output


def test_envelope_case_a(runner):
    out = json.loads(_ok(runner, ["envelope", "--case", "A", "--samples", "2000"]))
    assert out["n_vertices"] == 16
    assert all(abs(a - 0.875) < 1e-12 for a in out["interior_angles_over_pi"])
    assert out["containment_violation"] <= 1e-12
    assert out["tangency_on_sides"] is True
    assert abs(out["epsilon_pol"] - 0.0196) < 5e-5


def test_unfold_case_a(runner):
    out = json.loads(_ok(runner, ["unfold", "--case", "A"]))
    assert (out["genus"], out["linking_period_count"], out["independent_period_count"]) == (13, 29, 26)
    assert len(out["periods"]) == 29


def test_dioph_reference_row(runner):
    lines = _ok(runner, ["dioph", "--case", "A", "--accuracy", "8.67e-4"]).strip().splitlines()
    assert lines[0] == "accuracy,N,Z,q1,q2,q3,max_error"
    row = lines[1].split(",")
    assert row[2:6] == [Z_A, "263673223", "344505668", "142698920"]
    assert "." in row[0] and ";" not in lines[1]


def test_dioph_dirichlet_mode(runner):
    row = _ok(runner, ["dioph", "--case", "A", "--N", "1000"]).strip().splitlines()[1].split(",")
    assert row[1] == "1000"


def test_spectrum_levels(runner):
    out = json.loads(_ok(runner, ["spectrum", "--case", "A", "--accuracy", "8.67e-4", "--mmax", "2"]))
    assert out["Z"] == int(Z_A)
    assert [r["E_over_8pi2Z2"] for r in out["levels"]] == [1, 2, 4, 5, 8]
    assert out["poc_identity"] is True


def test_spectrum_csv(runner):
    text = _ok(runner, ["spectrum", "--case", "A", "--Z", Z_A, "--mmax", "1", "--format", "csv"])
    lines = text.strip().splitlines()
    assert lines[0] == "m,n,E_over_8pi2Z2,E_over_pi2,E"
    assert len(lines) == 3


def test_swf_csv_and_matrix(runner, tmp_path):
    out = tmp_path / "psi.csv"
    _ok(runner, ["swf", "--case", "A", "--Z", Z_A, "--accuracy", "8.67e-4", "--m", "1", "--n", "2",
                 "--grid", "24", "--out", str(out)])
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "x,y,re_psi,im_psi"
    assert all(len(l.split(",")) == 4 for l in lines[1:])
    text = _ok(runner, ["swf", "--case", "A", "--Z", Z_A, "--m", "1", "--n", "2", "--grid", "12", "--matrix"])
    rows = text.strip().splitlines()
    assert len(rows) == 12 and all(len(r.split()) == 12 for r in rows)


def test_swf_degenerate_warning(runner):
    res = runner.invoke(main, ["swf", "--case", "A", "--Z", Z_A, "--m", "1", "--n", "1", "--grid", "4"])
    assert res.exit_code == 0
    assert "vanishes identically" in res.stderr


def test_residual_report(runner):
    out = json.loads(_ok(runner, ["residual", "--case", "A", "--Z", Z_A, "--accuracy", "8.67e-4", "--m", "1",
                                  "--n", "2", "--samples", "256", "--diag-samples", "64", "--nodal-samples", "2"]))
    assert all(r["ok"] for r in out["boundary"])
    assert len(out["diagonals"]) == 26 and all(d["ok"] for d in out["diagonals"])
    assert out["accuracy"]["composite"] >= out["accuracy"]["epsilon_pol"]


def test_report_is_deterministic_across_threads(runner):
    args = ["report", "--case", "A", "--accuracy", "8.67e-4", "--samples", "64"]
    a = _ok(runner, args + ["--threads", "1"])
    b = _ok(runner, args, env={"STADION_THREADS": "2"})
    assert a == b
    out = json.loads(a)
    assert out["unfolding"]["genus"] == 13
    assert out["approximation"]["Z"] == int(Z_A)


def test_custom_config(runner, tmp_path):
    cfg = tmp_path / "case.json"
    cfg.write_text(json.dumps({"case": "A", "accuracy": 8.67e-4}), encoding="utf-8")
    out = json.loads(_ok(runner, ["spectrum", "--config", str(cfg), "--mmax", "1"]))
    assert out["Z"] == int(Z_A)


def test_errors_are_structured(runner):
    res = runner.invoke(main, ["envelope", "--case", "Q"])
    assert res.exit_code == 2
    err = json.loads(res.stderr)
    assert err["error"] == "ConfigError"
    res = runner.invoke(main, ["spectrum", "--case", "A", "--Z", Z_A, "--mmax", "0"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["swf", "--case", "A", "--Z", Z_A, "--m", "0", "--n", "0"])
    assert res.exit_code == 2
    res = runner.invoke(main, ["envelope"])
    assert res.exit_code == 2


def test_bad_config_file(runner, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json", encoding="utf-8")
    res = runner.invoke(main, ["envelope", "--config", str(cfg)])
    assert res.exit_code == 2


def test_dumps_float_format():
    assert dumps({"x": 0.1, "y": [1, 2.5]}) == '{\n  "x": 0.10000000000000001,\n  "y": [1, 2.5]\n}'
