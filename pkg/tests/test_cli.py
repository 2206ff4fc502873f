"""Command-line surface: exit codes, determinism, and artifact files."""

import json
from pathlib import Path

from ppwavelab.cli import main

CONFIGS = Path(__file__).resolve().parents[1] / "configs"
STRICT = str(CONFIGS / "n5_strict.json")
WEAK = str(CONFIGS / "n5_weak.json")
MEDIUM = str(CONFIGS / "n5_medium.json")
SYMMETRIC = str(CONFIGS / "n5_symmetric.json")


def run(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def test_dims_passes_and_reports(capsys):
    rc, out, _ = run(capsys, ["dims", STRICT])
    assert rc == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["payload"]["dim_isom0"] == 8
    assert doc["payload"]["dim_s"] == 1
    names = [c["name"] for c in doc["checks"]]
    assert "dim_formula_match" in names
    assert all(c["status"] == "pass" for c in doc["checks"])


def test_output_is_byte_identical_across_runs(capsys):
    argv = ["group", "verify", STRICT, "--trials", "40", "--seed", "3"]
    rc1, out1, _ = run(capsys, argv)
    rc2, out2, _ = run(capsys, argv)
    assert rc1 == rc2 == 0
    assert out1 == out2


def test_missing_config_exits_two(capsys):
    rc, _, err = run(capsys, ["dims", "/no/such/file.json"])
    assert rc == 2
    assert "error:" in err


def test_config_errors_carry_pointers(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 5, "fourier": {"a0": 0.1,
                                                   "modes": [[0.2, 0.0]]},
                               "A": [[0.3, 0, 0], [0, 0.3, 0], [0, 0, -0.6]]}))
    rc, _, err = run(capsys, ["dims", str(bad)])
    assert rc == 2
    assert "/period" in err


def test_failing_gate_exits_three(capsys):
    # the weak-scale profile sits below the non-parallelism floor, so the
    # strict separation check must fail loudly
    rc, out, err = run(capsys, ["curvature", "verify", WEAK, "--seed", "0"])
    assert rc == 3
    doc = json.loads(out)
    assert doc["passed"] is False
    failed = {c["name"] for c in doc["checks"] if c["status"] == "fail"}
    assert "riemann_not_parallel" in failed


def test_out_flag_redirects_the_report(capsys, tmp_path):
    target = tmp_path / "report.json"
    rc, out, _ = run(capsys, ["dims", STRICT, "--out", str(target)])
    assert rc == 0
    assert out == ""
    doc = json.loads(target.read_text())
    assert doc["payload"]["dim_isom0"] == 8


def test_csv_table(capsys, tmp_path):
    target = tmp_path / "checks.csv"
    rc, _, _ = run(capsys, ["dims", STRICT, "--csv", str(target)])
    assert rc == 0
    lines = target.read_text().strip().splitlines()
    assert lines[0] == "name,status,max_residual,tolerance"
    assert len(lines) >= 2
    assert any("dim_formula_match" in line for line in lines[1:])


def test_figures_are_rendered(capsys, tmp_path):
    outdir = tmp_path / "figs"
    rc, _, _ = run(capsys, ["model", "validate", STRICT,
                            "--figures", str(outdir)])
    assert rc == 0
    for name in ("checks.png", "profile.png"):
        f = outdir / name
        assert f.is_file() and f.stat().st_size > 0


def test_timing_flag_controls_the_field(capsys):
    _, out, _ = run(capsys, ["dims", STRICT])
    assert "wall_time_s" not in json.loads(out)
    _, out, _ = run(capsys, ["dims", STRICT, "--timing"])
    assert json.loads(out)["wall_time_s"] > 0.0


def test_symmetric_config_relaxed_gates(capsys):
    rc, out, _ = run(capsys, ["curvature", "verify", SYMMETRIC])
    assert rc == 0
    doc = json.loads(out)
    names = {c["name"] for c in doc["checks"]}
    assert "riemann_parallel" in names


def test_all_smoke(capsys, tmp_path):
    outdir = tmp_path / "figs"
    rc, out, _ = run(capsys, ["all", MEDIUM, "--horizon", "20",
                              "--trials", "2", "--seed", "1",
                              "--figures", str(outdir)])
    assert rc == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    names = {c["name"] for c in doc["checks"]}
    assert any(name.startswith("curvature/") for name in names)
    assert any(name.startswith("holonomy/") for name in names)
    assert (outdir / "checks.png").is_file()
    assert (outdir / "model_profile.png").is_file()
