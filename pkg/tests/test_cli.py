import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from derham_gap.cli import main
from derham_gap.config import read_evolution_params, read_grid_spec
from derham_gap.errors import DerhamGapError


def run_cli(args):
    return main(args)


def test_unknown_command_rejected():
    with pytest.raises(SystemExit):
        run_cli(["frobnicate"])


def test_gap_scan_writes_csv_and_diagnostics(tmp_path):
    out = tmp_path / "scan"
    code = run_cli(["-o", str(out), "gap-scan", "--op", "div", "--bc", "normal",
                    "--lengths", "1,2,4", "--per-unit", "4"])
    assert code == 0
    lines = (out / "gaps.csv").read_text().strip().splitlines()
    assert lines[0] == "operator,bc,l1,l2,l3,n1,n2,n3,gap,kernel_dim,method"
    assert len(lines) == 4
    diag = json.loads((out / "gap_diagnostics.json").read_text())
    assert abs(diag["slope_tail"] + 1.0) < 0.05
    assert (out / "manifest.json").exists()


def test_oracle_five_eigenvalues(tmp_path):
    out = tmp_path / "oracle"
    code = run_cli(["-o", str(out), "oracle", "--family", "maxwell",
                    "--lengths", "1,1,1", "--count", "5"])
    assert code == 0
    lines = (out / "oracle.csv").read_text().strip().splitlines()
    assert len(lines) == 6
    first = float(lines[1].split(",")[7])
    assert first == pytest.approx(2.0 * np.pi**2, rel=1e-12)


def test_counterexample_scan_checks(tmp_path):
    out = tmp_path / "ce"
    code = run_cli(["-o", str(out), "counterexample-scan", "--ns", "8,16,32"])
    assert code == 0
    diag = json.loads((out / "counterexample_diagnostics.json").read_text())
    assert all(v["ratio_slope"] >= 0.4 for v in diag.values())


def test_fa_props_exit_zero(tmp_path):
    assert run_cli(["-o", str(tmp_path / "fa"), "fa-props", "--trials", "10"]) == 0


def test_failure_report_on_impossible_tolerance(tmp_path):
    out = tmp_path / "fail"
    code = run_cli(["-o", str(out), "--tol", "ratio_slope_floor=-0.5",
                    "counterexample-scan", "--ns", "8,16"])
    assert code == 1
    report = json.loads((out / "failure_report.json").read_text())
    assert report and all({"check", "expected", "measured", "tolerance"} <= set(r) for r in report)


def test_config_roundtrip(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[grid]\nlengths = 1.0, 2.0, 1.0\ncells = 4, 8, 4\nbc = tangential\n"
        "[evolution]\neps = 2.0\nmu = 1.0\nsigma = 0.5\ndt = 0.02\nt_end = 1.0\nseed = 3\n"
    )
    spec = read_grid_spec(cfg)
    assert spec.lengths == (1.0, 2.0, 1.0)
    assert spec.cells == (4, 8, 4)
    assert spec.bc.name == "tangential"
    params = read_evolution_params(cfg)
    assert params["eps"] == 2.0 and params["seed"] == 3


def test_config_per_face_flags(tmp_path):
    cfg = tmp_path / "faces.ini"
    cfg.write_text("[grid]\nlengths = 1,1,1\ncells = 2,2,2\nbc.z- = tangential_zero\n")
    spec = read_grid_spec(cfg)
    assert spec.bc.gamma1 == {"z-"}


def test_config_missing_file():
    with pytest.raises(DerhamGapError):
        read_grid_spec("/nonexistent/path.ini")


def test_evolve_with_config(tmp_path):
    cfg = tmp_path / "run.ini"
    cfg.write_text(
        "[grid]\nlengths = 1,1,1\ncells = 4,4,4\nbc = tangential\n"
        "[evolution]\nsigma = 1.0\ndt = 0.02\nt_end = 2.0\nseed = 1\n"
    )
    out = tmp_path / "evolve"
    code = run_cli(["-o", str(out), "--config", str(cfg), "evolve"])
    assert code == 0
    lines = (out / "trace.csv").read_text().strip().splitlines()
    assert lines[0] == "t,total,range,kernel"
    diag = json.loads((out / "evolve_diagnostics.json").read_text())
    assert diag["range"]["eta"] > 0.05


def test_determinism_same_seed(tmp_path):
    args = ["counterexample-scan", "--ns", "8,16,32"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli(["-o", str(out1), "--seed", "5"] + args) == 0
    assert run_cli(["-o", str(out2), "--seed", "5"] + args) == 0
    assert (out1 / "counterexamples.csv").read_bytes() == (out2 / "counterexamples.csv").read_bytes()


def test_console_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "derham_gap", "-o", str(tmp_path / "o"),
         "oracle", "--count", "3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
