import json
import subprocess
import sys

import pytest

from beamsinr.cli import main
from beamsinr.experiments import read_csv


def err_line(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_pattern(capsys, tmp_path):
    assert main(["pattern", "--theta-m", "pi/6", "--eta", "0.4", "--table", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "main_to_side_db=18.75" in out
    header, rows = read_csv(tmp_path / "pattern.csv")
    assert header == ["theta_rad", "gain_linear", "gain_db"] and len(rows) == 721


def test_simulate_global_flags_either_side(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--seed", "4", "--replications", "1000", "simulate", "--out", str(a), "--samples"]) == 0
    assert main(["simulate", "--seed", "4", "--replications", "1000", "--out", str(b), "--samples"]) == 0
    assert (a / "simulate_summary.csv").read_bytes() == (b / "simulate_summary.csv").read_bytes()
    header, rows = read_csv(a / "simulate_samples.csv")
    assert len(rows) == 1000
    header, _ = read_csv(a / "simulate_summary.csv")
    assert header[:9] == [f"p{p}_db" for p in (1, 5, 10, 25, 50, 75, 90, 95, 99)]


def test_simulate_with_config_and_outage(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("n: 3\ntheta_m: pi/3\n")
    assert main(["simulate", "--config", str(cfg), "--replications", "500", "--rate-threshold", "1e9",
                 "--out", str(tmp_path)]) == 0
    header, _ = read_csv(tmp_path / "simulate_summary.csv")
    assert header[-1] == "outage"


def test_analytic_and_bounds(tmp_path):
    assert main(["analytic", "--n", "3", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "analytic.csv")
    assert header == ["value", "pdf", "cdf"]
    assert rows[-1][2] == pytest.approx(1.0, abs=1e-3)
    assert main(["bounds", "--n", "3", "--replications", "2000", "--out", str(tmp_path)]) == 0
    header, rows = read_csv(tmp_path / "bounds.csv")
    assert all(r[2] <= r[3] for r in rows)


def test_analytic_with_deployment(tmp_path):
    dep = tmp_path / "dep.txt"
    dep.write_text("index,tx_x,tx_y,rx_x,rx_y\n0,5,0,0,0\n1,-3,4,-6,8\n")
    assert main(["analytic", "--deployment", str(dep), "--out", str(tmp_path)]) == 0


def test_run_and_sweep(tmp_path):
    assert main(["run", "custom", "--replications", "300", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "custom_summary.csv").exists()
    assert (tmp_path / "custom_manifest.json").exists()
    assert main(["sweep", "--param", "n", "--values", "1,5", "--replications", "300",
                 "--out", str(tmp_path)]) == 0
    _, rows = read_csv(tmp_path / "sweep.csv")
    assert [r[0] for r in rows] == [1, 5]


@pytest.mark.parametrize(
    "argv,code,kind",
    [
        (["simulate", "--rho", "0.2"], 1, "ConfigError"),
        (["simulate", "--eta", "1.5"], 1, "ConfigError"),
        (["run", "fig9"], 2, "UsageError"),
        ([], 2, "UsageError"),
        (["simulate", "--workers", "0"], 2, "UsageError"),
        (["simulate", "--config", "/nonexistent.yaml"], 1, "ConfigError"),
        (["sweep", "--param", "seed", "--values", "1"], 1, "ConfigError"),
    ],
)
def test_errors_are_machine_readable(capsys, argv, code, kind):
    assert main(argv) == code
    err = err_line(capsys)
    assert err["type"] == kind and err["error"]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "beamsinr", "pattern"], capture_output=True, text=True, cwd=tmp_path
    )
    assert proc.returncode == 0 and "g_main=" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "beamsinr", "bogus"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr.strip())["type"] == "UsageError"
