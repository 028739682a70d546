import json
import math

import pytest
from hypothesis import example, given, settings
from hypothesis import strategies as st

from beamsinr.errors import ConfigError
from beamsinr.experiments import (
    ExperimentSpec,
    build_config,
    format_csv,
    parse_config,
    parse_number,
    read_csv,
    run_experiment,
    run_sweep,
    write_csv,
)
from beamsinr.montecarlo import Scenario, ScenarioConfig

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


def test_csv_format(tmp_path):
    path = write_csv(tmp_path / "a.csv", ["x_db", "n"], [[1 / 3, 2], [1e-20, 30]])
    raw = path.read_bytes()
    assert b"\r" not in raw
    assert raw.decode("utf-8") == "x_db,n\n0.333333333,2\n1e-20,30\n"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(finite, st.integers(-10**6, 10**6)), min_size=1, max_size=20))
@example(rows=[(-0.0, 0)])
def test_csv_roundtrip(tmp_path_factory, rows):
    path = write_csv(tmp_path_factory.mktemp("csv") / "r.csv", ["value", "k"], rows)
    header, back = read_csv(path)
    assert format_csv(header, back) == path.read_text(encoding="utf-8")


@pytest.mark.parametrize(
    "text,value", [("pi/6", math.pi / 6), ("1/20", 0.05), ("2.5e-3", 2.5e-3), ("-pi", -math.pi), ("3", 3.0)]
)
def test_parse_number(text, value):
    assert parse_number(text) == pytest.approx(value)


@pytest.mark.parametrize("text", ["__import__('os')", "pi()", "a+b", "1/0", ""])
def test_parse_number_rejects(text):
    with pytest.raises(ConfigError):
        parse_number(text)


def test_empty_config_gives_defaults(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("")
    assert parse_config(path) == ScenarioConfig()


def test_config_values_and_rejections(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text("theta_m: pi/3\nrho: 1/40\nscenario: RANDOM_TYPICAL\n")
    cfg = parse_config(path)
    assert cfg.theta_m == pytest.approx(math.pi / 3) and cfg.rho == 0.025
    assert cfg.scenario is Scenario.RANDOM_TYPICAL
    path.write_text("rho: 0.2\n")
    with pytest.raises(ConfigError, match=r"rho.*\[0, 1/6\]"):
        parse_config(path)
    path.write_text("eta: 1.5\n")
    with pytest.raises(ConfigError, match="eta"):
        parse_config(path)
    path.write_text("colour: blue\n")
    with pytest.raises(ConfigError, match="colour"):
        parse_config(path)
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.yaml")


def test_experiment_config(tmp_path):
    path = tmp_path / "e.yaml"
    path.write_text(f"experiment: fig3\noutput_dir: {tmp_path / 'o'}\nseed: 5\nreplications: 100\n")
    spec = parse_config(path)
    assert isinstance(spec, ExperimentSpec)
    assert spec.seed == 5 and spec.overrides == {"replications": 100}
    with pytest.raises(ConfigError):
        ExperimentSpec("fig9")


def test_fig3_manifest_and_rerun(tmp_path):
    spec = ExperimentSpec("fig3", {"replications": 2000}, tmp_path / "a", seed=3)
    res = run_experiment(spec)
    manifest = json.loads(res.manifest.read_text())
    assert len(manifest["parameter_sets"]) == 3
    assert {"seed", "code_version", "runtime_s", "files", "fingerprint"} <= set(manifest)
    header, rows = read_csv(tmp_path / "a" / "fig3_cdf.csv")
    assert header[:5] == ["theta_m_rad", "eta", "n", "rho", "sinr_db"]
    again = run_experiment(ExperimentSpec("fig3", {"replications": 2000}, tmp_path / "b", seed=3))
    for f1, f2 in zip(res.files, again.files):
        assert f1.read_bytes() == f2.read_bytes()


def test_fig6_shape(tmp_path):
    res = run_experiment(ExperimentSpec("fig6", {"replications": 50}, tmp_path))
    header, rows = read_csv(tmp_path / "fig6_throughput.csv")
    assert len(rows) == 120
    assert "sum_throughput_bps" in header and "per_link_throughput_bps" in header


def test_manifest_fingerprint_tracks_overrides(tmp_path):
    a = run_experiment(ExperimentSpec("custom", {"replications": 500}, tmp_path / "a"))
    b = run_experiment(ExperimentSpec("custom", {"replications": 500, "rho": 0.04}, tmp_path / "b"))
    c = run_experiment(ExperimentSpec("custom", {"replications": 500}, tmp_path / "c"))
    fa, fb, fc = (json.loads(r.manifest.read_text())["fingerprint"] for r in (a, b, c))
    assert fa != fb and fa == fc


def test_sweep(tmp_path):
    res = run_sweep(build_config({"replications": 500}), "rho", ["0", "1/20"], tmp_path, rate_threshold=1e9)
    header, rows = read_csv(res.files[0])
    assert header[0] == "rho" and "outage" in header and len(rows) == 2
    with pytest.raises(ConfigError):
        run_sweep(build_config(), "seed", [1], tmp_path)


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(ConfigError):
        run_experiment(ExperimentSpec("custom", {"replications": 100}, blocker / "sub"))
