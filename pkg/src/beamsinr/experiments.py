"""Named experiment runs, configuration files and CSV output.

Every experiment writes plain CSV files plus a JSON manifest into its output
directory.  CSV files contain no timing or host information, so a rerun with
the same seed and configuration is byte-identical.
"""
from __future__ import annotations

import ast
import csv
import dataclasses
import hashlib
import io
import json
import math
import operator
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import yaml

from . import __version__, kernels
from .analytic import (
    SinrContext,
    conditional_sinr_density,
    marginal_component_density,
    received_power_density,
    sinr_cdf_bounds,
    sum_distribution,
)
from .errors import ConfigError
from .geometry import Deployment, NodePair
from .montecarlo import (
    Scenario,
    ScenarioConfig,
    empirical_cdf,
    outage_estimate,
    simulate,
    throughput_statistics,
)

FIXED_LINK_DISTANCE = 7.5  # half the hall radius
CDF_POINTS = 200
PERCENTILES = (1, 5, 10, 25, 50, 75, 90, 95, 99)
FIG7_RHOS = tuple(float(r) for r in np.linspace(0.0, 1.0 / 6.0, 21))

# ---------------------------------------------------------------------------
# CSV


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v) + 0.0:.9g}"  # + 0.0 folds -0.0 into 0
    return str(v)


def format_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> Path:
    """Comma separated, header row, UTF-8, LF endings, 9 significant digits."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(format_csv(header, rows))
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def _parse_cell(s: str):
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_csv(path) -> tuple[list[str], list[list]]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[_parse_cell(c) for c in r] for r in rows[1:]]


# ---------------------------------------------------------------------------
# configuration files

_OPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def parse_number(text) -> float:
    """Evaluate a numeric literal or simple arithmetic with ``pi`` (e.g. ``pi/6``)."""
    if isinstance(text, (int, float)) and not isinstance(text, bool):
        return text

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.operand))
        raise ValueError

    try:
        return ev(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError):
        raise ConfigError(f"not a number: {text!r}") from None


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_FIELDS = {"n", "replications", "seed", "block_size"}
_OPTIONAL = {"n0", "link_distance", "rx_error"}


def coerce_overrides(raw: dict) -> dict:
    """Check names and types of configuration values."""
    out = {}
    for key, val in raw.items():
        if key not in _FIELDS:
            raise ConfigError(f"unknown parameter {key!r}; known: {', '.join(sorted(_FIELDS))}")
        if val is None:
            if key not in _OPTIONAL:
                raise ConfigError(f"{key} may not be null")
            out[key] = None
        elif key == "scenario":
            try:
                out[key] = Scenario(str(val).upper())
            except ValueError:
                raise ConfigError(
                    f"scenario={val!r} outside admissible {{CENTER_RX, RANDOM_TYPICAL}}"
                ) from None
        elif key == "all_links":
            out[key] = bool(val)
        elif key in _INT_FIELDS:
            num = parse_number(val)
            if float(num) != int(num):
                raise ConfigError(f"{key}={val!r} must be an integer")
            out[key] = int(num)
        else:
            out[key] = float(parse_number(val))
    return out


def build_config(overrides: dict | None = None) -> ScenarioConfig:
    """Defaults, then ``overrides``; schema errors name the field and its range."""
    return ScenarioConfig(**coerce_overrides(overrides or {}))


@dataclass(frozen=True)
class ExperimentSpec:
    """A registered experiment, the parameter overrides and where to write."""

    name: str
    overrides: dict = field(default_factory=dict)
    output_dir: Path = Path(".")
    seed: int = 0

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.name!r}; known: {', '.join(EXPERIMENTS)}")
        object.__setattr__(self, "overrides", coerce_overrides(dict(self.overrides)))
        object.__setattr__(self, "output_dir", Path(self.output_dir))


def parse_config(path) -> ScenarioConfig | ExperimentSpec:
    """Read a YAML key-value file.

    Keys are :class:`ScenarioConfig` fields.  An ``experiment`` key (with
    optional ``output_dir``) turns the file into an :class:`ExperimentSpec`
    whose remaining keys are overrides.  An empty file gives the defaults.
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file {path} is not valid YAML: {exc}") from None
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config file must be a mapping of parameter names to values")
    name = data.pop("experiment", None)
    out_dir = data.pop("output_dir", ".")
    if name is None:
        return build_config(data)
    overrides = coerce_overrides(data)
    seed = overrides.pop("seed", 0)
    build_config(overrides)  # validate ranges now
    return ExperimentSpec(str(name), overrides, Path(out_dir), seed)


# ---------------------------------------------------------------------------
# experiments


@dataclass
class _Output:
    files: dict = field(default_factory=dict)  # name -> (header, rows)
    parameter_sets: list = field(default_factory=list)
    runtimes: list = field(default_factory=list)


def _percentiles_db(samples, ps=(10, 50, 90)):
    return [float(v) for v in 10.0 * np.log10(np.percentile(samples, ps))]


def _bounds_set(cfg: ScenarioConfig, workers: int, out: _Output, name: str):
    """Bounds, analytic and empirical SINR distribution for one parameter set."""
    if cfg.scenario is not Scenario.CENTER_RX or cfg.link_distance is None or cfg.rx_error is None:
        raise ConfigError(f"{name} needs scenario CENTER_RX with fixed link_distance and rx_error")
    t0 = time.perf_counter()
    ctx = SinrContext.build(
        cfg.theta_m, cfg.eta, cfg.rho, pt=cfg.pt, n0=cfg.noise_power, wavelength=cfg.wavelength,
        alpha=cfg.alpha, d0=cfg.d0, region_radius=cfg.r0,
    )
    q1 = NodePair(complex(cfg.link_distance, 0.0), 0j, 0)
    power = received_power_density(ctx, q1, cfg.rx_error)
    wsum = sum_distribution([marginal_component_density(ctx)] * (cfg.n - 1), ctx.grid_points)
    sinr = conditional_sinr_density(ctx, Deployment((q1,), cfg.r0), cfg.rx_error, interference=wsum)
    res = simulate(cfg, workers)
    lo_db, hi_db = 10.0 * np.log10(np.percentile(res.samples, [0.1, 99.9]))
    x_db = np.linspace(math.floor(lo_db), math.ceil(hi_db), CDF_POINTS)
    x = 10.0 ** (x_db / 10.0)
    lower, upper = sinr_cdf_bounds(power.cdf, wsum.cdf, ctx.n0, x)
    emp = empirical_cdf(res.samples)(x)
    ana = sinr.cdf(x)
    rows = out.files.setdefault(
        f"{name}_cdf.csv",
        (["theta_m_rad", "eta", "n", "rho", "sinr_db", "lower", "upper", "empirical", "analytic"], []),
    )[1]
    for i in range(x.size):
        rows.append([cfg.theta_m, cfg.eta, cfg.n, cfg.rho, x_db[i], lower[i], upper[i], emp[i], ana[i]])
    summ = out.files.setdefault(
        f"{name}_summary.csv",
        (["theta_m_rad", "eta", "n", "rho", "p10_db", "p50_db", "p90_db", "analytic_p50_db"], []),
    )[1]
    summ.append(
        [cfg.theta_m, cfg.eta, cfg.n, cfg.rho, *_percentiles_db(res.samples), 10 * math.log10(sinr.quantile(0.5))]
    )
    out.parameter_sets.append(cfg)
    out.runtimes.append(time.perf_counter() - t0)


def _fig3(base: ScenarioConfig, workers: int, out: _Output):
    for tm in (math.pi / 12, math.pi / 6, math.pi / 3):
        _bounds_set(base.replace(n=11, eta=0.4, rho=1 / 20, theta_m=tm), workers, out, "fig3")


def _fig4(base: ScenarioConfig, workers: int, out: _Output):
    for eta in (0.4, 0.5, 0.6):
        _bounds_set(base.replace(n=21, theta_m=math.pi / 6, rho=1 / 20, eta=eta), workers, out, "fig4")


def _fig5(base: ScenarioConfig, workers: int, out: _Output):
    base = base.replace(scenario=Scenario.RANDOM_TYPICAL, rho=1 / 20, link_distance=None, rx_error=None)
    cdf_rows, summ_rows, gap_rows = [], [], []
    for tm in (math.pi / 12, math.pi / 2):
        for eta in (0.2, 0.8):
            draws = {}
            for n in (1, 30):
                t0 = time.perf_counter()
                cfg = base.replace(theta_m=tm, eta=eta, n=n)
                draws[n] = simulate(cfg, workers).samples
                out.parameter_sets.append(cfg)
                out.runtimes.append(time.perf_counter() - t0)
            both = np.concatenate(list(draws.values()))
            lo_db, hi_db = 10.0 * np.log10(np.percentile(both, [0.1, 99.9]))
            x_db = np.linspace(math.floor(lo_db), math.ceil(hi_db), CDF_POINTS)
            for n, s in draws.items():
                f = empirical_cdf(s)(10.0 ** (x_db / 10.0))
                cdf_rows += [[tm, eta, n, x_db[i], f[i]] for i in range(x_db.size)]
                summ_rows.append([tm, eta, n, *_percentiles_db(s)])
            gaps = np.subtract(_percentiles_db(draws[1]), _percentiles_db(draws[30]))
            gap_rows.append([tm, eta, *gaps])
    out.files["fig5_cdf.csv"] = (["theta_m_rad", "eta", "n", "sinr_db", "empirical"], cdf_rows)
    out.files["fig5_summary.csv"] = (["theta_m_rad", "eta", "n", "p10_db", "p50_db", "p90_db"], summ_rows)
    out.files["fig5_gaps.csv"] = (["theta_m_rad", "eta", "gap_p10_db", "gap_p50_db", "gap_p90_db"], gap_rows)


_THROUGHPUT_HEADER = [
    "theta_m_rad", "eta", "n", "rho",
    "sum_throughput_bps", "per_link_throughput_bps", "typical_link_throughput_bps",
]


def _throughput_row(cfg: ScenarioConfig, workers: int, out: _Output):
    t0 = time.perf_counter()
    st = throughput_statistics(cfg, workers)
    out.parameter_sets.append(cfg)
    out.runtimes.append(time.perf_counter() - t0)
    return [cfg.theta_m, cfg.eta, cfg.n, cfg.rho, st.sum_mean, st.per_link_mean, st.typical_mean]


def _fig6(base: ScenarioConfig, workers: int, out: _Output):
    base = base.replace(scenario=Scenario.RANDOM_TYPICAL, eta=1 / 2.6, rho=1 / 20, link_distance=None, rx_error=None)
    rows = []
    for tm in (math.pi / 12, math.pi / 6, math.pi / 3, math.pi / 2):
        for n in range(1, 31):
            rows.append(_throughput_row(base.replace(theta_m=tm, n=n), workers, out))
    out.files["fig6_throughput.csv"] = (_THROUGHPUT_HEADER, rows)


def _fig7(base: ScenarioConfig, workers: int, out: _Output):
    base = base.replace(scenario=Scenario.RANDOM_TYPICAL, eta=1 / 2.6, link_distance=None, rx_error=None)
    rows = []
    for tm in (math.pi / 6, math.pi / 3):
        for n in (10, 20, 30):
            group = [_throughput_row(base.replace(theta_m=tm, n=n, rho=r), workers, out) for r in FIG7_RHOS]
            ref = group[0][5]
            rows += [r + [r[5] / ref] for r in group]
    out.files["fig7_throughput.csv"] = (_THROUGHPUT_HEADER + ["per_link_relative_to_rho0"], rows)


def _custom(base: ScenarioConfig, workers: int, out: _Output):
    t0 = time.perf_counter()
    res = simulate(base, workers)
    out.parameter_sets.append(base)
    out.runtimes.append(time.perf_counter() - t0)
    out.files["custom_summary.csv"] = summary_table(res)


def summary_table(res, rate_threshold: float | None = None):
    """Percentiles in dB, mean typical-link rate and optional outage."""
    cfg = res.config
    pct = 10.0 * np.log10(np.percentile(res.samples, PERCENTILES))
    header = [f"p{p}_db" for p in PERCENTILES] + ["mean_rate_bps"]
    row = list(pct) + [float(np.mean(cfg.bandwidth * np.log2(1.0 + res.samples)))]
    if rate_threshold is not None:
        header += ["rate_threshold_bps", "outage"]
        row += [float(rate_threshold), outage_estimate(res.samples, rate_threshold, cfg.bandwidth)]
    return header, [row]


# name -> (runner, default replications, fixed-condition defaults)
EXPERIMENTS: dict[str, tuple[Callable, int, dict]] = {
    "fig3": (_fig3, 100_000, {"link_distance": FIXED_LINK_DISTANCE, "rx_error": 0.0}),
    "fig4": (_fig4, 100_000, {"link_distance": FIXED_LINK_DISTANCE, "rx_error": 0.0}),
    "fig5": (_fig5, 100_000, {}),
    "fig6": (_fig6, 20_000, {}),
    "fig7": (_fig7, 20_000, {}),
    "custom": (_custom, 100_000, {}),
}


@dataclass(frozen=True)
class RunResult:
    files: tuple[Path, ...]
    manifest: Path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> RunResult:
    """Run a registered experiment and write its CSV files and manifest."""
    runner, reps, fixed = EXPERIMENTS[spec.name]
    overrides = {"replications": reps, **fixed, **spec.overrides, "seed": spec.seed}
    base = build_config(overrides)
    out = _Output()
    t0 = time.perf_counter()
    runner(base, workers, out)
    total = time.perf_counter() - t0
    written = []
    for fname, (header, rows) in out.files.items():
        written.append(write_csv(spec.output_dir / fname, header, rows))
    mpath = _write_manifest(spec.output_dir, spec.name, spec.seed, spec.overrides, out, written, total, workers)
    return RunResult(tuple(written), mpath)


def _write_manifest(out_dir, name, seed, overrides, out: _Output, written, total, workers) -> Path:
    manifest = {
        "experiment": name,
        "seed": seed,
        "code_version": __version__,
        "kernel_backend": kernels.BACKEND,
        "overrides": {k: (v.value if isinstance(v, Scenario) else v) for k, v in overrides.items()},
        "parameter_sets": [
            {"config": c.to_dict(), "fingerprint": c.fingerprint(), "runtime_s": round(rt, 3)}
            for c, rt in zip(out.parameter_sets, out.runtimes)
        ],
        "files": {p.name: _sha256(p) for p in written},
        "fingerprint": manifest_fingerprint(out.parameter_sets),
        "runtime_s": round(total, 3),
        "workers": workers,
    }
    mpath = Path(out_dir) / f"{name}_manifest.json"
    try:
        mpath.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {mpath}: {exc.strerror}") from exc
    return mpath


def run_sweep(
    base: ScenarioConfig,
    param: str,
    values,
    output_dir,
    workers: int = 1,
    rate_threshold: float | None = None,
) -> RunResult:
    """Simulate ``base`` once per value of ``param`` and tabulate the summaries."""
    if param not in _FIELDS or param in ("seed", "replications", "block_size"):
        raise ConfigError(f"cannot sweep {param!r}")
    out = _Output()
    rows, header = [], None
    t0 = time.perf_counter()
    for v in values:
        t1 = time.perf_counter()
        cfg = base.replace(**coerce_overrides({param: v}))
        res = simulate(cfg, workers)
        h, (row,) = summary_table(res, rate_threshold)
        header = [param] + h
        rows.append([getattr(cfg, param)] + row)
        out.parameter_sets.append(cfg)
        out.runtimes.append(time.perf_counter() - t1)
    written = [write_csv(Path(output_dir) / "sweep.csv", header, rows)]
    mpath = _write_manifest(output_dir, "sweep", base.seed, {}, out, written, time.perf_counter() - t0, workers)
    return RunResult(tuple(written), mpath)


def manifest_fingerprint(configs) -> str:
    """Hash over the fingerprints of every effective parameter set."""
    h = hashlib.sha256()
    for c in configs:
        h.update(c.fingerprint().encode("ascii"))
    return h.hexdigest()
