"""Command-line entry point.

Subcommands: ``pattern``, ``analytic``, ``bounds``, ``simulate``, ``run`` and
``sweep``.  Global flags (``--seed``, ``--config``, ``--out``,
``--replications``, ``--workers``) may appear before or after the subcommand.
Failures print one JSON line ``{"error": ..., "type": ...}`` to stderr and
exit nonzero.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    SinrContext,
    SumMethod,
    conditional_sinr_density,
    interference_distribution,
    marginal_component_density,
    received_power_density,
    sinr_cdf_bounds,
    sum_distribution,
    sum_interference_cdf,
)
from .antenna import pattern_table, solve_gain_constants
from .distributions import MixedDistribution, step_at_zero
from .errors import BeamSinrError, ConfigError
from .experiments import (
    EXPERIMENTS,
    ExperimentSpec,
    build_config,
    parse_config,
    parse_number,
    run_experiment,
    run_sweep,
    summary_table,
    write_csv,
)
from .geometry import Deployment, NodePair, read_deployment
from .montecarlo import Scenario, ScenarioConfig, empirical_cdf, simulate

EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# CLI flag -> ScenarioConfig field
_SCENARIO_FLAGS = {
    "n": int,
    "theta_m": parse_number,
    "eta": parse_number,
    "rho": parse_number,
    "pt": parse_number,
    "wavelength": parse_number,
    "alpha": parse_number,
    "n0": parse_number,
    "noise_density_dbm_per_mhz": parse_number,
    "bandwidth": parse_number,
    "r0": parse_number,
    "d0": parse_number,
    "scenario": str,
    "link_distance": parse_number,
    "rx_error": parse_number,
    "block_size": int,
}


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    d = argparse.SUPPRESS if suppress else None
    p.add_argument("--seed", type=int, default=d, help="master random seed")
    p.add_argument("--config", default=d, help="YAML configuration file")
    p.add_argument("--out", default=d, help="output directory")
    p.add_argument("--replications", type=int, default=d, help="Monte Carlo replications")
    p.add_argument("--workers", type=int, default=d, help="worker processes")
    return p


def _scenario_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("model parameters (override the config file)")
    for name, typ in _SCENARIO_FLAGS.items():
        g.add_argument("--" + name.replace("_", "-"), dest=name, type=typ, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="beamsinr", parents=[_global_flags(False)], description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"beamsinr {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    common = [_global_flags(True)]

    p = sub.add_parser("pattern", parents=common, help="antenna pattern constants")
    p.add_argument("--theta-m", dest="theta_m", type=parse_number, default=None)
    p.add_argument("--eta", type=parse_number, default=None)
    p.add_argument("--table", action="store_true", help="also write pattern.csv")
    p.add_argument("--points", type=int, default=721)

    p = sub.add_parser("analytic", parents=common, help="analytic SINR pdf/cdf")
    _scenario_flags(p)
    p.add_argument("--deployment", help="fixed deployment file; default marginalises interferers")
    p.add_argument("--method", default="GRID_CONV", choices=[m.value for m in SumMethod])

    p = sub.add_parser("bounds", parents=common, help="CDF bounds against simulation")
    _scenario_flags(p)
    p.add_argument("--points", type=int, default=200)

    p = sub.add_parser("simulate", parents=common, help="Monte Carlo SINR summary")
    _scenario_flags(p)
    p.add_argument("--rate-threshold", type=parse_number, default=None, help="bit/s, for outage")
    p.add_argument("--samples", action="store_true", help="also write raw samples")

    p = sub.add_parser("run", parents=common, help="run a named experiment")
    p.add_argument("experiment", choices=list(EXPERIMENTS))
    _scenario_flags(p)

    p = sub.add_parser("sweep", parents=common, help="simulate over values of one parameter")
    _scenario_flags(p)
    p.add_argument("--param", required=True)
    p.add_argument("--values", required=True, help="comma-separated values, e.g. 0,1/40,1/20")
    p.add_argument("--rate-threshold", type=parse_number, default=None)
    return parser


def _settings(args) -> tuple[dict, Path, int]:
    """Merge config file and flags into ScenarioConfig overrides."""
    overrides: dict = {}
    out = Path(".")
    if getattr(args, "config", None):
        parsed = parse_config(args.config)
        if isinstance(parsed, ExperimentSpec):
            overrides.update(parsed.overrides)
            overrides["seed"] = parsed.seed
            out = parsed.output_dir
        else:
            defaults = ScenarioConfig().to_dict()
            overrides.update({k: v for k, v in parsed.to_dict().items() if v != defaults[k]})
    for name in _SCENARIO_FLAGS:
        v = getattr(args, name, None)
        if v is not None:
            overrides[name] = v
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "replications", None) is not None:
        overrides["replications"] = args.replications
    if getattr(args, "out", None):
        out = Path(args.out)
    workers = getattr(args, "workers", None) or 1
    return overrides, out, workers


def _context(cfg: ScenarioConfig) -> SinrContext:
    return SinrContext.build(
        cfg.theta_m, cfg.eta, cfg.rho, pt=cfg.pt, n0=cfg.noise_power, wavelength=cfg.wavelength,
        alpha=cfg.alpha, d0=cfg.d0, region_radius=cfg.r0,
    )


def _cmd_pattern(args, overrides, out, workers):
    cfg = build_config({k: v for k, v in overrides.items() if k in ("theta_m", "eta")})
    tm = args.theta_m if args.theta_m is not None else cfg.theta_m
    eta = args.eta if args.eta is not None else cfg.eta
    beam = solve_gain_constants(tm, eta)
    print(f"theta_m={beam.theta_m:.9g} eta={beam.eta:.9g} omega={beam.omega:.9g}")
    print(f"g_main={beam.g_main:.9g} g_side={beam.g_side:.9g} v_integral={beam.v_integral:.9g}")
    print(f"main_to_side_db={beam.main_to_side_db:.9g}")
    if args.table:
        th, g, gdb = pattern_table(beam, args.points)
        path = write_csv(out / "pattern.csv", ["theta_rad", "gain_linear", "gain_db"], zip(th, g, gdb))
        print(f"wrote {path}")


def _fixed_condition(cfg: ScenarioConfig) -> tuple[NodePair, float]:
    if cfg.scenario is not Scenario.CENTER_RX or cfg.link_distance is None or cfg.rx_error is None:
        raise ConfigError("analytic laws need scenario CENTER_RX with --link-distance and --rx-error")
    return NodePair(complex(cfg.link_distance, 0.0), 0j, 0), cfg.rx_error


def _with_fixed_defaults(overrides: dict) -> dict:
    merged = {"link_distance": 7.5, "rx_error": 0.0}
    merged.update(overrides)
    return merged


def _cmd_analytic(args, overrides, out, workers):
    if args.deployment:
        dep = read_deployment(args.deployment)
        cfg = build_config(_with_fixed_defaults(overrides))
        ctx = _context(cfg)
        e = cfg.rx_error if cfg.rx_error is not None else 0.0
        wsum = interference_distribution(ctx, dep, e) if dep.n > 1 else None
    else:
        cfg = build_config(_with_fixed_defaults(overrides))
        ctx = _context(cfg)
        q1, e = _fixed_condition(cfg)
        dep = Deployment((q1,), cfg.r0)
        comp = marginal_component_density(ctx)
        k = cfg.n - 1
        wsum = None
        if k > 0 and args.method == SumMethod.LAPLACE.value:
            tab = sum_interference_cdf(comp, k, SumMethod.LAPLACE)
            wsum = MixedDistribution.from_cdf(tab, tab.x)
        elif k > 0:
            wsum = sum_distribution([comp] * k, ctx.grid_points)
    sinr = conditional_sinr_density(ctx, dep, e, interference=wsum)
    rows = zip(sinr.grid, sinr.density, sinr.cdf(sinr.grid))
    path = write_csv(out / "analytic.csv", ["value", "pdf", "cdf"], rows)
    if sinr.atoms:
        write_csv(out / "analytic_atoms.csv", ["value", "mass"], sinr.atoms)
    print(f"wrote {path}")


def _cmd_bounds(args, overrides, out, workers):
    cfg = build_config(_with_fixed_defaults(overrides))
    ctx = _context(cfg)
    q1, e = _fixed_condition(cfg)
    power = received_power_density(ctx, q1, e)
    k = cfg.n - 1
    if k > 0:
        wsum = sum_distribution([marginal_component_density(ctx)] * k, ctx.grid_points).cdf
    else:
        wsum = step_at_zero()
    res = simulate(cfg, workers)
    lo_db, hi_db = 10.0 * np.log10(np.percentile(res.samples, [0.1, 99.9]))
    x_db = np.linspace(math.floor(lo_db), math.ceil(hi_db), args.points)
    x = 10.0 ** (x_db / 10.0)
    lower, upper = sinr_cdf_bounds(power.cdf, wsum, ctx.n0, x)
    emp = empirical_cdf(res.samples)(x)
    path = write_csv(out / "bounds.csv", ["x", "sinr_db", "lower", "upper", "empirical"], zip(x, x_db, lower, upper, emp))
    print(f"wrote {path}")


def _cmd_simulate(args, overrides, out, workers):
    cfg = build_config(overrides)
    res = simulate(cfg, workers)
    header, rows = summary_table(res, args.rate_threshold)
    path = write_csv(out / "simulate_summary.csv", header, rows)
    print(f"wrote {path}")
    if args.samples:
        p2 = write_csv(out / "simulate_samples.csv", ["sinr_linear", "sinr_db"], zip(res.samples, res.sinr_db))
        print(f"wrote {p2}")


def _cmd_run(args, overrides, out, workers):
    seed = overrides.pop("seed", 0)
    spec = ExperimentSpec(args.experiment, overrides, out, seed)
    res = run_experiment(spec, workers)
    for f in res.files:
        print(f"wrote {f}")
    print(f"wrote {res.manifest}")


def _cmd_sweep(args, overrides, out, workers):
    base = build_config(overrides)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    if not values:
        raise ConfigError("--values is empty")
    res = run_sweep(base, args.param, values, out, workers, args.rate_threshold)
    for f in res.files:
        print(f"wrote {f}")
    print(f"wrote {res.manifest}")


_COMMANDS = {
    "pattern": _cmd_pattern,
    "analytic": _cmd_analytic,
    "bounds": _cmd_bounds,
    "simulate": _cmd_simulate,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
}


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": message, "type": kind}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required: " + ", ".join(_COMMANDS))
        if getattr(args, "workers", None) is not None and args.workers < 1:
            raise UsageError("--workers must be at least 1")
        overrides, out, workers = _settings(args)
        _COMMANDS[args.command](args, overrides, out, workers)
    except UsageError as exc:
        return _fail("UsageError", str(exc), EXIT_USAGE)
    except BeamSinrError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)
    except OSError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_FAILURE)
    except Exception as exc:  # noqa: BLE001 - last-resort machine-readable report
        return _fail(type(exc).__name__, str(exc), EXIT_INTERNAL)
    return 0


if __name__ == "__main__":
    sys.exit(main())
