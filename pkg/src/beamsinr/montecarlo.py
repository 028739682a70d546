"""Direct simulation of the SINR of random indoor deployments.

Replications are grouped in fixed-size blocks.  Each block draws from its own
counter-based streams, one per role (geometry, misalignment), derived from the
master seed and the block index only.  Results are therefore identical for
any number of workers.
"""
from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .antenna import solve_gain_constants
from .constants import (
    BANDWIDTH_HZ,
    ETA_MIN,
    FAR_FIELD_M,
    HALL_RADIUS_M,
    NOISE_DENSITY_DBM_PER_MHZ,
    PATH_LOSS_EXPONENT,
    RHO_MAX,
    TX_POWER_MW,
    WAVELENGTH_M,
    noise_power_mw,
)
from .distributions import TabulatedCdf
from .errors import ConfigError, DomainError
from .geometry import sample_center_batch, sample_paired_batch
from .misalignment import MisalignmentModel

DEFAULT_BLOCK = 2048
ROLE_GEOMETRY = 0
ROLE_MISALIGNMENT = 1


class Scenario(str, enum.Enum):
    CENTER_RX = "CENTER_RX"  # typical receiver fixed at the centre
    RANDOM_TYPICAL = "RANDOM_TYPICAL"  # every pair uniform in the disk


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything that determines a simulation run.

    ``n0=None`` derives the noise power from ``noise_density_dbm_per_mhz``
    and ``bandwidth``.  ``link_distance`` fixes the typical link length and
    ``rx_error`` the typical receiver's misalignment (centre scenario only);
    ``None`` draws them at random.
    """

    n: int = 11
    theta_m: float = math.pi / 6
    eta: float = 0.4
    rho: float = 1.0 / 20.0
    pt: float = TX_POWER_MW
    wavelength: float = WAVELENGTH_M
    alpha: float = PATH_LOSS_EXPONENT
    n0: float | None = None
    noise_density_dbm_per_mhz: float = NOISE_DENSITY_DBM_PER_MHZ
    bandwidth: float = BANDWIDTH_HZ
    r0: float = HALL_RADIUS_M
    d0: float = FAR_FIELD_M
    scenario: Scenario = Scenario.CENTER_RX
    replications: int = 100_000
    seed: int = 0
    link_distance: float | None = None
    rx_error: float | None = None
    all_links: bool = False
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self):
        object.__setattr__(self, "scenario", Scenario(self.scenario))
        for name in ("theta_m", "eta", "rho", "pt", "wavelength", "alpha", "bandwidth", "r0", "d0"):
            object.__setattr__(self, name, float(getattr(self, name)))
        self.validate()

    def validate(self) -> None:
        def bad(name, rng):
            raise ConfigError(f"{name}={getattr(self, name)!r} outside admissible {rng}")

        if not (isinstance(self.n, int) and self.n >= 1):
            bad("n", "[1, inf)")
        if not (0.0 < self.theta_m <= math.pi):
            bad("theta_m", "(0, pi]")
        if not (ETA_MIN <= self.eta < 1.0):
            bad("eta", f"[{ETA_MIN}, 1)")
        if not (0.0 <= self.rho <= RHO_MAX * (1.0 + 1e-12)):
            bad("rho", "[0, 1/6]")
        for name in ("pt", "wavelength", "alpha", "bandwidth", "d0"):
            if not getattr(self, name) > 0:
                bad(name, "(0, inf)")
        if self.n0 is not None and not self.n0 > 0:
            bad("n0", "(0, inf)")
        if not self.r0 > self.d0:
            bad("r0", f"({self.d0}, inf)")
        if not (isinstance(self.replications, int) and self.replications >= 1):
            bad("replications", "[1, inf)")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            bad("seed", "[0, 2**64)")
        if not (isinstance(self.block_size, int) and self.block_size >= 1):
            bad("block_size", "[1, inf)")
        if self.link_distance is not None and not (self.d0 <= self.link_distance <= self.r0):
            bad("link_distance", f"[{self.d0}, {self.r0}]")
        if self.rx_error is not None and abs(self.rx_error) > 0.5 * self.theta_m:
            bad("rx_error", "[-theta_m/2, theta_m/2]")
        if self.scenario is Scenario.RANDOM_TYPICAL and (
            self.link_distance is not None or self.rx_error is not None
        ):
            raise ConfigError("link_distance and rx_error apply to CENTER_RX only")

    @property
    def noise_power(self) -> float:
        if self.n0 is not None:
            return float(self.n0)
        return noise_power_mw(self.noise_density_dbm_per_mhz, self.bandwidth)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["scenario"] = self.scenario.value
        return d

    def fingerprint(self) -> str:
        """SHA-256 of the canonical JSON of every effective parameter."""
        d = self.to_dict()
        d["n0"] = self.noise_power
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True)
class SinrSampleSet:
    """SINR draws of the typical link, optionally with every link's rate.

    ``per_link_rates`` has shape ``(replications, n)`` in bit/s when the
    configuration asked for all links.
    """

    samples: np.ndarray
    per_link_rates: np.ndarray | None
    config_fingerprint: str
    config: ScenarioConfig

    def __len__(self) -> int:
        return int(self.samples.shape[0])

    @property
    def sinr_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.samples)

    def empirical_cdf(self) -> TabulatedCdf:
        return empirical_cdf(self.samples)


def block_streams(seed: int, block: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Geometry and misalignment generators for one block."""

    def stream(role):
        ss = np.random.SeedSequence(seed, spawn_key=(block, role))
        return np.random.Generator(np.random.Philox(ss))

    return stream(ROLE_GEOMETRY), stream(ROLE_MISALIGNMENT)


def _simulate_block(config: ScenarioConfig, block: int, reps: int):
    geo, mis_rng = block_streams(config.seed, block)
    beam = solve_gain_constants(config.theta_m, config.eta)
    mis = MisalignmentModel(config.theta_m, config.rho)
    n = config.n
    if config.scenario is Scenario.CENTER_RX:
        tx, rx, tx_bore, rx_bore = sample_center_batch(
            geo, reps, n, config.r0, config.d0, config.link_distance
        )
        rx = rx[:, None]
        rx_bore = rx_bore[:, None]
        tx_bore = tx_bore + mis.sample(mis_rng, (reps, n))
        if config.rx_error is None:
            rx_bore = rx_bore + mis.sample(mis_rng, (reps, 1))
        else:
            rx_bore = rx_bore + config.rx_error
        targets = 1
    else:
        tx, rx, tx_bore, rx_bore = sample_paired_batch(geo, reps, n, config.r0, config.d0)
        tx_bore = tx_bore + mis.sample(mis_rng, (reps, n))
        rx_bore = rx_bore + mis.sample(mis_rng, (reps, n))
        targets = n if config.all_links else 1
        rx, rx_bore = rx[:, :targets], rx_bore[:, :targets]
    sinr = kernels.sinr_block(
        np.ascontiguousarray(tx.real), np.ascontiguousarray(tx.imag),
        np.ascontiguousarray(rx.real), np.ascontiguousarray(rx.imag),
        np.ascontiguousarray(tx_bore), np.ascontiguousarray(rx_bore),
        beam.theta_m, beam.omega, beam.g_main, beam.g_side,
        config.pt, (config.wavelength / (4.0 * math.pi)) ** 2, config.alpha,
        config.noise_power, config.d0, targets,
    )
    return sinr


def _blocks(config: ScenarioConfig):
    bs = config.block_size
    nb = -(-config.replications // bs)
    return [(b, min(bs, config.replications - b * bs)) for b in range(nb)]


def _run_block(args):
    config, block, reps = args
    return _simulate_block(config, block, reps)


def simulate(config: ScenarioConfig, workers: int = 1) -> SinrSampleSet:
    """Simulate ``config.replications`` independent snapshots.

    The output depends on ``(seed, config)`` only; ``workers`` changes the
    wall-clock time, not the numbers.
    """
    if workers < 1:
        raise DomainError("workers must be at least 1")
    jobs = [(config, b, r) for b, r in _blocks(config)]
    if workers == 1 or len(jobs) == 1:
        parts = [_run_block(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_block, jobs))
    sinr = np.concatenate(parts, axis=0)
    rates = None
    if config.all_links and config.scenario is Scenario.RANDOM_TYPICAL:
        rates = config.bandwidth * np.log2(1.0 + sinr)
    return SinrSampleSet(sinr[:, 0].copy(), rates, config.fingerprint(), config)


def empirical_cdf(samples) -> TabulatedCdf:
    """Right-continuous step distribution function of the samples."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise DomainError("empirical_cdf needs at least one sample")
    u, counts = np.unique(s, return_counts=True)
    return TabulatedCdf(u, np.cumsum(counts) / s.size, kind="step")


@dataclass(frozen=True)
class ThroughputStats:
    """Shannon-rate averages in bit/s.

    ``sum_mean`` averages the sum over links per replication;
    ``per_link_mean`` is that divided by ``n`` (links and replications
    pooled); ``typical_mean`` uses link 1 only.
    """

    n: int
    replications: int
    sum_mean: float
    sum_std: float
    per_link_mean: float
    typical_mean: float


def throughput_statistics(config: ScenarioConfig, workers: int = 1) -> ThroughputStats:
    if config.scenario is not Scenario.RANDOM_TYPICAL:
        raise ConfigError("throughput needs scenario RANDOM_TYPICAL (every link has a receiver)")
    res = simulate(config.replace(all_links=True), workers)
    sums = res.per_link_rates.sum(axis=1)
    return ThroughputStats(
        n=config.n,
        replications=config.replications,
        sum_mean=float(sums.mean()),
        sum_std=float(sums.std(ddof=1)) if sums.size > 1 else 0.0,
        per_link_mean=float(sums.mean() / config.n),
        typical_mean=float(res.per_link_rates[:, 0].mean()),
    )


def sum_throughput(config: ScenarioConfig, workers: int = 1) -> float:
    """Mean over replications of the summed Shannon rate of all links."""
    return throughput_statistics(config, workers).sum_mean


def per_link_average_throughput(config: ScenarioConfig, workers: int = 1) -> float:
    return throughput_statistics(config, workers).per_link_mean


def outage_estimate(samples, rate_threshold: float, bandwidth: float) -> float:
    """Fraction of draws whose Shannon rate falls below ``rate_threshold``."""
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise DomainError("outage_estimate needs at least one sample")
    if rate_threshold <= 0:
        return 0.0
    return float(np.mean(bandwidth * np.log2(1.0 + s) < rate_threshold))
