"""Node placement, signed angles, wrapped departure/arrival angles and path loss.

Positions are complex numbers ``x + 1j*y`` in metres.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .constants import FAR_FIELD_M, HALL_RADIUS_M
from .errors import DeploymentError, DomainError, NearFieldError

MAX_ATTEMPTS = 10_000
TWO_PI = 2.0 * math.pi
DEPLOYMENT_HEADER = "index,tx_x,tx_y,rx_x,rx_y"


class OrientationMode(str, enum.Enum):
    """How interferer boresights are chosen."""

    PAIRED = "PAIRED"  # every boresight aims at its partner node
    UNIFORM = "UNIFORM"  # interferer boresights uniform on [-pi, pi)


@dataclass(frozen=True)
class NodePair:
    """One transmitter-receiver pair.

    ``rx`` is ``None`` for an interferer whose receiver is never instantiated;
    such a transmitter then carries an explicit nominal ``tx_boresight``.
    """

    tx: complex
    rx: complex | None
    index: int = 0
    tx_boresight: float | None = None

    @property
    def length(self) -> float:
        if self.rx is None:
            raise DomainError(f"pair {self.index} has no receiver")
        return abs(self.rx - self.tx)

    def nominal_tx_boresight(self) -> float:
        if self.tx_boresight is not None:
            return self.tx_boresight
        if self.rx is None:
            raise DomainError(f"pair {self.index} has neither receiver nor boresight")
        return float(np.angle(self.rx - self.tx))


@dataclass(frozen=True)
class Deployment:
    pairs: tuple[NodePair, ...]
    region_radius: float
    orientation_mode: OrientationMode = OrientationMode.PAIRED
    d0: float = FAR_FIELD_M

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def typical(self) -> NodePair:
        return self.pairs[0]

    @property
    def interferers(self) -> tuple[NodePair, ...]:
        return self.pairs[1:]

    def check(self) -> None:
        """Raise if any position leaves the disk or a guarded distance is short."""
        lim = self.region_radius * (1.0 + 1e-12)
        for p in self.pairs:
            if abs(p.tx) > lim or (p.rx is not None and abs(p.rx) > lim):
                raise DeploymentError(f"pair {p.index} lies outside the disk")
        rx1 = self.typical.rx
        if abs(rx1 - self.typical.tx) < self.d0:
            raise DeploymentError("typical link shorter than the far-field floor")
        for p in self.interferers:
            if abs(rx1 - p.tx) < self.d0:
                raise DeploymentError(f"interferer {p.index} within d0 of RX_1")
            if p.rx is not None and abs(p.rx - p.tx) < self.d0:
                raise DeploymentError(f"pair {p.index} shorter than d0")


def _as_complex(u) -> complex:
    if isinstance(u, complex):
        return u
    if np.iscomplexobj(u):
        return complex(u)
    if isinstance(u, (int, float)):
        return complex(u, 0.0)
    x, y = u
    return complex(x, y)


def wrap_angle(a):
    """Wrap to ``[-pi, pi)``."""
    out = np.mod(np.asarray(a, dtype=float) + math.pi, TWO_PI) - math.pi
    return float(out) if out.ndim == 0 else out


def signed_angle(u_from, u_to) -> float:
    """Counter-clockwise rotation from ``u_from`` to ``u_to`` in ``[-pi, pi)``."""
    a, b = _as_complex(u_from), _as_complex(u_to)
    if a == 0 or b == 0:
        raise DomainError("signed angle of a zero vector is undefined")
    return wrap_angle(math.atan2(b.imag, b.real) - math.atan2(a.imag, a.real))


def departure_angle(phi_hat, eps):
    """Angle between a misaligned boresight and a target direction, in ``[0, pi]``.

    ``phi_hat`` is the perfectly aligned signed angle and ``eps`` the alignment
    error; differences beyond ``pi`` wrap around the circle.
    """
    out = np.abs(wrap_angle(np.asarray(phi_hat, dtype=float) - np.asarray(eps, dtype=float)))
    return float(out) if np.ndim(out) == 0 else out


def arrival_angle(phi_hat_r, e):
    """Receive-side counterpart of :func:`departure_angle`."""
    return departure_angle(phi_hat_r, e)


def path_loss(d, wavelength: float, alpha: float, d0: float = FAR_FIELD_M):
    """Free-space constant times ``d**-alpha``; raises below the far-field floor."""
    d = np.asarray(d, dtype=float)
    if np.any(d < d0):
        raise NearFieldError(f"distance below far-field floor d0={d0} m")
    out = (wavelength / (4.0 * math.pi)) ** 2 * d ** (-alpha)
    return float(out) if out.ndim == 0 else out


def uniform_in_disk(rng: np.random.Generator, size, radius: float):
    r = radius * np.sqrt(rng.random(size))
    a = rng.uniform(-math.pi, math.pi, size)
    return r * np.exp(1j * a)


def _resample_close(rng, pts, anchor, radius, d0, what):
    """Redraw entries of ``pts`` closer than ``d0`` to ``anchor``."""
    bad = np.abs(pts - anchor) < d0
    attempts = 0
    while bad.any():
        attempts += 1
        if attempts > MAX_ATTEMPTS:
            raise DeploymentError(f"could not place {what} after {MAX_ATTEMPTS} attempts")
        pts[bad] = uniform_in_disk(rng, int(bad.sum()), radius)
        bad = np.abs(pts - anchor) < d0
    return pts


def sample_center_batch(
    rng: np.random.Generator,
    reps: int,
    n: int,
    radius: float,
    d0: float = FAR_FIELD_M,
    link_distance: float | None = None,
):
    """Positions for the fixed-centre scenario, ``reps`` at a time.

    RX_1 sits at the origin; TX_1 is uniform in the disk (or at
    ``link_distance`` in a uniform direction); the ``n - 1`` interfering
    transmitters are uniform with uniform boresights and no receivers.

    Returns ``(tx, rx, tx_bore, rx_bore)`` with shapes ``(reps, n)``, ``(reps,)``,
    ``(reps, n)`` and ``(reps,)``; boresights are nominal (before misalignment).
    """
    if link_distance is None:
        tx1 = _resample_close(rng, uniform_in_disk(rng, reps, radius), 0.0, radius, d0, "TX_1")
    else:
        if not (d0 <= link_distance <= radius):
            raise DomainError(f"link_distance must lie in [{d0}, {radius}]")
        tx1 = link_distance * np.exp(1j * rng.uniform(-math.pi, math.pi, reps))
    tx = np.empty((reps, n), dtype=complex)
    tx[:, 0] = tx1
    if n > 1:
        tx[:, 1:] = _resample_close(
            rng, uniform_in_disk(rng, (reps, n - 1), radius), 0.0, radius, d0, "interferer"
        )
    rx = np.zeros(reps, dtype=complex)
    tx_bore = np.empty((reps, n))
    tx_bore[:, 0] = np.angle(rx - tx1)
    if n > 1:
        tx_bore[:, 1:] = rng.uniform(-math.pi, math.pi, (reps, n - 1))
    rx_bore = np.angle(tx1 - rx)
    return tx, rx, tx_bore, rx_bore


def sample_paired_batch(
    rng: np.random.Generator,
    reps: int,
    n: int,
    radius: float,
    d0: float = FAR_FIELD_M,
):
    """Positions for the random-typical-receiver scenario.

    Each pair's endpoints are independently uniform in the disk, redrawn
    together until the link is at least ``d0`` long.  Boresights aim at the
    partner node.  Returns ``(tx, rx, tx_bore, rx_bore)``, all ``(reps, n)``.
    """
    tx = uniform_in_disk(rng, (reps, n), radius)
    rx = uniform_in_disk(rng, (reps, n), radius)
    bad = np.abs(rx - tx) < d0
    attempts = 0
    while bad.any():
        attempts += 1
        if attempts > MAX_ATTEMPTS:
            raise DeploymentError(f"could not place links after {MAX_ATTEMPTS} attempts")
        k = int(bad.sum())
        tx[bad] = uniform_in_disk(rng, k, radius)
        rx[bad] = uniform_in_disk(rng, k, radius)
        bad = np.abs(rx - tx) < d0
    return tx, rx, np.angle(rx - tx), np.angle(tx - rx)


def sample_deployment(
    n: int,
    region_radius: float,
    rng: np.random.Generator,
    mode: OrientationMode = OrientationMode.PAIRED,
    d0: float = FAR_FIELD_M,
    link_distance: float | None = None,
) -> Deployment:
    """Draw one deployment.

    ``UNIFORM`` gives the fixed-centre scenario (RX_1 at the origin, interferers
    without receivers, uniform boresights); ``PAIRED`` gives fully random pairs
    aimed at each other.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    mode = OrientationMode(mode)
    if mode is OrientationMode.UNIFORM:
        tx, rx, tx_bore, _ = sample_center_batch(rng, 1, n, region_radius, d0, link_distance)
        pairs = [NodePair(complex(tx[0, 0]), complex(rx[0]), 0)]
        pairs += [
            NodePair(complex(tx[0, k]), None, k, float(tx_bore[0, k])) for k in range(1, n)
        ]
    else:
        tx, rx, _, _ = sample_paired_batch(rng, 1, n, region_radius, d0)
        pairs = [NodePair(complex(tx[0, k]), complex(rx[0, k]), k) for k in range(n)]
    return Deployment(tuple(pairs), region_radius, mode, d0)


def write_deployment(deployment: Deployment, path) -> None:
    """Write the line format ``index,tx_x,tx_y,rx_x,rx_y[,tx_boresight]``.

    Comment lines start with ``#`` and carry the disk radius, orientation
    mode and far-field floor; a column header row follows.  A missing
    receiver is written as ``nan,nan``.
    """
    lines = [
        f"# region_radius={deployment.region_radius!r}",
        f"# orientation_mode={deployment.orientation_mode.value}",
        f"# d0={deployment.d0!r}",
        DEPLOYMENT_HEADER,
    ]
    for p in deployment.pairs:
        rx = (float("nan"), float("nan")) if p.rx is None else (p.rx.real, p.rx.imag)
        row = [str(p.index), repr(p.tx.real), repr(p.tx.imag), repr(rx[0]), repr(rx[1])]
        if p.tx_boresight is not None:
            row.append(repr(p.tx_boresight))
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_deployment(path) -> Deployment:
    """Parse the format of :func:`write_deployment`.

    The column header row and the comment lines are optional; the radius
    defaults to the hall radius.
    """
    meta = {"region_radius": HALL_RADIUS_M, "orientation_mode": "PAIRED", "d0": FAR_FIELD_M}
    pairs: list[NodePair] = []
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            if key.strip() in meta:
                meta[key.strip()] = val.strip()
            continue
        cols = [c.strip() for c in line.split(",")]
        if cols[0] == "index":
            continue
        try:
            if len(cols) not in (5, 6):
                raise ValueError("expected 5 or 6 columns")
            idx = int(cols[0])
            tx = complex(float(cols[1]), float(cols[2]))
            rxx, rxy = float(cols[3]), float(cols[4])
            bore = float(cols[5]) if len(cols) == 6 else None
        except ValueError as exc:
            raise DeploymentError(f"bad deployment line {raw!r}: {exc}") from None
        rx = None if math.isnan(rxx) else complex(rxx, rxy)
        pairs.append(NodePair(tx, rx, idx, bore))
    if not pairs:
        raise DeploymentError(f"deployment file {path} has no pairs")
    try:
        return Deployment(
            tuple(pairs),
            float(meta["region_radius"]),
            OrientationMode(meta["orientation_mode"]),
            float(meta["d0"]),
        )
    except ValueError as exc:
        raise DeploymentError(f"bad deployment header: {exc}") from None


def pair_angles(q1: NodePair, qj: NodePair) -> tuple[float, float]:
    """Aligned departure and arrival signed angles for interferer ``qj`` at RX_1.

    Returns ``(phi_hat_t, phi_hat_r)``: the rotation at TX_j from its nominal
    boresight to RX_1, and the rotation at RX_1 from its nominal boresight
    (towards TX_1) to TX_j.
    """
    to_rx1 = q1.rx - qj.tx
    bore_t = qj.nominal_tx_boresight()
    phi_t = wrap_angle(math.atan2(to_rx1.imag, to_rx1.real) - bore_t)
    phi_r = signed_angle(q1.tx - q1.rx, qj.tx - q1.rx)
    return phi_t, phi_r


def link_lengths(deployments: Sequence[Deployment]) -> np.ndarray:
    """Lengths of every instantiated link, for inspecting the length law."""
    return np.array([p.length for d in deployments for p in d.pairs if p.rx is not None])
