"""Analytic SINR distributions for a directional link under beam misalignment.

Every law is returned as a :class:`MixedDistribution`.  Side-lobe gain is hit
with positive probability, so interference components carry atoms; the
transmit-side gain is continuous unless the misalignment is degenerate.

Building blocks, in order of use:

* :func:`gain_density` and :func:`received_power_density` for the signal;
* :func:`departure_angle_density` and :func:`interference_component_density`
  for one interferer at a known position, or
  :func:`marginal_component_density` for an interferer uniform in the disk;
* :func:`convolve` / :func:`sum_interference_cdf` for the aggregate;
* :func:`conditional_sinr_density`, :func:`marginal_sinr_density`,
  :func:`sinr_cdf_bounds` and :func:`outage_probability` for the SINR.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import erf

from . import kernels, laplace
from .antenna import BeamParameters, gain, mainlobe_angle, solve_gain_constants
from .constants import (
    FAR_FIELD_M,
    HALL_RADIUS_M,
    PATH_LOSS_EXPONENT,
    TX_POWER_MW,
    WAVELENGTH_M,
    noise_power_mw,
)
from .distributions import (
    DEFAULT_GRID_POINTS,
    MixedDistribution,
    TabulatedCdf,
    log_grid,
    mixture,
    step_at_zero,
)
from .errors import (
    DomainError,
    GridOverflowError,
    InversionInstabilityError,
    ParameterMismatchError,
)
from .geometry import (
    Deployment,
    NodePair,
    OrientationMode,
    arrival_angle,
    pair_angles,
    path_loss,
    sample_deployment,
)
from .misalignment import MisalignmentModel

_LN10 = math.log(10.0)
ANGLE_POINTS = 2049
PSI_NODES = 96
MAX_ATOMS = 2048
ATOM_PRUNE = 1e-15
LAPLACE_POINTS = 512
CROSS_CHECK_TOL = 1e-2


class SumMethod(str, enum.Enum):
    GRID_CONV = "GRID_CONV"
    LAPLACE = "LAPLACE"


@dataclass(frozen=True)
class SinrContext:
    """Physical and antenna parameters shared by all analytic operations.

    ``deployment_condition`` is a fixed :class:`Deployment`, or ``None`` for
    interferers marginalised uniformly over the disk.
    """

    beam: BeamParameters
    mis_tx: MisalignmentModel
    mis_rx: MisalignmentModel
    pt: float = TX_POWER_MW
    n0: float = field(default_factory=noise_power_mw)
    wavelength: float = WAVELENGTH_M
    alpha: float = PATH_LOSS_EXPONENT
    d0: float = FAR_FIELD_M
    region_radius: float = HALL_RADIUS_M
    grid_points: int = DEFAULT_GRID_POINTS
    deployment_condition: Deployment | None = None

    def __post_init__(self):
        if not self.pt > 0:
            raise DomainError("pt must be positive")
        if not self.n0 > 0:
            raise DomainError("n0 must be positive")
        for m in (self.mis_tx, self.mis_rx):
            _check_match(self.beam, m)

    @classmethod
    def build(cls, theta_m: float, eta: float, rho: float, **kw) -> "SinrContext":
        mis = MisalignmentModel(theta_m, rho)
        return cls(solve_gain_constants(theta_m, eta), mis, mis, **kw)

    @property
    def loss_const(self) -> float:
        return (self.wavelength / (4.0 * math.pi)) ** 2

    def path_loss(self, d):
        return path_loss(d, self.wavelength, self.alpha, self.d0)


def _check_match(beam: BeamParameters, mis: MisalignmentModel) -> None:
    if not math.isclose(beam.theta_m, mis.theta_m, rel_tol=1e-12):
        raise ParameterMismatchError(
            f"beam theta_m={beam.theta_m} differs from misalignment theta_m={mis.theta_m}"
        )


# ---------------------------------------------------------------------------
# gains and received power


def gain_pdf(beam: BeamParameters, mis: MisalignmentModel, g):
    """Pointwise density of ``G(eps)`` on ``(Gs, Gm)``.

    Change of variables through the main-lobe inverse: both signs of ``eps``
    map to the same gain, hence the factor 2.
    """
    _check_match(beam, mis)
    g = np.asarray(g, dtype=float)
    inside = (g > beam.g_side) & (g < beam.g_main)
    gg = np.where(inside, g, 0.5 * (beam.g_side + beam.g_main))
    theta = mainlobe_angle(beam, gg)
    slope = gg * 0.3 * _LN10 * 8.0 * theta / beam.omega**2
    val = 2.0 * mis.pdf(theta) / np.where(slope > 0, slope, np.inf)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def gain_density(
    beam: BeamParameters, mis: MisalignmentModel, n_points: int = ANGLE_POINTS
) -> MixedDistribution:
    """Law of the main-lobe gain seen through a misaligned boresight.

    Nodes are uniform in angle, which is the same as uniform in
    ``sqrt(log10(Gm/g))`` and absorbs the inverse-square-root singularity at
    ``Gm``.  Each node carries the exact probability of its dual cell.
    """
    _check_match(beam, mis)
    theta = np.linspace(0.0, mis.half_width, n_points)
    grid = np.sort(gain(beam, theta))
    if mis.degenerate:
        return MixedDistribution(grid, np.zeros_like(grid), ((beam.g_main, 1.0),))

    def cdf(g):
        return 2.0 * (1.0 - mis.cdf(mainlobe_angle(beam, g)))

    return MixedDistribution.from_cdf(cdf, grid)


def received_power_density(ctx: SinrContext, q1: NodePair, e: float) -> MixedDistribution:
    """Law of ``Pt L(d11) G(e) g`` with ``g`` drawn from :func:`gain_density`."""
    if abs(e) > ctx.mis_rx.half_width * (1.0 + 1e-12):
        raise DomainError("receive misalignment outside the main lobe")
    c = ctx.pt * ctx.path_loss(q1.length) * gain(ctx.beam, e)
    return gain_density(ctx.beam, ctx.mis_tx).scaled(c)


# ---------------------------------------------------------------------------
# departure angles and single-interferer components


def departure_angle_cdf(phi_hat: float, mis: MisalignmentModel, theta):
    """``P(|wrap(phi_hat - eps)| <= theta)`` for ``theta`` in ``[0, pi]``.

    The three images ``k = -1, 0, 1`` of the wrapped interval cover every
    regime: no wrap, wrap through ``pi`` and folding at zero.
    """
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, math.pi)
    out = np.zeros_like(theta)
    for k in (-1, 0, 1):
        shift = 2.0 * math.pi * k
        out += mis.cdf(phi_hat + theta + shift) - mis.cdf(phi_hat - theta + shift)
    return np.clip(out, 0.0, 1.0)


def departure_angle_density(
    phi_hat: float, mis: MisalignmentModel, n_points: int = ANGLE_POINTS
) -> MixedDistribution:
    """Law of the departure angle on ``[0, pi]`` given the aligned angle ``phi_hat``."""
    phi_hat = float(phi_hat)
    if not (-math.pi <= phi_hat <= math.pi):
        raise DomainError("phi_hat must lie in [-pi, pi]")
    a = abs(phi_hat)
    if mis.degenerate:
        return MixedDistribution(np.array([0.0, math.pi]), np.zeros(2), ((a, 1.0),))
    h = mis.half_width
    lo, hi = max(0.0, a - h), min(math.pi, a + h)
    if a < h:
        lo = 0.0
    if a > math.pi - h:
        hi = math.pi
    window = np.linspace(lo, hi, n_points)
    # tight guard nodes keep the zero density outside the window from leaking in
    gap = 1e-9 * (hi - lo)
    nodes = [window]
    if lo > 0.0:
        nodes.append([0.0, lo - gap])
    if hi < math.pi:
        nodes.append([hi + gap, math.pi])
    grid = np.unique(np.concatenate(nodes))
    return MixedDistribution.from_cdf(lambda t: departure_angle_cdf(phi_hat, mis, t), grid)


def uniform_departure_density() -> MixedDistribution:
    """Departure angle of a transmitter whose boresight is uniform on the circle."""
    return MixedDistribution(np.array([0.0, math.pi]), np.full(2, 1.0 / math.pi))


def pattern_pushforward(beam: BeamParameters, angle: MixedDistribution, scale: float = 1.0):
    """Law of ``scale * G(phi)`` for a tabulated angle law on ``[0, pi]``.

    Mass beyond the main lobe becomes one atom at ``scale * Gs``; its mass is
    the complement of the main-lobe probability by construction.
    """
    h = 0.5 * beam.theta_m
    side_mass = max(0.0, 1.0 - float(angle.cdf(h)))
    theta = angle.grid[angle.grid <= h]
    theta = np.unique(np.concatenate((theta, [0.0, h])))
    grid = np.unique(gain(beam, theta))
    grid = np.unique(np.concatenate((grid, [beam.g_side, beam.g_main])))
    inside = angle.continuous_cdf(h)

    def cdf(g):
        return inside - angle.continuous_cdf(mainlobe_angle(beam, g))

    atoms = [(beam.g_side, side_mass)]
    atoms += [(gain(beam, loc), m) for loc, m in angle.atoms if loc <= h]
    dist = MixedDistribution.from_cdf(cdf, grid, atoms)
    return dist.scaled(scale) if scale != 1.0 else dist


def interference_component_density(
    ctx: SinrContext, q1: NodePair, qj: NodePair, e: float
) -> MixedDistribution:
    """Law of the power received at RX_1 from interferer ``qj``.

    The arrival angle is deterministic given ``e``; the departure angle is
    random through the interferer's own misalignment.
    """
    d = abs(q1.rx - qj.tx)
    loss = ctx.path_loss(d)
    phi_t, phi_r = pair_angles(q1, qj)
    g_r = gain(ctx.beam, arrival_angle(phi_r, e))
    dep = departure_angle_density(phi_t, ctx.mis_tx)
    return pattern_pushforward(ctx.beam, dep, ctx.pt * loss * g_r)


def _ray_lengths(p: complex, psi: np.ndarray, radius: float) -> np.ndarray:
    """Distance from ``p`` to the disk boundary along directions ``psi``."""
    u = np.exp(1j * psi)
    b = p.real * u.real + p.imag * u.imag
    return -b + np.sqrt(np.maximum(b * b - abs(p) ** 2 + radius**2, 0.0))


def _psi_rule(bore: float, h: float, n: int):
    """Gauss-Legendre nodes over the receive main lobe and the rest of the circle."""
    x, w = np.polynomial.legendre.leggauss(n)
    main = bore + h * x
    side = bore + math.pi + (math.pi - h) * x
    return (
        np.concatenate((main, side)),
        np.concatenate((h * w, (math.pi - h) * w)),
        np.concatenate((np.abs(h * x), np.full(n, math.pi))),
    )


def marginal_component_density(
    ctx: SinrContext,
    q1: NodePair | None = None,
    e: float = 0.0,
    psi_nodes: int = PSI_NODES,
    grid_points: int | None = None,
) -> MixedDistribution:
    """Interference from one transmitter uniform in the disk, boresight uniform.

    The transmitter is uniform over the disk minus the ``d0`` ball around
    RX_1.  For every bearing ``psi`` from RX_1 the radial integral is done in
    closed form: the side-lobe part through the radius threshold, the
    main-lobe part through a Gaussian integral in the departure angle.  The
    bearing integral uses Gauss-Legendre nodes split at the receive main
    lobe.  With RX_1 at the centre the result does not depend on ``e``.
    """
    beam = ctx.beam
    n_grid = grid_points or ctx.grid_points
    if q1 is None:
        p, bore = 0j, 0.0
    else:
        p = complex(q1.rx)
        bore = math.atan2((q1.tx - q1.rx).imag, (q1.tx - q1.rx).real) + e
    h = 0.5 * beam.theta_m
    psi, wpsi, rel = _psi_rule(bore, h, psi_nodes)
    g_r = gain(beam, rel)
    rmax = _ray_lengths(p, psi, ctx.region_radius)
    if np.any(rmax <= ctx.d0):
        raise DomainError("RX_1 too close to the boundary for the far-field floor")
    d0 = ctx.d0
    a_const = ctx.pt * ctx.loss_const
    area = float(np.sum(wpsi * (rmax**2 - d0**2)) / 2.0)
    p_side = 1.0 - h / math.pi
    kappa = (2.0 / ctx.alpha) * 0.3 * _LN10 * 4.0 / beam.omega**2
    sk = math.sqrt(kappa)

    def cdf(w):
        w = np.asarray(w, dtype=float)[:, None]
        rm2 = rmax[None, :] ** 2
        # side-lobe transmit gain: distance threshold r_s
        r_s = (a_const * g_r * beam.g_side / w) ** (1.0 / ctx.alpha)
        t_side = rm2 - np.clip(r_s, d0, rmax) ** 2
        # main-lobe transmit gain: r(theta)^2 = r_top^2 exp(-kappa theta^2)
        log_top = (2.0 / ctx.alpha) * np.log(a_const * g_r * beam.g_main / w)
        th_a = np.sqrt(np.maximum(log_top - 2.0 * np.log(rmax), 0.0) / kappa)
        th_b = np.sqrt(np.maximum(log_top - 2.0 * math.log(d0), 0.0) / kappa)
        th_a, th_b = np.minimum(th_a, h), np.minimum(th_b, h)
        gauss = np.exp(log_top) * (math.sqrt(math.pi) / (2.0 * sk)) * (erf(sk * th_b) - erf(sk * th_a))
        clipped = rm2 * th_a + gauss + d0**2 * (h - th_b)
        t_main = h * rm2 - clipped
        per_ray = 0.5 * (p_side * t_side + t_main / math.pi)
        return (per_ray * wpsi[None, :]).sum(axis=1) / area

    lo = a_const * beam.g_side**2 * float(rmax.max()) ** (-ctx.alpha)
    hi = a_const * beam.g_main**2 * d0 ** (-ctx.alpha)
    grid = log_grid(lo * (1.0 - 1e-9), hi, n_grid)
    return MixedDistribution.from_cdf(cdf, grid)


# ---------------------------------------------------------------------------
# sums of independent components


def _single_atom(d: MixedDistribution) -> float | None:
    if len(d.atoms) == 1 and d.continuous_mass == 0.0:
        return d.atoms[0][0]
    return None


def convolve(
    d1: MixedDistribution,
    d2: MixedDistribution,
    grid_points: int = DEFAULT_GRID_POINTS,
    max_support: float | None = None,
) -> MixedDistribution:
    """Law of ``X1 + X2`` for independent ``X1``, ``X2`` on ``[0, inf)``.

    Density cells are reduced to centroid point masses, pair sums are split
    linearly onto a geometric output grid (mass and mean preserved), and
    atoms combine exactly.  A pure point mass operand is applied as an exact
    shift.
    """
    for d in (d1, d2):
        if d.support[0] < 0:
            raise DomainError("convolve expects nonnegative supports")
    a1, a2 = _single_atom(d1), _single_atom(d2)
    if a1 is not None:
        return d2.shifted(a1)
    if a2 is not None:
        return d1.shifted(a2)
    lo = d1.support[0] + d2.support[0]
    hi = d1.support[1] + d2.support[1]
    if max_support is not None and hi > max_support:
        raise GridOverflowError(f"sum support {hi:.6g} exceeds bound {max_support:.6g}")
    grid = log_grid(lo, hi, grid_points)
    x1, m1 = _continuous_points(d1)
    x2, m2 = _continuous_points(d2)
    masses = kernels.rebin_pair_sums(x1, m1, x2, m2, grid) if x1.size and x2.size else np.zeros(grid.size)
    for loc, m in d1.atoms:
        if x2.size:
            masses += kernels.rebin_points(x2 + loc, m2 * m, grid)
    for loc, m in d2.atoms:
        if x1.size:
            masses += kernels.rebin_points(x1 + loc, m1 * m, grid)
    atoms = [(p + q, mp * mq) for p, mp in d1.atoms for q, mq in d2.atoms]
    atoms, spill = _prune_atoms(atoms)
    if spill:
        masses += kernels.rebin_points(np.array([a for a, _ in spill]), np.array([m for _, m in spill]), grid)
    return MixedDistribution.from_node_masses(grid, masses, atoms)


def _continuous_points(d: MixedDistribution):
    loc, m = d.to_discrete()
    n_atoms = len(d.atoms)
    if n_atoms:
        loc, m = loc[:-n_atoms], m[:-n_atoms]
    return loc, m


def _prune_atoms(atoms):
    """Keep the heaviest atoms; the rest are spread onto the density grid."""
    atoms = [(a, m) for a, m in atoms if m > 0.0]
    if len(atoms) <= MAX_ATOMS and all(m >= ATOM_PRUNE for _, m in atoms):
        return atoms, []
    atoms.sort(key=lambda am: -am[1])
    keep = [am for am in atoms[:MAX_ATOMS] if am[1] >= ATOM_PRUNE]
    spill = [am for am in atoms if am not in keep]
    return keep, spill


def sum_distribution(
    components: Sequence[MixedDistribution], grid_points: int = DEFAULT_GRID_POINTS
) -> MixedDistribution:
    """Law of the sum of independent components by repeated :func:`convolve`."""
    if not components:
        return MixedDistribution.point_mass(0.0)
    out = components[0]
    for c in components[1:]:
        out = convolve(out, c, grid_points)
    return out


def sum_interference_cdf(
    component: MixedDistribution,
    k: int,
    method: SumMethod | str = SumMethod.GRID_CONV,
    grid_points: int = DEFAULT_GRID_POINTS,
    validate: bool = True,
) -> TabulatedCdf:
    """Distribution function of the sum of ``k`` i.i.d. copies of ``component``.

    ``GRID_CONV`` iterates :func:`convolve`.  ``LAPLACE`` raises the exact
    transform of the tabulated component to the power ``k`` and inverts it;
    with ``validate`` the result is compared with ``GRID_CONV`` and an
    :class:`InversionInstabilityError` is raised above a 1e-2 sup-norm gap.
    """
    method = SumMethod(method)
    if k < 0:
        raise DomainError("k must be nonnegative")
    if k == 0:
        return step_at_zero()
    if method is SumMethod.GRID_CONV:
        return sum_distribution([component] * k, grid_points).tabulate_cdf()
    lo, hi = component.support
    offsets = log_grid(k * (hi - lo) * 1e-12, k * (hi - lo), LAPLACE_POINTS - 1)
    t = k * lo + np.concatenate(([0.0], offsets))
    values = np.maximum.accumulate(laplace.sum_cdf(component, k, t))
    result = TabulatedCdf(t, values)
    if validate:
        ref = sum_distribution([component] * k, grid_points)
        gap = float(np.max(np.abs(ref.cdf(t) - values)))
        if gap > CROSS_CHECK_TOL:
            raise InversionInstabilityError(
                f"Laplace inversion differs from direct convolution by {gap:.3g}"
            )
    return result


# ---------------------------------------------------------------------------
# SINR laws


def interference_distribution(ctx: SinrContext, deployment: Deployment, e: float) -> MixedDistribution:
    """Aggregate interference at RX_1 for a fixed deployment."""
    q1 = deployment.typical
    comps = [interference_component_density(ctx, q1, qj, e) for qj in deployment.interferers]
    return sum_distribution(comps, ctx.grid_points)


def _sinr_grid(p: MixedDistribution, i: MixedDistribution, n0: float, n: int):
    plo, phi = p.support
    ilo, ihi = i.support
    return log_grid(plo / (n0 + ihi), phi / (n0 + max(ilo, 0.0)), n)


def conditional_sinr_density(
    ctx: SinrContext,
    deployment: Deployment,
    e: float,
    interference: MixedDistribution | None = None,
) -> MixedDistribution:
    """SINR law of the typical link given positions and receive misalignment.

    Integrates ``f(x) = int_{N0}^inf y f_P(xy) f_I(y - N0) dy`` over each
    output cell.  With the received power discretised into cells
    ``(p_j, m_j)`` this reads
    ``F(x) = sum_j m_j P(I >= p_j / x - N0)``, evaluated with the exact
    distribution function of the continuous part of ``I``.  Interference
    atoms meet the exact distribution function of the power.
    ``interference`` overrides the aggregate built from the deployment (used
    for marginalised interferers).
    """
    power = received_power_density(ctx, deployment.typical, e)
    if interference is None:
        if deployment.n == 1:
            return power.scaled(1.0 / ctx.n0)
        interference = interference_distribution(ctx, deployment, e)
    shift = _single_atom(interference)
    if shift is not None:
        return power.scaled(1.0 / (ctx.n0 + shift))
    n0 = ctx.n0
    grid = _sinr_grid(power, interference, n0, ctx.grid_points)
    ploc, pm = power.to_discrete()
    i_grid, i_dens = interference.grid, interference.density
    i_nodes = interference.node_cdf()
    i_cont = interference.continuous_mass

    def cdf(x):
        u = 1.0 / np.asarray(x, dtype=float)
        below = kernels.weighted_cdf_sum(u, pm, ploc, np.full(ploc.size, -n0), i_grid, i_dens, i_nodes)
        out = i_cont * pm.sum() - below
        for a, ma in interference.atoms:
            out += ma * power.continuous_cdf(x * (n0 + a))
        return out

    atoms = [(pl / (n0 + a), ma * mp) for a, ma in interference.atoms for pl, mp in power.atoms]
    return MixedDistribution.from_cdf(cdf, grid, atoms)


def reciprocal_shifted(dist: MixedDistribution, n0: float, grid_points: int = DEFAULT_GRID_POINTS):
    """Law of ``1 / (n0 + X)`` for ``X >= 0``.

    When ``X`` is too small to move ``n0 + X`` in floating point the result
    is the point mass at ``1 / n0``.
    """
    lo, hi = dist.support
    if 1.0 / (n0 + hi) >= 1.0 / (n0 + max(lo, 0.0)):
        return MixedDistribution.point_mass(1.0 / (n0 + max(lo, 0.0)))
    grid = log_grid(1.0 / (n0 + hi), 1.0 / (n0 + max(lo, 0.0)), grid_points)
    cm = dist.continuous_mass

    def cdf(z):
        return cm - dist.continuous_cdf(1.0 / z - n0)

    return MixedDistribution.from_cdf(cdf, grid, [(1.0 / (n0 + a), m) for a, m in dist.atoms])


def product_density(
    f_y: MixedDistribution,
    f_z: MixedDistribution,
    c: float = 1.0,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> MixedDistribution:
    """Law of ``X = c Y Z`` for independent positive ``Y`` and ``Z``.

    Integrates the product density ``f_X(x) = int f_Y(x / (c z)) f_Z(z) / (c z) dz``
    over each output cell, i.e. works with
    ``F_X(x) = sum_j m_j F_Y(x / (c z_j))`` over the cells ``(z_j, m_j)`` of
    ``Z``.  Cell masses are exact for ``Y``, so integrable singularities of
    ``f_Y`` keep their mass.  Atoms of ``Y`` meet the exact distribution
    function of ``Z``; atom pairs give atoms.
    """
    if c == 0:
        raise DomainError("c must be nonzero")
    if f_y.support[0] < 0 or f_z.support[0] < 0:
        raise DomainError("product_density expects nonnegative supports")
    if c < 0:
        return product_density(f_y, f_z, -c, grid_points).scaled(-1.0)
    z_atom, y_atom = _single_atom(f_z), _single_atom(f_y)
    if z_atom is not None:
        return f_y.scaled(c * z_atom)
    if y_atom is not None:
        return f_z.scaled(c * y_atom)
    ylo, yhi = f_y.support
    zlo, zhi = f_z.support
    grid = log_grid(c * ylo * zlo, c * yhi * zhi, grid_points)
    zloc, zm = f_z.to_discrete()
    keep = (zloc > 0) & (zm > 0)
    zloc, zm = zloc[keep], zm[keep]
    y_nodes = f_y.node_cdf()

    def cdf(x):
        x = np.asarray(x, dtype=float)
        out = kernels.weighted_cdf_sum(
            x, zm, 1.0 / (c * zloc), np.zeros(zloc.size), f_y.grid, f_y.density, y_nodes
        )
        for ya, ma in f_y.atoms:
            if ya > 0:
                out += ma * f_z.continuous_cdf(x / (c * ya))
        return out

    atoms = [(c * ya * za, my * mz) for ya, my in f_y.atoms for za, mz in f_z.atoms]
    return MixedDistribution.from_cdf(cdf, grid, atoms)


def marginal_sinr_density(
    ctx: SinrContext,
    n: int,
    samples_of_conditions: int,
    rng: np.random.Generator,
    mode: OrientationMode = OrientationMode.UNIFORM,
    conditions: Sequence[tuple[Deployment, float]] | None = None,
    link_distance: float | None = None,
) -> MixedDistribution:
    """Average of conditional SINR laws over sampled deployments and ``e``.

    ``conditions`` replaces sampling with an explicit list of
    ``(deployment, e)`` pairs.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    if conditions is None:
        conditions = []
        for _ in range(samples_of_conditions):
            dep = sample_deployment(n, ctx.region_radius, rng, mode, ctx.d0, link_distance)
            conditions.append((dep, float(ctx.mis_rx.sample(rng))))
    parts = [conditional_sinr_density(ctx, dep, e) for dep, e in conditions]
    lo = min(p.support[0] for p in parts)
    hi = max(p.support[1] for p in parts)
    grid = log_grid(lo, hi, ctx.grid_points)
    return mixture(parts, [1.0 / len(parts)] * len(parts), grid)


# ---------------------------------------------------------------------------
# bounds and outage

BOUND_COARSE_POINTS = 512
BOUND_RTOL = 1e-6
WSUM_TAIL = 1e-6
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _tail_point(wsum_cdf: Callable, start: float) -> float:
    t = max(start, 1e-300)
    for _ in range(2000):
        if float(wsum_cdf(t)) >= 1.0 - WSUM_TAIL:
            return t
        t *= 2.0
    raise DomainError("interference CDF never reaches 1 - 1e-6")


def sinr_cdf_bounds(y_cdf: Callable, wsum_cdf: Callable, n0: float, x_grid):
    """Lower and upper bounds on ``P(Y / (N0 + W) <= x)``.

    ``lower(x) = sup_t h(t)`` and ``upper(x) = 1 + inf_t h(t)`` with
    ``h(t) = F_Y((N0 + t) x) - F_W(t)`` over ``t >= 0``.  The search uses
    ``t = 0`` plus 511 geometric points up to ``t_max`` with
    ``F_W(t_max) >= 1 - 1e-6``, then golden-section refinement around the
    best coarse point.  Results are clamped to ``[0, 1]``.
    """
    x = np.atleast_1d(np.asarray(x_grid, dtype=float))
    t_max = _tail_point(wsum_cdf, getattr(wsum_cdf, "x", np.array([1e-12]))[-1] * 1e-3)
    t_lo = t_max * 1e-9
    t = np.concatenate(([0.0], np.geomspace(t_lo, t_max, BOUND_COARSE_POINTS - 1)))
    fw = np.asarray(wsum_cdf(t), dtype=float)
    hv = np.asarray(y_cdf((n0 + t[None, :]) * x[:, None]), dtype=float) - fw[None, :]

    def h(tt):
        return np.asarray(y_cdf((n0 + tt) * x), dtype=float) - np.asarray(wsum_cdf(tt), dtype=float)

    def refine(idx, sign):
        a = t[np.maximum(idx - 1, 0)]
        b = t[np.minimum(idx + 1, t.size - 1)]
        best = sign * hv[np.arange(x.size), idx]
        c1 = b - _GOLDEN * (b - a)
        c2 = a + _GOLDEN * (b - a)
        f1, f2 = sign * h(c1), sign * h(c2)
        while np.any(b - a > BOUND_RTOL * np.maximum(b, 1e-300)):
            left = f1 > f2
            a = np.where(left, a, c1)
            b = np.where(left, c2, b)
            keep = np.where(left, c1, c2)
            f_keep = np.where(left, f1, f2)
            fresh = np.where(left, b - _GOLDEN * (b - a), a + _GOLDEN * (b - a))
            f_fresh = sign * h(fresh)
            c1 = np.where(left, fresh, keep)
            c2 = np.where(left, keep, fresh)
            f1 = np.where(left, f_fresh, f_keep)
            f2 = np.where(left, f_keep, f_fresh)
            best = np.maximum(best, f_fresh)
        return sign * best

    lower = refine(np.argmax(hv, axis=1), 1.0)
    upper = 1.0 + refine(np.argmin(hv, axis=1), -1.0)
    return np.clip(lower, 0.0, 1.0), np.clip(upper, 0.0, 1.0)


def outage_probability(sinr_cdf: Callable, rate_threshold: float, bandwidth: float) -> float:
    """``F_gamma(2**(R_th / W) - 1)``."""
    if rate_threshold < 0:
        raise DomainError("rate threshold must be nonnegative")
    if not bandwidth > 0:
        raise DomainError("bandwidth must be positive")
    exponent = rate_threshold / bandwidth
    if exponent >= 1024.0:  # threshold above any representable SINR
        return float(np.clip(sinr_cdf(np.finfo(float).max), 0.0, 1.0))
    x = 2.0**exponent - 1.0
    return float(np.clip(sinr_cdf(x), 0.0, 1.0))
