"""Two-dimensional main-lobe/side-lobe radiation pattern.

The main lobe follows a Gaussian-in-dB roll-off, ``Gm * 10**(-0.3 (2 theta / omega)**2)``
for ``|theta| <= theta_m / 2``, and the side lobe is a flat ``Gs``.  The two gains
are pinned down by continuity at ``theta_m / 2`` and by requiring the pattern to
radiate the same total power as an isotropic antenna.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import ETA_MIN
from .errors import DomainError, QuadratureError

_LN10 = math.log(10.0)
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class BeamParameters:
    """Pattern constants for a beam of main-lobe width ``theta_m``.

    Attributes
    ----------
    theta_m : float
        Main-lobe beamwidth in radians.
    eta : float
        Half-power to main-lobe beamwidth ratio.
    omega : float
        Half-power beamwidth, ``eta * theta_m``.
    g_main, g_side : float
        Linear boresight and side-lobe gains.
    v_integral : float
        The power integral ``V(theta_m, omega)`` used to normalise the gains.
    """

    theta_m: float
    eta: float
    omega: float
    g_main: float
    g_side: float
    v_integral: float

    @property
    def main_to_side_db(self) -> float:
        return 3.0 / self.eta**2

    def gain(self, theta):
        return gain(self, theta)

    def gain_inverse(self, g):
        return gain_inverse_mainlobe(self, g)


def _check_beam_domain(theta_m: float, eta: float) -> None:
    if not (0.0 < theta_m <= math.pi):
        raise DomainError(f"theta_m={theta_m!r} outside (0, pi]")
    if not (0.0 < eta < 1.0):
        raise DomainError(f"eta={eta!r} outside (0, 1)")
    if eta < ETA_MIN:
        raise DomainError(
            f"eta={eta!r} below {ETA_MIN}: main/side gain ratio 10**(0.3/eta**2) "
            "is not representable"
        )


def solve_gain_constants(theta_m: float, eta: float) -> BeamParameters:
    """Solve the continuity and radiated-power constraints for ``(Gm, Gs)``.

    ``V`` is evaluated by adaptive Gauss-Kronrod quadrature after factoring out
    ``10**(0.3/eta**2)`` so the integrand stays in ``(0, 1]``.

    Raises
    ------
    DomainError
        If ``theta_m`` is outside ``(0, pi]`` or ``eta`` outside ``[ETA_MIN, 1)``.
    QuadratureError
        If the relative error estimate exceeds ``1e-10``.
    """
    theta_m = float(theta_m)
    eta = float(eta)
    _check_beam_domain(theta_m, eta)
    k = 0.3 / eta**2
    # V = theta_m * 10**k * int_0^1 10**(-k u**2) du
    unit, err = integrate.quad(
        lambda u: 10.0 ** (-k * u * u), 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=200
    )
    if not err <= QUAD_RTOL * abs(unit):
        raise QuadratureError(
            f"V(theta_m, omega) relative error {err / unit:.3g} exceeds {QUAD_RTOL}"
        )
    v = theta_m * 10.0**k * unit
    g_side = 2.0 * math.pi / (v + 2.0 * math.pi - theta_m)
    g_main = g_side * 10.0**k
    return BeamParameters(
        theta_m=theta_m,
        eta=eta,
        omega=eta * theta_m,
        g_main=g_main,
        g_side=g_side,
        v_integral=v,
    )


def gain(params: BeamParameters, theta):
    """Linear gain at angle ``theta`` from boresight, ``theta`` in ``[-pi, pi]``."""
    th = np.abs(np.asarray(theta, dtype=float))
    if np.any(th > math.pi * (1.0 + 1e-12)):
        raise DomainError("theta must lie in [-pi, pi]; wrap it first")
    main = params.g_main * np.exp(-0.3 * _LN10 * (2.0 * th / params.omega) ** 2)
    out = np.where(th <= 0.5 * params.theta_m, main, params.g_side)
    return float(out) if out.ndim == 0 else out


def gain_inverse_mainlobe(params: BeamParameters, g):
    """Nonnegative angle inside the main lobe at which the gain equals ``g``.

    Valid for ``Gs < g <= Gm``; returns values in ``[0, theta_m / 2)``.
    """
    g = np.asarray(g, dtype=float)
    if np.any(g <= params.g_side) or np.any(g > params.g_main * (1.0 + 1e-12)):
        raise DomainError("gain must lie in (Gs, Gm]")
    ratio = np.maximum(np.log10(params.g_main / g), 0.0)
    out = 0.5 * params.omega * np.sqrt(ratio / 0.3)
    return float(out) if out.ndim == 0 else out


def mainlobe_angle(params: BeamParameters, g):
    """Like :func:`gain_inverse_mainlobe` but clipped instead of raising.

    Gains at or above ``Gm`` map to 0 and gains at or below ``Gs`` map to
    ``theta_m / 2``.  Used on grid boundaries that may sit exactly on an edge.
    """
    g = np.clip(np.asarray(g, dtype=float), params.g_side, params.g_main)
    theta = 0.5 * params.omega * np.sqrt(np.log10(params.g_main / g) / 0.3)
    return np.minimum(theta, 0.5 * params.theta_m)


def pattern_table(params: BeamParameters, n_points: int = 721):
    """Sample ``G`` on a uniform grid over ``[-pi, pi]``.

    Returns ``(theta, gain_linear, gain_db)`` arrays.
    """
    theta = np.linspace(-math.pi, math.pi, n_points)
    g = gain(params, theta)
    return theta, g, 10.0 * np.log10(g)
