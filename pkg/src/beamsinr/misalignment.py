"""Truncated-normal beam alignment error."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .constants import RHO_MAX
from .errors import DegenerateModelError, DomainError

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class MisalignmentModel:
    """Zero-mean normal error truncated to ``[-theta_m/2, theta_m/2]``.

    ``rho`` is the deviation-to-beamwidth ratio ``sigma / theta_m``; the cap at
    1/6 keeps three deviations inside the half beamwidth.  ``rho = 0`` is a
    point mass at zero, and then ``normalizer`` is ``None``.
    """

    theta_m: float
    rho: float

    def __post_init__(self):
        if not (0.0 < self.theta_m <= math.pi):
            raise DomainError(f"theta_m={self.theta_m!r} outside (0, pi]")
        if not (0.0 <= self.rho <= RHO_MAX * (1.0 + 1e-12)):
            raise DomainError(f"rho={self.rho!r} outside [0, 1/6]")

    @property
    def sigma(self) -> float:
        return self.rho * self.theta_m

    @property
    def half_width(self) -> float:
        return 0.5 * self.theta_m

    @property
    def degenerate(self) -> bool:
        return self.rho == 0.0

    @property
    def normalizer(self) -> float | None:
        if self.degenerate:
            return None
        return math.erf(self.theta_m / (2.0 * _SQRT2 * self.sigma))

    def _require_density(self):
        if self.degenerate:
            raise DegenerateModelError("rho = 0: misalignment is a point mass at 0")

    def pdf(self, x):
        self._require_density()
        x = np.asarray(x, dtype=float)
        s = self.sigma
        val = np.exp(-0.5 * (x / s) ** 2) / (s * math.sqrt(2.0 * math.pi) * self.normalizer)
        out = np.where(np.abs(x) <= self.half_width, val, 0.0)
        return float(out) if out.ndim == 0 else out

    def cdf(self, x):
        """Distribution function; exact through the error function."""
        self._require_density()
        x = np.clip(np.asarray(x, dtype=float), -self.half_width, self.half_width)
        out = 0.5 + 0.5 * erf(x / (_SQRT2 * self.sigma)) / self.normalizer
        out = np.clip(out, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def abs_cdf(self, x):
        """``P(|eps| <= x)``; valid for the degenerate model too."""
        x = np.asarray(x, dtype=float)
        if self.degenerate:
            out = np.where(x >= 0.0, 1.0, 0.0)
        else:
            out = np.where(x >= 0.0, 2.0 * self.cdf(x) - 1.0, 0.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, size=None):
        """Draw by rejection from the untruncated normal.

        At the largest admissible ``rho`` the acceptance rate is
        ``erf(3/sqrt(2)) ~ 0.997``, so the loop almost never repeats.
        """
        if self.degenerate:
            return 0.0 if size is None else np.zeros(size)
        s, h = self.sigma, self.half_width
        x = rng.normal(0.0, s, size)
        if size is None:
            while abs(x) > h:
                x = rng.normal(0.0, s)
            return float(x)
        x = np.asarray(x)
        bad = np.abs(x) > h
        while bad.any():
            x[bad] = rng.normal(0.0, s, int(bad.sum()))
            bad = np.abs(x) > h
        return x


def pdf(model: MisalignmentModel, x):
    return model.pdf(x)


def cdf(model: MisalignmentModel, x):
    return model.cdf(x)


def sample(model: MisalignmentModel, rng: np.random.Generator, size=None):
    return model.sample(rng, size)
