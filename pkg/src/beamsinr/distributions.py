"""Tabulated mixed distributions: a piecewise-linear density plus point masses.

Densities are stored as node values on a strictly increasing grid and are
integrated with the trapezoid rule, which is exact for the piecewise-linear
interpolant.  Constructors that start from an exact distribution function use
dual cells (boundaries halfway between nodes) so the tabulated mass matches
the true mass to rounding, even where the true density is singular.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError

DEFAULT_GRID_POINTS = 4096
ATOM_MERGE_RTOL = 1e-12


def log_grid(lo: float, hi: float, n: int = DEFAULT_GRID_POINTS) -> np.ndarray:
    """Geometric grid; falls back to a linear one when ``lo <= 0``."""
    if not hi > lo:
        raise DomainError(f"empty grid range [{lo}, {hi}]")
    if lo <= 0.0:
        return np.linspace(lo, hi, n)
    return np.geomspace(lo, hi, n)


def dual_boundaries(grid: np.ndarray) -> np.ndarray:
    """Cell boundaries ``[g0, midpoints..., gN]`` of the dual mesh."""
    return np.concatenate(([grid[0]], 0.5 * (grid[1:] + grid[:-1]), [grid[-1]]))


def trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    h = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    return w


def _merge_atoms(atoms: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    pts = sorted((float(a), float(m)) for a, m in atoms if m > 0.0)
    merged: list[list[float]] = []
    for loc, m in pts:
        if merged and abs(loc - merged[-1][0]) <= ATOM_MERGE_RTOL * max(abs(loc), 1e-300):
            merged[-1][1] += m
        else:
            merged.append([loc, m])
    return tuple((a, m) for a, m in merged)


@dataclass(frozen=True)
class MixedDistribution:
    """Law with a piecewise-linear density on ``grid`` and point masses ``atoms``.

    Attributes
    ----------
    grid : ndarray
        Strictly increasing nodes (at least two).
    density : ndarray
        Nonnegative density values at the nodes.
    atoms : tuple of (location, mass)
        Point masses, sorted by location; locations need not be grid nodes.
    """

    grid: np.ndarray
    density: np.ndarray
    atoms: tuple = field(default=())

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        f = np.asarray(self.density, dtype=float)
        if g.ndim != 1 or g.shape != f.shape or g.size < 2:
            raise DomainError("grid and density must be 1-D of equal length >= 2")
        if not np.all(np.diff(g) > 0):
            raise DomainError("grid must be strictly increasing")
        if np.any(f < 0) or not np.all(np.isfinite(f)):
            raise DomainError("density must be finite and nonnegative")
        g.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "density", f)
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))

    # construction -------------------------------------------------------

    @classmethod
    def point_mass(cls, loc: float, width: float | None = None) -> "MixedDistribution":
        w = width if width is not None else max(abs(loc), 1.0) * 1e-9
        return cls(np.array([loc - w, loc + w]), np.zeros(2), ((loc, 1.0),))

    @classmethod
    def from_node_masses(cls, grid, masses, atoms=()) -> "MixedDistribution":
        """Turn per-node masses into trapezoid-consistent node densities."""
        grid = np.asarray(grid, dtype=float)
        w = trapezoid_weights(grid)
        return cls(grid, np.maximum(np.asarray(masses, dtype=float), 0.0) / w, atoms)

    @classmethod
    def from_cdf(cls, cdf: Callable, grid, atoms=()) -> "MixedDistribution":
        """Tabulate the continuous part from its (sub-)distribution function.

        ``cdf`` must exclude ``atoms``; node ``k`` receives the exact mass of
        its dual cell.
        """
        grid = np.asarray(grid, dtype=float)
        fb = np.asarray(cdf(dual_boundaries(grid)), dtype=float)
        masses = np.maximum(np.diff(fb), 0.0)
        return cls.from_node_masses(grid, masses, atoms)

    # basic functionals --------------------------------------------------

    @property
    def atom_mass(self) -> float:
        return float(sum(m for _, m in self.atoms))

    @property
    def continuous_mass(self) -> float:
        return float(np.dot(trapezoid_weights(self.grid), self.density))

    @property
    def mass(self) -> float:
        return self.continuous_mass + self.atom_mass

    @property
    def support(self) -> tuple[float, float]:
        lo, hi = self.grid[0], self.grid[-1]
        if self.atoms:
            lo = min(lo, self.atoms[0][0])
            hi = max(hi, self.atoms[-1][0])
        if self.continuous_mass == 0.0 and self.atoms:
            lo, hi = self.atoms[0][0], self.atoms[-1][0]
        return float(lo), float(hi)

    def node_cdf(self) -> np.ndarray:
        h = np.diff(self.grid)
        return np.concatenate(([0.0], np.cumsum(0.5 * h * (self.density[1:] + self.density[:-1]))))

    def continuous_cdf(self, x):
        """Exact integral of the piecewise-linear density up to ``x``."""
        g, f = self.grid, self.density
        x = np.asarray(x, dtype=float)
        xc = np.clip(x, g[0], g[-1])
        k = np.clip(np.searchsorted(g, xc, side="right") - 1, 0, g.size - 2)
        u = xc - g[k]
        h = g[k + 1] - g[k]
        slope = (f[k + 1] - f[k]) / h
        out = self.node_cdf()[k] + f[k] * u + 0.5 * slope * u * u
        return out

    def _atom_cdf(self, x, strict: bool):
        x = np.asarray(x, dtype=float)
        if not self.atoms:
            return np.zeros_like(x)
        loc = np.array([a for a, _ in self.atoms])
        cm = np.cumsum([m for _, m in self.atoms])
        side = "left" if strict else "right"
        k = np.searchsorted(loc, x, side=side)
        return np.where(k > 0, cm[np.maximum(k - 1, 0)], 0.0)

    def cdf(self, x):
        """Right-continuous distribution function."""
        out = self.continuous_cdf(x) + self._atom_cdf(x, strict=False)
        out = np.minimum(out, 1.0)
        return float(out) if np.ndim(out) == 0 else out

    __call__ = cdf

    def cdf_left(self, x):
        """Left limit ``P(X < x)``."""
        out = np.minimum(self.continuous_cdf(x) + self._atom_cdf(x, strict=True), 1.0)
        return float(out) if np.ndim(out) == 0 else out

    def pdf(self, x):
        """Density of the continuous part; zero off the grid."""
        out = np.interp(np.asarray(x, dtype=float), self.grid, self.density, left=0.0, right=0.0)
        return float(out) if np.ndim(out) == 0 else out

    def mass_between(self, a: float, b: float) -> float:
        """``P(a < X <= b)``."""
        return float(self.cdf(b) - self.cdf(a))

    def mean(self) -> float:
        g, f = self.grid, self.density
        h = np.diff(g)
        cont = np.sum(h * (f[:-1] * (2 * g[:-1] + g[1:]) + f[1:] * (g[:-1] + 2 * g[1:])) / 6.0)
        return float(cont + sum(a * m for a, m in self.atoms))

    def quantile(self, p):
        """Generalised inverse of :meth:`cdf`, linear between nodes."""
        xs = self.grid
        if self.atoms:
            xs = np.union1d(xs, [a for a, _ in self.atoms])
        fs = np.maximum.accumulate(self.cdf(xs))
        cont = self.continuous_cdf(xs)
        p = np.asarray(p, dtype=float)
        k = np.clip(np.searchsorted(fs, p, side="left"), 0, xs.size - 1)
        prev = np.maximum(k - 1, 0)
        f0 = np.where(k > 0, fs[prev], 0.0)
        # value just before xs[k]; anything above it lies in an atom at xs[k]
        f_minus = f0 + cont[k] - np.where(k > 0, cont[prev], cont[k])
        span = f_minus - f0
        t = np.clip((p - f0) / np.where(span > 0, span, 1.0), 0.0, 1.0)
        out = np.where((k == 0) | (p >= f_minus), xs[k], xs[prev] + t * (xs[k] - xs[prev]))
        return float(out) if out.ndim == 0 else out

    # transforms ---------------------------------------------------------

    def scaled(self, c: float) -> "MixedDistribution":
        """Law of ``c * X``."""
        if c == 0:
            return MixedDistribution.point_mass(0.0)
        atoms = tuple((c * a, m) for a, m in self.atoms)
        if c > 0:
            return MixedDistribution(self.grid * c, self.density / c, atoms)
        return MixedDistribution(self.grid[::-1] * c, self.density[::-1] / -c, atoms)

    def shifted(self, s: float) -> "MixedDistribution":
        atoms = tuple((a + s, m) for a, m in self.atoms)
        grid = self.grid + s
        if not np.all(np.diff(grid) > 0):
            if np.any(self.density > 0):
                raise DomainError("shift exceeds the floating-point resolution of the grid")
            # atoms only: the carrier grid is arbitrary, so rebuild it
            lo, hi = atoms[0][0], atoms[-1][0]
            w = max(abs(lo), abs(hi), 1e-300) * 1e-9
            grid = np.array([lo - w, hi + w])
            return MixedDistribution(grid, np.zeros(2), atoms)
        return MixedDistribution(grid, self.density, atoms)

    def normalized(self) -> "MixedDistribution":
        m = self.mass
        return MixedDistribution(self.grid, self.density / m, tuple((a, w / m) for a, w in self.atoms))

    def to_discrete(self) -> tuple[np.ndarray, np.ndarray]:
        """Cell centroids and trapezoid masses of the density, then the atoms."""
        g, f = self.grid, self.density
        h = np.diff(g)
        s = f[:-1] + f[1:]
        mass = 0.5 * h * s
        safe = np.where(s > 0, s, 1.0)
        cen = np.where(s > 0, g[:-1] + h * (f[:-1] + 2 * f[1:]) / (3 * safe), g[:-1] + 0.5 * h)
        keep = mass > 0
        loc, m = cen[keep], mass[keep]
        if self.atoms:
            loc = np.concatenate((loc, [a for a, _ in self.atoms]))
            m = np.concatenate((m, [w for _, w in self.atoms]))
        return loc, m

    def tabulate_cdf(self, x=None) -> "TabulatedCdf":
        x = self.grid if x is None else np.asarray(x, dtype=float)
        if self.atoms:
            x = np.union1d(x, [a for a, _ in self.atoms])
        return TabulatedCdf(x, self.cdf(x), exact=self.cdf)


@dataclass(frozen=True)
class TabulatedCdf:
    """Distribution function stored at increasing points.

    ``kind='linear'`` interpolates, ``kind='step'`` is right-continuous
    piecewise constant.  Values are 0 left of the table and ``values[-1]`` to
    the right.  When ``exact`` is given, calls delegate to it and the table is
    kept for output only.
    """

    x: np.ndarray
    values: np.ndarray
    kind: str = "linear"
    exact: Callable | None = None

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        v = np.atleast_1d(np.asarray(self.values, dtype=float))
        if x.shape != v.shape:
            raise DomainError("x and values must have the same length")
        if self.kind not in ("linear", "step"):
            raise DomainError(f"unknown kind {self.kind!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __call__(self, t):
        if self.exact is not None:
            return self.exact(t)
        t = np.asarray(t, dtype=float)
        if self.kind == "step" or self.x.size == 1:
            k = np.searchsorted(self.x, t, side="right")
            out = np.where(k > 0, self.values[np.maximum(k - 1, 0)], 0.0)
        else:
            out = np.interp(t, self.x, self.values, left=0.0, right=self.values[-1])
            out = np.where(t < self.x[0], 0.0, out)
        return float(out) if out.ndim == 0 else out


def step_at_zero() -> TabulatedCdf:
    """Distribution function of the point mass at 0."""
    return TabulatedCdf(np.array([0.0]), np.array([1.0]), kind="step")


def mixture(parts: Sequence[MixedDistribution], weights: Sequence[float], grid) -> MixedDistribution:
    """Finite mixture tabulated on ``grid`` (continuous parts via dual cells)."""
    grid = np.asarray(grid, dtype=float)
    b = dual_boundaries(grid)
    masses = np.zeros(grid.size)
    atoms = []
    for d, w in zip(parts, weights):
        masses += w * np.diff(d.continuous_cdf(b))
        # continuous mass that falls off the grid is kept at the ends
        masses[0] += w * d.continuous_cdf(b[0])
        masses[-1] += w * (d.continuous_mass - d.continuous_cdf(b[-1]))
        atoms.extend((a, w * m) for a, m in d.atoms)
    return MixedDistribution.from_node_masses(grid, masses, atoms)


def ks_distance(cdf: Callable, samples, rtol: float = 1e-9, cdf_left: Callable | None = None) -> float:
    """Two-sided Kolmogorov-Smirnov distance between ``cdf`` and the sample law.

    Both the right values and left limits are compared at every distinct
    sample.  A relative tie tolerance ``rtol`` absorbs rounding differences
    between simulated values and tabulated atom locations.
    """
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise DomainError("no samples")
    u, first = np.unique(s, return_index=True)
    n = s.size
    right = np.append(first[1:], n) / n
    left = first / n
    hi = u + rtol * np.abs(u)
    lo = u - rtol * np.abs(u)
    f_right = np.asarray(cdf(hi), dtype=float)
    f_left = np.asarray(cdf_left(lo) if cdf_left is not None else cdf(lo), dtype=float)
    return float(max(np.max(np.abs(right - f_right)), np.max(np.abs(left - f_left))))


def binned_l1(cdf: Callable, samples, edges) -> float:
    """L1 distance between the binned law of ``cdf`` and the sample histogram.

    Mass outside ``edges`` is included as two extra bins.
    """
    edges = np.asarray(edges, dtype=float)
    s = np.asarray(samples, dtype=float).ravel()
    model = np.diff(np.concatenate(([0.0], np.asarray(cdf(edges), dtype=float), [1.0])))
    counts = np.histogram(s, bins=edges)[0]
    emp = np.concatenate(([np.sum(s < edges[0])], counts, [np.sum(s > edges[-1])])) / s.size
    return float(np.sum(np.abs(model - emp)))


def dkw_epsilon(n: int, alpha: float = 0.01) -> float:
    """Half-width of the Dvoretzky-Kiefer-Wolfowitz band at level ``1 - alpha``."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))
