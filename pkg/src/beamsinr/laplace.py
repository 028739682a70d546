"""Laplace transforms of tabulated laws and numerical inversion.

The transform of a piecewise-linear density is evaluated cell by cell in
closed form, so the only approximation left is the inversion itself.  The
inversion uses the Euler-accelerated Fourier series of Abate and Whitt, whose
discretisation error is bounded by ``exp(-A)`` for distribution functions.
"""
from __future__ import annotations

from math import comb

import numpy as np

from . import kernels
from .distributions import MixedDistribution

EULER_A = 18.4
EULER_TERMS = 21
EULER_AVERAGE = 11


def transform(dist: MixedDistribution, s, origin: float = 0.0) -> np.ndarray:
    """``E[exp(-s (X - origin))]`` for complex ``s`` with nonnegative real part.

    Choosing ``origin`` at the lower end of the support keeps the
    exponentials bounded and moves the support edge to zero, where the
    inversion below is most accurate.
    """
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    g, f = dist.grid, dist.density
    a, h = g[:-1], np.diff(g)
    fa, fb = f[:-1], f[1:]
    live = (fa > 0) | (fb > 0)
    out = kernels.laplace_cells(s, a[live] - origin, h[live], fa[live], fb[live])
    for loc, m in dist.atoms:
        out += m * np.exp(-s * (loc - origin))
    return out


def euler_inversion(fhat, t, terms: int = EULER_TERMS, average: int = EULER_AVERAGE, a: float = EULER_A):
    """Invert a transform ``fhat(s)`` at positive times ``t``.

    ``fhat`` must accept an array of complex ``s`` of shape ``(len(t), m)``.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    k = np.arange(terms + average + 1)
    s = (a + 2j * np.pi * k[None, :]) / (2.0 * t)
    vals = np.asarray(fhat(s)).real * (-1.0) ** k
    vals[:, 0] *= 0.5
    partial = np.cumsum(vals, axis=1) * np.exp(a / 2.0) / t
    w = np.array([comb(average, j) for j in range(average + 1)], dtype=float) / 2.0**average
    return (partial[:, terms : terms + average + 1] * w).sum(axis=1)


def sum_cdf(component: MixedDistribution, k: int, t) -> np.ndarray:
    """Distribution function of the sum of ``k`` i.i.d. copies at times ``t``.

    The transform is taken about ``k`` times the lower support end; times at
    or below that point return the atom mass sitting exactly there.
    """
    lo = component.support[0]
    origin = k * lo
    t = np.atleast_1d(np.asarray(t, dtype=float))
    tau = t - origin
    out = np.zeros(t.shape)
    edge_mass = sum(m for loc, m in component.atoms if loc == lo)
    out[tau == 0] = edge_mass**k
    pos = tau > 0
    if np.any(pos):

        def fhat(s):
            shape = s.shape
            flat = s.ravel()
            return (transform(component, flat, lo) ** k / flat).reshape(shape)

        out[pos] = euler_inversion(fhat, tau[pos])
    return np.clip(out, 0.0, 1.0)
