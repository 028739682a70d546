"""Numpy implementations of the hot loops.

Used when the compiled extension is unavailable or ``BEAMSINR_PURE_PYTHON``
is set.  Signatures match ``_ckernels`` exactly.
"""
from __future__ import annotations

import math

import numpy as np

_LN10 = math.log(10.0)
_CHUNK = 1 << 22


def _split_onto(grid, loc, mass, out):
    """Linear-split point masses onto the two neighbouring grid nodes."""
    n = grid.shape[0]
    loc = np.clip(loc, grid[0], grid[-1])
    k = np.searchsorted(grid, loc, side="right") - 1
    k = np.clip(k, 0, n - 2)
    left = grid[k]
    frac = (loc - left) / (grid[k + 1] - left)
    out += np.bincount(k, weights=mass * (1.0 - frac), minlength=n)
    out += np.bincount(k + 1, weights=mass * frac, minlength=n)


def rebin_pair_sums(x, mx, y, my, grid):
    """Node masses of the law of ``X + Y`` for two discrete measures."""
    x = np.ascontiguousarray(x, dtype=float)
    y = np.ascontiguousarray(y, dtype=float)
    mx = np.ascontiguousarray(mx, dtype=float)
    my = np.ascontiguousarray(my, dtype=float)
    out = np.zeros(grid.shape[0])
    rows = max(1, _CHUNK // max(1, y.shape[0]))
    for i in range(0, x.shape[0], rows):
        loc = (x[i : i + rows, None] + y[None, :]).ravel()
        mass = (mx[i : i + rows, None] * my[None, :]).ravel()
        _split_onto(grid, loc, mass, out)
    return out


def rebin_points(loc, mass, grid):
    out = np.zeros(grid.shape[0])
    _split_onto(grid, np.asarray(loc, dtype=float), np.asarray(mass, dtype=float), out)
    return out


def weighted_cdf_sum(u, a, p, q, grid, f, node_cdf):
    """``out[k] = sum_j a[j] * F(p[j] * u[k] + q[j])``.

    ``F`` integrates the density that is linear between the nodes of
    ``grid`` with values ``f``; ``node_cdf`` holds ``F`` at the nodes.  ``F``
    is 0 left of the grid and ``node_cdf[-1]`` right of it.
    """
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape[0])
    n = grid.shape[0]
    rows = max(1, _CHUNK // max(1, u.shape[0]))
    for j in range(0, a.shape[0], rows):
        arg = p[j : j + rows, None] * u[None, :] + q[j : j + rows, None]
        xc = np.clip(arg, grid[0], grid[-1])
        k = np.clip(np.searchsorted(grid, xc, side="right") - 1, 0, n - 2)
        t = xc - grid[k]
        slope = (f[k + 1] - f[k]) / (grid[k + 1] - grid[k])
        val = node_cdf[k] + f[k] * t + 0.5 * slope * t * t
        out += a[j : j + rows] @ val
    return out


def _gain(th, half_width, omega, g_main, g_side):
    main = g_main * np.exp(-0.3 * _LN10 * (2.0 * th / omega) ** 2)
    return np.where(th <= half_width, main, g_side)


def _abs_wrap(a):
    return np.abs(np.mod(a + math.pi, 2.0 * math.pi) - math.pi)


def sinr_block(
    tx_x, tx_y, rx_x, rx_y, tx_bore, rx_bore,
    theta_m, omega, g_main, g_side, pt, loss_const, alpha, n0, d0, n_targets,
):
    """SINR at the first ``n_targets`` receivers of every replication.

    Arrays are ``(reps, n)`` for transmitters and ``(reps, n_targets)`` for
    receivers; boresights are absolute (misalignment already applied).
    Cross distances below ``d0`` are floored at ``d0``.
    """
    half = 0.5 * theta_m
    rx_x, rx_y, rx_bore = rx_x[:, :n_targets], rx_y[:, :n_targets], rx_bore[:, :n_targets]
    dx = rx_x[:, :, None] - tx_x[:, None, :]
    dy = rx_y[:, :, None] - tx_y[:, None, :]
    d = np.maximum(np.hypot(dx, dy), d0)
    to_rx = np.arctan2(dy, dx)
    at = _abs_wrap(to_rx - tx_bore[:, None, :])
    ar = _abs_wrap(to_rx + math.pi - rx_bore[:, :, None])
    power = (
        pt * loss_const * d ** (-alpha)
        * _gain(at, half, omega, g_main, g_side)
        * _gain(ar, half, omega, g_main, g_side)
    )
    idx = np.arange(n_targets)
    signal = power[:, idx, idx]
    interference = power.sum(axis=2) - signal
    return signal / (n0 + interference)


_SERIES_CUTOFF = 1e-2


def _psi(z):
    """``psi0 = int_0^1 (1-v) e^{-zv} dv`` and ``psi1 = int_0^1 v e^{-zv} dv``."""
    small = np.abs(z.real) + np.abs(z.imag) < _SERIES_CUTOFF
    zs = np.where(small, 1.0, z)
    ez = np.exp(-zs)
    psi0 = (zs - 1.0 + ez) / zs**2
    psi1 = (1.0 - ez * (1.0 + zs)) / zs**2
    # series: psi0 = sum (-z)^k / (k+2)!,  psi1 = sum (-z)^k / (k! (k+2))
    t = -z
    s0 = 0.5 + t / 6 + t**2 / 24 + t**3 / 120 + t**4 / 720
    s1 = 0.5 + t / 3 + t**2 / 8 + t**3 / 30 + t**4 / 144
    return np.where(small, s0, psi0), np.where(small, s1, psi1)


def laplace_cells(s, a, h, fa, fb):
    """Sum over cells of ``h e^{-s a} (fa psi0(s h) + fb psi1(s h))``."""
    s = np.asarray(s, dtype=complex)
    out = np.zeros(s.shape[0], dtype=complex)
    rows = max(1, (_CHUNK // 4) // max(1, a.shape[0]))
    for i in range(0, s.shape[0], rows):
        ss = s[i : i + rows, None]
        p0, p1 = _psi(ss * h[None, :])
        out[i : i + rows] = (h * np.exp(-ss * a[None, :]) * (fa * p0 + fb * p1)).sum(axis=1)
    return out
