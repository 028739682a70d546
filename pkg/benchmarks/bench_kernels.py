"""Compare the compiled kernels with the numpy fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel: best wall time for each backend, the speedup and
the largest absolute difference between their outputs.
"""
from __future__ import annotations

import argparse
import math
import sys
import timeit

import numpy as np

from beamsinr import _pykernels
from beamsinr.antenna import solve_gain_constants

try:
    from beamsinr import _ckernels
except ImportError:
    _ckernels = None


def _cases(rng: np.random.Generator):
    grid = np.geomspace(1e-3, 1e3, 4096)
    x, y = np.sort(rng.uniform(1e-3, 5e2, 1500)), np.sort(rng.uniform(1e-3, 5e2, 1500))
    mx, my = rng.random(1500), rng.random(1500)
    yield "rebin_pair_sums", (x, mx, y, my, grid)

    loc = rng.uniform(1e-3, 1e3, 200_000)
    yield "rebin_points", (loc, rng.random(loc.size), grid)

    u = np.geomspace(1e-2, 1e2, 4096)
    p = np.sort(rng.uniform(1.0, 10.0, 4096))
    f = rng.random(grid.size)
    nodes = np.concatenate(([0.0], np.cumsum(0.5 * np.diff(grid) * (f[1:] + f[:-1]))))
    yield "weighted_cdf_sum", (u, rng.random(p.size), p, np.full(p.size, -0.5), grid, f, nodes)

    beam = solve_gain_constants(math.pi / 6, 0.4)
    reps, n = 2048, 11
    tx = rng.uniform(-10, 10, (reps, n)) + 1j * rng.uniform(-10, 10, (reps, n))
    rx = rng.uniform(-10, 10, (reps, 1)) + 1j * rng.uniform(-10, 10, (reps, 1))
    args = (
        np.ascontiguousarray(tx.real), np.ascontiguousarray(tx.imag),
        np.ascontiguousarray(rx.real), np.ascontiguousarray(rx.imag),
        rng.uniform(-math.pi, math.pi, (reps, n)), rng.uniform(-math.pi, math.pi, (reps, 1)),
        beam.theta_m, beam.omega, beam.g_main, beam.g_side,
        1.0, (5e-3 / (4 * math.pi)) ** 2, 2.45, 1e-9, 0.5, 1,
    )
    yield "sinr_block", args

    s = (18.4 + 2j * math.pi * np.arange(33)) / 2.0
    a = np.linspace(0.0, 1.0, 4097)[:-1]
    h = np.full(a.size, a[1] - a[0])
    yield "laplace_cells", (s, a, h, rng.random(a.size), rng.random(a.size))


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _ckernels is None:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(12345)
    print(f"{'kernel':<22}{'python_s':>12}{'cython_s':>12}{'speedup':>10}{'max_abs_diff':>15}")
    for name, case in _cases(rng):
        py, cy = getattr(_pykernels, name), getattr(_ckernels, name)
        t_py = min(timeit.repeat(lambda: py(*case), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: cy(*case), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(np.asarray(py(*case)) - np.asarray(cy(*case)))))
        print(f"{name:<22}{t_py:>12.4g}{t_cy:>12.4g}{t_py / t_cy:>10.2f}{diff:>15.3g}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
