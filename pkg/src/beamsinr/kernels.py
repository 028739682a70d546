"""Backend selection for the hot loops.

The compiled extension is preferred; set ``BEAMSINR_PURE_PYTHON=1`` to force
the numpy fallback (used by the benchmark and the backend-parity tests).
"""
import os

from . import _pykernels

if os.environ.get("BEAMSINR_PURE_PYTHON"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

rebin_pair_sums = _impl.rebin_pair_sums
rebin_points = _impl.rebin_points
weighted_cdf_sum = _impl.weighted_cdf_sum
sinr_block = _impl.sinr_block
laplace_cells = _impl.laplace_cells
