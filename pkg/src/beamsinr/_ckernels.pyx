# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops; see ``_pykernels`` for the reference semantics."""
import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, cos, exp, fabs, fmod, hypot, pow, sin, M_PI

cnp.import_array()

cdef double LN10 = 2.302585092994046


cdef inline Py_ssize_t _locate(const double[::1] grid, double v, Py_ssize_t k) noexcept nogil:
    # walk from a hint; grid has at least two nodes and v is clipped to it
    cdef Py_ssize_t last = grid.shape[0] - 2
    if k < 0:
        k = 0
    elif k > last:
        k = last
    while k > 0 and v < grid[k]:
        k -= 1
    while k < last and v >= grid[k + 1]:
        k += 1
    return k


cdef inline void _split(const double[::1] grid, double[::1] out, double v, double m,
                        Py_ssize_t* hint) noexcept nogil:
    cdef Py_ssize_t n = grid.shape[0]
    cdef Py_ssize_t k
    cdef double frac
    if v <= grid[0]:
        out[0] += m
        hint[0] = 0
        return
    if v >= grid[n - 1]:
        out[n - 1] += m
        hint[0] = n - 2
        return
    k = _locate(grid, v, hint[0])
    hint[0] = k
    frac = (v - grid[k]) / (grid[k + 1] - grid[k])
    out[k] += m * (1.0 - frac)
    out[k + 1] += m * frac


def rebin_pair_sums(x, mx, y, my, grid):
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[::1] mxv = np.ascontiguousarray(mx, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef const double[::1] myv = np.ascontiguousarray(my, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    result = np.zeros(g.shape[0])
    cdef double[::1] out = result
    cdef Py_ssize_t i, j, hint = 0
    cdef double xi, mi
    with nogil:
        for i in range(xv.shape[0]):
            xi = xv[i]
            mi = mxv[i]
            if mi == 0.0:
                continue
            for j in range(yv.shape[0]):
                _split(g, out, xi + yv[j], mi * myv[j], &hint)
    return result


def rebin_points(loc, mass, grid):
    cdef const double[::1] lv = np.ascontiguousarray(loc, dtype=np.float64)
    cdef const double[::1] mv = np.ascontiguousarray(mass, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    result = np.zeros(g.shape[0])
    cdef double[::1] out = result
    cdef Py_ssize_t i, hint = 0
    with nogil:
        for i in range(lv.shape[0]):
            _split(g, out, lv[i], mv[i], &hint)
    return result


def weighted_cdf_sum(u, a, p, q, grid, f, node_cdf):
    cdef const double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] pv = np.ascontiguousarray(p, dtype=np.float64)
    cdef const double[::1] qv = np.ascontiguousarray(q, dtype=np.float64)
    cdef const double[::1] g = np.ascontiguousarray(grid, dtype=np.float64)
    cdef const double[::1] fv = np.ascontiguousarray(f, dtype=np.float64)
    cdef const double[::1] cv = np.ascontiguousarray(node_cdf, dtype=np.float64)
    result = np.zeros(uv.shape[0])
    cdef double[::1] out = result
    cdef Py_ssize_t n = g.shape[0]
    cdef Py_ssize_t j, k, hint
    cdef double arg, t, h, val, lo = g[0], hi = g[n - 1], total = cv[n - 1]
    with nogil:
        for j in range(av.shape[0]):
            if av[j] == 0.0:
                continue
            hint = 0
            for k in range(uv.shape[0]):
                arg = pv[j] * uv[k] + qv[j]
                if arg <= lo:
                    continue
                if arg >= hi:
                    val = total
                else:
                    hint = _locate(g, arg, hint)
                    t = arg - g[hint]
                    h = g[hint + 1] - g[hint]
                    val = cv[hint] + fv[hint] * t + 0.5 * (fv[hint + 1] - fv[hint]) / h * t * t
                out[k] += av[j] * val
    return result


cdef inline double _abs_wrap(double a) noexcept nogil:
    cdef double r = fmod(a + M_PI, 2.0 * M_PI)
    if r < 0.0:
        r += 2.0 * M_PI
    return fabs(r - M_PI)


cdef inline double _gain(double th, double half, double omega, double gm, double gs) noexcept nogil:
    cdef double z
    if th <= half:
        z = 2.0 * th / omega
        return gm * exp(-0.3 * LN10 * z * z)
    return gs


def sinr_block(tx_x, tx_y, rx_x, rx_y, tx_bore, rx_bore,
               double theta_m, double omega, double g_main, double g_side,
               double pt, double loss_const, double alpha, double n0, double d0,
               Py_ssize_t n_targets):
    cdef const double[:, ::1] txx = np.ascontiguousarray(tx_x, dtype=np.float64)
    cdef const double[:, ::1] txy = np.ascontiguousarray(tx_y, dtype=np.float64)
    cdef const double[:, ::1] rxx = np.ascontiguousarray(rx_x, dtype=np.float64)
    cdef const double[:, ::1] rxy = np.ascontiguousarray(rx_y, dtype=np.float64)
    cdef const double[:, ::1] tb = np.ascontiguousarray(tx_bore, dtype=np.float64)
    cdef const double[:, ::1] rb = np.ascontiguousarray(rx_bore, dtype=np.float64)
    cdef Py_ssize_t reps = txx.shape[0], n = txx.shape[1]
    result = np.empty((reps, n_targets))
    cdef double[:, ::1] out = result
    cdef Py_ssize_t r, i, k
    cdef double half = 0.5 * theta_m, dx, dy, d, to_rx, p, sig, interf
    with nogil:
        for r in range(reps):
            for i in range(n_targets):
                sig = 0.0
                interf = 0.0
                for k in range(n):
                    dx = rxx[r, i] - txx[r, k]
                    dy = rxy[r, i] - txy[r, k]
                    d = hypot(dx, dy)
                    if d < d0:
                        d = d0
                    to_rx = atan2(dy, dx)
                    p = (pt * loss_const * pow(d, -alpha)
                         * _gain(_abs_wrap(to_rx - tb[r, k]), half, omega, g_main, g_side)
                         * _gain(_abs_wrap(to_rx + M_PI - rb[r, i]), half, omega, g_main, g_side))
                    if k == i:
                        sig = p
                    else:
                        interf += p
                out[r, i] = sig / (n0 + interf)
    return result


cdef inline double complex _cexp(double complex z) noexcept nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


def laplace_cells(s, a, h, fa, fb):
    """Sum over cells of ``h e^{-s a} (fa psi0(s h) + fb psi1(s h))``."""
    cdef const double complex[::1] sv = np.ascontiguousarray(s, dtype=np.complex128)
    cdef const double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] hv = np.ascontiguousarray(h, dtype=np.float64)
    cdef const double[::1] fav = np.ascontiguousarray(fa, dtype=np.float64)
    cdef const double[::1] fbv = np.ascontiguousarray(fb, dtype=np.float64)
    result = np.zeros(sv.shape[0], dtype=np.complex128)
    cdef double complex[::1] out = result
    cdef Py_ssize_t i, k
    cdef double complex si, z, ez, p0, p1, acc, t
    with nogil:
        for i in range(sv.shape[0]):
            si = sv[i]
            acc = 0.0
            for k in range(av.shape[0]):
                z = si * hv[k]
                if abs(z.real) + abs(z.imag) < 1e-2:
                    t = -z
                    p0 = 0.5 + t / 6.0 + t * t / 24.0 + t * t * t / 120.0 + t * t * t * t / 720.0
                    p1 = 0.5 + t / 3.0 + t * t / 8.0 + t * t * t / 30.0 + t * t * t * t / 144.0
                else:
                    ez = _cexp(-z)
                    p0 = (z - 1.0 + ez) / (z * z)
                    p1 = (1.0 - ez * (1.0 + z)) / (z * z)
                acc = acc + hv[k] * _cexp(-si * av[k]) * (fav[k] * p0 + fbv[k] * p1)
            out[i] = acc
    return result
