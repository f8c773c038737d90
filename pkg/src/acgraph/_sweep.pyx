# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gauss-Seidel sweep, specialized to the rescaled quartic well.

Same contract as ``_sweep_py.sweep`` but with V(s) = (1 - t^2)^2,
t = (2s - c0 - c1)/(c1 - c0), inlined for speed.  The generic-potential
path stays in pure Python.
"""

from libc.math cimport fabs

import numpy as np

cimport numpy as cnp

cnp.import_array()

DEF GRID = 257


cdef inline double _v(double s, double shift, double inv) nogil:
    cdef double t = (2.0 * s - shift) * inv
    cdef double w = 1.0 - t * t
    return w * w


cdef inline double _dv(double s, double shift, double inv, double scale) nogil:
    cdef double t = (2.0 * s - shift) * inv
    return (4.0 * t * t * t - 4.0 * t) * scale


cdef inline double _ddv(double s, double shift, double inv,
                        double scale) nogil:
    cdef double t = (2.0 * s - shift) * inv
    return (12.0 * t * t - 4.0) * scale * scale


def sweep_quartic(double[::1] values, long long[::1] indptr,
                  long long[::1] indices, long long[::1] free,
                  double lo, double hi, double c0, double c1):
    """One in-place sweep over `free`; returns the max absolute change."""
    cdef double shift = c0 + c1
    cdef double scale = 2.0 / (c1 - c0)
    cdef double inv = 1.0 / (c1 - c0)
    cdef double step = (hi - lo) / (GRID - 1)
    cdef double max_change = 0.0
    cdef double s, t, ts, phi, best_phi, best_t, deg, d1, d2, tn, tl, tr
    cdef double change
    cdef Py_ssize_t i, k, j, u, it
    for i in range(free.shape[0]):
        u = free[i]
        s = 0.0
        for k in range(indptr[u], indptr[u + 1]):
            s += values[indices[k]]
        deg = indptr[u + 1] - indptr[u]
        best_phi = 1e300
        best_t = lo
        for j in range(GRID):
            ts = lo + step * j
            phi = 0.5 * deg * ts * ts - s * ts + _v(ts, shift, inv)
            if phi < best_phi - 1e-12:
                best_phi = phi
                best_t = ts
        t = best_t
        tl = best_t - step
        if tl < lo:
            tl = lo
        tr = best_t + step
        if tr > hi:
            tr = hi
        for it in range(100):
            d1 = deg * t - s + _dv(t, shift, inv, scale)
            if fabs(d1) < 1e-13:
                break
            d2 = deg + _ddv(t, shift, inv, scale)
            if d2 <= 1e-12:
                break
            tn = t - d1 / d2
            if tn < tl:
                tn = tl
            elif tn > tr:
                tn = tr
            if tn == t:
                break
            t = tn
        if 0.5 * deg * t * t - s * t + _v(t, shift, inv) > best_phi + 1e-12:
            t = best_t
        change = fabs(t - values[u])
        if change > max_change:
            max_change = change
        values[u] = t
    return max_change
