"""Pure-Python Gauss-Seidel sweep for the per-vertex energy minimization.

Same contract as the compiled kernel in ``_sweep``: one in-place sweep over
the free vertices in id order, each update replacing x_u by the global
minimizer over [lo, hi] of

    phi(t) = (deg(u)/2) t^2 - (sum of neighbor values) t + V(t),

found on a 257-point grid and polished by safeguarded Newton steps on
phi'.  Works for any potential; the compiled kernel hardcodes the quartic.
"""

from __future__ import annotations

import numpy as np

GRID_POINTS = 257
_TGRID = np.linspace(0.0, 1.0, GRID_POINTS)


def sweep(values, indptr, indices, free, lo, hi, V, dV, ddV):
    """One Gauss-Seidel sweep in place; returns the max absolute change."""
    ts = lo + (hi - lo) * _TGRID
    vgrid = np.asarray(V(ts), dtype=float)
    half = 0.5 * ts * ts
    step = ts[1] - ts[0] if GRID_POINTS > 1 else 0.0
    max_change = 0.0
    for u in free:
        s = values[indices[indptr[u]:indptr[u + 1]]].sum()
        deg = indptr[u + 1] - indptr[u]
        phi = deg * half - s * ts + vgrid
        best = int(np.flatnonzero(phi <= phi.min() + 1e-12)[0])
        t = ts[best]
        tl = max(lo, t - step)
        tr = min(hi, t + step)
        for _ in range(100):
            d1 = deg * t - s + float(dV(t))
            if abs(d1) < 1e-13:
                break
            d2 = deg + float(ddV(t))
            if d2 <= 1e-12:
                break
            tn = min(max(t - d1 / d2, tl), tr)
            if tn == t:
                break
            t = tn
        # never leave the grid minimizer's basin
        if 0.5 * deg * t * t - s * t + float(V(t)) > phi[best] + 1e-12:
            t = ts[best]
        change = abs(t - values[u])
        if change > max_change:
            max_change = change
        values[u] = t
    return max_change
