"""Sweep-kernel selection: compiled quartic kernel when available and
applicable, pure-Python fallback otherwise."""

from __future__ import annotations

import numpy as np

from . import _sweep_py

try:
    from . import _sweep as _compiled
except ImportError:
    _compiled = None

HAVE_COMPILED = _compiled is not None


def make_sweeper(g, P, force_python=False):
    """Returns (sweep(values, free, lo, hi) -> max_change, backend name).

    The compiled path covers the quartic family only; anything else runs
    the generic Python kernel.
    """
    indptr = np.ascontiguousarray(g.indptr, dtype=np.int64)
    indices = np.ascontiguousarray(g.indices, dtype=np.int64)
    if HAVE_COMPILED and P.kind == "quartic" and not force_python:
        def sweep(values, free, lo, hi):
            return _compiled.sweep_quartic(values, indptr, indices, free,
                                           lo, hi, P.c0, P.c1)
        return sweep, "compiled"

    def sweep(values, free, lo, hi):
        return _sweep_py.sweep(values, indptr, indices, free, lo, hi,
                               P.V, P.dV, P.ddV)
    return sweep, "python"
