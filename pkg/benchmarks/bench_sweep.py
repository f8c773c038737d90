"""Benchmark: compiled sweep kernel vs the pure-Python fallback.

Runs the same Dirichlet solve on a tree and a hyperbolic tiling with both
backends and reports per-sweep timings and the speedup.
"""

import time

import numpy as np

from acgraph import graphs, kernels, potential, variational


def bench(g, P, label, sweeps=50):
    interior = np.flatnonzero(g.interior_mask())
    free = np.sort(interior)
    rows = []
    for force_python in (False, True):
        sweep, backend = kernels.make_sweeper(g, P,
                                              force_python=force_python)
        if backend == "python" and not force_python:
            continue
        vals = np.full(g.n, P.c0, dtype=float)
        vals[g.depth % 2 == 0] = P.c1
        t0 = time.perf_counter()
        for _ in range(sweeps):
            sweep(vals, free, P.c0, P.c1)
        dt = (time.perf_counter() - t0) / sweeps
        rows.append((backend, dt))
        print("%-12s %-9s %8.3f ms/sweep  (%d free vertices)"
              % (label, backend, dt * 1e3, free.size))
    if len(rows) == 2:
        print("%-12s speedup: %.1fx" % (label, rows[1][1] / rows[0][1]))


def main():
    P = potential.quartic(-1.0, 1.0)
    print("compiled kernel available:", kernels.HAVE_COMPILED)
    bench(graphs.build_tree(3, 10), P, "tree(3,10)")
    bench(graphs.build_tiling(3, 7, 7), P, "tiling(3,7,7)")


if __name__ == "__main__":
    main()
