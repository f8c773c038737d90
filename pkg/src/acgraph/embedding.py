"""Unit-disk layout of truncated graphs.

Children of the breadth-first tree get exponentially shrinking angular
sectors and radii approaching 1, which reproduces the familiar disk
pictures of trees and tilings; the base vertex sits at the origin.
"""

from __future__ import annotations

import numpy as np


def disk_embedding(g, radial_scale=0.55):
    """Per-vertex (x, y) strictly inside the unit disk."""
    order = np.argsort(g.depth, kind="stable")
    children = {u: [] for u in range(g.n)}
    parent = np.full(g.n, -1, dtype=np.int64)
    for u in order:
        u = int(u)
        if u == g.base_vertex:
            continue
        nbrs = g.neighbors(u)
        ups = nbrs[g.depth[nbrs] == g.depth[u] - 1]
        parent[u] = int(ups.min())
        children[parent[u]].append(u)
    lo = np.zeros(g.n)
    hi = np.zeros(g.n)
    lo[g.base_vertex], hi[g.base_vertex] = 0.0, 2.0 * np.pi
    for u in order:
        u = int(u)
        kids = children[u]
        if not kids:
            continue
        width = (hi[u] - lo[u]) / len(kids)
        for i, c in enumerate(sorted(kids)):
            lo[c] = lo[u] + i * width
            hi[c] = lo[c] + width
    theta = 0.5 * (lo + hi)
    radius = np.tanh(radial_scale * g.depth)
    radius = np.minimum(radius, 1.0 - 1e-9)
    xy = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)
    xy[g.base_vertex] = 0.0
    return xy
