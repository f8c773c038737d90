"""Hyperbolicity estimates, visuality and the visual quasi-metric.

The distance from the base vertex to a geodesic between two boundary
directions is replaced throughout by the Gromov product anchored at the
base vertex; the two agree up to 2*delta and the multiplicative constant
lambda fitted below absorbs the discrepancy.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

import numpy as np

from . import graphs


@dataclass(frozen=True)
class GeometryReport:
    delta_four_point: float
    delta_slim_sampled: float
    visuality_constant: float
    delta_used: float
    sample_size: int
    exact: bool

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class VisualMetric:
    epsilon: float
    lam: float
    horizon_radius: int
    relaxed: bool = False  # epsilon overridden beyond the conservative cap

    def as_dict(self):
        return {"epsilon": self.epsilon, "lambda": self.lam,
                "horizon_radius": self.horizon_radius,
                "relaxed": self.relaxed}


EXHAUSTIVE_LIMIT = 64


def gromov_product(g, a, b):
    """(|a| + |b| - d(a,b)) / 2 anchored at the base vertex."""
    d = g.distances_from(a)[b]
    return 0.5 * (g.depth[a] + g.depth[b] - d)


def _four_point_defect(dmat):
    """Max four-point defect over all quadruples given a distance matrix."""
    n = dmat.shape[0]
    worst = 0.0
    for w in range(n):
        # products anchored at w
        p = 0.5 * (dmat[w][:, None] + dmat[w][None, :] - dmat)
        # max over z of min(p[x,z], p[y,z]) for each (x, y)
        m = np.minimum(p[:, None, :], p[None, :, :]).max(axis=2)
        worst = max(worst, float((m - p).max()))
    return max(0.0, worst)


def estimate_delta_four_point(g, sample_quadruples=2000, seed=0):
    """Four-point hyperbolicity constant; exhaustive for small graphs.

    Sampling anchors the base vertex as one corner in half the samples,
    since all products downstream are anchored there.
    """
    if g.n == 1:
        return 0.0, True
    if g.n <= EXHAUSTIVE_LIMIT:
        dmat = g.distances_from_many(range(g.n))
        return _four_point_defect(dmat), True
    rng = np.random.default_rng(seed)
    quads = rng.integers(0, g.n, size=(sample_quadruples, 4))
    quads[: sample_quadruples // 2, 3] = g.base_vertex
    verts = np.unique(quads)
    pos = {int(v): i for i, v in enumerate(verts)}
    dmat = g.distances_from_many(verts)[:, verts]
    worst = 0.0
    for x, y, z, w in quads:
        x, y, z, w = (pos[int(v)] for v in (x, y, z, w))
        pxz = 0.5 * (dmat[w, x] + dmat[w, z] - dmat[x, z])
        pyz = 0.5 * (dmat[w, y] + dmat[w, z] - dmat[y, z])
        pxy = 0.5 * (dmat[w, x] + dmat[w, y] - dmat[x, y])
        worst = max(worst, min(pxz, pyz) - pxy)
    return max(0.0, worst), False


def bfs_geodesic(g, a, b):
    """The geodesic from a to b selected by the lowest-id-parent rule."""
    if a == b:
        return [a]
    dist_b = g.distances_from(b)
    path = [a]
    cur = a
    while cur != b:
        nbrs = g.neighbors(cur)
        closer = nbrs[dist_b[nbrs] == dist_b[cur] - 1]
        cur = int(closer.min())
        path.append(cur)
    return path


def estimate_delta_slim(g, sample_triangles=300, seed=0):
    """Max slimness defect over sampled triangles with deterministic
    breadth-first geodesics."""
    if g.n < 3:
        return 0.0
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(sample_triangles):
        x, y, z = rng.integers(0, g.n, size=3)
        sides = [bfs_geodesic(g, int(x), int(y)),
                 bfs_geodesic(g, int(y), int(z)),
                 bfs_geodesic(g, int(z), int(x))]
        for i in range(3):
            others = set(sides[(i + 1) % 3]) | set(sides[(i + 2) % 3])
            dist = g.distance_to_set(others)
            worst = max(worst, float(dist[sides[i]].max()))
    return worst


def geodesic_membership(g, target):
    """Union of all geodesics from the base vertex to `target`:
    {u : |u| + d(u, target) = |target|}."""
    d = g.distances_from(target)
    return frozenset(np.flatnonzero(g.depth + d == g.depth[target]))


def visuality_constant(g, horizon_radius, delta_four_point=None):
    """Max over interior vertices of the distance to the nearest ray from
    the base vertex to a horizon vertex.

    A margin of delta_four_point + 1 below the horizon excludes rim
    artifacts of the truncation.
    """
    if horizon_radius > g.truncation_radius:
        raise ValueError("horizon radius exceeds the truncation")
    if delta_four_point is None:
        delta_four_point, _ = estimate_delta_four_point(g)
    margin = delta_four_point + 1
    horizon = sorted(graphs.sphere(g, g.base_vertex, horizon_radius))
    if not horizon:
        raise ValueError("empty horizon sphere")
    best = np.full(g.n, np.inf)
    for h in horizon:
        ray = geodesic_membership(g, h)
        best = np.minimum(best, g.distance_to_set(ray))
    eligible = g.depth <= horizon_radius - margin
    if not eligible.any():
        return 0.0
    return float(best[eligible].max())


def epsilon_cap(delta_used):
    return np.log(2.0) / (8.0 * (delta_used + 1.0))


def choose_epsilon(delta_used, override=None):
    """Default epsilon keeps e^(eps*delta) <= 2^(1/8); overridable.

    Returns (epsilon, relaxed) where relaxed flags an override beyond the
    conservative cap (legitimate on trees, where any epsilon is exact)."""
    if override is not None:
        if override <= 0:
            raise ValueError("epsilon override must be positive")
        return float(override), override > epsilon_cap(delta_used) + 1e-15
    return float(epsilon_cap(delta_used)), False


def geometry_report(g, sample_quadruples=2000, sample_triangles=300,
                    horizon_radius=None, seed=0):
    d4, exact = estimate_delta_four_point(g, sample_quadruples, seed=seed)
    dslim = estimate_delta_slim(g, sample_triangles, seed=seed)
    if horizon_radius is None:
        horizon_radius = max(1, g.truncation_radius - 1)
    dbar = visuality_constant(g, horizon_radius, delta_four_point=d4)
    return GeometryReport(
        delta_four_point=d4,
        delta_slim_sampled=dslim,
        visuality_constant=dbar,
        delta_used=max(d4, dslim, dbar),
        sample_size=sample_quadruples + sample_triangles,
        exact=exact)


def visual_distance(vm, g, a, b):
    """e^(-eps * (a|b)_v); arguments are vertices or boundary proxies."""
    av = getattr(a, "horizon_vertex", a)
    bv = getattr(b, "horizon_vertex", b)
    return float(np.exp(-vm.epsilon * gromov_product(g, av, bv)))


def fit_lambda(vm, g, horizon_vertices, sample=200, seed=0):
    """Smallest lambda >= 1 absorbing the gap between the Gromov product
    and the distance from the base vertex to a connecting geodesic."""
    horizon_vertices = sorted(horizon_vertices)
    rng = np.random.default_rng(seed)
    lam = 1.0
    for _ in range(sample):
        a, b = rng.choice(horizon_vertices, size=2)
        a, b = int(a), int(b)
        da = g.distances_from(a)
        db = g.distances_from(b)
        on_geo = da + db == da[b]
        d_v_geo = float(g.depth[on_geo].min())
        prod = 0.5 * (g.depth[a] + g.depth[b] - da[b])
        lam = max(lam, float(np.exp(vm.epsilon * abs(prod - d_v_geo))))
    return lam
