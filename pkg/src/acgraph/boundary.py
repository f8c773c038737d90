"""Finite model of the boundary at infinity.

A horizon sphere of vertices at distance R from the base vertex stands in
for the boundary: each horizon vertex is wrapped as a proxy for the
direction of its rays.  Proxies are never merged; pairs closer than the
proxy resolution are reported as unresolved duplicates instead.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import graphs
from .geometry import gromov_product


@dataclass(frozen=True)
class BoundaryProxy:
    index: int
    horizon_vertex: int
    horizon_radius: int


@dataclass(frozen=True)
class Shadow:
    owner: int
    proxies: frozenset


@dataclass(frozen=True)
class ShadowConstants:
    C1: float
    C2: float
    vacuous: bool = False


class Horizon:
    """Horizon proxies plus the precomputed ray geometry.

    For each proxy xi: the full distance field of its horizon vertex, the
    ray set xi_v = union of geodesics base->xi, and d(., xi_v).  Shadows,
    U-sets and cones are all mask lookups on these tables.
    """

    def __init__(self, g, radius, delta, strict=True):
        if radius < 1:
            raise ValueError("horizon radius must be >= 1")
        if radius > g.truncation_radius:
            raise ValueError("horizon radius exceeds the truncation")
        self.clipped = radius > g.truncation_radius - delta - 1
        if strict and self.clipped and g.generator_spec.get("family") not in (
                "tree", "line"):
            raise ValueError(
                "horizon radius %d leaves no margin below the truncation "
                "rim (need <= %g)" % (radius, g.truncation_radius - delta - 1))
        verts = sorted(graphs.sphere(g, g.base_vertex, radius))
        if not verts:
            raise ValueError("empty horizon sphere")
        self.graph = g
        self.radius = int(radius)
        self.delta = float(delta)
        self.vertices = np.asarray(verts, dtype=np.int64)
        self.proxies = [BoundaryProxy(i, int(v), self.radius)
                        for i, v in enumerate(self.vertices)]
        self.size = len(self.proxies)
        dists = g.distances_from_many(self.vertices)
        # ray membership: u on a geodesic base -> horizon vertex
        self.ray_mask = (g.depth[None, :] + dists) == float(radius)
        self.dist_to_ray = np.empty((self.size, g.n))
        for i in range(self.size):
            ray = np.flatnonzero(self.ray_mask[i])
            self.dist_to_ray[i] = g.distance_to_set(ray)
        self.shadow_mask = self.dist_to_ray <= self.delta
        # Gromov products between proxies, anchored at the base vertex
        pp = dists[:, self.vertices]
        self.products = 0.5 * (2.0 * radius - pp)

    def proxy(self, i):
        return self.proxies[i]

    def ray_set(self, xi):
        return frozenset(np.flatnonzero(self.ray_mask[xi.index]))

    def u_set(self, xi, delta=None):
        delta = self.delta if delta is None else delta
        return frozenset(np.flatnonzero(self.dist_to_ray[xi.index] <= delta))

    def shadow(self, u, delta=None):
        delta = self.delta if delta is None else delta
        members = frozenset(np.flatnonzero(self.dist_to_ray[:, u] <= delta))
        return Shadow(owner=int(u), proxies=members)

    def proxy_mask(self, proxies):
        m = np.zeros(self.size, dtype=bool)
        for p in proxies:
            m[p.index if isinstance(p, BoundaryProxy) else int(p)] = True
        return m

    def cone(self, U, delta=None):
        """Vertices whose shadow lies entirely inside U."""
        delta = self.delta if delta is None else delta
        u_mask = self.proxy_mask(U)
        smask = (self.dist_to_ray <= delta) if delta != self.delta \
            else self.shadow_mask
        outside = (smask & ~u_mask[:, None]).any(axis=0)
        return frozenset(np.flatnonzero(~outside))

    # -- visual metric on proxies -----------------------------------------

    def distance_matrix(self, vm):
        return np.exp(-vm.epsilon * self.products)

    def resolution(self, vm):
        """Self-distance of a proxy: below this, balls are under-resolved."""
        return float(np.exp(-vm.epsilon * self.radius))

    def diameter(self, vm):
        return float(self.distance_matrix(vm).max())

    def unresolved_duplicates(self, vm, delta):
        """Pairs of distinct proxies at visual distance below the resolution
        e^(-eps (R - 2 delta)) -- candidates for the same boundary point."""
        thresh = np.exp(-vm.epsilon * (self.radius - 2 * delta))
        dm = self.distance_matrix(vm)
        i, j = np.nonzero(np.triu(dm < thresh, k=1))
        return list(zip(i.tolist(), j.tolist()))

    def ball_at_infinity(self, vm, xi0, r):
        if r <= 0:
            raise ValueError("radius must be positive")
        dm = self.distance_matrix(vm)
        sel = np.flatnonzero(dm[xi0.index] <= r)
        return frozenset(self.proxies[i] for i in sel)

    def annulus(self, vm, xi0, r, t):
        """Proxies with r - t <= d_eps(xi0, .) <= r + t."""
        if t < 0:
            raise ValueError("width must be >= 0")
        d = self.distance_matrix(vm)[xi0.index]
        sel = np.flatnonzero((d >= r - t) & (d <= r + t))
        return frozenset(self.proxies[i] for i in sel)


def horizon(g, radius, delta, strict=True):
    return Horizon(g, radius, delta, strict=strict)


# ---------------------------------------------------------------------------
# Separating sets
# ---------------------------------------------------------------------------

def separating_width(vm, sc, n):
    """t_n = max{4 eps^-1 e^(4 eps), C2} * e^(-eps n)."""
    eps = vm.epsilon
    return max(4.0 / eps * np.exp(4.0 * eps), sc.C2) * np.exp(-eps * n)


@dataclass(frozen=True)
class SeparatingSet:
    vertices: frozenset
    t_n: float
    under_resolved: bool


def separating_set(h, vm, sc, xi0, r, n):
    """Vertices of U-sets over the annulus A_{r+2t_n}^{t_n}(xi0), outside
    the ball of radius n."""
    t_n = separating_width(vm, sc, n)
    under = t_n < h.resolution(vm)
    ann = h.annulus(vm, xi0, r + 2 * t_n, t_n)
    g = h.graph
    members = np.zeros(g.n, dtype=bool)
    for xi in ann:
        members |= h.dist_to_ray[xi.index] <= h.delta
    members &= g.depth > n
    return SeparatingSet(vertices=frozenset(np.flatnonzero(members)),
                         t_n=float(t_n), under_resolved=under)


def separating_containments(g, h, vm, sc, xi0, r, n):
    """The two containments of the separating lemma, as exact set checks.

    Both the full boundary of the three-fold outer iterate and the outer
    boundary of cone(B_{r+2t_n}(xi0)) must lie in the separating set union
    the ball of radius n."""
    s = separating_set(h, vm, sc, xi0, r, n)
    cover = set(s.vertices) | set(graphs.ball(g, g.base_vertex, n))
    inner_ball = h.ball_at_infinity(vm, xi0, r + 2 * s.t_n)
    cone_set = h.cone(inner_ball)
    it3 = graphs.iterate_out(g, cone_set, 3)
    c_full = graphs.boundary_full(g, it3) <= cover
    c_out = graphs.boundary_out(g, cone_set) <= cover
    return c_full, c_out, s


def separating_disjointness(g, h, vm, sc, xi0, r, n):
    """(A_{r,t_n} ∩ A_{r+4t_n,t_n}) \\ B_n is empty."""
    a1 = separating_set(h, vm, sc, xi0, r, n)
    a2 = separating_set(h, vm, sc, xi0, r + 4 * a1.t_n, n)
    return len(a1.vertices & a2.vertices) == 0


# ---------------------------------------------------------------------------
# Almost-round shadow constants
# ---------------------------------------------------------------------------

def _grid(vm, lo_exp=-10, hi_exp=10):
    return [vm.lam * 2.0 ** k for k in range(lo_exp, hi_exp + 1)]


def fit_shadow_constants(g, h, vm, sample=200, seed=0):
    """Fit C1 and C2 on sampled (xi, r, g) triples.

    C1 is the largest grid value (powers of two times lambda) for which the
    two C1 inclusions hold on every sample; C2 is the smallest grid value
    for which the C2 inclusion holds.  Both directions are non-trivial only
    for C1, whose triggers tighten from above and below.
    """
    rng = np.random.default_rng(seed)
    dm = h.distance_matrix(vm)
    if sample <= 0:
        return ShadowConstants(C1=1.0, C2=1.0, vacuous=True)
    shadow_sets = [np.flatnonzero(h.dist_to_ray[:, u] <= h.delta)
                   for u in range(g.n)]
    triples = []
    radii = np.exp(-vm.epsilon * np.arange(0, h.radius + 1))
    for _ in range(sample):
        xi = int(rng.integers(h.size))
        ray = np.flatnonzero(h.ray_mask[xi])
        u = int(rng.choice(ray))
        r = float(rng.choice(radii))
        triples.append((xi, u, r))

    def c1_ok(C1):
        for xi, u, r in triples:
            ball_r = dm[xi] <= r
            shadow_u = np.zeros(h.size, dtype=bool)
            shadow_u[shadow_sets[u]] = True
            if C1 * np.exp(-vm.epsilon * g.depth[u]) >= r:
                if np.any(ball_r & ~shadow_u):
                    return False
            if np.exp(-vm.epsilon * g.depth[u]) / C1 <= r:
                if np.any(shadow_u & ~ball_r):
                    return False
        return True

    def c2_ok(C2):
        for xi, u, r in triples:
            if r < C2 * np.exp(-vm.epsilon * g.depth[u]):
                continue
            shadow_u = shadow_sets[u]
            if shadow_u.size == 0:
                continue
            for xs in shadow_u:
                if np.any(dm[xs][shadow_u] > r):
                    return False
        return True

    c1_candidates = [c for c in _grid(vm) if c1_ok(c)]
    c2_candidates = [c for c in _grid(vm) if c2_ok(c)]
    if not c1_candidates or not c2_candidates:
        raise ValueError("no shadow constant below the cap satisfies the "
                         "sample; horizon too coarse")
    return ShadowConstants(C1=max(c1_candidates), C2=min(c2_candidates))


def check_cone_membership(g, h, vm, sc, samples=100, seed=0):
    """Property: u in U_xi and d(xi, xi0) < r - C1 e^(-eps|u|) imply
    u in cone(B_r(xi0)).  Returns the number of violations."""
    rng = np.random.default_rng(seed)
    dm = h.distance_matrix(vm)
    violations = 0
    checked = 0
    for _ in range(samples):
        xi = int(rng.integers(h.size))
        xi0 = int(rng.integers(h.size))
        u_candidates = np.flatnonzero(h.dist_to_ray[xi] <= h.delta)
        u = int(rng.choice(u_candidates))
        r = float(rng.uniform(h.resolution(vm), 1.0))
        if dm[xi, xi0] < r - sc.C1 * np.exp(-vm.epsilon * g.depth[u]):
            checked += 1
            ball_mask = dm[xi0] <= r
            shadow_u = h.dist_to_ray[:, u] <= h.delta
            if np.any(shadow_u & ~ball_mask):
                violations += 1
    return violations, checked
