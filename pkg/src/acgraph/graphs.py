"""Finite truncations of infinite graphs, metric primitives and set boundaries.

All graphs produced here are balls of a configurable combinatorial radius
around a base vertex.  Vertex ids are assigned in breadth-first discovery
order from the base vertex, so id 0 is always the base vertex and ids are
reproducible for a fixed generator spec.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph


class Graph:
    """Immutable adjacency structure of a truncated graph.

    Attributes
    ----------
    n : number of vertices.
    base_vertex : id of the base vertex (always 0).
    max_degree : largest vertex degree (the uniform bound S; attained).
    truncation_radius : radius of the ball the graph represents.
    depth : array of distances to the base vertex.
    generator_spec : dict describing family and parameters.
    """

    def __init__(self, edges, generator_spec, truncation_radius):
        edges = sorted({(min(u, v), max(u, v)) for u, v in edges})
        n = 1 + max((max(e) for e in edges), default=0)
        for u, v in edges:
            if u == v:
                raise ValueError("self-loop at vertex %d" % u)
        rows = np.fromiter((u for e in edges for u in e), dtype=np.int32)
        cols = np.fromiter((u for e in edges for u in reversed(e)), dtype=np.int32)
        data = np.ones(len(rows), dtype=np.int8)
        self.adj = sparse.csr_matrix((data, (rows, cols)), shape=(n, n))
        self.adjacency = self.adj
        self.n = n
        self.base_vertex = 0
        self.indptr = self.adj.indptr
        self.indices = self.adj.indices
        self.degrees = np.diff(self.indptr)
        self.max_degree = int(self.degrees.max()) if n > 1 else 0
        self.generator_spec = dict(generator_spec)
        self.truncation_radius = int(truncation_radius)
        self.graph_id = "%s-%s-R%d" % (
            self.generator_spec.get("family", "graph"),
            "x".join(str(self.generator_spec[k])
                     for k in sorted(self.generator_spec)
                     if k not in ("family", "radius") and
                     isinstance(self.generator_spec[k], int)),
            self.truncation_radius)
        self._dist_cache: dict[int, np.ndarray] = {}
        self.depth = self.distances_from(0)
        if n > 1 and not np.all(np.isfinite(self.depth)):
            raise ValueError("graph is not connected")
        if int(self.depth.max(initial=0)) > self.truncation_radius:
            raise ValueError("vertex beyond declared truncation radius")

    # -- metric primitives -------------------------------------------------

    def neighbors(self, u):
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def distances_from(self, source):
        """Exact breadth-first distances from one vertex (cached)."""
        if source not in self._dist_cache:
            d = csgraph.dijkstra(self.adj, unweighted=True, indices=source)
            self._dist_cache[source] = d
        return self._dist_cache[source]

    def distances_from_many(self, sources):
        """Distance matrix (len(sources), n), one BFS per source."""
        sources = np.asarray(list(sources), dtype=np.int64)
        return csgraph.dijkstra(self.adj, unweighted=True, indices=sources)

    def distance_to_set(self, sources):
        """min over s in sources of d(., s); +inf for empty source set."""
        sources = np.asarray(list(sources), dtype=np.int64)
        if sources.size == 0:
            return np.full(self.n, np.inf)
        return csgraph.dijkstra(self.adj, unweighted=True, indices=sources,
                                min_only=True)

    @property
    def rim(self):
        """Vertices on the truncation sphere; their neighborhoods are clipped."""
        return frozenset(np.flatnonzero(self.depth >= self.truncation_radius))

    def interior_mask(self):
        return self.depth < self.truncation_radius

    # -- helpers -----------------------------------------------------------

    def mask(self, vertices):
        m = np.zeros(self.n, dtype=bool)
        idx = np.fromiter(vertices, dtype=np.int64, count=-1)
        if idx.size:
            if idx.min() < 0 or idx.max() >= self.n:
                raise ValueError("vertex id out of range")
            m[idx] = True
        return m

    def __repr__(self):
        spec = self.generator_spec
        return "Graph(%s, n=%d, S=%d, R=%d)" % (
            spec.get("family", "?"), self.n, self.max_degree,
            self.truncation_radius)


@dataclass(frozen=True)
class DistanceField:
    source: int
    dist: np.ndarray


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

def build_tree(degree, radius):
    """Rooted regular tree: the root and every internal vertex have `degree`
    neighbors; truncated at the given radius."""
    if degree < 3:
        raise ValueError("degree must be >= 3 (degree 2 is the line; "
                         "use build_control_line)")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    spec = {"family": "tree", "degree": degree, "radius": radius}
    if radius == 0:
        g = Graph.__new__(Graph)
        g.adj = sparse.csr_matrix((1, 1), dtype=np.int8)
        g.adjacency = g.adj
        g.graph_id = "tree-%d-R0" % degree
        g.n = 1
        g.base_vertex = 0
        g.indptr = g.adj.indptr
        g.indices = g.adj.indices
        g.degrees = np.zeros(1, dtype=np.int64)
        g.max_degree = 0
        g.generator_spec = spec
        g.truncation_radius = 0
        g._dist_cache = {0: np.zeros(1)}
        g.depth = np.zeros(1)
        return g
    edges = []
    next_id = 1
    frontier = [0]
    for layer in range(radius):
        new_frontier = []
        for u in frontier:
            n_children = degree if layer == 0 and u == 0 else degree - 1
            for _ in range(n_children):
                edges.append((u, next_id))
                new_frontier.append(next_id)
                next_id += 1
        frontier = new_frontier
    return Graph(edges, spec, radius)


def build_control_line(extent):
    """Path segment with `extent` edges, base vertex at its center."""
    if extent < 2:
        raise ValueError("extent must be >= 2")
    left = extent // 2
    right = extent - left
    # ids in BFS order from the center: 0 center, then pairs outwards
    edges = []
    prev = {+1: 0, -1: 0}
    remaining = {+1: right, -1: left}
    next_id = 1
    for step in range(max(left, right)):
        for side in (+1, -1):
            if step < remaining[side]:
                edges.append((prev[side], next_id))
                prev[side] = next_id
                next_id += 1
    spec = {"family": "line", "extent": extent}
    return Graph(edges, spec, right)


def build_control_grid(side):
    """side x side square grid, base vertex at the center cell."""
    if side < 2:
        raise ValueError("side must be >= 2")
    c = side // 2
    center = (c, c)

    def cell_id(cell):
        return order[cell]

    # BFS order from center for deterministic ids
    from collections import deque
    order = {center: 0}
    q = deque([center])
    while q:
        i, j = q.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = (i + di, j + dj)
            if 0 <= nb[0] < side and 0 <= nb[1] < side and nb not in order:
                order[nb] = len(order)
                q.append(nb)
    edges = []
    for (i, j), u in order.items():
        for di, dj in ((1, 0), (0, 1)):
            nb = (i + di, j + dj)
            if nb in order:
                edges.append((u, order[nb]))
    radius = max(abs(i - c) + abs(j - c) for (i, j) in order)
    spec = {"family": "grid", "side": side}
    return Graph(edges, spec, radius)


def _hyperboloid_generators(p, q):
    """Edge length and frame generators of the {p,q} tiling in the
    hyperboloid model (coordinates (x, y, t), x^2+y^2-t^2 = -1)."""
    ell = 2.0 * np.arccosh(np.cos(np.pi / p) / np.sin(np.pi / q))

    def rot(a):
        c, s = np.cos(a), np.sin(a)
        return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])

    def trans(s):
        return np.array([[np.cosh(s), 0.0, np.sinh(s)],
                         [0.0, 1.0, 0.0],
                         [np.sinh(s), 0.0, np.cosh(s)]])

    # Half-turn about the midpoint of the base edge: a symmetry of the
    # tiling that swaps the endpoints of that edge.
    edge_flip = trans(ell / 2) @ rot(np.pi) @ trans(-ell / 2)
    spins = [rot(2.0 * np.pi * k / q) for k in range(q)]
    return ell, edge_flip, spins


def build_tiling(p, q, radius):
    """Vertex graph of the regular hyperbolic {p,q} tessellation, truncated
    at combinatorial radius from the base vertex.

    Vertices are generated as orbit points of the base vertex under tiling
    symmetries (vertex rotation and edge half-turn), deduplicated by their
    hyperboloid-model coordinates.  Canonicalizing positions this way avoids
    duplicate faces and gets the degree counts right.
    """
    if (p - 2) * (q - 2) <= 4:
        raise ValueError("{%d,%d} is not hyperbolic (need 1/p + 1/q < 1/2)"
                         % (p, q))
    if p < 3 or q < 3:
        raise ValueError("p, q must be >= 3")
    if radius < 1:
        raise ValueError("radius must be >= 1")
    _, edge_flip, spins = _hyperboloid_generators(p, q)
    origin = np.array([0.0, 0.0, 1.0])

    cell = 1e-3  # distinct vertices are >~ 0.4 apart in these coordinates

    buckets: dict[tuple[int, int, int], list[tuple[np.ndarray, int]]] = {}

    def lookup(pos):
        key = tuple(np.round(pos / cell).astype(np.int64))
        for dk0 in (-1, 0, 1):
            for dk1 in (-1, 0, 1):
                for dk2 in (-1, 0, 1):
                    kk = (key[0] + dk0, key[1] + dk1, key[2] + dk2)
                    for stored, vid in buckets.get(kk, ()):
                        if np.max(np.abs(stored - pos)) < 0.05 * max(1.0, abs(pos[2])):
                            return vid
        return -1

    def insert(pos, vid):
        key = tuple(np.round(pos / cell).astype(np.int64))
        buckets.setdefault(key, []).append((pos, vid))

    frames = [np.eye(3)]
    insert(origin, 0)
    edges = set()
    layer = [0]
    n_vertices = 1
    for depth in range(radius + 1):
        next_layer = []
        expand = depth < radius
        for u in layer:
            frame_u = frames[u]
            for spin in spins:
                nb_frame = frame_u @ spin @ edge_flip
                pos = nb_frame @ origin
                vid = lookup(pos)
                if vid < 0:
                    if not expand:
                        continue  # clipped beyond the truncation rim
                    vid = n_vertices
                    n_vertices += 1
                    frames.append(nb_frame)
                    insert(pos, vid)
                    next_layer.append(vid)
                if vid != u:
                    edges.add((min(u, vid), max(u, vid)))
        layer = next_layer
    spec = {"family": "tiling", "p": p, "q": q, "radius": radius}
    return Graph(sorted(edges), spec, radius)


# ---------------------------------------------------------------------------
# Balls, spheres, boundary operators
# ---------------------------------------------------------------------------

def ball(g, center, n):
    if n < 0:
        raise ValueError("radius must be >= 0")
    d = g.distances_from(center)
    return frozenset(np.flatnonzero(d <= n))


def sphere(g, center, n):
    if n < 0:
        raise ValueError("radius must be >= 0")
    d = g.distances_from(center)
    return frozenset(np.flatnonzero(d == n))


def clipped(g, center, n):
    """True when ball(center, n) may extend beyond the truncation."""
    return n + g.depth[center] > g.truncation_radius


def outer_set(g, B):
    m = g.mask(B)
    out = m.copy()
    out[g.indices[np.repeat(m, g.degrees)]] = True
    return frozenset(np.flatnonzero(out))


def inner_set(g, B):
    """Erosion: vertices of B whose whole unit ball lies in B."""
    m = g.mask(B)
    # a vertex stays iff none of its neighbors is outside B
    bad = np.zeros(g.n, dtype=bool)
    bad[g.indices[np.repeat(~m, g.degrees)]] = True
    return frozenset(np.flatnonzero(m & ~bad))


def boundary_out(g, B):
    return outer_set(g, B) - frozenset(B)


def boundary_inn(g, B):
    return frozenset(B) - inner_set(g, B)


def boundary_full(g, B):
    return boundary_out(g, B) | boundary_inn(g, B)


def iterate_out(g, B, n):
    s = frozenset(B)
    for _ in range(n):
        s = outer_set(g, s)
    return s


def iterate_inn(g, B, n):
    s = frozenset(B)
    for _ in range(n):
        s = inner_set(g, s)
    return s


def connected_components(g, D):
    """Partition of D into connectivity classes of the induced subgraph."""
    D = frozenset(D)
    if not D:
        return []
    idx = np.fromiter(sorted(D), dtype=np.int64)
    sub = g.adj[idx][:, idx]
    n_comp, labels = csgraph.connected_components(sub, directed=False)
    return [frozenset(idx[labels == c]) for c in range(n_comp)]


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def export_edge_list(g, csv_path, header_path):
    """Edge list CSV (columns u, v) with a JSON side-car header."""
    with open(csv_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["u", "v"])
        coo = sparse.triu(g.adj).tocoo()
        for u, v in sorted(zip(coo.row.tolist(), coo.col.tolist())):
            writer.writerow([u, v])
    header = {
        "base_vertex": g.base_vertex,
        "S": g.max_degree,
        "R_max": g.truncation_radius,
        "generator_spec": g.generator_spec,
        "vertex_count": g.n,
    }
    with open(header_path, "w") as fh:
        json.dump(header, fh, indent=2, sort_keys=True)
        fh.write("\n")
