"""Action functional, discrete Laplacian, Dirichlet solver and the
executable forms of the variational lemmas.

The action on a vertex set B is W_B(x) = sum over B of (1/4)|grad x|^2 +
V(x); the gradient norm sums over all incident edges, so each edge inside
B carries total weight 1/2.  Stationarity on B is the equation
laplacian(x) = V'(x).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import graphs, kernels


@dataclass
class Field:
    values: np.ndarray
    graph_id: str = ""

    def copy(self):
        return Field(values=self.values.copy(), graph_id=self.graph_id)


@dataclass(frozen=True)
class SolverConfig:
    residual_tol: float = 1e-10
    max_sweeps: int = 100_000
    multistart: tuple = ("boundary-extension", "c0-fill", "c1-fill")
    rho: float | None = None
    seed: int = 0
    tie_break: str = "smallest"
    force_python: bool = False


@dataclass
class SolveResult:
    field: Field
    converged: bool
    sweeps: int
    residual: float
    energy: float
    energy_trace: list
    winner: str
    backend: str
    clamped: bool


@dataclass(frozen=True)
class TransitionSets:
    B_l: frozenset
    B_h: frozenset


def _as_index(B):
    return np.fromiter(sorted(B), dtype=np.int64) if len(B) else \
        np.empty(0, dtype=np.int64)


def _check_interior(g, B, what):
    idx = _as_index(B)
    if idx.size and not g.interior_mask()[idx].all():
        raise ValueError("%s touches the truncation rim: clipped" % what)
    return idx


def laplacian(g, x, u):
    """Sum of neighbor differences at u; rejects rim vertices whose
    neighborhoods are clipped by the truncation."""
    if not g.interior_mask()[u]:
        raise ValueError("vertex %d is clipped by the truncation" % u)
    nbrs = g.neighbors(u)
    return float(np.sum(x.values[nbrs] - x.values[u]))


def laplacian_field(g, x, idx):
    v = x.values
    return (g.adjacency @ v)[idx] - g.degrees[idx] * v[idx]


def _grad_sq(g, v, idx):
    """|grad x|^2 per vertex of idx: sum over incident edges of the
    squared difference."""
    av = g.adjacency @ v
    av2 = g.adjacency @ (v * v)
    return av2[idx] - 2.0 * v[idx] * av[idx] + g.degrees[idx] * v[idx] ** 2


def energy(g, x, B, P):
    """W_B(x): each vertex of B contributes (1/4)|grad x|^2 + V(x)."""
    idx = _check_interior(g, B, "energy region")
    if idx.size == 0:
        return 0.0
    v = x.values
    return float(0.25 * np.sum(_grad_sq(g, v, idx)) + np.sum(P.V(v[idx])))


def region_energy(g, x, region_idx, P):
    """Same sum as `energy` but over precomputed interior-safe indices,
    with clipped rim edges tolerated (solver Lyapunov function)."""
    v = x.values
    return float(0.25 * np.sum(_grad_sq(g, v, region_idx))
                 + np.sum(P.V(v[region_idx])))


def el_residual(g, x, B, P):
    """sup over B of |laplacian(x) - V'(x)|; 0 iff stationary on B."""
    idx = _check_interior(g, B, "residual region")
    if idx.size == 0:
        return 0.0
    lap = laplacian_field(g, x, idx)
    return float(np.max(np.abs(lap - P.dV(x.values[idx]))))


def _boundary_extension(g, free_idx, fixed_mask, values):
    """Fill free vertices with the value of the nearest fixed vertex
    (smallest distance, then smallest source id)."""
    from scipy.sparse.csgraph import dijkstra
    sources = np.flatnonzero(fixed_mask)
    dist, _, src = dijkstra(g.adjacency, unweighted=True, indices=sources,
                            min_only=True, return_predecessors=True)
    out = values.copy()
    ok = np.isfinite(dist[free_idx]) & (src[free_idx] >= 0)
    out[free_idx[ok]] = values[src[free_idx[ok]]]
    return out


def _apply_boundary(g, B, f, P):
    """Full value array with boundary data placed outside B; unreferenced
    vertices default to c0."""
    x = np.full(g.n, P.c0, dtype=float)
    free = np.zeros(g.n, dtype=bool)
    free[_as_index(B)] = True
    if isinstance(f, dict):
        for u, val in f.items():
            x[int(u)] = float(val)
    else:
        f = np.asarray(f, dtype=float)
        x[~free] = f[~free]
    x[free] = P.c0
    return x, free


def solve_dirichlet(g, B, f, P, cfg=None):
    """Minimize the action on B with x = f outside B.

    Gauss-Seidel sweeps in vertex-id order; each update is the global 1D
    minimizer of the single-vertex energy restriction.  Multistart over
    the configured initializations, keeping the least-energy result.
    """
    cfg = cfg or SolverConfig()
    free_idx = _check_interior(g, B, "solve region")
    if free_idx.size == 0:
        raise ValueError("empty solve region")
    x0, free_mask = _apply_boundary(g, B, f, P)
    bnd_idx = np.flatnonzero(~free_mask)
    bvals = x0[bnd_idx]
    clamp = bool(bnd_idx.size == 0
                 or (bvals.min() >= P.c0 - 1e-12
                     and bvals.max() <= P.c1 + 1e-12))
    if clamp:
        lo, hi = P.c0, P.c1
    else:
        lo = min(P.c0, float(bvals.min()))
        hi = max(P.c1, float(bvals.max()))
    sweep, backend = kernels.make_sweeper(g, P, force_python=cfg.force_python)
    region = np.unique(np.concatenate(
        [free_idx, _as_index(graphs.boundary_out(g, set(free_idx.tolist())))]))
    fx = Field(values=x0, graph_id=g.graph_id)

    inits = []
    for name in cfg.multistart:
        if name == "boundary-extension":
            if bnd_idx.size == 0:
                continue
            inits.append((name, _boundary_extension(g, free_idx,
                                                    ~free_mask, x0)))
        elif name == "c0-fill":
            v = x0.copy()
            v[free_idx] = P.c0
            inits.append((name, v))
        elif name == "c1-fill":
            v = x0.copy()
            v[free_idx] = P.c1
            inits.append((name, v))
        else:
            raise ValueError("unknown initialization %r" % name)
    if not inits:
        raise ValueError("no initializations configured")

    best = None
    for name, v in inits:
        vals = v.copy()
        trace = []
        fx.values = vals
        resid = np.inf
        sweeps = 0
        for sweeps in range(1, cfg.max_sweeps + 1):
            sweep(vals, free_idx, lo, hi)
            trace.append(region_energy(g, fx, region, P))
            lap = laplacian_field(g, fx, free_idx)
            resid = float(np.max(np.abs(lap - P.dV(vals[free_idx]))))
            if resid <= cfg.residual_tol:
                break
        e = region_energy(g, fx, region, P)
        cand = SolveResult(field=Field(values=vals, graph_id=g.graph_id),
                           converged=resid <= cfg.residual_tol,
                           sweeps=sweeps, residual=resid, energy=e,
                           energy_trace=trace, winner=name, backend=backend,
                           clamped=clamp)
        if best is None or cand.energy < best.energy - 1e-12:
            best = cand
    return best


def verify_local_minimality(g, x, B, P, trials=1000, scale=1e-3, seed=0):
    """Random compactly supported perturbations must not lower the action;
    returns the minimum observed energy gap."""
    rng = np.random.default_rng(seed)
    free_idx = _check_interior(g, B, "perturbation support")
    region = np.unique(np.concatenate(
        [free_idx, _as_index(graphs.boundary_out(g, set(free_idx.tolist())))]))
    base = region_energy(g, x, region, P)
    min_gap = np.inf
    y = x.copy()
    for _ in range(trials):
        k = int(rng.integers(1, free_idx.size + 1))
        support = rng.choice(free_idx, size=k, replace=False)
        y.values[:] = x.values
        y.values[support] += rng.uniform(-scale, scale, size=k)
        gap = region_energy(g, y, region, P) - base
        min_gap = min(min_gap, gap)
    return float(min_gap)


def minmax_check(g, x, y, B, P):
    """Submodularity of the action: W(x) + W(y) >= W(max) + W(min)."""
    lhs = energy(g, x, B, P) + energy(g, y, B, P)
    mx = Field(values=np.maximum(x.values, y.values))
    mn = Field(values=np.minimum(x.values, y.values))
    rhs = energy(g, mx, B, P) + energy(g, mn, B, P)
    return lhs, rhs


@dataclass(frozen=True)
class ComparisonReport:
    ordered: bool
    strict: bool
    identical: bool
    max_violation: float
    minimality_suspect: bool


def comparison_check(g, B, f_low, f_high, P, cfg=None, tol=1e-9):
    """Solutions with ordered boundary data must come out ordered (or
    identical); a mixed outcome flags a minimality failure."""
    lo = solve_dirichlet(g, B, f_low, P, cfg)
    hi = solve_dirichlet(g, B, f_high, P, cfg)
    idx = _as_index(B)
    dl = hi.field.values[idx] - lo.field.values[idx]
    ordered = bool(np.all(dl >= -tol))
    identical = bool(np.max(np.abs(dl)) <= tol)
    strict = bool(np.all(dl > tol))
    suspect = ordered and not identical and not strict
    return ComparisonReport(ordered=ordered, strict=strict,
                            identical=identical,
                            max_violation=float(max(0.0, -dl.min())),
                            minimality_suspect=suspect), lo, hi


def trapping_check(g, x, B, P, tol=1e-12):
    """Solved fields with trapped boundary data stay in [c0, c1] on the
    closed solve region."""
    reach = graphs.outer_set(g, graphs.outer_set(g, B))
    idx = _as_index(reach)
    v = x.values[idx]
    return bool(v.min() >= P.c0 - tol and v.max() <= P.c1 + tol)


def transition_sets(g, x, B, rho, consts, P):
    """B_l: values in [c0, c1-2b*rho); B_h: values in [c1-2b*rho, c1-rho)."""
    idx = _as_index(B)
    v = x.values[idx]
    cut_l = P.c1 - 2 * consts.b * rho
    cut_h = P.c1 - rho
    return TransitionSets(
        B_l=frozenset(idx[v < cut_l].tolist()),
        B_h=frozenset(idx[(v >= cut_l) & (v < cut_h)].tolist()))


def derive_k0(g, rho, consts, P):
    """Transition-set constant assembled from the potential constants:
    k0 = S * max{1, k2~} / k1~."""
    S = g.max_degree
    width = P.c1 - P.c0
    k1t = min(1.0, consts.beta(rho),
              ((width - 4 * consts.b * rho) ** 2 - rho ** 2) / 4.0)
    k2t = max(S * width ** 2, 2.0 * S / consts.m1)
    if k1t <= 0:
        raise ValueError("degenerate transition constant: rho too large")
    return S * max(1.0, k2t) / k1t


@dataclass(frozen=True)
class TsReport:
    lhs: float
    rhs: float
    k0_used: float
    k0_min: float
    holds: bool


def ts_inequality_check(g, x, B, D, rho, consts, P):
    """Boundary-controls-interior estimate for the transition sets:
    the count and excess inside D are bounded by k0 times the same
    quantities on the boundary of D."""
    from .potential import potential_excess
    ts = transition_sets(g, x, B, rho, consts, P)
    c_ref = P.c1 - rho
    D = frozenset(D)
    d_2inn = graphs.iterate_inn(g, D, 2)
    d_inn = graphs.inner_set(g, D)
    lhs = (len(graphs.boundary_out(g, ts.B_l) & d_2inn)
           + potential_excess(P, x.values, ts.B_h & d_inn, c_ref))
    rhs = (len(ts.B_l & graphs.boundary_full(g, D))
           + potential_excess(P, x.values,
                              ts.B_h & graphs.boundary_out(g, D), c_ref))
    k0 = derive_k0(g, rho, consts, P)
    holds = lhs <= k0 * rhs + 1e-12
    if lhs <= 1e-12:
        k0_min = 0.0
    elif rhs <= 1e-12:
        k0_min = np.inf
    else:
        k0_min = lhs / rhs
    return TsReport(lhs=float(lhs), rhs=float(rhs), k0_used=float(k0),
                    k0_min=float(k0_min), holds=bool(holds))


def component_boundary_check(g, x, B, rho, consts, P):
    """Every connected component of the low transition set must reach the
    boundary of the solve region."""
    ts = transition_sets(g, x, B, rho, consts, P)
    if not ts.B_l:
        return True
    out_b = graphs.boundary_out(g, B)
    for comp in graphs.connected_components(g, ts.B_l):
        if not (graphs.outer_set(g, comp) & out_b):
            return False
    return True
