"""Ball growth, the vertex isoperimetric inequality and doubling probes.

The growth exponent D calibrates the isoperimetric exponent 4D/(4D+1);
the doubling/covering probes measure the metric homogeneity of the
horizon under the visual quasi-metric.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import graphs


@dataclass(frozen=True)
class GrowthFit:
    table: dict
    D: float
    C_D: float
    fit_window: tuple
    epsilon: float
    subexponential: bool = False

    def as_dict(self):
        return {"table": {int(k): int(v) for k, v in self.table.items()},
                "D": self.D, "C_D": self.C_D,
                "fit_window": list(self.fit_window),
                "epsilon": self.epsilon,
                "subexponential": self.subexponential}


@dataclass(frozen=True)
class IpReport:
    exponent: float
    C0: float
    worst_set: frozenset
    family_spec: str
    tested: int
    skipped_full: int
    rim_excluded: int
    violated_at_scale: bool

    def as_dict(self):
        return {"exponent": self.exponent, "C0": self.C0,
                "worst_set_size": len(self.worst_set),
                "family_spec": self.family_spec, "tested": self.tested,
                "skipped_full": self.skipped_full,
                "rim_excluded": self.rim_excluded,
                "violated_at_scale": self.violated_at_scale}


@dataclass(frozen=True)
class DoublingReport:
    M_d: int
    covering_table: dict
    assouad_fit: float
    below_resolution: int

    def as_dict(self):
        return {"M_d": self.M_d,
                "covering_table": {"%g,%g" % k: int(v)
                                   for k, v in self.covering_table.items()},
                "assouad_fit": self.assouad_fit,
                "below_resolution": self.below_resolution}


def growth_fit(g, vm):
    """Least-squares fit of ln #B_n over the window [2, R_max - 2]."""
    if g.truncation_radius < 4:
        raise ValueError("truncation radius must be >= 4 for a growth fit")
    lo, hi = 2, g.truncation_radius - 2
    ns = np.arange(0, g.truncation_radius + 1)
    counts = np.array([np.count_nonzero(g.depth <= n) for n in ns])
    w = slice(lo, hi + 1)
    logs = np.log(counts[w])
    slope, intercept = np.polyfit(ns[w], logs, 1)
    # exponential growth has constant log-increments; a collapsing
    # second-half slope marks polynomial growth
    half = (hi - lo) // 2
    s1 = (logs[half] - logs[0]) / max(half, 1)
    s2 = (logs[-1] - logs[half]) / max(len(logs) - 1 - half, 1)
    sub = slope < 0.02 or s2 < 0.5 * s1
    D = max(float(slope / vm.epsilon), 0.0)
    C_D = float(np.max(counts[w] * np.exp(-vm.epsilon * D * ns[w])))
    C_D = max(C_D, 1.0)
    return GrowthFit(table={int(n): int(c) for n, c in zip(ns, counts)},
                     D=D, C_D=C_D, fit_window=(lo, hi),
                     epsilon=vm.epsilon, subexponential=bool(sub))


def pipeline_growth_exponent(gf, dr=None, margin=0.1):
    """Exponent used downstream: max of the growth fit and the covering
    fit, plus a safety margin; floored at 1 for subexponential controls."""
    d = gf.D if dr is None else max(gf.D, dr.assouad_fit)
    d += margin
    return max(d, 1.0) if gf.subexponential else d


# ---------------------------------------------------------------------------
# Isoperimetric scan
# ---------------------------------------------------------------------------

def _random_connected(g, size, rng, allowed):
    start = int(rng.choice(allowed))
    members = {start}
    frontier = [start]
    allowed_set = set(allowed.tolist())
    while len(members) < size and frontier:
        u = frontier[int(rng.integers(len(frontier)))]
        nbrs = [int(w) for w in g.neighbors(u)
                if int(w) not in members and int(w) in allowed_set]
        if not nbrs:
            frontier.remove(u)
            continue
        w = nbrs[int(rng.integers(len(nbrs)))]
        members.add(w)
        frontier.append(w)
    return frozenset(members)


def _family_sets(g, family, rng, allowed, k=200, sizes=(3, 30)):
    if family == "balls":
        for n in range(0, g.truncation_radius):
            yield frozenset(graphs.ball(g, g.base_vertex, n))
        centers = rng.choice(allowed, size=min(10, allowed.size),
                             replace=False)
        for c in centers:
            for n in (1, 2):
                yield frozenset(graphs.ball(g, int(c), n))
    elif family == "cones":
        # subtree-style sets: everything past a vertex, away from the base
        picks = rng.choice(allowed, size=min(30, allowed.size), replace=False)
        cap = g.truncation_radius - 2
        for u in picks:
            du = g.distances_from(int(u))
            past = (g.depth == du + g.depth[int(u)]) & (g.depth <= cap)
            yield frozenset(np.flatnonzero(past))
    elif family == "random_connected":
        for _ in range(k):
            size = int(rng.integers(sizes[0], sizes[1] + 1))
            yield _random_connected(g, size, rng, allowed)
    elif family == "exhaustive":
        if g.n > 20:
            raise ValueError("exhaustive family only for <= 20 vertices")
        for r in range(1, g.n + 1):
            for combo in itertools.combinations(range(g.n), r):
                yield frozenset(combo)
    else:
        raise ValueError("unknown family %r" % family)


def ip_scan(g, D, family="balls", sample=200, sizes=(3, 30), seed=0,
            exclude_rim=True):
    """Max over a family of sets of (#B)^(4D/(4D+1)) / #outer-boundary.

    Sets touching the truncation rim are excluded by default (their
    boundary counts are truncation artifacts).  The violated-at-scale flag
    fires when the worst ratio keeps growing with set size, as on the
    line, where the boundary count is bounded.
    """
    if D <= 0:
        raise ValueError("need a positive growth exponent")
    expo = 4.0 * D / (4.0 * D + 1.0)
    rng = np.random.default_rng(seed)
    rim = frozenset(graphs.sphere(g, g.base_vertex, g.truncation_radius))
    near_rim = frozenset(graphs.outer_set(g, rim)) if exclude_rim \
        else frozenset()
    allowed = np.flatnonzero([u not in near_rim for u in range(g.n)])
    if allowed.size == 0:
        raise ValueError("rim exclusion leaves no vertices")
    best = 0.0
    worst = frozenset()
    tested = skipped = excluded = 0
    by_size = {}
    for B in _family_sets(g, family, rng, allowed, k=sample, sizes=sizes):
        if not B:
            continue
        if exclude_rim and (B & near_rim):
            excluded += 1
            continue
        out = graphs.boundary_out(g, B)
        if not out:
            skipped += 1
            continue
        tested += 1
        ratio = len(B) ** expo / len(out)
        by_size.setdefault(len(B), 0.0)
        by_size[len(B)] = max(by_size[len(B)], ratio)
        if ratio > best:
            best = ratio
            worst = B
    if tested == 0:
        raise ValueError("empty family")
    violated = False
    szs = sorted(s for s in by_size if s >= 2)
    if len(szs) >= 4 and szs[-1] >= 2 * szs[0]:
        xs = np.log(szs)
        ys = np.log([by_size[s] for s in szs])
        trend = float(np.polyfit(xs, ys, 1)[0])
        violated = trend > 0.1 and by_size[szs[-1]] > 2.0
    return IpReport(exponent=expo, C0=max(best, 1.0), worst_set=worst,
                    family_spec=family, tested=tested, skipped_full=skipped,
                    rim_excluded=excluded, violated_at_scale=bool(violated))


def ip_scan_many(g, D, families=("balls", "cones", "random_connected"),
                 sample=200, seed=0):
    """Run several families; merge to the overall max C0."""
    reports = {f: ip_scan(g, D, family=f, sample=sample, seed=seed)
               for f in families}
    best = max(reports.values(), key=lambda r: r.C0)
    merged = IpReport(exponent=best.exponent, C0=best.C0,
                      worst_set=best.worst_set,
                      family_spec="+".join(families),
                      tested=sum(r.tested for r in reports.values()),
                      skipped_full=sum(r.skipped_full
                                       for r in reports.values()),
                      rim_excluded=sum(r.rim_excluded
                                       for r in reports.values()),
                      violated_at_scale=any(r.violated_at_scale
                                            for r in reports.values()))
    return merged, reports


# ---------------------------------------------------------------------------
# Doubling / covering probes on the horizon
# ---------------------------------------------------------------------------

def greedy_cover(dm, members, r):
    """Farthest-point covering of `members` by balls of radius r; returns
    the chosen centers (an upper bound on the covering number)."""
    members = np.asarray(sorted(members))
    if members.size == 0:
        return []
    centers = [int(members[0])]
    dist = dm[centers[0]][members].copy()
    while dist.max() > r:
        nxt = int(members[int(np.argmax(dist))])
        if nxt in centers:
            # r is below the self-distance of a quasi-metric point; no
            # additional center can improve the cover
            break
        centers.append(nxt)
        dist = np.minimum(dist, dm[nxt][members])
    return centers


def exact_cover_number(dm, members, r):
    """Brute-force minimum covering number; only for tiny proxy sets."""
    members = sorted(members)
    if len(members) == 0:
        return 0
    if len(members) > 32:
        raise ValueError("exact covering only for <= 32 proxies")
    balls = {c: frozenset(m for m in members if dm[c][m] <= r)
             for c in members}
    for k in range(1, len(members) + 1):
        for centers in itertools.combinations(members, k):
            covered = set()
            for c in centers:
                covered |= balls[c]
            if covered >= set(members):
                return k
    return len(members)


def doubling_probe(h, vm, radii=None, sample_centers=5, seed=0):
    """Greedy covering numbers N_r(B_R) for sampled centers and dyadic
    (R, r) pairs; M_d is the worst doubling count, assouad_fit the slope
    of ln N against ln(R/r)."""
    dm = h.distance_matrix(vm)
    res = h.resolution(vm)
    if radii is None:
        top = float(dm.max())
        radii = [top / 2 ** k for k in range(6) if top / 2 ** k > 0]
    rng = np.random.default_rng(seed)
    centers = rng.choice(h.size, size=min(sample_centers, h.size),
                         replace=False)
    table = {}
    m_d = 1
    logs = []
    below = 0
    for c in centers:
        for R in radii:
            members = np.flatnonzero(dm[int(c)] <= R)
            for r in radii:
                if r >= R:
                    continue
                if r < res:
                    below += 1
                    continue
                n_cov = len(greedy_cover(dm, members, r))
                table[(float(R), float(r))] = max(
                    table.get((float(R), float(r)), 0), n_cov)
                if abs(R - 2 * r) < 1e-12:
                    m_d = max(m_d, n_cov)
                if n_cov > 0:
                    logs.append((np.log(R / r), np.log(n_cov)))
    if len(logs) >= 2 and len({x for x, _ in logs}) >= 2:
        xs, ys = np.array(logs).T
        fit = float(np.polyfit(xs, ys, 1)[0])
    else:
        fit = 0.0
    return DoublingReport(M_d=int(m_d), covering_table=table,
                          assouad_fit=fit, below_resolution=below)
