import numpy as np
import pytest

import oracle_elimination
from acgraph import graphs, potential, variational


def _field(g, values):
    return variational.Field(values=np.asarray(values, dtype=float),
                             graph_id=g.graph_id)


class TestLaplacian:
    def test_star_center(self, quartic):
        g = graphs.build_tree(3, 1)
        x = _field(g, [0.0, 1.0, 1.0, 1.0])
        assert variational.laplacian(g, x, 0) == pytest.approx(3.0)

    def test_constant_field_zero(self, tree36, rng):
        x = _field(tree36, np.full(tree36.n, 0.7))
        for u in rng.integers(0, tree36.n, 10):
            if tree36.interior_mask()[u]:
                assert variational.laplacian(tree36, x, int(u)) == 0.0

    def test_rim_vertex_rejected(self, tree36):
        x = _field(tree36, np.zeros(tree36.n))
        rim = int(np.flatnonzero(tree36.depth == 6)[0])
        with pytest.raises(ValueError, match="clipped"):
            variational.laplacian(tree36, x, rim)

    def test_field_version_matches_scalar(self, tiling376, rng):
        x = _field(tiling376, rng.uniform(-1, 1, tiling376.n))
        idx = np.flatnonzero(tiling376.interior_mask())[:50]
        lap = variational.laplacian_field(tiling376, x, idx)
        for i, u in enumerate(idx):
            assert lap[i] == pytest.approx(
                variational.laplacian(tiling376, x, int(u)))


class TestEnergy:
    def test_constant_at_well_zero(self, tree36, quartic):
        x = _field(tree36, np.full(tree36.n, -1.0))
        B = graphs.ball(tree36, 0, 3)
        assert variational.energy(tree36, x, B, quartic) == pytest.approx(0.0)

    def test_single_edge_jump(self, quartic):
        # path 0-1-2 with values (0, 1, 0) seen from the middle vertex:
        # two unit jumps at weight 1/4 each, plus V(1) = 0
        g = graphs.build_control_line(2)
        vals = np.zeros(g.n)
        vals[g.base_vertex] = 1.0
        x = _field(g, vals)
        e = variational.energy(g, x, {g.base_vertex}, quartic)
        assert e == pytest.approx(0.5)

    def test_region_touching_rim_rejected(self, tree36, quartic):
        x = _field(tree36, np.zeros(tree36.n))
        rim = int(np.flatnonzero(tree36.depth == 6)[0])
        with pytest.raises(ValueError, match="clipped"):
            variational.energy(tree36, x, {rim}, quartic)

    def test_empty_region_zero(self, tree36, quartic):
        x = _field(tree36, np.zeros(tree36.n))
        assert variational.energy(tree36, x, set(), quartic) == 0.0

    def test_additive_in_vertices(self, tree36, quartic, rng):
        x = _field(tree36, rng.uniform(-1, 1, tree36.n))
        B = graphs.ball(tree36, 0, 3)
        split = set(list(B)[: len(B) // 2])
        rest = set(B) - split
        assert variational.energy(tree36, x, B, quartic) == pytest.approx(
            variational.energy(tree36, x, split, quartic)
            + variational.energy(tree36, x, rest, quartic))


class TestResidual:
    def test_single_free_vertex_explicit(self, quartic):
        g = graphs.build_control_line(2)
        vals = np.zeros(g.n)
        vals[g.base_vertex] = -1.0 / np.sqrt(2.0)
        x = _field(g, vals)
        r = variational.el_residual(g, x, {g.base_vertex}, quartic)
        # phi'(t) = 2t + 4t^3 - 4t vanishes at t = -1/sqrt(2)
        assert r < 1e-12

    def test_stationary_after_solve(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 4)
        res = variational.solve_dirichlet(tree36, B, {}, quartic)
        r = variational.el_residual(tree36, res.field, B, quartic)
        assert r <= 1e-10


class TestSolver:
    def test_residual_tolerance_met(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 4)
        f = {int(u): 1.0 for u in graphs.boundary_out(tree36, B)}
        res = variational.solve_dirichlet(tree36, B, f, quartic)
        assert res.converged
        assert res.residual <= 1e-10
        assert res.clamped

    def test_constant_boundary_constant_solution(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 4)
        f = {int(u): 1.0 for u in graphs.boundary_out(tree36, B)}
        res = variational.solve_dirichlet(tree36, B, f, quartic)
        assert np.allclose(res.field.values[sorted(B)], 1.0, atol=1e-8)

    def test_energy_trace_monotone(self, tiling376, quartic):
        B = graphs.ball(tiling376, 0, 4)
        f = {int(u): (1.0 if i % 2 else -1.0)
             for i, u in enumerate(sorted(graphs.boundary_out(tiling376, B)))}
        res = variational.solve_dirichlet(tiling376, B, f, quartic)
        trace = np.asarray(res.energy_trace)
        assert np.all(np.diff(trace) <= 1e-10)

    def test_empty_region_rejected(self, tree36, quartic):
        with pytest.raises(ValueError):
            variational.solve_dirichlet(tree36, set(), {}, quartic)

    def test_rim_region_rejected(self, tree36, quartic):
        rim = int(np.flatnonzero(tree36.depth == 6)[0])
        with pytest.raises(ValueError, match="clipped"):
            variational.solve_dirichlet(tree36, {rim}, {}, quartic)

    def test_python_backend_same_answer(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 3)
        f = {int(u): 0.5 for u in graphs.boundary_out(tree36, B)}
        a = variational.solve_dirichlet(tree36, B, f, quartic)
        b = variational.solve_dirichlet(
            tree36, B, f, quartic,
            variational.SolverConfig(force_python=True))
        assert a.backend == "compiled" and b.backend == "python"
        assert np.allclose(a.field.values, b.field.values, atol=1e-9)

    def test_out_of_interval_boundary_widens_box(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 2)
        f = {int(u): 1.5 for u in graphs.boundary_out(tree36, B)}
        res = variational.solve_dirichlet(tree36, B, f, quartic)
        assert not res.clamped
        assert res.field.values[sorted(B)].max() > 1.0

    def test_multistart_escapes_wrong_well(self, quartic):
        # a long line with ends at +1: the all-(-1) start must be beaten
        g = graphs.build_control_line(6)
        B = frozenset(np.flatnonzero(g.depth <= 2).tolist())
        f = {int(u): 1.0 for u in graphs.boundary_out(g, B)}
        res = variational.solve_dirichlet(g, B, f, quartic)
        assert res.field.values[g.base_vertex] > 0.9


class TestOracle:
    def test_single_vertex_exact(self, quartic):
        g = graphs.build_control_line(2)
        fixed = np.zeros(g.n)
        vals = oracle_elimination.polished_minimize(
            g, [g.base_vertex], fixed, quartic)
        assert vals[0] == pytest.approx(-1.0 / np.sqrt(2.0), abs=1e-8)

    def test_grid_value_matches_brute_force(self, quartic, rng):
        # tiny instance where full enumeration over a coarse grid is easy
        g = graphs.build_tree(3, 2)
        free = [0, 1]
        fixed = rng.uniform(-1, 1, g.n)
        vals, total = oracle_elimination.grid_minimize(
            g, free, fixed, quartic, grid=9)
        ts = np.linspace(-1.0, 1.0, 9)
        best = np.inf
        best_pair = None
        for a in ts:
            for b in ts:
                trial = fixed.copy()
                trial[0], trial[1] = a, b
                fx = variational.Field(values=trial)
                region = np.unique(np.concatenate(
                    [np.array([0, 1]),
                     np.fromiter(graphs.boundary_out(g, {0, 1}),
                                 dtype=np.int64)]))
                e = variational.region_energy(g, fx, region, quartic)
                if e < best:
                    best, best_pair = e, (a, b)
        assert vals == pytest.approx(best_pair)

    def test_solver_matches_oracle(self, quartic):
        # seeded loop over random small free sets on a tree
        g = graphs.build_tree(3, 4)
        interior = np.flatnonzero(g.interior_mask())
        for seed in range(10):
            r = np.random.default_rng(seed)
            start = int(r.choice(interior))
            free = {start}
            while len(free) < 5:
                u = int(r.choice(sorted(free)))
                nbrs = [int(w) for w in g.neighbors(u)
                        if g.interior_mask()[w] and int(w) not in free]
                if not nbrs:
                    break
                free.add(nbrs[int(r.integers(len(nbrs)))])
            fixed = r.uniform(-1.0, 1.0, g.n)
            res = variational.solve_dirichlet(g, free, fixed, quartic)
            oracle = oracle_elimination.polished_minimize(
                g, free, fixed, quartic)
            assert np.allclose(res.field.values[sorted(free)], oracle,
                               atol=1e-6)


class TestLocalMinimality:
    def test_solution_is_local_min(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 3)
        f = {int(u): -1.0 for u in graphs.boundary_out(tree36, B)}
        res = variational.solve_dirichlet(tree36, B, f, quartic)
        gap = variational.verify_local_minimality(tree36, res.field, B,
                                                  quartic, trials=300)
        assert gap >= -1e-9

    def test_non_minimum_detected(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 3)
        x = _field(tree36, np.zeros(tree36.n))  # unstable hilltop of V
        gap = variational.verify_local_minimality(tree36, x, B, quartic,
                                                  trials=300, scale=0.3)
        assert gap < -1e-6


class TestMinMax:
    def test_submodularity(self, tree36, quartic, rng):
        B = graphs.ball(tree36, 0, 4)
        for _ in range(20):
            x = _field(tree36, rng.uniform(-1, 1, tree36.n))
            y = _field(tree36, rng.uniform(-1, 1, tree36.n))
            lhs, rhs = variational.minmax_check(tree36, x, y, B, quartic)
            assert lhs >= rhs - 1e-9

    def test_equality_for_ordered_fields(self, tree36, quartic, rng):
        B = graphs.ball(tree36, 0, 4)
        lowv = rng.uniform(-1, 0, tree36.n)
        x = _field(tree36, lowv)
        y = _field(tree36, lowv + 0.5)
        lhs, rhs = variational.minmax_check(tree36, x, y, B, quartic)
        assert lhs == pytest.approx(rhs)


class TestComparison:
    def test_ordered_boundary_ordered_solutions(self, tree36, quartic, rng):
        B = graphs.ball(tree36, 0, 3)
        out = sorted(graphs.boundary_out(tree36, B))
        for _ in range(10):
            base = rng.uniform(-1.0, 0.5, len(out))
            f_low = {int(u): float(v) for u, v in zip(out, base)}
            f_high = {int(u): float(v + rng.uniform(0, 0.5))
                      for u, v in zip(out, base)}
            rep, _, _ = variational.comparison_check(tree36, B, f_low,
                                                     f_high, quartic)
            assert rep.ordered
            assert not rep.minimality_suspect or rep.identical

    def test_identical_data_identical_solutions(self, tree36, quartic):
        B = graphs.ball(tree36, 0, 3)
        f = {int(u): 0.3 for u in graphs.boundary_out(tree36, B)}
        rep, _, _ = variational.comparison_check(tree36, B, f, f, quartic)
        assert rep.identical


class TestTrapping:
    def test_trapped_boundary_trapped_solution(self, tiling376, quartic,
                                               rng):
        B = graphs.ball(tiling376, 0, 3)
        out = sorted(graphs.boundary_out(tiling376, B))
        for _ in range(5):
            f = {int(u): float(rng.uniform(-1, 1)) for u in out}
            res = variational.solve_dirichlet(tiling376, B, f, quartic)
            assert variational.trapping_check(tiling376, res.field, B,
                                              quartic)

    def test_untrapped_field_fails(self, tree36, quartic):
        x = _field(tree36, np.full(tree36.n, 1.5))
        B = graphs.ball(tree36, 0, 2)
        assert not variational.trapping_check(tree36, x, B, quartic)


class TestTransitionSets:
    def test_partition_by_value(self, tree36, quartic, quartic_constants,
                                rng):
        B = graphs.ball(tree36, 0, 4)
        x = _field(tree36, rng.uniform(-1, 1, tree36.n))
        rho = 0.05
        ts = variational.transition_sets(tree36, x, B, rho,
                                         quartic_constants, quartic)
        assert not (ts.B_l & ts.B_h)
        cut = 1.0 - 2 * quartic_constants.b * rho
        for u in ts.B_l:
            assert x.values[u] < cut
        for u in ts.B_h:
            assert cut <= x.values[u] < 1.0 - rho

    def test_constant_high_field_empty(self, tree36, quartic,
                                       quartic_constants):
        x = _field(tree36, np.full(tree36.n, 1.0))
        B = graphs.ball(tree36, 0, 4)
        ts = variational.transition_sets(tree36, x, B, 0.05,
                                         quartic_constants, quartic)
        assert not ts.B_l and not ts.B_h

    def test_k0_positive_and_monotone_in_s(self, quartic,
                                           quartic_constants):
        g3 = graphs.build_tree(3, 3)
        g4 = graphs.build_tree(4, 3)
        k3 = variational.derive_k0(g3, 0.05, quartic_constants, quartic)
        k4 = variational.derive_k0(g4, 0.05, quartic_constants, quartic)
        assert 0 < k3 <= k4

    def test_k0_rejects_large_rho(self, tree36, quartic, quartic_constants):
        with pytest.raises(ValueError):
            variational.derive_k0(tree36, 0.51, quartic_constants, quartic)

    def test_ts_inequality_on_solutions(self, tree36, quartic,
                                        quartic_constants, rng):
        B = graphs.ball(tree36, 0, 4)
        out = sorted(graphs.boundary_out(tree36, B))
        rho = min(quartic_constants.rho0, 0.1)
        for seed in range(5):
            r = np.random.default_rng(seed)
            f = {int(u): float(r.uniform(-1, 1)) for u in out}
            res = variational.solve_dirichlet(tree36, B, f, quartic)
            D = graphs.ball(tree36, 0, 3)
            rep = variational.ts_inequality_check(
                tree36, res.field, B, D, rho, quartic_constants, quartic)
            assert rep.holds

    def test_component_boundary_on_solutions(self, tree36, quartic,
                                             quartic_constants, rng):
        B = graphs.ball(tree36, 0, 4)
        out = sorted(graphs.boundary_out(tree36, B))
        rho = min(quartic_constants.rho0, 0.1)
        for seed in range(5):
            r = np.random.default_rng(seed)
            f = {int(u): float(r.choice([-1.0, 1.0])) for u in out}
            res = variational.solve_dirichlet(tree36, B, f, quartic)
            assert variational.component_boundary_check(
                tree36, res.field, B, rho, quartic_constants, quartic)
