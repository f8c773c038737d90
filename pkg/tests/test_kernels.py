import numpy as np
import pytest

from acgraph import graphs, kernels, potential


def test_compiled_kernel_available():
    # the build ships the compiled sweep; the Python path is a fallback
    assert kernels.HAVE_COMPILED


def test_backend_selection(tree36, quartic):
    _, backend = kernels.make_sweeper(tree36, quartic)
    assert backend == "compiled"
    _, backend = kernels.make_sweeper(tree36, quartic, force_python=True)
    assert backend == "python"


def test_non_quartic_falls_back(tree36, quartic):
    from dataclasses import replace
    other = replace(quartic, kind="custom")
    _, backend = kernels.make_sweeper(tree36, other)
    assert backend == "python"


class TestEquivalence:
    def _run_both(self, g, P, init, sweeps=5):
        free = np.flatnonzero(g.interior_mask())
        results = {}
        for force in (False, True):
            sweep, backend = kernels.make_sweeper(g, P, force_python=force)
            vals = init.copy()
            changes = [sweep(vals, free, P.c0, P.c1) for _ in range(sweeps)]
            results[backend] = (vals, changes)
        return results

    def test_identical_on_tree(self, tree36, quartic, rng):
        init = rng.uniform(-1.0, 1.0, tree36.n)
        res = self._run_both(tree36, quartic, init)
        vc, cc = res["compiled"]
        vp, cp = res["python"]
        assert np.allclose(vc, vp, atol=1e-12)
        assert np.allclose(cc, cp, atol=1e-12)

    def test_identical_on_tiling(self, tiling376, quartic, rng):
        init = rng.uniform(-1.0, 1.0, tiling376.n)
        res = self._run_both(tiling376, quartic, init, sweeps=3)
        assert np.allclose(res["compiled"][0], res["python"][0], atol=1e-12)

    def test_identical_on_rescaled_interval(self, rng):
        P = potential.quartic(0.0, 3.0)
        g = graphs.build_tree(3, 5)
        init = rng.uniform(0.0, 3.0, g.n)
        res = self._run_both(g, P, init)
        assert np.allclose(res["compiled"][0], res["python"][0], atol=1e-12)

    def test_seeded_loop_many_inits(self, tree36, quartic):
        for seed in range(10):
            r = np.random.default_rng(seed)
            init = r.uniform(-1.0, 1.0, tree36.n)
            res = self._run_both(tree36, quartic, init, sweeps=2)
            assert np.allclose(res["compiled"][0], res["python"][0],
                               atol=1e-12)


class TestSweepBehaviour:
    def test_change_shrinks(self, tree36, quartic, rng):
        sweep, _ = kernels.make_sweeper(tree36, quartic)
        free = np.flatnonzero(tree36.interior_mask())
        vals = rng.uniform(-1.0, 1.0, tree36.n)
        changes = [sweep(vals, free, -1.0, 1.0) for _ in range(30)]
        assert changes[-1] < changes[0]
        assert changes[-1] < 1e-6

    def test_respects_bounds(self, tree36, quartic, rng):
        sweep, _ = kernels.make_sweeper(tree36, quartic)
        free = np.flatnonzero(tree36.interior_mask())
        vals = rng.uniform(-1.0, 1.0, tree36.n)
        for _ in range(5):
            sweep(vals, free, -1.0, 1.0)
        assert vals.min() >= -1.0 and vals.max() <= 1.0

    def test_boundary_untouched(self, tree36, quartic, rng):
        sweep, _ = kernels.make_sweeper(tree36, quartic)
        free = np.flatnonzero(tree36.interior_mask())
        vals = rng.uniform(-1.0, 1.0, tree36.n)
        fixed = np.setdiff1d(np.arange(tree36.n), free)
        before = vals[fixed].copy()
        sweep(vals, free, -1.0, 1.0)
        assert np.array_equal(vals[fixed], before)

    def test_empty_free_set_no_change(self, tree36, quartic, rng):
        sweep, _ = kernels.make_sweeper(tree36, quartic)
        vals = rng.uniform(-1.0, 1.0, tree36.n)
        before = vals.copy()
        change = sweep(vals, np.empty(0, dtype=np.int64), -1.0, 1.0)
        assert change == 0.0
        assert np.array_equal(vals, before)

    def test_single_vertex_explicit_minimizer(self, quartic):
        # path of 3 vertices, ends fixed at 0: phi(t) = t^2 + (1-t^2)^2,
        # minimized at t = +-1/sqrt(2); smallest-t tie-break picks the
        # negative root
        g = graphs.build_control_line(2)
        sweep, _ = kernels.make_sweeper(g, quartic)
        vals = np.zeros(g.n)
        free = np.array([g.base_vertex], dtype=np.int64)
        sweep(vals, free, -1.0, 1.0)
        assert vals[g.base_vertex] == pytest.approx(-1.0 / np.sqrt(2.0),
                                                    abs=1e-10)

    def test_python_kernel_same_minimizer(self, quartic):
        g = graphs.build_control_line(2)
        sweep, backend = kernels.make_sweeper(g, quartic, force_python=True)
        assert backend == "python"
        vals = np.zeros(g.n)
        sweep(vals, np.array([g.base_vertex], dtype=np.int64), -1.0, 1.0)
        assert vals[g.base_vertex] == pytest.approx(-1.0 / np.sqrt(2.0),
                                                    abs=1e-10)
