import numpy as np
import pytest

from acgraph import boundary, geometry, graphs, pipeline, potential, \
    variational


@pytest.fixture(scope="module")
def tree_setup(tree36):
    g = tree36
    h = boundary.horizon(g, 6, 0.0)
    vm = geometry.VisualMetric(epsilon=0.3, lam=1.0, horizon_radius=6,
                               relaxed=True)
    sc = boundary.fit_shadow_constants(g, h, vm, sample=100)
    return g, h, vm, sc


@pytest.fixture(scope="module")
def tree_split(tree_setup):
    g, h, vm, sc = tree_setup
    return pipeline.make_split(h, vm, {"kind": "half"}, sc=sc)


@pytest.fixture(scope="module")
def tree_consts(tree_setup):
    _, h, vm, sc = tree_setup
    return pipeline.derive_pipeline_constants(
        r=0.5, rho=0.1, vm=vm, gf_D=2.41, C_D=1.5, C0=1.0, k0=50.0, sc=sc)


class TestSplit:
    def test_half_split_partitions(self, tree_setup, tree_split):
        _, h, _, _ = tree_setup
        s = tree_split
        assert s.D0 | s.D1 == frozenset(range(h.size))
        assert s.D0 & s.D1 == s.frontier == frozenset()
        # one of three root subtrees on one side: a third of the leaves
        assert len(s.D1) == h.size // 3

    def test_subtree_split_two_children(self, tree_setup):
        _, h, vm, sc = tree_setup
        s = pipeline.make_split(h, vm, {"kind": "subtree",
                                        "children": [0, 1]}, sc=sc)
        assert len(s.D1) == 2 * h.size // 3

    def test_ball_split(self, tree_setup):
        _, h, vm, sc = tree_setup
        s = pipeline.make_split(h, vm, {"kind": "ball", "center": 0,
                                        "r": 0.5}, sc=sc)
        assert 0 in s.D1
        assert len(s.D0) > 0

    def test_all_children_rejected(self, tree_setup):
        _, h, vm, sc = tree_setup
        with pytest.raises(ValueError, match="empty side"):
            pipeline.make_split(h, vm, {"kind": "subtree",
                                        "children": [0, 1, 2]}, sc=sc)

    def test_unknown_kind_rejected(self, tree_setup):
        _, h, vm, sc = tree_setup
        with pytest.raises(ValueError, match="unknown split kind"):
            pipeline.make_split(h, vm, {"kind": "nope"}, sc=sc)

    def test_tiny_ball_side_rejected(self, tree_setup):
        _, h, vm, sc = tree_setup
        # demand a visual ball wider than either side can contain
        with pytest.raises(ValueError, match="no visual ball"):
            pipeline.make_split(h, vm, {"kind": "half"}, sc=sc, r_min=2.0)

    def test_frontier_excluded_from_interiors(self, tree_setup):
        _, h, vm, sc = tree_setup
        s = pipeline.make_split(h, vm, {"kind": "half",
                                        "frontier": [0]}, sc=sc)
        assert 0 in s.D0 and 0 in s.D1
        assert 0 not in s.interior0() and 0 not in s.interior1()


class TestTildeX:
    def test_two_valued(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        x = pipeline.tilde_x(g, h, tree_split, quartic)
        vals = set(np.unique(x.values).tolist())
        assert vals == {-1.0, 1.0}

    def test_cone_side_gets_c1(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        x = pipeline.tilde_x(g, h, tree_split, quartic)
        cone1 = h.cone(tree_split.interior1())
        assert np.all(x.values[sorted(cone1)] == 1.0)
        rest = sorted(frozenset(range(g.n)) - cone1)
        assert np.all(x.values[rest] == -1.0)

    def test_base_vertex_low(self, tree_setup, tree_split, quartic):
        # the base vertex straddles both sides, so it is not in the cone
        g, h, _, _ = tree_setup
        x = pipeline.tilde_x(g, h, tree_split, quartic)
        assert x.values[g.base_vertex] == -1.0


class TestExhaustion:
    def test_telemetry_and_deltas(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        fields, rep = pipeline.exhaustion_solve(g, h, tree_split,
                                                [2, 3, 4, 5], quartic)
        assert len(fields) == 4
        assert len(rep.window_deltas) == 3
        assert rep.window_radius == 2
        assert all(t["converged"] for t in rep.telemetry)
        assert not rep.diverging

    def test_single_n_no_deltas(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        fields, rep = pipeline.exhaustion_solve(g, h, tree_split, [3],
                                                quartic)
        assert len(fields) == 1
        assert rep.window_deltas == []
        assert not rep.non_monotone

    def test_empty_list_rejected(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        with pytest.raises(ValueError):
            pipeline.exhaustion_solve(g, h, tree_split, [], quartic)

    def test_solution_interpolates_phases(self, tree_setup, tree_split,
                                          quartic):
        g, h, _, _ = tree_setup
        fields, _ = pipeline.exhaustion_solve(g, h, tree_split, [5], quartic)
        v = fields[0].values
        assert v.min() >= -1.0 and v.max() <= 1.0
        assert v.max() > 0.9 and v.min() < -0.9


class TestConstants:
    def test_r1_is_basel_first_term(self, tree_consts):
        assert tree_consts.r1 == pytest.approx(6 * 0.5 / np.pi ** 2)
        assert tree_consts.r0 == pytest.approx(tree_consts.r1 / 2)

    def test_r_seq_converges_to_r(self, tree_setup):
        _, _, vm, sc = tree_setup
        c = pipeline.derive_pipeline_constants(
            r=0.5, rho=0.1, vm=vm, gf_D=2.41, C_D=1.5, C0=1.0, k0=50.0,
            sc=sc, terms=200)
        assert c.r_seq[-1] == pytest.approx(0.5, abs=1e-2)
        assert all(a < b for a, b in zip(c.r_seq, c.r_seq[1:]))

    def test_n_seq_ratio(self, tree_consts):
        ratio = (tree_consts.D + 0.5) / (tree_consts.D + 0.25)
        for a, b in zip(tree_consts.n_seq, tree_consts.n_seq[1:]):
            assert b / a == pytest.approx(ratio)
        assert tree_consts.n_seq[0] == tree_consts.k3

    def test_ratio_at_unit_exponent(self, tree_setup):
        _, _, vm, sc = tree_setup
        c = pipeline.derive_pipeline_constants(
            r=0.5, rho=0.1, vm=vm, gf_D=1.0, C_D=1.0, C0=1.0, k0=10.0,
            sc=sc)
        assert c.n_seq[1] / c.n_seq[0] == pytest.approx(1.2)

    def test_theoretical_flag(self, tree_consts):
        # n_bar explodes for any realistic constant chain
        assert tree_consts.n_bar > pipeline.FEASIBLE_N_BAR
        assert tree_consts.theoretical_only
        assert tree_consts.n0 == 2.0 * tree_consts.n_bar

    def test_t_n_matches_width_formula(self, tree_setup, tree_consts):
        _, _, vm, sc = tree_setup
        for n in (1, 3, 5):
            assert tree_consts.t_n(n) == pytest.approx(
                boundary.separating_width(vm, sc, n))

    def test_invalid_r_rejected(self, tree_setup):
        _, _, vm, sc = tree_setup
        with pytest.raises(ValueError):
            pipeline.derive_pipeline_constants(
                r=0.0, rho=0.1, vm=vm, gf_D=2.0, C_D=1.0, C0=1.0, k0=1.0,
                sc=sc)

    def test_as_dict_round_trip(self, tree_consts):
        d = tree_consts.as_dict()
        assert d["r"] == 0.5
        assert d["n_seq"][0] == tree_consts.k3
        assert d["theoretical_only"] is True


class TestMonitors:
    def _solved(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        fields, _ = pipeline.exhaustion_solve(g, h, tree_split, [5], quartic)
        return fields[0]

    def test_main_lemma_vacuous_at_desk_scale(self, tree_setup, tree_split,
                                              tree_consts, quartic,
                                              quartic_constants):
        g, h, vm, _ = tree_setup
        x = self._solved(tree_setup, tree_split, quartic)
        probe = pipeline.default_probes(h, vm, tree_split)[1][0]
        rows, vacuous = pipeline.main_lemma_monitor(
            g, h, vm, x, tree_consts, probe, 0.1, quartic_constants,
            quartic, N=5, n_seq=[1, 2, 3, 4])
        assert rows
        assert vacuous

    def test_cone_inclusion(self, tree_setup, tree_split, tree_consts):
        g, h, vm, _ = tree_setup
        probe = pipeline.default_probes(h, vm, tree_split)[1][0]
        ok, status = pipeline.cone_inclusion_check(g, h, vm, tree_consts,
                                                   probe, 1)
        assert ok
        assert status in ("holds", "vacuous")

    def test_cone_inclusion_bad_radii(self, tree_setup, tree_consts):
        from dataclasses import replace
        g, h, vm, _ = tree_setup
        bad = replace(tree_consts, r0=tree_consts.r1)
        with pytest.raises(ValueError):
            pipeline.cone_inclusion_check(g, h, vm, bad, 0, 1)

    def test_values_at_infinity(self, tree_setup, tree_split, tree_consts,
                                quartic, quartic_constants):
        g, h, vm, _ = tree_setup
        x = self._solved(tree_setup, tree_split, quartic)
        probe = pipeline.default_probes(h, vm, tree_split)[1][0]
        rep = pipeline.values_at_infinity_check(
            g, h, vm, x, tree_consts, probe, 0.1, quartic_constants,
            quartic, N=5, n_bar_override=1)
        assert rep["mechanism_holds"]

    def test_asymptotics_probes(self, tree_setup, tree_split, tree_consts,
                                quartic):
        g, h, vm, _ = tree_setup
        x = self._solved(tree_setup, tree_split, quartic)
        probes = pipeline.default_probes(h, vm, tree_split)
        # r must keep r0 = 3r/pi^2 above the proxy resolution, else the
        # probe's own visual ball is empty
        _, _, vm2, sc = tree_setup
        wide = pipeline.derive_pipeline_constants(
            r=0.7, rho=0.1, vm=vm2, gf_D=2.41, C_D=1.5, C0=1.0, k0=50.0,
            sc=sc)
        rows = pipeline.asymptotics_report(g, h, vm, x, tree_split,
                                           wide, probes,
                                           n0_effective=3, P=quartic)
        assert len(rows) == 2
        for row in rows:
            assert row["sup_deviation"] < 0.1
            assert row["fraction_within"] == 1.0

    def test_asymptotics_frontier_probe_rejected(self, tree_setup,
                                                 tree_consts, quartic):
        g, h, vm, sc = tree_setup
        s = pipeline.make_split(h, vm, {"kind": "half", "frontier": [0]},
                                sc=sc)
        x = variational.Field(values=np.zeros(g.n))
        with pytest.raises(ValueError, match="frontier"):
            pipeline.asymptotics_report(g, h, vm, x, s, tree_consts,
                                        [(0, 1)], n0_effective=3, P=quartic)


class TestSwap:
    def test_mirror_potential_values(self, quartic):
        m = pipeline.mirror_potential(quartic)
        ys = np.linspace(-1, 1, 33)
        assert np.allclose(m.V(ys), quartic.V(-ys))
        assert m.kind == "quartic"  # symmetric wells keep the fast kernel

    def test_mirror_asymmetric_loses_kind(self, quartic):
        from dataclasses import replace
        skew = replace(quartic, V=lambda s: quartic.V(s) + 0.01 * (s + 1))
        m = pipeline.mirror_potential(skew)
        assert m.kind == "custom"

    def test_mirror_split_swaps_sides(self, tree_split):
        m = pipeline.mirror_split(tree_split)
        assert m.D0 == tree_split.D1
        assert m.D1 == tree_split.D0

    def test_swap_symmetry_exact(self, tree_setup, tree_split, quartic):
        g, h, _, _ = tree_setup
        ok, worst = pipeline.swap_check(g, h, tree_split, [3, 4], quartic)
        assert ok
        assert worst <= 1e-6
