"""Command-line entry point: generate | geometry | isoperimetry | solve |
verify, one YAML config per run.

Exit status: 0 all hard checks pass, 1 an assertion failed, 2 invalid
configuration.  Soft findings never change the exit status; they land in
the reports.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import boundary as bd
from . import bundle as bundle_mod
from . import config as config_mod
from . import embedding, geometry, graphs, isoperimetry, pipeline
from . import potential as potential_mod
from . import variational
from .config import ConfigError

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_CONFIG = 2


def _setup(cfg):
    g = config_mod.build_graph(cfg)
    P = config_mod.build_potential(cfg)
    return g, P


def _geometry_stack(cfg, g, want_shadows=True):
    """Geometry report, visual metric, horizon and shadow constants."""
    geo_cfg = cfg["geometry"]
    hr = geo_cfg.get("horizon_radius")
    if hr is None:
        hr = max(1, g.truncation_radius - 1)
    report = geometry.geometry_report(
        g, sample_quadruples=geo_cfg["sample_quadruples"],
        sample_triangles=geo_cfg["sample_triangles"],
        horizon_radius=hr, seed=cfg["seed"])
    eps, relaxed = geometry.choose_epsilon(
        report.delta_used, override=geo_cfg.get("epsilon_override"))
    h = bd.horizon(g, hr, report.delta_used)
    vm0 = geometry.VisualMetric(epsilon=eps, lam=1.0, horizon_radius=hr,
                                relaxed=relaxed)
    lam = geometry.fit_lambda(vm0, g, [int(v) for v in h.vertices],
                              sample=geo_cfg["lambda_samples"],
                              seed=cfg["seed"])
    vm = geometry.VisualMetric(epsilon=eps, lam=lam, horizon_radius=hr,
                               relaxed=relaxed)
    sc = None
    if want_shadows:
        sc = bd.fit_shadow_constants(g, h, vm,
                                     sample=geo_cfg["shadow_samples"],
                                     seed=cfg["seed"])
    return report, vm, h, sc


def cmd_generate(cfg, out):
    g, _ = _setup(cfg)
    graphs.export_edge_list(g, out.path("edges.csv"),
                            out.path("graph_header.json"))
    out.files += ["edges.csv", "graph_header.json"]
    xy = embedding.disk_embedding(g)
    out.write_csv("embedding.csv", ("vertex", "depth", "x", "y"),
                  [(u, int(g.depth[u]), float(xy[u, 0]), float(xy[u, 1]))
                   for u in range(g.n)])
    assert np.all(np.hypot(xy[:, 0], xy[:, 1]) < 1.0)
    return EXIT_OK


def cmd_geometry(cfg, out):
    g, _ = _setup(cfg)
    report, vm, h, sc = _geometry_stack(cfg, g)
    out.write_json("geometry.json", {
        "report": report.as_dict(), "visual_metric": vm.as_dict(),
        "shadow_constants": {"C1": sc.C1, "C2": sc.C2,
                             "vacuous": sc.vacuous},
        "horizon_size": h.size,
        "unresolved_duplicates": len(
            h.unresolved_duplicates(vm, report.delta_used)),
    })
    return EXIT_OK


def cmd_isoperimetry(cfg, out):
    g, _ = _setup(cfg)
    report, vm, h, _ = _geometry_stack(cfg, g, want_shadows=False)
    gf = isoperimetry.growth_fit(g, vm)
    D = isoperimetry.pipeline_growth_exponent(gf)
    ip, per_family = isoperimetry.ip_scan_many(
        g, D, families=tuple(cfg["isoperimetry"]["families"]),
        sample=cfg["isoperimetry"]["sample"], seed=cfg["seed"])
    dr = isoperimetry.doubling_probe(
        h, vm, sample_centers=cfg["isoperimetry"]["doubling_centers"],
        seed=cfg["seed"])
    out.write_json("isoperimetry.json", {
        "growth": gf.as_dict(), "ip": ip.as_dict(),
        "ip_per_family": {k: v.as_dict() for k, v in per_family.items()},
        "doubling": dr.as_dict(), "pipeline_D": D,
    })
    out.write_csv("growth_table.csv", ("n", "ball_size"),
                  sorted(gf.table.items()))
    return EXIT_OK


def _pipeline_stack(cfg, g, P):
    report, vm, h, sc = _geometry_stack(cfg, g)
    split = pipeline.make_split(h, vm, cfg["split"], sc=sc,
                                r_min=cfg["split"].get("r_min"))
    pc = potential_mod.derive_constants(
        P, resolution=cfg["potential"].get("resolution"))
    rho = cfg["pipeline"].get("rho")
    if rho is None:
        rho = min(pc.rho0, vm.epsilon / (2.0 * pc.b))
    gf = isoperimetry.growth_fit(g, vm)
    D = isoperimetry.pipeline_growth_exponent(gf)
    ip, _ = isoperimetry.ip_scan_many(g, D, sample=100, seed=cfg["seed"])
    k0 = variational.derive_k0(g, rho, pc, P)
    r = cfg["pipeline"].get("r")
    if r is None:
        # keep the half-radius ball r0 = 3r/pi^2 above proxy resolution
        r = max(0.5, 2.0 * np.pi ** 2 / 3.0 * h.resolution(vm))
    consts = pipeline.derive_pipeline_constants(
        r=r, rho=rho, vm=vm, gf_D=D, C_D=gf.C_D,
        C0=ip.C0, k0=k0, sc=sc)
    return report, vm, h, sc, split, pc, rho, consts


def cmd_solve(cfg, out):
    g, P = _setup(cfg)
    report, vm, h, sc, split, pc, rho, consts = _pipeline_stack(cfg, g, P)
    solver = variational.SolverConfig(
        residual_tol=cfg["solver"]["residual_tol"],
        max_sweeps=cfg["solver"]["max_sweeps"],
        multistart=tuple(cfg["solver"]["multistart"]),
        seed=cfg["solver"]["seed"],
        force_python=cfg["solver"]["force_python"])
    fields, rep = pipeline.exhaustion_solve(
        g, h, split, cfg["pipeline"]["N_list"], P, solver)
    probes = pipeline.default_probes(h, vm, split)
    asym = pipeline.asymptotics_report(
        g, h, vm, fields[-1], split, consts, probes,
        cfg["pipeline"]["n0_effective"], P,
        tol=cfg["pipeline"]["probe_tolerance"])
    out.write_json("run_report.json", {
        "telemetry": rep.telemetry, "window_radius": rep.window_radius,
        "window_deltas": rep.window_deltas,
        "non_monotone": rep.non_monotone, "diverging": rep.diverging,
        "asymptotics": asym, "constants": consts.as_dict(),
        "split": {"D0": len(split.D0), "D1": len(split.D1),
                  "frontier": len(split.frontier)},
    })
    for f, t in zip(fields, rep.telemetry):
        out.write_csv("field_N%d.csv" % t["N"], ("vertex", "depth", "value"),
                      bundle_mod.field_rows(g, f.values))
    if rep.diverging or not all(t["converged"] for t in rep.telemetry):
        return EXIT_ASSERTION
    return EXIT_OK


def cmd_verify(cfg, out):
    g, P = _setup(cfg)
    checks = {}

    def record(name, ok):
        checks[name] = bool(ok)

    report, vm, h, sc, split, pc, rho, consts = _pipeline_stack(cfg, g, P)
    rng = np.random.default_rng(cfg["seed"])

    # boundary identity on random set pairs
    ok = True
    for _ in range(50):
        B = frozenset(rng.choice(g.n, size=min(20, g.n),
                                 replace=False).tolist())
        Dv = frozenset(rng.choice(g.n, size=min(20, g.n),
                                  replace=False).tolist())
        lhs = graphs.boundary_out(g, B & Dv)
        rhs = ((graphs.boundary_out(g, B) & graphs.outer_set(g, Dv))
               | (graphs.outer_set(g, B) & graphs.boundary_out(g, Dv)))
        ok &= lhs <= rhs
    record("boundary_identity", ok)

    # ball/sphere consistency
    ok = True
    for n in range(min(4, g.truncation_radius) + 1):
        union = set()
        for k in range(n + 1):
            union |= set(graphs.sphere(g, g.base_vertex, k))
        ok &= union == set(graphs.ball(g, g.base_vertex, n))
    record("ball_sphere_consistency", ok)

    # quasi-metric property of the visual distance
    dm = h.distance_matrix(vm)
    factor = np.exp(vm.epsilon * report.delta_used)
    idx = rng.choice(h.size, size=(200, 3))
    ok = True
    for a, b, c in idx:
        ok &= dm[a, c] <= factor * max(dm[a, b], dm[b, c]) + 1e-12
    record("visual_quasi_metric", ok)

    # separating-set lemma on sampled instances
    ok = True
    for _ in range(5):
        xi0 = int(rng.integers(h.size))
        r = float(rng.uniform(0.1, 0.6))
        n = int(rng.integers(1, max(2, h.radius - 1)))
        c_full, c_out, _ = bd.separating_containments(
            g, h, vm, sc, h.proxy(xi0), r, n)
        ok &= c_full and c_out
        ok &= bd.separating_disjointness(g, h, vm, sc, h.proxy(xi0), r, n)
    record("separating_lemma", ok)

    # small randomized variational suite
    solver = variational.SolverConfig()
    interior = np.flatnonzero(g.interior_mask())
    ok_cmp = ok_trap = ok_mm = True
    for _ in range(20):
        n_free = min(len(interior), int(rng.integers(3, 12)))
        B = frozenset(rng.choice(interior, size=n_free,
                                 replace=False).tolist())
        f_low = np.full(g.n, P.c0)
        f_hi = rng.uniform(P.c0, P.c1, size=g.n)
        rep_c, lo, hi = variational.comparison_check(g, B, f_low, f_hi, P,
                                                     solver)
        ok_cmp &= rep_c.ordered
        ok_trap &= variational.trapping_check(g, hi.field, B, P, tol=1e-9)
        x = variational.Field(rng.uniform(P.c0, P.c1, g.n))
        y = variational.Field(rng.uniform(P.c0, P.c1, g.n))
        l_, r_ = variational.minmax_check(g, x, y, B, P)
        ok_mm &= l_ >= r_ - 1e-12
    record("comparison", ok_cmp)
    record("trapping", ok_trap)
    record("minmax", ok_mm)

    # constants are minimisers
    Bc = frozenset(interior.tolist())
    for name, c in (("c0", P.c0), ("c1", P.c1)):
        gap = variational.verify_local_minimality(
            g, variational.Field(np.full(g.n, c)), Bc, P, trials=100,
            seed=cfg["seed"])
        record("constant_%s_minimal" % name, gap >= -1e-9)

    # pipeline mechanism
    fields, rep_ex = pipeline.exhaustion_solve(
        g, h, split, cfg["pipeline"]["N_list"], P, solver)
    record("exhaustion_converged",
           all(t["converged"] for t in rep_ex.telemetry))
    record("window_cauchy", not rep_ex.diverging)
    probes = pipeline.default_probes(h, vm, split)
    xi1 = probes[1][0]
    inc_ok, inc_state = pipeline.cone_inclusion_check(
        g, h, vm, consts, xi1, cfg["pipeline"]["n_bar_override"])
    record("cone_inclusion", inc_ok)
    vai = pipeline.values_at_infinity_check(
        g, h, vm, fields[-1], consts, xi1, rho, pc, P,
        max(cfg["pipeline"]["N_list"]),
        cfg["pipeline"]["n_bar_override"])
    record("values_at_infinity_mechanism", vai["mechanism_holds"])
    swap_ok, swap_worst = pipeline.swap_check(
        g, h, split, cfg["pipeline"]["N_list"][:1], P, solver)
    record("swap_symmetry", swap_ok)

    out.write_json("verify.json", {
        "checks": checks,
        "cone_inclusion_state": inc_state,
        "swap_worst": swap_worst,
        "constants": consts.as_dict(),
    })
    for name, okv in sorted(checks.items()):
        print("%-32s %s" % (name, "PASS" if okv else "FAIL"))
    return EXIT_OK if all(checks.values()) else EXIT_ASSERTION


_COMMANDS = {
    "generate": cmd_generate,
    "geometry": cmd_geometry,
    "isoperimetry": cmd_isoperimetry,
    "solve": cmd_solve,
    "verify": cmd_verify,
}


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="acgraph",
        description="Allen-Cahn minimisers on hyperbolic graphs")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", help="path to the YAML run config")
    parser.add_argument("-o", "--output-dir", default=None,
                        help="override the output directory")
    args = parser.parse_args(argv)
    try:
        cfg = config_mod.load_config(args.config)
        cfg = config_mod.apply_env_overrides(cfg)
        if args.output_dir:
            cfg["output"]["directory"] = args.output_dir
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    out = bundle_mod.OutputBundle(cfg["output"]["directory"], cfg)
    try:
        status = _COMMANDS[args.command](cfg, out)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, AssertionError) as exc:
        print("check failed: %s" % exc, file=sys.stderr)
        return EXIT_ASSERTION
    out.write_manifest({"command": args.command})
    return status


if __name__ == "__main__":
    sys.exit(main())
