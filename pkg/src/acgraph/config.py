"""Declarative run configuration: one YAML file per run.

Unknown keys are rejected so typos fail fast; every cross-reference
(horizon radius vs truncation, rho vs rho0) is validated before any work
starts.
"""

from __future__ import annotations

import hashlib
import json
import os

import yaml


class ConfigError(Exception):
    """Invalid configuration; maps to process exit status 2."""


_SCHEMA = {
    "graph": {"family": str, "degree": int, "p": int, "q": int,
              "radius": int, "extent": int, "side": int},
    "geometry": {"horizon_radius": int, "epsilon_override": float,
                 "sample_quadruples": int, "sample_triangles": int,
                 "shadow_samples": int, "lambda_samples": int},
    "potential": {"name": str, "c0": float, "c1": float,
                  "resolution": float},
    "split": {"kind": str, "children": list, "center": int, "r": float,
              "frontier": list, "r_min": float},
    "solver": {"residual_tol": float, "max_sweeps": int,
               "multistart": list, "rho": float, "seed": int,
               "force_python": bool},
    "isoperimetry": {"families": list, "sample": int,
                     "doubling_centers": int},
    "pipeline": {"r": float, "rho": float, "N_list": list,
                 "n_bar_override": int, "n0_effective": int,
                 "probe_tolerance": float},
    "output": {"directory": str, "formats": list},
}

_DEFAULTS = {
    "graph": {"family": "tree", "degree": 3, "radius": 6},
    "geometry": {"sample_quadruples": 2000, "sample_triangles": 300,
                 "shadow_samples": 200, "lambda_samples": 200},
    "potential": {"name": "quartic", "c0": -1.0, "c1": 1.0},
    "split": {"kind": "half"},
    "solver": {"residual_tol": 1e-10, "max_sweeps": 100000,
               "multistart": ["boundary-extension", "c0-fill", "c1-fill"],
               "seed": 0, "force_python": False},
    "isoperimetry": {"families": ["balls", "cones", "random_connected"],
                     "sample": 200, "doubling_centers": 5},
    "pipeline": {"N_list": [4, 6], "n_bar_override": 1,
                 "n0_effective": 4, "probe_tolerance": 0.1},
    "output": {"directory": "out", "formats": ["json", "csv"]},
}


def _coerce(section, key, value, want):
    if want is float and isinstance(value, int):
        return float(value)
    if not isinstance(value, want):
        raise ConfigError("%s.%s: expected %s, got %r"
                          % (section, key, want.__name__, value))
    return value


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
    except FileNotFoundError:
        raise ConfigError("config file not found: %s" % path)
    except yaml.YAMLError as exc:
        raise ConfigError("config parse error: %s" % exc)
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    return validate_config(raw)


def validate_config(raw):
    cfg = {}
    for section, defaults in _DEFAULTS.items():
        cfg[section] = dict(defaults)
    cfg["seed"] = 0
    cfg["workers"] = 1
    for section, body in raw.items():
        if section == "seed":
            cfg["seed"] = _coerce("", "seed", body, int)
            continue
        if section == "workers":
            cfg["workers"] = _coerce("", "workers", body, int)
            continue
        if section not in _SCHEMA:
            raise ConfigError("unknown config section %r" % section)
        if not isinstance(body, dict):
            raise ConfigError("section %r must be a mapping" % section)
        for key, value in body.items():
            if key not in _SCHEMA[section]:
                raise ConfigError("unknown key %s.%s" % (section, key))
            cfg[section][key] = _coerce(section, key, value,
                                        _SCHEMA[section][key])
    _cross_validate(cfg)
    return cfg


def _cross_validate(cfg):
    g = cfg["graph"]
    fam = g.get("family")
    if fam not in ("tree", "tiling", "line", "grid"):
        raise ConfigError("graph.family must be tree|tiling|line|grid")
    if fam == "tree" and g.get("degree", 3) < 3:
        raise ConfigError("tree degree must be >= 3")
    if fam == "tiling":
        p, q = g.get("p"), g.get("q")
        if not p or not q:
            raise ConfigError("tiling requires p and q")
    radius = g.get("radius", g.get("extent", g.get("side", 0)))
    hr = cfg["geometry"].get("horizon_radius")
    if hr is not None and fam in ("tree", "tiling") and hr > g["radius"]:
        raise ConfigError("geometry.horizon_radius exceeds graph.radius")
    eo = cfg["geometry"].get("epsilon_override")
    if eo is not None and eo <= 0:
        raise ConfigError("geometry.epsilon_override must be positive")
    pot = cfg["potential"]
    if pot["name"] != "quartic":
        raise ConfigError("unknown potential %r" % pot["name"])
    if pot["c0"] >= pot["c1"]:
        raise ConfigError("potential needs c0 < c1")
    if not cfg["pipeline"]["N_list"]:
        raise ConfigError("pipeline.N_list must not be empty")


def apply_env_overrides(cfg, env=None):
    """Only the output directory and worker count may come from the
    environment."""
    env = os.environ if env is None else env
    out = env.get("ACGRAPH_OUTPUT_DIR")
    if out:
        cfg["output"]["directory"] = out
    workers = env.get("ACGRAPH_WORKERS")
    if workers:
        try:
            cfg["workers"] = int(workers)
        except ValueError:
            raise ConfigError("ACGRAPH_WORKERS must be an integer")
    return cfg


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_graph(cfg):
    from . import graphs
    g = cfg["graph"]
    fam = g["family"]
    if fam == "tree":
        return graphs.build_tree(g["degree"], g["radius"])
    if fam == "tiling":
        return graphs.build_tiling(g["p"], g["q"], g["radius"])
    if fam == "line":
        return graphs.build_control_line(g["extent"])
    if fam == "grid":
        return graphs.build_control_grid(g["side"])
    raise ConfigError("unknown family %r" % fam)


def build_potential(cfg):
    from . import potential
    p = cfg["potential"]
    P = potential.quartic(p["c0"], p["c1"])
    return P.validate()
