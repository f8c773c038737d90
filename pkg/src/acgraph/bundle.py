"""Output bundle: deterministic JSON/CSV writers and the run manifest.

CSV files are comma-separated, UTF-8, LF line endings; JSON is
pretty-printed with sorted keys.  For a fixed config and seed the CSV
bytes are reproducible; only the manifest carries a timestamp.
"""

from __future__ import annotations

import datetime
import json
import os

import numpy as np

from . import config as config_mod


def _jsonable(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(_jsonable(x) for x in obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


class OutputBundle:
    def __init__(self, directory, cfg):
        self.directory = directory
        self.cfg = cfg
        os.makedirs(directory, exist_ok=True)
        self.files = []

    def path(self, name):
        return os.path.join(self.directory, name)

    def write_json(self, name, payload):
        text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
        self.files.append(name)

    def write_csv(self, name, header, rows):
        with open(self.path(name), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(x) for x in row) + "\n")
        self.files.append(name)

    def write_manifest(self, extra=None):
        from . import __version__
        manifest = {
            "config": self.cfg,
            "config_hash": config_mod.config_hash(self.cfg),
            "version": __version__,
            "files": sorted(self.files),
            "timestamp": datetime.datetime.now(
                datetime.timezone.utc).isoformat(),
        }
        if extra:
            manifest.update(_jsonable(extra))
        text = json.dumps(_jsonable(manifest), indent=2, sort_keys=True)
        with open(self.path("manifest.json"), "w", encoding="utf-8",
                  newline="\n") as fh:
            fh.write(text + "\n")


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def field_rows(g, values):
    return [(u, int(g.depth[u]), float(values[u])) for u in range(g.n)]
