"""Run configuration, field dumps and report serialization."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .grids import Grid, RealField
from .solver import SolveReport

#: config file schema: key -> (type, default)
CONFIG_SCHEMA = {
    "beta": (float, 1.0),
    "kappa0_qbar": (float, 1.0),
    "disorder_width": (float, 0.05),
    "lattice_a": (float, 1.0),
    "n_cells": (int, 4),
    "n_pts": (int, 3),
    "tol_residual": (float, 1e-8),
    "tol_delta": (float, 1e-9),
    "max_iter": (int, 200),
    "mixing": (float, 1.0),
}


def default_config() -> dict:
    return {k: v for k, (_, v) in CONFIG_SCHEMA.items()}


def parse_config(path: str | Path) -> dict:
    """Read a flat key=value config file; unknown keys are errors.

    Lines starting with '#' and blank lines are ignored; values are parsed
    with the per-key type from CONFIG_SCHEMA and missing keys fall back to
    the defaults.
    """
    cfg = default_config()
    text = Path(path).read_text()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in CONFIG_SCHEMA:
            raise ConfigError(f"{path}:{ln}: unknown key {key!r}")
        typ = CONFIG_SCHEMA[key][0]
        try:
            cfg[key] = typ(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{ln}: cannot parse {key}={value!r} as "
                              f"{typ.__name__}") from exc
    return cfg


def write_config(path: str | Path, cfg: dict):
    lines = [f"{k}={cfg[k]}" for k in CONFIG_SCHEMA if k in cfg]
    Path(path).write_text("\n".join(lines) + "\n")


def report_json(report: SolveReport) -> str:
    """Deterministic JSON encoding (sorted keys, shortest-roundtrip floats)."""
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2)


def write_report(path: str | Path, report: SolveReport):
    Path(path).write_text(report_json(report) + "\n")


def write_field(path: str | Path, f: RealField, name: str = "field"):
    """Dump a field as a text table of (i, j, k, value).

    Values carry 17 significant digits, enough to round-trip doubles.
    """
    g = f.grid
    lines = [
        f"# rehf {name} dump",
        f"# a={g.a!r} n_cells={g.n_cells} n_pts={g.n_pts}",
        "# columns: i j k value",
    ]
    vals = f.values
    for i in range(g.n):
        for j in range(g.n):
            row = vals[i, j]
            lines.extend(f"{i} {j} {k} {row[k]:.17g}" for k in range(g.n))
    Path(path).write_text("\n".join(lines) + "\n")


def read_field(path: str | Path) -> RealField:
    """Read a field dump produced by :func:`write_field`."""
    meta = {}
    data = []
    for raw in Path(path).read_text().splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            for tok in line[1:].split():
                if "=" in tok:
                    k, _, v = tok.partition("=")
                    meta[k] = v
            continue
        parts = line.split()
        if len(parts) != 4:
            raise ConfigError(f"bad field-dump row: {raw!r}")
        data.append((int(parts[0]), int(parts[1]), int(parts[2]), float(parts[3])))
    try:
        grid = Grid(float(meta["a"]), int(meta["n_cells"]), int(meta["n_pts"]))
    except KeyError as exc:
        raise ConfigError(f"field dump is missing grid metadata ({exc})") from exc
    vals = np.empty((grid.n,) * 3)
    for i, j, k, v in data:
        vals[i, j, k] = v
    return RealField(grid, vals)
