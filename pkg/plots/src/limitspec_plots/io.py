"""Parsers for the limitspec output schemas.

CSV files start with `#`-prefixed provenance comment lines followed by a
header row; JSON files carry a `meta` block. Parsing is strictly
schema-checked so a renderer failure points at the offending file.
"""

import csv
import io
import json

import numpy as np

from . import SchemaError


def _read_csv(path: str, required: tuple[str, ...]):
    with open(path, encoding="utf-8") as fh:
        body = "".join(line for line in fh if not line.startswith("#"))
    reader = csv.DictReader(io.StringIO(body))
    cols = reader.fieldnames or []
    missing = [c for c in required if c not in cols]
    if missing:
        raise SchemaError(f"{path}: missing columns {missing}, got {cols}")
    return list(reader)


def load_graph(path: str):
    """graph.csv -> (lambda0, {kind: complex vertex array})."""
    rows = _read_csv(path, ("kind", "re", "im", "residual"))
    lambda0 = None
    curves: dict[str, list[complex]] = {}
    for r in rows:
        z = complex(float(r["re"]), float(r["im"]))
        if r["kind"] == "lambda0":
            lambda0 = z
        else:
            curves.setdefault(r["kind"], []).append(z)
    if lambda0 is None:
        raise SchemaError(f"{path}: no lambda0 row")
    return lambda0, {k: np.array(v) for k, v in curves.items()}


def load_spectrum(path: str):
    """spectrum_*.csv -> (eigenvalues, trusted flags)."""
    rows = _read_csv(path, ("re", "im", "trusted"))
    lams = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
    trusted = np.array([r["trusted"] == "1" for r in rows], dtype=bool)
    return lams, trusted


def load_wkb(path: str):
    """wkb.csv -> complex prediction array."""
    rows = _read_csv(path, ("branch", "k", "re_mu", "im_mu"))
    return np.array([complex(float(r["re_mu"]), float(r["im_mu"]))
                     for r in rows])


def load_pseudo(path: str):
    """pseudo.csv -> (re axis, im axis, log10_norm grid, saturated grid)."""
    rows = _read_csv(path, ("re", "im", "log10_norm", "saturated"))
    re = np.array(sorted({float(r["re"]) for r in rows}))
    im = np.array(sorted({float(r["im"]) for r in rows}))
    val = np.full((len(im), len(re)), np.nan)
    sat = np.zeros((len(im), len(re)), dtype=bool)
    ix = {x: i for i, x in enumerate(re)}
    iy = {y: i for i, y in enumerate(im)}
    for r in rows:
        i, j = iy[float(r["im"])], ix[float(r["re"])]
        val[i, j] = float(r["log10_norm"])
        sat[i, j] = r["saturated"] == "1"
    if np.isnan(val).any():
        raise SchemaError(f"{path}: grid has holes")
    return re, im, val, sat


def load_omega(path: str):
    """omega.csv -> closed boundary polyline."""
    rows = _read_csv(path, ("re", "im"))
    return np.array([complex(float(r["re"]), float(r["im"])) for r in rows])


def load_growth(path: str):
    """growth_*.json -> report dict with samples, slope, r_squared."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    missing = [k for k in ("samples", "slope", "intercept", "r_squared")
               if k not in data]
    if missing:
        raise SchemaError(f"{path}: missing keys {missing}")
    return data
