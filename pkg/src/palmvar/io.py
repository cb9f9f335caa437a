"""CSV matrices, model bundles and JSON reports.

Time series files store one state component per row and one time step per
column, matching the column-vector convention used throughout the package.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .model_data import VarModel, spectral_radius

__all__ = [
    "write_matrix",
    "read_matrix",
    "write_json",
    "read_json",
    "write_model_bundle",
    "read_model_bundle",
]


def write_matrix(path, a):
    """Write a 2-d array as headerless CSV; ``%.17g`` round-trips doubles exactly."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    np.savetxt(path, a, delimiter=",", fmt="%.17g")


def read_matrix(path, shape=None) -> np.ndarray:
    """Read a headerless CSV matrix, optionally checking its shape."""
    try:
        a = np.loadtxt(path, delimiter=",", ndmin=2, dtype=float)
    except ValueError as exc:
        raise ValueError(f"{path}: not a numeric CSV matrix ({exc})") from exc
    if shape is not None:
        for axis, (got, want) in enumerate(zip(a.shape, shape)):
            if want is not None and got != want:
                raise ValueError(f"{path}: expected {want} along axis {axis}, found {got}")
    return a


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, os.PathLike):
        return str(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_default)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def write_model_bundle(directory, model: VarModel, kind: str, seed=None, **extra):
    """Write ``A.csv``, ``Q.csv`` and ``meta.json`` into ``directory``."""
    if kind not in ("sparse", "lowrank", "imported"):
        raise ValueError(f"unknown model kind {kind!r}")
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    write_matrix(d / "A.csv", model.a)
    write_matrix(d / "Q.csv", model.q)
    meta = {"p": model.p, "seed": seed, "kind": kind, "spectral_radius": spectral_radius(model.a)}
    meta.update(extra)
    write_json(d / "meta.json", meta)
    return meta


def read_model_bundle(directory):
    """Return ``(VarModel, meta)`` from a bundle directory."""
    d = Path(directory)
    meta = read_json(d / "meta.json")
    p = meta.get("p")
    a = read_matrix(d / "A.csv", (p, p))
    q = read_matrix(d / "Q.csv", (p, p))
    return VarModel(a, q), meta
