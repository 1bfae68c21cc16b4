"""Run artifacts: canonical JSON summaries, trace/heatmap CSVs, PGM maps.

Everything written here is deterministic for identical inputs: floats go
through repr (shortest round-trip form), JSON keys are sorted, and no
timestamps or host identifiers enter the payload.
"""
from __future__ import annotations

import json
import math
import os
from typing import Sequence

import numpy as np

from .field import to_pgm
from .metrics import PropagationTrace


def _pyfloat(x):
    """Recursively convert numpy scalars/arrays so json sees plain types."""
    if isinstance(x, dict):
        return {k: _pyfloat(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_pyfloat(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_pyfloat(v) for v in x.tolist()]
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None  # NaN/inf are not valid strict JSON
    return x


def dump_json(payload: dict, path: str) -> None:
    text = json.dumps(_pyfloat(payload), sort_keys=True, indent=2,
                      allow_nan=False)
    with open(path, "w") as fh:
        fh.write(text + "\n")


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_trace_csv(trace: PropagationTrace, path: str,
                    winding: Sequence[int] | None = None) -> None:
    """Columnar history of one run; lengths in meters."""
    cols = ["z_m", "width_m", "lobe_fraction", "peak_density",
            "lobe_radius_m"]
    data = [trace.z, trace.width, trace.lobe_fraction, trace.peak_density,
            trace.lobe_radius]
    if winding is not None:
        if len(winding) != len(trace.z):
            raise ValueError("winding history length mismatch")
        cols.append("winding")
        data.append(list(winding))
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for row in zip(*data):
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v)
                              for v in row) + "\n")


def read_trace_csv(path: str) -> dict[str, np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    if body.size == 0:
        raise ValueError(f"trace file {path} has no rows")
    return {name: body[:, i] for i, name in enumerate(header)}


def write_radial_map_csv(z: Sequence[float], radii_m: np.ndarray,
                         rows: Sequence[np.ndarray], path: str) -> None:
    """Azimuthally averaged density vs (z, r): one row per snapshot."""
    if len(z) != len(rows):
        raise ValueError("one density row required per z sample")
    with open(path, "w") as fh:
        fh.write("z_m," + ",".join(repr(float(r)) for r in radii_m) + "\n")
        for zi, row in zip(z, rows):
            fh.write(repr(float(zi)) + ","
                     + ",".join(repr(float(v)) for v in row) + "\n")


def read_radial_map_csv(path: str) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Returns (z values, radii, density matrix rows-by-z)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    radii = np.array([float(v) for v in header[1:]])
    return body[:, 0], radii, body[:, 1:]


def write_density_pgm(density: np.ndarray, path: str) -> dict:
    """16-bit grayscale map, normalized to its own peak; returns the
    scale record to embed in an index file."""
    peak = float(density.max())
    norm = density / peak if peak > 0 else density
    to_pgm(norm, path)
    return {"file": os.path.basename(path), "peak_density": peak}
