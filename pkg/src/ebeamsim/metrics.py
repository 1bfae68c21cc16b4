"""Beam observables: azimuthal averages, main-lobe geometry, effective
width, lobe current fraction, and the non-diffraction range extracted
from a recorded width history.

Radial quantities are returned in the field's own length unit (grid
spacing units, i.e. Bohr radii everywhere in this package); the
propagation layer converts to meters when it assembles a trace.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.signal import find_peaks

from .field import Field2D


def azimuthal_average(f: Field2D) -> tuple[np.ndarray, np.ndarray]:
    """Mean density per radial bin of width dx.  Returns (radii, avg)."""
    d = f.density().ravel()
    r = f.radius_grid().ravel()
    b = (r / f.dx + 0.5).astype(np.int64)
    sums = np.bincount(b, weights=d)
    cnts = np.bincount(b)
    radii = np.arange(sums.size) * f.dx
    return radii, sums / np.maximum(cnts, 1)


def main_lobe_radius(radii: np.ndarray, avg: np.ndarray,
                     prev_radius: Optional[float] = None) -> float:
    """Radius of the first density minimum beyond the azimuthal peak.

    Returns inf when the profile has no interior minimum (a zero-free
    beam keeps no lobe boundary).  prev_radius selects the candidate
    minimum nearest the previous boundary, so a washing-out ring does not
    teleport the lobe estimate between snapshots.
    """
    i_max = int(np.argmax(avg))
    mins, _ = find_peaks(-avg, prominence=0.01 * float(avg.max()))
    mins = mins[mins > i_max]
    if mins.size == 0:
        return math.inf
    if prev_radius is not None and math.isfinite(prev_radius):
        pick = mins[np.argmin(np.abs(radii[mins] - prev_radius))]
    else:
        pick = mins[0]
    return float(radii[pick])


def effective_width(f: Field2D, lobe_radius: float = math.inf) -> float:
    """Density-weighted rms radius within the main lobe (whole grid when
    the lobe radius is inf)."""
    d = f.density()
    r2 = f.radius_grid() ** 2
    if math.isfinite(lobe_radius):
        d = np.where(r2 <= lobe_radius**2, d, 0.0)
    p = float(np.sum(d))
    if p <= 0:
        raise ValueError("no density inside the main lobe")
    return math.sqrt(float(np.sum(r2 * d)) / p)


def main_lobe_current(f: Field2D, lobe_radius: float) -> float:
    """Fraction of total beam power carried inside the lobe radius."""
    d = f.density()
    total = float(np.sum(d))
    if total <= 0:
        raise ValueError("field carries no power")
    if not math.isfinite(lobe_radius):
        return 1.0
    inside = float(np.sum(np.where(f.radius_grid() <= lobe_radius, d, 0.0)))
    return inside / total


def nondiffraction_range(z: Sequence[float], width: Sequence[float],
                         initial_width: Optional[float] = None) -> float:
    """First z where the width reaches sqrt(2) x the launch width,
    linearly interpolated between samples; inf if never reached."""
    z = np.asarray(z, dtype=float)
    w = np.asarray(width, dtype=float)
    if z.size != w.size or z.size < 2:
        raise ValueError("need matching z and width histories, >= 2 samples")
    if np.any(np.diff(z) <= 0):
        raise ValueError("z samples must be strictly increasing")
    w0 = float(w[0]) if initial_width is None else float(initial_width)
    thr = math.sqrt(2.0) * w0
    above = np.nonzero(w >= thr)[0]
    above = above[above > 0]
    if above.size == 0:
        return math.inf
    i = int(above[0])
    t = (thr - w[i - 1]) / (w[i] - w[i - 1])
    return float(z[i - 1] + t * (z[i] - z[i - 1]))


@dataclass
class PropagationTrace:
    """Snapshot history of one propagation run.  All lengths in meters."""
    z: list[float] = field(default_factory=list)
    width: list[float] = field(default_factory=list)
    lobe_fraction: list[float] = field(default_factory=list)
    peak_density: list[float] = field(default_factory=list)
    lobe_radius: list[float] = field(default_factory=list)
    initial_width: float = 0.0
    nd_range: float = math.inf

    def record(self, z: float, width: float, lobe_fraction: float,
               peak_density: float, lobe_radius: float) -> None:
        self.z.append(z)
        self.width.append(width)
        self.lobe_fraction.append(lobe_fraction)
        self.peak_density.append(peak_density)
        self.lobe_radius.append(lobe_radius)

    @property
    def Ld(self) -> float:
        """Non-diffraction range: alias for nd_range."""
        return self.nd_range

    def finalize(self) -> None:
        self.initial_width = self.width[0]
        self.nd_range = nondiffraction_range(self.z, self.width)
