"""2D complex wavefunctions on square grids and every initial condition:
radial-profile fields, Bessel, Gaussian, Laguerre-Gauss, aperture cuts,
additive noise.

Grid convention: N x N cells, spacing dx in Bohr radii, beam axis at
index N//2 along both axes; norm means the discrete integral
sum |psi|^2 dx^2.  Constructors renormalize to 1.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.special import jv

from .radial import RadialProfile


@dataclass
class Field2D:
    amps: np.ndarray  # complex N x N
    dx: float  # a0
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.amps.shape[0]

    @property
    def norm(self) -> float:
        """Discrete integral of the density, sum |psi|^2 dx^2."""
        return float(np.sum(np.abs(self.amps) ** 2) * self.dx**2)

    def density(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def axes(self) -> np.ndarray:
        """Cell-center coordinate along one axis (axis at index n//2)."""
        return (np.arange(self.n) - self.n // 2) * self.dx

    def radius_grid(self) -> np.ndarray:
        x = self.axes()
        return np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)


def _renormalized(amps: np.ndarray, dx: float, meta: dict) -> Field2D:
    p = np.sum(np.abs(amps) ** 2) * dx * dx
    if not (p > 0 and math.isfinite(p)):
        raise ValueError("field has zero or non-finite power")
    return Field2D(amps=amps / math.sqrt(p), dx=dx, meta=meta)


def _grid(n: int, dx: float):
    x = (np.arange(n) - n // 2) * dx
    r = np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)
    theta = np.arctan2(x[None, :], x[:, None])  # (row, col) = (x, y)
    return r, theta


def from_radial(profile: RadialProfile, l: int, n: int, dx: float) -> Field2D:
    """Sample phi(rho) e^{il theta} on the grid, renormalized to 1.

    The profile must cover the grid corner radius n*dx/sqrt(2); solve with
    extend_to when the grid pads beyond the aperture.
    """
    corner = n * dx / math.sqrt(2.0)
    if profile.rho[-1] < corner - 1e-9:
        raise ValueError(
            f"profile reaches rho = {profile.rho[-1]:.1f} a0 but the grid corner "
            f"needs {corner:.1f} a0; re-solve with extend_to")
    r, theta = _grid(n, dx)
    amp = np.interp(r, profile.rho, profile.phi, left=profile.phi[0])
    if l:
        amps = amp * np.exp(1j * l * theta)
    else:
        amps = amp.astype(complex)
    return _renormalized(amps, dx, {"kind": "radial", "kT": profile.kT,
                                    "l": l, "gamma": profile.gamma})


def gaussian(sigma: float, l: int, n: int, dx: float) -> Field2D:
    """Gaussian (l = 0) or Laguerre-Gauss: rho^l e^{-rho^2/(2 sigma^2)} e^{il theta}.

    sigma parameterizes the l = 0 density as e^{-r^2/sigma^2}, so the
    second-moment width equals sigma exactly; the l = 1 ring has width
    sqrt(2) sigma.
    """
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    r, theta = _grid(n, dx)
    amp = np.exp(-(r**2) / (2.0 * sigma**2))
    if l:
        amp = amp * (r / sigma) ** l
        amps = amp * np.exp(1j * l * theta)
    else:
        amps = amp.astype(complex)
    return _renormalized(amps, dx, {"kind": "gaussian", "sigma": sigma, "l": l})


def bessel(kT: float, l: int, n: int, dx: float) -> Field2D:
    """Truncation-free Bessel J_l(kT rho) e^{il theta} over the whole grid."""
    if kT <= 0:
        raise ValueError("kT must be > 0")
    r, theta = _grid(n, dx)
    amp = jv(l, kT * r)
    if l:
        amps = amp * np.exp(1j * l * theta)
    else:
        amps = amp.astype(complex)
    return _renormalized(amps, dx, {"kind": "bessel", "kT": kT, "l": l})


def apply_aperture(f: Field2D, radius: float) -> Field2D:
    """Hard circular cutoff at the given radius (a0), then renormalize."""
    half_diag = (f.n / 2) * f.dx * math.sqrt(2.0)
    if radius > half_diag * (1 + 1e-12):
        raise ValueError(f"aperture radius {radius} exceeds the grid half-diagonal {half_diag:.1f}")
    if radius <= 0:
        raise ValueError("aperture radius must be > 0")
    amps = np.where(f.radius_grid() <= radius, f.amps, 0.0)
    meta = dict(f.meta)
    meta["aperture_radius"] = radius
    return _renormalized(amps, f.dx, meta)


def add_noise(f: Field2D, noise_power_ratio: float, seed: int) -> Field2D:
    """Add complex circular Gaussian noise, uniform variance per cell.

    Total expected noise power = ratio x beam power; the realized sample
    ratio is recorded in meta.  Deterministic for a given seed.
    """
    if noise_power_ratio < 0:
        raise ValueError("noise_power_ratio must be >= 0")
    if noise_power_ratio == 0:
        return Field2D(amps=f.amps.copy(), dx=f.dx, meta=dict(f.meta))
    power = f.norm
    n = f.n
    sig = math.sqrt(noise_power_ratio * power / (2.0 * n * n * f.dx**2))
    rng = np.random.default_rng(seed)
    noise = sig * (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    realized = float(np.sum(np.abs(noise) ** 2) * f.dx**2 / power)
    meta = dict(f.meta)
    meta.update({"noise_ratio": noise_power_ratio, "noise_seed": seed,
                 "noise_ratio_realized": realized})
    return _renormalized(f.amps + noise, f.dx, meta)


def winding_number(f: Field2D, radius: Optional[float] = None, samples: int = 256) -> int:
    """Topological charge: accumulated phase around an axis-centered loop.

    Defaults to the radius of the azimuthal density peak (at least a few
    cells), where the amplitude is far from zero.
    """
    if radius is None:
        d = f.density()
        x = f.axes()
        r = np.sqrt(x[:, None] ** 2 + x[None, :] ** 2)
        nbin = (r / f.dx + 0.5).astype(np.int64).ravel()
        sums = np.bincount(nbin, weights=d.ravel())
        cnts = np.maximum(np.bincount(nbin), 1)
        radius = max(float(np.argmax(sums / cnts)) * f.dx, 4 * f.dx)
    th = np.linspace(0.0, 2.0 * math.pi, samples, endpoint=False)
    cx = radius * np.cos(th)
    cy = radius * np.sin(th)
    i = cx / f.dx + f.n // 2
    j = cy / f.dx + f.n // 2
    i0 = np.clip(np.floor(i).astype(int), 0, f.n - 2)
    j0 = np.clip(np.floor(j).astype(int), 0, f.n - 2)
    fi, fj = i - i0, j - j0
    vals = (f.amps[i0, j0] * (1 - fi) * (1 - fj) + f.amps[i0 + 1, j0] * fi * (1 - fj)
            + f.amps[i0, j0 + 1] * (1 - fi) * fj + f.amps[i0 + 1, j0 + 1] * fi * fj)
    dphi = np.angle(np.roll(vals, -1) / np.where(vals == 0, 1.0, vals))
    return int(round(float(np.sum(dphi)) / (2.0 * math.pi)))


def save_field(f: Field2D, path: str) -> None:
    """Raw little-endian complex64 array plus a JSON sidecar."""
    arr = f.amps.astype("<c8")
    arr.tofile(path)
    sidecar = {"n": f.n, "dx": f.dx, "dtype": "<c8", "meta": f.meta}
    Path(path + ".json").write_text(json.dumps(sidecar, indent=1, sort_keys=True))


def load_field(path: str) -> Field2D:
    sidecar = json.loads(Path(path + ".json").read_text())
    n = sidecar["n"]
    amps = np.fromfile(path, dtype="<c8").reshape(n, n).astype(complex)
    return Field2D(amps=amps, dx=sidecar["dx"], meta=sidecar.get("meta", {}))


def to_pgm(values: np.ndarray, path: str, bits: int = 16) -> None:
    """Grayscale PGM (P5) of a non-negative array, peak-normalized."""
    if bits not in (8, 16):
        raise ValueError("bits must be 8 or 16")
    peak = float(values.max())
    maxval = (1 << bits) - 1
    scaled = np.zeros_like(values) if peak <= 0 else values / peak * maxval
    data = scaled.astype(">u2" if bits == 16 else "u1")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{values.shape[1]} {values.shape[0]}\n{maxval}\n".encode())
        fh.write(data.tobytes())
