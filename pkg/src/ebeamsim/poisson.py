"""Transverse Poisson solve: del^2 U = -gamma |psi|^2 on the square grid.

Spectral inversion with the continuous symbol -|k|^2, periodic boundary,
zero-mean gauge (the k = 0 mode carries no information once the gauge is
fixed; physically the periodic solve balances the beam charge with a
uniform background).  Grids are expected to be padded to >= 2x the
aperture so image-charge artifacts stay small across the beam.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import fft as sfft


@dataclass
class Potential2D:
    values: np.ndarray  # real N x N, a0^-2 units
    dx: float  # grid spacing, a0
    gauge: str = field(default="zero-mean")


@lru_cache(maxsize=8)
def _spectral_k2(n: int, dx: float):
    """|k|^2 for an n x n grid (rfft layout), and its safe inverse."""
    kx = 2.0 * np.pi * sfft.fftfreq(n, dx)
    ky = 2.0 * np.pi * sfft.rfftfreq(n, dx)
    k2 = kx[:, None] ** 2 + ky[None, :] ** 2
    inv = np.zeros_like(k2)
    np.divide(1.0, k2, out=inv, where=k2 > 0)
    return k2, inv


def _validate_grid(density: np.ndarray, dx: float) -> int:
    if dx <= 0:
        raise ValueError(f"grid spacing must be > 0, got {dx}")
    if density.ndim != 2 or density.shape[0] != density.shape[1]:
        raise ValueError(f"density must be square, got shape {density.shape}")
    n = density.shape[0]
    if n & (n - 1):
        raise ValueError(f"grid size must be a power of two, got {n}")
    return n


def solve_poisson(density: np.ndarray, gamma: float, dx: float) -> Potential2D:
    """Potential of the density: U_hat = gamma * density_hat / |k|^2, k != 0.

    The density must be real and non-negative (a |psi|^2); the result has
    exactly zero spatial mean.
    """
    n = _validate_grid(density, dx)
    if density.min() < -1e-12 * max(density.max(), 0.0):
        raise ValueError("density must be non-negative")
    _, inv = _spectral_k2(n, dx)
    u = sfft.irfft2(sfft.rfft2(density) * (gamma * inv), s=density.shape)
    u -= u.mean()
    return Potential2D(values=u, dx=dx)


def laplacian_residual(U: Potential2D, density: np.ndarray, gamma: float) -> float:
    """Max-norm of del^2 U + gamma * density, gauge mode excluded.

    The Laplacian uses the same continuous spectral symbol as the solve,
    so on solver output this measures pure transform roundoff.
    """
    n = _validate_grid(density, dx=U.dx)
    if U.values.shape != density.shape:
        raise ValueError("potential and density grids differ")
    k2, _ = _spectral_k2(n, U.dx)
    lap = sfft.irfft2(sfft.rfft2(U.values) * (-k2), s=density.shape)
    return float(np.max(np.abs(lap + gamma * (density - density.mean()))))
