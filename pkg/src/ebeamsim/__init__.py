"""Simulation toolkit for non-diffracting multi-electron vortex beams.

Finds shape-preserving wavefunctions balancing mean-field Coulomb
self-repulsion against diffraction, propagates arbitrary beams with a
split-step spectral method coupled to a self-consistent Poisson solve,
and synthesizes binary holographic masks that would generate them.
"""

from .params import (
    DerivedScales,
    PhysParams,
    de_broglie_wavenumber,
    derive_scales,
    electron_velocity,
    line_density,
    nonlinear_coefficient,
    spin_negligibility_ratio,
)

__all__ = [
    "DerivedScales",
    "PhysParams",
    "de_broglie_wavenumber",
    "derive_scales",
    "electron_velocity",
    "line_density",
    "nonlinear_coefficient",
    "spin_negligibility_ratio",
]

__version__ = "0.1.0"
