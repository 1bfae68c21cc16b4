"""Physical constants (CODATA 2018) and unit conventions.

All transverse lengths inside the toolkit are measured in Bohr radii a0;
the propagation coordinate is the dimensionless s = z / (k * a0**2) where
k is the de Broglie wavenumber of the accelerated electrons.  Conversion
to meters happens only at I/O boundaries.
"""
from typing import Final

# CODATA 2018.  Pinned here rather than imported from scipy.constants so
# the numbers in test oracles cannot drift with the scipy version.
E_CHARGE: Final[float] = 1.602176634e-19  # C (exact)
M_ELECTRON: Final[float] = 9.1093837015e-31  # kg
PLANCK_H: Final[float] = 6.62607015e-34  # J s (exact)
BOHR_RADIUS: Final[float] = 5.29177210903e-11  # m

# Compton wavelength as quoted in the spin-interaction estimate (2.4 pm,
# i.e. lambda_C rounded to two figures).
COMPTON_WAVELENGTH: Final[float] = 2.4e-12  # m

CODATA_VERSION: Final[str] = "2018"
