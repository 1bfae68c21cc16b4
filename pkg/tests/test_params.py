"""Unit conversions: frozen oracle values and algebraic properties.

Oracle values were computed by direct arithmetic from the CODATA 2018
constants (independently of the implementation) and frozen here.
"""
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ebeamsim.constants import BOHR_RADIUS, E_CHARGE
from ebeamsim.params import (
    PhysParams,
    de_broglie_wavenumber,
    derive_scales,
    electron_velocity,
    line_density,
    nonlinear_coefficient,
    spin_negligibility_ratio,
)

# Frozen oracles: sqrt(2 e V / m), I/(e v), 2 pi sqrt(2 m e V)/h, 8 pi n a0.
V20 = 83876576.24801248
V5 = 41938288.12400624
N50 = 3720650.838206251
LAM20 = 8.672141172936905e-12
K20 = 724525256436.955
GAMMA50 = 0.004948344286533579


def test_velocity_20kv():
    assert electron_velocity(20e3) == pytest.approx(V20, rel=1e-12)
    assert electron_velocity(20e3) == pytest.approx(8.39e7, rel=1e-3)


def test_velocity_5kv_sqrt_scaling():
    assert electron_velocity(5e3) == pytest.approx(V5, rel=1e-12)
    assert electron_velocity(5e3) == pytest.approx(electron_velocity(20e3) / 2, rel=1e-12)


def test_velocity_rejects_nonpositive():
    with pytest.raises(ValueError):
        electron_velocity(0.0)
    with pytest.raises(ValueError):
        electron_velocity(-5.0)


def test_line_density_50ua_20kv():
    assert line_density(50e-6, 20e3) == pytest.approx(N50, rel=1e-12)
    assert line_density(50e-6, 20e3) == pytest.approx(3.72e6, rel=1e-3)


def test_line_density_zero_current():
    assert line_density(0.0, 20e3) == 0.0


def test_line_density_linear_in_current():
    assert line_density(100e-6, 20e3) == pytest.approx(2 * line_density(50e-6, 20e3), rel=1e-12)


def test_de_broglie_20kv():
    k = de_broglie_wavenumber(20e3)
    assert k == pytest.approx(K20, rel=1e-12)
    assert 2 * math.pi / k == pytest.approx(LAM20, rel=1e-12)
    assert 2 * math.pi / k == pytest.approx(8.67e-12, rel=1e-3)


def test_de_broglie_wavelength_halves_at_4x_voltage():
    lam20 = 2 * math.pi / de_broglie_wavenumber(20e3)
    lam80 = 2 * math.pi / de_broglie_wavenumber(80e3)
    assert lam80 == pytest.approx(lam20 / 2, rel=1e-12)


def test_spin_ratio_values():
    assert spin_negligibility_ratio(1e-9) == pytest.approx(1.74e5, rel=1e-2)
    assert spin_negligibility_ratio(2.4e-12) == pytest.approx(1.0, rel=1e-12)
    assert spin_negligibility_ratio(1e-6) == pytest.approx(1.74e11, rel=1e-2)
    assert spin_negligibility_ratio(1e-6) > 1e6  # >> 1 at beam scales


def test_gamma_50ua_20kv():
    p = PhysParams(voltage=20e3, current=50e-6)
    assert nonlinear_coefficient(p) == pytest.approx(GAMMA50, rel=1e-12)
    assert nonlinear_coefficient(p) == pytest.approx(4.95e-3, rel=1e-3)


def test_gamma_zero_iff_zero_current():
    assert nonlinear_coefficient(PhysParams(voltage=20e3, current=0.0)) == 0.0


def test_gamma_linear_in_current():
    g1 = nonlinear_coefficient(PhysParams(voltage=20e3, current=50e-6))
    g2 = nonlinear_coefficient(PhysParams(voltage=20e3, current=100e-6))
    assert g2 == pytest.approx(2 * g1, rel=1e-12)


def test_derive_scales_bundle():
    s = derive_scales(PhysParams(voltage=20e3, current=50e-6))
    assert s.velocity == pytest.approx(V20, rel=1e-12)
    assert s.k == pytest.approx(K20, rel=1e-12)
    assert s.n == pytest.approx(N50, rel=1e-12)
    assert s.gamma == pytest.approx(GAMMA50, rel=1e-12)
    # s = 1 corresponds to k*a0^2 of lab distance, about 2 nm at 20 kV
    assert s.z_scale == pytest.approx(K20 * BOHR_RADIUS**2, rel=1e-12)


def test_params_validation():
    with pytest.raises(ValueError):
        PhysParams(voltage=-1.0)
    with pytest.raises(ValueError):
        PhysParams(voltage=20e3, current=-1e-6)
    with pytest.raises(ValueError):
        PhysParams(voltage=20e3, oam_l=-1)
    with pytest.raises(ValueError):
        PhysParams(voltage=20e3, kT=-1.0)


@given(
    current=st.floats(1e-9, 1e-2),
    voltage=st.floats(1e2, 1e6),
)
def test_roundtrip_current_identity(current, voltage):
    # n * v * e recovers I
    n = line_density(current, voltage)
    assert n * electron_velocity(voltage) * E_CHARGE == pytest.approx(current, rel=1e-12)


@given(
    current=st.floats(1e-9, 1e-2),
    voltage=st.floats(1e2, 1e5),
)
def test_inverse_sqrt_voltage_law(current, voltage):
    assert line_density(current, 4 * voltage) == pytest.approx(
        line_density(current, voltage) / 2, rel=1e-12
    )


@given(length=st.floats(1e-12, 1e-3), factor=st.floats(1.0, 1e3))
def test_spin_ratio_quadratic(length, factor):
    r1 = spin_negligibility_ratio(length)
    r2 = spin_negligibility_ratio(length * factor)
    assert r2 == pytest.approx(r1 * factor**2, rel=1e-9)
    assert r2 >= r1
