import math

import numpy as np
import pytest

from ebeamsim.constants import BOHR_RADIUS
from ebeamsim.field import Field2D, apply_aperture, bessel, gaussian
from ebeamsim.propagate import (PropagatorConfig, energy_functional,
                                matched_absorber_strength, propagate)

K20 = 724525256436.955  # 20 kV axial wavenumber, 1/m
Z_UNIT = K20 * BOHR_RADIUS**2  # meters per scaled axial unit


def cfg(ds: float, s_max: float, **kw) -> PropagatorConfig:
    return PropagatorConfig(dz=ds * Z_UNIT, z_max=s_max * Z_UNIT, k=K20, **kw)


def test_plane_wave_is_stationary():
    n = 64
    f = Field2D(np.ones((n, n), dtype=complex), 2.0)
    trace = propagate(f, cfg(50.0, 5000.0, absorber=False, record_stride=10))
    assert trace.width[-1] == pytest.approx(trace.width[0], rel=1e-12)
    assert trace.peak_density[-1] == pytest.approx(trace.peak_density[0], rel=1e-12)


def test_free_gaussian_matches_analytic_spreading():
    sigma = 302.3562  # a0 (16 nm)
    s_max = 2.0 * math.sqrt(3.0) * sigma**2  # twice the width-doubling range
    f = gaussian(sigma, 0, 512, 16.0)
    trace = propagate(f, cfg(s_max / 80.0, s_max, absorber=False,
                             record_stride=4))
    for z_m, w_m in zip(trace.z, trace.width):
        s = z_m / Z_UNIT
        w_ana = sigma * math.sqrt(1.0 + (s / sigma**2) ** 2)
        assert w_m / BOHR_RADIUS == pytest.approx(w_ana, rel=0.01)
    # sqrt(2) crossing sits at s = sigma^2 exactly
    assert trace.nd_range == pytest.approx(sigma**2 * Z_UNIT, rel=0.02)


def test_untruncated_bessel_holds_width():
    kT = 0.1
    f = bessel(kT, 0, 256, 4.0)
    # matched Gaussian (sigma = 24 a0) would double its width by s ~ 1000
    trace = propagate(f, cfg(25.0, 1000.0, absorber=True,
                             absorber_strength=0.05, record_stride=5))
    w0 = trace.width[0]
    for w in trace.width:
        assert abs(w - w0) / w0 < 0.01
    assert trace.nd_range == math.inf


def test_truncated_bessel_erodes_on_schedule():
    # aperture R, transverse speed kT: replenishment fails near s = R/kT
    kT, R = 0.1, 200.0
    f = apply_aperture(bessel(kT, 0, 256, 2.0), R)
    trace = propagate(f, cfg(10.0, 4000.0, absorber=True,
                             absorber_strength=0.05, record_stride=10,
                             stop_width_factor=1.8))
    s_nd = trace.nd_range / Z_UNIT
    assert 500.0 < s_nd < 4000.0


def test_norm_and_energy_conservation():
    f = gaussian(30.0, 0, 128, 1.5)
    e0 = energy_functional(f, gamma=0.02)
    norms = []
    energies = []

    def hook(z, g):
        norms.append(g.norm)
        energies.append(energy_functional(g, gamma=0.02))

    propagate(f, cfg(2.5, 1000.0, gamma=0.02, absorber=False,
                     record_stride=80), metrics_hook=hook)
    assert max(abs(p - 1.0) for p in norms) < 1e-12
    scale = abs(e0)
    assert max(abs(e - e0) for e in energies) / scale < 1e-6


def test_second_order_convergence_in_dz():
    f = gaussian(30.0, 0, 128, 1.5)
    s_total = 1200.0
    finals = {}
    for ds in (20.0, 10.0, 2.5):
        captured = {}

        def hook(z, g, captured=captured):
            captured["d"] = g.density()

        propagate(f, cfg(ds, s_total, gamma=0.05, absorber=False,
                         record_stride=10**9), metrics_hook=hook)
        finals[ds] = captured["d"]
    ref = finals[2.5]
    err = {ds: float(np.sqrt(np.sum((finals[ds] - ref) ** 2)))
           for ds in (20.0, 10.0)}
    ratio = err[20.0] / err[10.0]
    assert 2.5 < ratio < 7.0  # second order: ~4x per halving


def test_potential_offset_is_pure_gauge():
    f = gaussian(30.0, 0, 128, 1.5)
    finals = []
    for off in (0.0, 0.005):
        captured = {}

        def hook(z, g, captured=captured):
            captured["d"] = g.density()

        propagate(f, cfg(10.0, 500.0, gamma=0.02, absorber=False,
                         record_stride=10**9, potential_offset=off),
                  metrics_hook=hook)
        finals.append(captured["d"])
    assert np.abs(finals[0] - finals[1]).max() < 1e-9 * finals[0].max()


def test_radial_symmetry_preserved():
    f = gaussian(24.0, 0, 128, 1.5)
    captured = {}

    def hook(z, g):
        captured["d"] = g.density()

    propagate(f, cfg(10.0, 800.0, gamma=0.02, absorber=True,
                     record_stride=10**9), metrics_hook=hook)
    d = captured["d"][1:, 1:]  # odd submatrix centered on the axis cell
    assert np.abs(d - np.rot90(d)).max() < 1e-8 * d.max()
    assert np.abs(d - d.T).max() < 1e-8 * d.max()


def test_absorber_swallows_outgoing_packet():
    # tilted packet flies into a ramp several wavelengths deep;
    # almost nothing reflects back into the interior
    n, dx = 512, 1.0
    f = gaussian(20.0, 0, n, dx)
    kick = 1.2
    x = f.axes()
    tilted = Field2D(f.amps * np.exp(1j * kick * x[:, None]), dx)
    captured = {}

    def hook(z, g):
        captured["d"] = g.density()

    propagate(tilted, cfg(3.0, 400.0, absorber=True, absorber_frac=0.45,
                          absorber_strength=matched_absorber_strength(kick),
                          record_stride=10**9),
              metrics_hook=hook)
    d = captured["d"]
    r = tilted.radius_grid()
    interior = float(np.sum(np.where(r < 100.0, d, 0.0)) * dx**2)
    assert interior < 1e-4  # initial interior power was ~1


def test_stop_width_factor_halts_early():
    sigma = 100.0
    f = gaussian(sigma, 0, 256, 8.0)
    trace = propagate(f, cfg(500.0, 60000.0, absorber=False, record_stride=2,
                             stop_width_factor=1.5))
    assert trace.z[-1] < 60000.0 * Z_UNIT
    assert trace.width[-1] >= 1.5 * trace.width[0] * 0.999


def test_nonfinite_amplitude_raises():
    n = 64
    amps = np.ones((n, n), dtype=complex)
    amps[3, 3] = np.nan
    with pytest.raises(RuntimeError, match="non-finite"):
        propagate(Field2D(amps, 1.0), cfg(10.0, 100.0))


def test_potential_phase_gate():
    f = gaussian(30.0, 0, 128, 1.5)
    with pytest.raises(ValueError, match="reduce dz"):
        propagate(f, cfg(5000.0, 10000.0, gamma=0.05))


def test_config_validation():
    with pytest.raises(ValueError):
        PropagatorConfig(dz=-1.0, z_max=1.0, k=K20)
    with pytest.raises(ValueError):
        PropagatorConfig(dz=1.0, z_max=1.0, k=-5.0)
    with pytest.raises(ValueError):
        PropagatorConfig(dz=1.0, z_max=2.0, k=K20, absorber_frac=0.9)


def test_energy_functional_plane_wave():
    n, dx = 64, 2.0
    kx = 2.0 * math.pi * 4 / (n * dx)  # an exact grid mode
    x = (np.arange(n) - n // 2) * dx
    amps = np.exp(1j * kx * x)[:, None] * np.ones(n)
    f = Field2D(amps / math.sqrt(np.sum(np.abs(amps) ** 2) * dx * dx), dx)
    assert energy_functional(f, gamma=0.0) == pytest.approx(0.5 * kx**2, rel=1e-12)
