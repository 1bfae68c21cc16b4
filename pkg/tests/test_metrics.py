import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import jn_zeros, jv

from ebeamsim.field import Field2D, apply_aperture, bessel, gaussian
from ebeamsim.metrics import (PropagationTrace, azimuthal_average,
                              effective_width, main_lobe_current,
                              main_lobe_radius, nondiffraction_range)

J01 = float(jn_zeros(0, 1)[0])  # 2.404826
J11 = float(jn_zeros(1, 1)[0])  # 3.831706


def test_bessel_lobe_radius():
    kT = 0.05
    f = bessel(kT, 0, 512, 1.0)
    r, a = azimuthal_average(f)
    assert main_lobe_radius(r, a) == pytest.approx(J01 / kT, abs=1.5 * f.dx)


def test_bessel_l1_lobe_radius():
    kT = 0.05
    f = bessel(kT, 1, 512, 1.0)
    r, a = azimuthal_average(f)
    assert main_lobe_radius(r, a) == pytest.approx(J11 / kT, abs=1.5 * f.dx)


def test_gaussian_has_no_lobe_boundary():
    f = gaussian(25.0, 0, 256, 1.0)
    r, a = azimuthal_average(f)
    assert main_lobe_radius(r, a) == math.inf
    assert main_lobe_current(f, math.inf) == 1.0


def test_hysteresis_prefers_nearest_minimum():
    kT = 0.05
    f = bessel(kT, 0, 512, 1.0)
    r, a = azimuthal_average(f)
    second = jn_zeros(0, 2)[1] / kT
    assert main_lobe_radius(r, a, prev_radius=second) == pytest.approx(second, abs=2.0)


def test_gaussian_effective_width_is_sigma():
    f = gaussian(25.0, 0, 512, 0.5)
    assert effective_width(f) == pytest.approx(25.0, rel=1e-6)


def test_uniform_disk_width():
    # flat density cut at R: rms radius R/sqrt(2)
    n, dx, R = 512, 1.0, 150.0
    amps = np.ones((n, n), dtype=complex)
    f = apply_aperture(Field2D(amps, dx), R)
    assert effective_width(f) == pytest.approx(R / math.sqrt(2.0), rel=2e-3)


def test_lobe_current_fraction_matches_radial_quadrature():
    kT = 0.05
    cut = jn_zeros(0, 5)[-1] / kT  # 298.6 a0, inside the 512 a0 half-width
    f = apply_aperture(bessel(kT, 0, 1024, 1.0), cut)
    r, a = azimuthal_average(f)
    lobe = main_lobe_radius(r, a)
    got = main_lobe_current(f, lobe)
    num = quad(lambda x: jv(0, kT * x) ** 2 * x, 0, J01 / kT)[0]
    den = quad(lambda x: jv(0, kT * x) ** 2 * x, 0, cut, limit=200)[0]
    assert got == pytest.approx(num / den, rel=0.02)


def test_metrics_invariant_to_phase_and_scale():
    f = bessel(0.05, 0, 256, 1.0)
    g = Field2D(3.7 * np.exp(1j * 0.9) * f.amps, f.dx)
    rf, af = azimuthal_average(f)
    rg, ag = azimuthal_average(g)
    assert main_lobe_radius(rf, af) == main_lobe_radius(rg, ag)
    assert effective_width(g, 100.0) == pytest.approx(effective_width(f, 100.0), rel=1e-12)
    assert main_lobe_current(g, 100.0) == pytest.approx(main_lobe_current(f, 100.0), rel=1e-12)


def test_width_scales_with_grid_spacing():
    a = gaussian(25.0, 0, 256, 1.0)
    b = Field2D(a.amps.copy(), 2.0)  # same samples, doubled spacing
    assert effective_width(b) == pytest.approx(2.0 * effective_width(a), rel=1e-9)


def test_width_stable_under_resolution_change():
    coarse = gaussian(25.0, 0, 256, 2.0)
    fine = gaussian(25.0, 0, 512, 1.0)
    assert effective_width(fine) == pytest.approx(effective_width(coarse), rel=1e-4)


def test_nondiffraction_range_free_gaussian_oracle():
    # sigma(z) = s0 sqrt(1 + (z/zr)^2) crosses sqrt(2) s0 exactly at zr
    s0, zr = 4.0, 100.0
    z = np.linspace(0.0, 250.0, 2001)
    w = s0 * np.sqrt(1.0 + (z / zr) ** 2)
    assert nondiffraction_range(z, w) == pytest.approx(zr, rel=1e-4)


def test_nondiffraction_range_sentinel_and_validation():
    z = [0.0, 1.0, 2.0]
    assert nondiffraction_range(z, [5.0, 5.0, 5.1]) == math.inf
    with pytest.raises(ValueError):
        nondiffraction_range([0.0, 2.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        nondiffraction_range([0.0], [1.0])


def test_trace_finalize():
    t = PropagationTrace()
    for z, w in [(0.0, 1.0), (1.0, 1.2), (2.0, 1.5)]:
        t.record(z, w, 1.0, 1.0, math.inf)
    t.finalize()
    assert t.initial_width == 1.0
    assert 1.0 < t.nd_range < 2.0
    assert t.Ld == t.nd_range  # alias
