"""Radial solver: linear-limit oracles, consistency checks, monotonicity.

Bessel references come from scipy.special (independent of the RK4
integration); closed-form potential oracles are derived analytically in
comments where used.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import jn_zeros, jv

from ebeamsim.radial import (
    RadialProfile,
    count_lobes,
    find_zeros,
    main_lobe_width,
    radial_potential_from_density,
    shape_equation_residual,
    solve_radial,
    solve_radial_flat,
    save_profile,
    load_profile,
)

GAMMA = 0.004948344286533579  # 50 uA at 20 kV
APERTURE = 2645.6166  # 140 nm in a0
KT16 = 1.122970163 / 302.3561801  # J0 main-lobe width of 16 nm


def rel_l2_vs_bessel(profile, l):
    """L2(rho drho) distance to J_l(kT rho), both unit-normalized."""
    r, f = profile.rho, profile.phi
    m = r <= profile.rho_max
    ref = jv(l, profile.kT * r[m])
    fn = f[m] / math.sqrt(np.trapezoid(f[m] ** 2 * r[m], r[m]))
    rn = ref / math.sqrt(np.trapezoid(ref**2 * r[m], r[m]))
    return math.sqrt(np.trapezoid((fn - rn) ** 2 * r[m], r[m]))


@pytest.fixture(scope="module")
def nonlinear16():
    return solve_radial(KT16, 0, GAMMA, APERTURE)


@pytest.fixture(scope="module")
def flat50():
    return solve_radial_flat(GAMMA, APERTURE)


@pytest.mark.parametrize("l", [0, 1, 3, 5])
def test_linear_limit_reproduces_bessel(l):
    kT = 0.01
    p = solve_radial(kT, l, 0.0, APERTURE)
    assert rel_l2_vs_bessel(p, l) < 1e-6
    assert abs(p.norm - 1.0) < 1e-8


def test_linear_first_zero_matches_bessel_zero():
    p = solve_radial(KT16, 0, 0.0, APERTURE)
    assert p.zeros.size >= 3
    assert p.zeros[0] * p.kT == pytest.approx(jn_zeros(0, 1)[0], abs=1e-4)


def test_normalization_and_residual(nonlinear16):
    p = nonlinear16
    assert abs(p.norm - 1.0) < 1e-8
    # independent quadrature of the recorded samples (trapezoid-limited)
    m = p.rho <= p.rho_max
    q = 2 * math.pi * np.trapezoid(p.phi[m] ** 2 * p.rho[m], p.rho[m])
    assert q == pytest.approx(1.0, abs=1e-5)
    assert p.residual < 1e-7  # 10x the 1e-8 norm tolerance
    assert p.potential_mismatch < 1e-8


def test_potential_boundary_conditions(nonlinear16):
    p = nonlinear16
    # U(0) = -kT^2 up to the O(eps^2) series term; U strictly decreasing
    eps = p.rho[0]
    assert abs(p.U[0] + p.kT**2) <= GAMMA * p.alpha**2 * eps**2
    assert np.all(np.diff(p.U) < 0)


def test_nonlinear_matches_bessel_near_axis_only(nonlinear16):
    p = nonlinear16
    inner = p.rho <= 0.05 * jn_zeros(0, 1)[0] / p.kT
    assert np.max(np.abs(p.phi[inner] / p.alpha - jv(0, p.kT * p.rho[inner]))) < 1e-3
    # but globally the profile is far from the linear Bessel solution
    assert rel_l2_vs_bessel(p, 0) > 0.10


def test_denser_lobes_than_bessel(nonlinear16):
    p = nonlinear16
    # repulsion accelerates the local wavenumber: late lobe spacing falls
    # below the asymptotic Bessel gap pi/kT
    gaps = np.diff(p.zeros)
    assert gaps[-1] < 0.9 * math.pi / p.kT
    assert len(p.zeros) > len(jn_zeros(0, 20)[jn_zeros(0, 20) < p.kT * APERTURE])


def test_monotone_densification(nonlinear16):
    gaps = np.diff(nonlinear16.zeros)
    assert np.all(np.diff(gaps) < 0)


def test_large_kt_converges_to_bessel():
    # perturbation theory: accumulated phase drift ~ gamma*rho_max/kT, so
    # the distance decays like 1/kT; a small aperture keeps solves cheap
    dists = [rel_l2_vs_bessel(solve_radial(kT, 0, GAMMA, 200.0), 0)
             for kT in (0.25, 0.5, 1.0, 2.0)]
    assert all(a > b for a, b in zip(dists, dists[1:]))
    assert dists[-1] < 0.01


def test_flat_solution_is_widest(flat50, nonlinear16):
    assert flat50.zeros[0] >= nonlinear16.zeros[0]
    p = solve_radial(0.5 * KT16, 0, GAMMA, APERTURE)
    assert flat50.zeros[0] >= p.zeros[0]


def test_flat_width_decreases_with_gamma(flat50):
    wider = main_lobe_width(flat50)
    narrower = main_lobe_width(solve_radial_flat(2 * GAMMA, APERTURE))
    assert narrower < wider


def test_flat_rejects_linear_and_oam():
    with pytest.raises(ValueError):
        solve_radial_flat(0.0, APERTURE)
    with pytest.raises(ValueError):
        solve_radial(0.0, 1, GAMMA, APERTURE)


def test_solve_radial_validates_inputs():
    with pytest.raises(ValueError):
        solve_radial(-1.0, 0, GAMMA, APERTURE)
    with pytest.raises(ValueError):
        solve_radial(KT16, 0, GAMMA, -5.0)
    with pytest.raises(ValueError):
        solve_radial(KT16, 0, GAMMA, APERTURE, points_per_wavelength=32)


def test_extension_does_not_change_normalization():
    p = solve_radial(KT16, 0, GAMMA, APERTURE, extend_to=1.5 * APERTURE)
    assert p.rho[-1] >= 1.5 * APERTURE
    assert abs(p.norm - 1.0) < 1e-8
    m = p.rho <= p.rho_max
    q = 2 * math.pi * np.trapezoid(p.phi[m] ** 2 * p.rho[m], p.rho[m])
    assert q == pytest.approx(1.0, abs=1e-5)


def test_potential_from_zero_density():
    rho = np.linspace(0.01, 100.0, 500)
    U = radial_potential_from_density(rho, np.zeros_like(rho), GAMMA, U0=-2.5)
    assert np.allclose(U, -2.5)


def test_potential_uniform_disk_closed_form():
    # (1/rho)(rho U')' = -gamma c  =>  U - U(0) = -gamma c rho^2 / 4
    rho = np.linspace(1e-4, 50.0, 20001)
    c = 0.37
    U = radial_potential_from_density(rho, np.full_like(rho, math.sqrt(c)), GAMMA)
    expected = -GAMMA * c * rho**2 / 4.0
    assert np.max(np.abs(U - U[0] - (expected - expected[0]))) < 1e-9


def test_potential_laplacian_recovers_density():
    # defining property: (1/rho)(rho U')' = -gamma |phi|^2
    rho = np.linspace(1e-3, 40.0, 40001)
    phi = np.exp(-(rho**2) / 50.0)
    U = radial_potential_from_density(rho, phi, GAMMA)
    h = rho[1] - rho[0]
    Up = np.gradient(U, h, edge_order=2)
    lap = np.gradient(rho * Up, h, edge_order=2)[2:-2] / rho[2:-2]
    assert np.max(np.abs(lap + GAMMA * phi[2:-2] ** 2)) < 1e-6 * GAMMA


def test_find_zeros_on_constant_profile():
    rho = np.linspace(0.1, 10.0, 100)
    prof = RadialProfile(rho=rho, phi=np.ones_like(rho), U=np.zeros_like(rho),
                         kT=1.0, l=0, gamma=0.0, alpha=1.0, rho_max=10.0, norm=1.0)
    assert find_zeros(prof).size == 0
    assert count_lobes(prof) == 1  # the central lobe


def test_count_lobes_bookkeeping(nonlinear16):
    within = np.count_nonzero(nonlinear16.zeros <= nonlinear16.rho_max)
    assert nonlinear16.lobe_count == within + 1
    p1 = solve_radial(0.0073, 1, GAMMA, APERTURE)
    assert p1.lobe_count == np.count_nonzero(p1.zeros <= p1.rho_max)


def test_profile_roundtrip(tmp_path, nonlinear16):
    path = tmp_path / "profile.txt"
    save_profile(nonlinear16, str(path))
    back = load_profile(str(path))
    assert np.allclose(back.rho, nonlinear16.rho, rtol=0, atol=0)
    assert np.allclose(back.phi, nonlinear16.phi, rtol=0, atol=0)
    assert np.allclose(back.U, nonlinear16.U, rtol=0, atol=0)
    assert back.kT == nonlinear16.kT
    assert back.l == nonlinear16.l
    assert back.gamma == nonlinear16.gamma
    assert back.lobe_count == nonlinear16.lobe_count


@settings(max_examples=5, deadline=None)
@given(
    kT=st.floats(0.002, 0.05),
    gamma=st.floats(1e-4, 2e-2),
)
def test_solution_invariants_hold_across_parameters(kT, gamma):
    p = solve_radial(kT, 0, gamma, 1000.0)
    assert abs(p.norm - 1.0) < 1e-8
    assert p.residual < 1e-7
    assert p.potential_mismatch < 1e-8
    assert np.all(np.diff(p.U) < 0)
    assert abs(p.U[0] + kT**2) <= gamma * p.alpha**2 * p.rho[0] ** 2 + 1e-30
