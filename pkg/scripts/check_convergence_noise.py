#!/usr/bin/env python3
"""Convergence (dz/2, dx/2) and noise-robustness measurements on the
shape-preserving fig3 configuration, run before freezing presets."""
import math
import time

from scipy.special import jn_zeros

from ebeamsim.field import add_noise, apply_aperture, from_radial
from ebeamsim.params import PhysParams, derive_scales, to_bohr
from ebeamsim.propagate import (PropagatorConfig, matched_absorber_strength,
                                propagate)
from ebeamsim.radial import main_lobe_width, solve_radial

C0 = 1.122970163


def main():
    p = PhysParams(voltage=20e3, current=50e-6)
    sc = derive_scales(p)
    gamma, z_unit = sc.gamma, sc.z_scale
    R = to_bohr(140e-9)
    j10, j11 = jn_zeros(0, 11)[9:11]
    w_star = C0 / (0.5 * (j10 + j11) / R)

    lo, hi = 1e-4, 0.0122
    for _ in range(18):
        mid = 0.5 * (lo + hi)
        w = main_lobe_width(solve_radial(mid, 0, gamma, R,
                                         points_per_wavelength=128))
        lo, hi = (mid, hi) if w > w_star else (lo, mid)
    kt_sp = 0.5 * (lo + hi)
    corner = 2.0 * R * math.sqrt(2.0) + 25.0
    prof = solve_radial(kt_sp, 0, gamma, R, extend_to=corner)
    print(f"kt_sp={kt_sp:.6f}")

    def run(n, ds, noise_seed=None):
        dx = 2.0 * R / (n / 2)
        f = apply_aperture(from_radial(prof, 0, n, dx), R)
        if noise_seed is not None:
            f = add_noise(f, 1.0, noise_seed)
        cfg = PropagatorConfig(
            dz=ds * z_unit, z_max=320_000.0 * z_unit, k=sc.k, gamma=gamma,
            record_stride=max(1, int(round(1000.0 / ds))),
            absorber_strength=matched_absorber_strength(0.036),
            stop_width_factor=1.6)
        t0 = time.time()
        tr = propagate(f, cfg)
        return tr.nd_range * 1e6, time.time() - t0, tr

    base, t, tr0 = run(512, 50.0)
    print(f"sp 512 ds=50 : L_d={base:8.2f} um  w0={tr0.width[0]*1e9:.3f} nm [{t:.0f}s]")
    half_dz, t, _ = run(512, 25.0)
    print(f"sp 512 ds=25 : L_d={half_dz:8.2f} um  d={abs(half_dz-base)/base:6.2%} [{t:.0f}s]")
    half_dx, t, trx = run(1024, 50.0)
    print(f"sp 1024 ds=50: L_d={half_dx:8.2f} um  d={abs(half_dx-base)/base:6.2%} "
          f"w0={trx.width[0]*1e9:.3f} nm [{t:.0f}s]")

    for seed in (1, 2, 3):
        ld, t, trn = run(512, 50.0, noise_seed=seed)
        print(f"sp noise seed={seed}: L_d={ld:8.2f} um  d={abs(ld-base)/base:6.2%} "
              f"w0={trn.width[0]*1e9:.3f} nm  [{t:.0f}s]")


if __name__ == "__main__":
    main()
