#!/usr/bin/env python3
"""Measure L_d for the five beam-family presets at 20 kV / 50 uA and
check the ordering and ratio targets before freezing scenario presets.

Families are width-matched at the Eq.-7 width of the 10-lobe truncated
Bessel pin, inverting width(kT) per family.
"""
import argparse
import math
import time

import numpy as np
from scipy.special import jn_zeros

from ebeamsim.constants import BOHR_RADIUS
from ebeamsim.field import apply_aperture, bessel, from_radial, gaussian
from ebeamsim.metrics import main_lobe_radius  # noqa: F401 (interactive use)
from ebeamsim.params import PhysParams, derive_scales, to_bohr
from ebeamsim.propagate import (PropagatorConfig, matched_absorber_strength,
                                propagate)
from ebeamsim.radial import count_lobes, main_lobe_width, solve_radial

C0 = 1.122970163  # J0 main-lobe rms width coefficient: w = C0/kT


def solve_sp_kt(width_target: float, gamma: float, rho_max: float,
                lo: float, hi: float) -> float:
    """Invert main_lobe_width(solve_radial(kT)) = width_target; width is
    monotone decreasing in kT."""
    def w(kt):
        return main_lobe_width(solve_radial(kt, 0, gamma, rho_max,
                                            points_per_wavelength=128))
    for _ in range(18):
        mid = 0.5 * (lo + hi)
        if w(mid) > width_target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=512)
    ap.add_argument("--families", default="glin,gnl,blin,bnl,sp")
    ap.add_argument("--ds", type=float, default=50.0)
    args = ap.parse_args()

    p = PhysParams(voltage=20e3, current=50e-6)
    sc = derive_scales(p)
    gamma = sc.gamma
    z_unit = sc.z_scale  # meters per scaled axial unit
    R = to_bohr(140e-9)
    n = args.n
    dx = 2.0 * R / (n / 2)  # aperture spans half the grid

    j10, j11 = jn_zeros(0, 11)[9:11]
    kt_b = 0.5 * (j10 + j11) / R
    w_star = C0 / kt_b
    print(f"gamma={gamma:.6e}  z_unit={z_unit:.6e} m  R={R:.1f} a0  dx={dx:.3f}")
    print(f"kT_B={kt_b:.6f} (10-lobe pin)  w*={w_star:.2f} a0 = "
          f"{w_star * BOHR_RADIUS * 1e9:.3f} nm")

    t0 = time.time()
    kt_sp = solve_sp_kt(w_star, gamma, R, 1e-4, kt_b)
    prof_sp = solve_radial(kt_sp, 0, gamma, R, extend_to=n * dx / math.sqrt(2) + dx)
    print(f"kT_sp={kt_sp:.6f}  width={main_lobe_width(prof_sp):.2f} a0  "
          f"lobes={count_lobes(prof_sp)}  [{time.time() - t0:.0f}s]")

    def build(kind):
        if kind in ("glin", "gnl"):
            return apply_aperture(gaussian(w_star, 0, n, dx), R)
        if kind in ("blin", "bnl"):
            return apply_aperture(bessel(kt_b, 0, n, dx), R)
        return apply_aperture(from_radial(prof_sp, 0, n, dx), R)

    runs = {
        "glin": dict(gamma=0.0, ds=250.0, s_max=30_000.0, stride=1),
        "gnl": dict(gamma=gamma, ds=args.ds, s_max=30_000.0, stride=4),
        "blin": dict(gamma=0.0, ds=1000.0, s_max=420_000.0, stride=1),
        "bnl": dict(gamma=gamma, ds=args.ds, s_max=150_000.0, stride=10),
        "sp": dict(gamma=gamma, ds=args.ds, s_max=320_000.0, stride=20),
    }
    results = {}
    for name in args.families.split(","):
        r = runs[name]
        f = build(name)
        cfg = PropagatorConfig(
            dz=r["ds"] * z_unit, z_max=r["s_max"] * z_unit, k=sc.k,
            gamma=r["gamma"], record_stride=r["stride"],
            absorber_strength=matched_absorber_strength(0.036),
            stop_width_factor=1.6)
        t0 = time.time()
        trace = propagate(f, cfg)
        ld_um = trace.nd_range * 1e6
        results[name] = trace.nd_range
        print(f"{name:5s} w0={trace.width[0] * 1e9:.3f} nm  "
              f"L_d={ld_um:9.2f} um  (s_nd={trace.nd_range / z_unit:9.0f})  "
              f"steps~{trace.z[-1] / (r['ds'] * z_unit):.0f}  "
              f"lobe_frac0={trace.lobe_fraction[0]:.3f}  "
              f"[{time.time() - t0:.0f}s]")

    if len(results) == 5:
        order = ["gnl", "glin", "bnl", "sp", "blin"]
        vals = [results[k] for k in order]
        ok = all(a < b for a, b in zip(vals, vals[1:]))
        ratio = results["sp"] / results["bnl"]
        print(f"ordering gnl<glin<bnl<sp<blin: {ok}")
        print(f"ratio sp/bnl = {ratio:.2f} (target 5 +/- 40% -> [3.0, 7.0])")


if __name__ == "__main__":
    main()
