"""Command-line entry point.

Verbs: `solve` (initial profile only), `propagate` (one scenario),
`sweep` (width scan), `mask` (hologram pipeline), `report` (summarize
finished output directories), `presets` (list built-in scenarios).
"""
from __future__ import annotations

import argparse
import os
import sys

from .params import from_bohr
from .radial import save_profile
from .runner import resolve_run, run_mask_pipeline, run_scenario, run_sweep
from .scenarios import PRESETS, ScenarioError, load_scenario, preset


def _add_common(p: argparse.ArgumentParser, outdir: bool = True) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--scenario", metavar="FILE",
                   help="path to a scenario JSON file")
    g.add_argument("--preset", metavar="NAME",
                   help="name of a built-in scenario (see `presets`)")
    if outdir:
        p.add_argument("--outdir", required=True,
                       help="directory for run artifacts")
    p.add_argument("--profile", choices=("fast", "full"),
                   default=os.environ.get("EBEAMSIM_PROFILE", "fast"),
                   help="grid/sampling tier (default: $EBEAMSIM_PROFILE "
                        "or fast)")
    p.add_argument("--seed", type=int, default=0,
                   help="noise seed (default 0)")


def _load(args: argparse.Namespace) -> dict:
    if args.preset:
        return preset(args.preset)
    return load_scenario(args.scenario)


def _fmt_ld(res: dict) -> str:
    ld = res.get("L_d_m")
    if ld is None:
        return "L_d > %.3f um (censored)" % (res["final_z_m"] * 1e6)
    return "L_d = %.3f um" % (ld * 1e6)


def _cmd_solve(args) -> int:
    rr = resolve_run(_load(args), args.profile, args.seed)
    os.makedirs(args.outdir, exist_ok=True)
    line = [f"{rr.scenario['name']}: kind={rr.kind}"]
    if rr.kT is not None:
        line.append(f"kT={rr.kT:.6g} a0^-1")
    if rr.sigma is not None:
        line.append(f"sigma={from_bohr(rr.sigma) * 1e9:.4g} nm")
    if rr.width_target is not None:
        line.append(f"width={from_bohr(rr.width_target) * 1e9:.4g} nm")
    if rr.radial is not None:
        save_profile(rr.radial, os.path.join(args.outdir, "profile.json"))
        line.append(f"lobes={rr.resolved['lobe_count']}")
        line.append(f"residual={rr.radial.residual:.2e}")
        line.append("-> profile.json")
    print("  ".join(line))
    return 0


def _cmd_propagate(args) -> int:
    s = run_scenario(_load(args), args.outdir, args.profile, args.seed)
    res = s["results"]
    print(f"{s['scenario']['name']}: {_fmt_ld(res)}  "
          f"width0={res['initial_width_nm']:.3f} nm  "
          f"records={res['n_records']}  -> {args.outdir}")
    return 0


def _cmd_sweep(args) -> int:
    s = run_sweep(_load(args), args.outdir, args.profile, args.seed,
                  threads=args.threads)
    res = s["results"]
    for fam, rows in res["families"].items():
        pts = ", ".join(
            "%.2f:%s" % (w, "%.1f" % (ld * 1e6) if ld else "inf")
            for w, ld in zip(rows["width_nm"], rows["L_d_m"]))
        print(f"{fam}: width_nm:L_d_um = {pts}")
    print(f"maximal width {res['maximal_width_nm']:.3f} nm; "
          f"critical width {res['critical_width_nm']} nm; "
          f"{len(res['failures'])} failed points  -> {args.outdir}")
    return 0


def _cmd_mask(args) -> int:
    s = run_mask_pipeline(_load(args), args.outdir, args.profile, args.seed)
    res = s["results"]
    print(f"{s['scenario']['name']}: fidelity={res['fidelity_plus1']:.4f}  "
          f"threshold={res['threshold']:.4f}  "
          f"fork_diff={res['fork_fringe_difference']}  -> {args.outdir}")
    return 0


def _cmd_report(args) -> int:
    from .io import load_json
    rc = 0
    for d in args.dirs:
        found = False
        for name in ("summary.json", "sweep_summary.json",
                     "mask_summary.json"):
            path = os.path.join(d, name)
            if not os.path.exists(path):
                continue
            found = True
            s = load_json(path)
            res = s["results"]
            if name == "summary.json":
                print(f"{d}: {s['scenario']['name']} [{s['profile']}] "
                      f"{_fmt_ld(res)}  width0="
                      f"{res['initial_width_nm']:.3f} nm")
            elif name == "sweep_summary.json":
                print(f"{d}: sweep {s['scenario']['name']} "
                      f"[{s['profile']}] maximal="
                      f"{res['maximal_width_nm']:.3f} nm critical="
                      f"{res['critical_width_nm']} nm "
                      f"failures={len(res['failures'])}")
            else:
                print(f"{d}: mask {s['scenario']['name']} fidelity="
                      f"{res['fidelity_plus1']:.4f} threshold="
                      f"{res['threshold']:.4f}")
        if not found:
            print(f"{d}: no summary found", file=sys.stderr)
            rc = 1
    return rc


def _cmd_presets(_args) -> int:
    for name in sorted(PRESETS):
        sc = PRESETS[name]
        phys = sc["physics"]
        bits = [sc["kind"], f"{phys['voltage'] / 1e3:g} kV",
                f"{phys['current'] * 1e6:g} uA",
                f"R={phys.get('aperture_radius_nm', 140):g} nm"]
        if phys.get("oam_l"):
            bits.append(f"l={phys['oam_l']}")
        if "sweep" in sc:
            bits.append("sweep")
        if "mask" in sc:
            bits.append("mask")
        if sc.get("noise_ratio"):
            bits.append(f"noise={sc['noise_ratio']:g}")
        print(f"{name:22s} {'  '.join(bits)}  (v{sc['version']})")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="ebeamsim",
        description="Non-diffracting electron-beam simulations: "
                    "self-consistent profiles, mean-field propagation, "
                    "width sweeps, and binary hologram synthesis.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="solve the initial profile only")
    _add_common(p)
    p.set_defaults(fn=_cmd_solve)

    p = sub.add_parser("propagate", help="run one scenario end to end")
    _add_common(p)
    p.set_defaults(fn=_cmd_propagate)

    p = sub.add_parser("sweep", help="width sweep across beam families")
    _add_common(p)
    p.add_argument("--threads", type=int, default=1,
                   help="worker processes for sweep points")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("mask", help="synthesize and verify a binary mask")
    _add_common(p)
    p.set_defaults(fn=_cmd_mask)

    p = sub.add_parser("report", help="summarize finished output dirs")
    p.add_argument("dirs", nargs="+", metavar="DIR")
    p.set_defaults(fn=_cmd_report)

    p = sub.add_parser("presets", help="list built-in scenarios")
    p.set_defaults(fn=_cmd_presets)

    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
