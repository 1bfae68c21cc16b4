"""Scenario configs: validated dicts describing one numerical experiment.

A scenario pins the physical parameters, the initial-condition family and
its size, the grid, and the propagation settings.  Named presets
reproduce the stock experiments and are immutable and version-stamped;
custom scenario files validate against the same schema.

Beam sizes are declarative so that nothing about the transverse scale is
hard-coded: a size spec either pins the lobe count inside the aperture
(the wavenumber is solved from it), gives the wavenumber directly, or
gives a target effective width that each family inverts numerically.
"""
from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from typing import Any

import jsonschema

SCHEMA_VERSION = "1"

KINDS = ("gaussian", "bessel", "laguerre-gauss", "shape-preserving",
         "shape-preserving-flat")

# grid n and sweep point counts may be profile-dependent
def _int_or_profiled(minimum: int) -> dict:
    base = {"type": "integer", "minimum": minimum}
    return {
        "oneOf": [
            base,
            {"type": "object",
             "properties": {"fast": dict(base), "full": dict(base)},
             "required": ["fast", "full"],
             "additionalProperties": False},
        ]
    }


_GRID_N = _int_or_profiled(16)
_POINT_COUNT = _int_or_profiled(2)

_SIZE_SCHEMA = {
    "type": "object",
    "properties": {
        "lobes": {"type": "integer", "minimum": 1},
        "kT": {"type": "number", "exclusiveMinimum": 0},
        "width_nm": {"type": "number", "exclusiveMinimum": 0},
        "match": {
            "type": "object",
            "properties": {
                "lobes": {"type": "integer", "minimum": 1},
                "aperture_nm": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["lobes"],
            "additionalProperties": False,
        },
    },
    "minProperties": 1,
    "maxProperties": 1,
    "additionalProperties": False,
}

SCENARIO_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "name": {"type": "string", "minLength": 1},
        "version": {"type": "string"},
        "physics": {
            "type": "object",
            "properties": {
                "voltage": {"type": "number", "exclusiveMinimum": 0},
                "current": {"type": "number", "minimum": 0},
                "oam_l": {"type": "integer", "minimum": 0},
                "aperture_radius_nm": {"type": "number",
                                       "exclusiveMinimum": 0},
            },
            "required": ["voltage", "current"],
            "additionalProperties": False,
        },
        "kind": {"enum": list(KINDS)},
        "size": _SIZE_SCHEMA,
        "grid": {
            "type": "object",
            "properties": {
                "n": _GRID_N,
                # grid side length as a multiple of the aperture radius
                "width_apertures": {"type": "number", "minimum": 2.5,
                                    "maximum": 8.0},
            },
            "required": ["n"],
            "additionalProperties": False,
        },
        "propagation": {
            "type": "object",
            "properties": {
                "ds": {"type": "number", "exclusiveMinimum": 0},
                "s_max": {"type": "number", "exclusiveMinimum": 0},
                "record_stride": {"type": "integer", "minimum": 1},
                "stop_width_factor": {"type": ["number", "null"]},
                "absorber_strength": {"type": ["number", "null"]},
                "absorber_frac": {"type": "number",
                                  "exclusiveMinimum": 0, "maximum": 0.5},
            },
            "required": ["ds", "s_max"],
            "additionalProperties": False,
        },
        "noise_ratio": {"type": "number", "minimum": 0},
        "mask": {
            "type": "object",
            "properties": {
                "n": _GRID_N,
                "threshold": {"type": ["number", "null"]},
            },
            "required": ["n"],
            "additionalProperties": False,
        },
        "sweep": {
            "type": "object",
            "properties": {
                "axis": {"enum": ["width"]},
                "width_nm_min": {"type": "number", "exclusiveMinimum": 0},
                "width_nm_max": {"type": ["number", "null"]},
                "points": _POINT_COUNT,
                "families": {
                    "type": "array",
                    "items": {"enum": list(KINDS)},
                    "minItems": 1,
                },
            },
            "required": ["axis", "width_nm_min", "points", "families"],
            "additionalProperties": False,
        },
    },
    "required": ["schema_version", "name", "physics", "kind", "grid",
                 "propagation"],
    "additionalProperties": False,
}


class ScenarioError(ValueError):
    pass


def validate_scenario(raw: dict) -> dict:
    """Schema-check a scenario dict; raises ScenarioError listing every
    missing required field and the first few value violations."""
    validator = jsonschema.Draft202012Validator(SCENARIO_SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.path))
    if not errors:
        return raw
    missing = set()
    other = []
    for err in errors:
        if err.validator == "required":
            prefix = ".".join(str(p) for p in err.path)
            for name in err.validator_value:
                if name not in err.instance:
                    missing.add(f"{prefix}.{name}" if prefix else name)
        else:
            where = ".".join(str(p) for p in err.path) or "<root>"
            other.append(f"{where}: {err.message}")
    parts = []
    if missing:
        parts.append("missing required fields: " + ", ".join(sorted(missing)))
    if other:
        parts.append("; ".join(other[:5]))
    raise ScenarioError("invalid scenario: " + "; ".join(parts))


def load_scenario(path: str) -> dict:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"scenario file is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ScenarioError("scenario file must hold a JSON object")
    return validate_scenario(raw)


@dataclass(frozen=True)
class ResolvedGrid:
    n: int
    dx: float  # Bohr radii; aperture diameter spans half the grid


def resolve_profiled(value, profile: str) -> int:
    if isinstance(value, dict):
        return int(value[profile])
    return int(value)


# ---------------------------------------------------------------------------
# presets

_FIG3_PHYSICS = {"voltage": 20e3, "current": 50e-6,
                 "aperture_radius_nm": 140.0}
_GRID = {"n": {"fast": 512, "full": 1024}}
# all fig3 beams share one effective width: that of the Bessel beam that
# fits 10 lobes inside the aperture
_MATCH10 = {"match": {"lobes": 10}}


def _scenario(name, version, physics, kind, size, propagation,
              noise_ratio=None, sweep=None, grid=None):
    sc = {
        "schema_version": SCHEMA_VERSION,
        "name": name,
        "version": version,
        "physics": physics,
        "kind": kind,
        "grid": grid or copy.deepcopy(_GRID),
        "propagation": propagation,
    }
    if size is not None:
        sc["size"] = size
    if noise_ratio is not None:
        sc["noise_ratio"] = noise_ratio
    if sweep is not None:
        sc["sweep"] = sweep
    return sc


_LINEAR = dict(_FIG3_PHYSICS, current=0.0)

PRESETS: dict[str, dict] = {
    # truncated Bessel beam, interactions off / on
    "fig3a": _scenario("fig3a", "1.0.0", _LINEAR, "bessel", {"lobes": 10},
                       {"ds": 1000.0, "s_max": 420000.0,
                        "record_stride": 1, "stop_width_factor": 1.6}),
    "fig3b": _scenario("fig3b", "1.0.0", _FIG3_PHYSICS, "bessel",
                       {"lobes": 10},
                       {"ds": 50.0, "s_max": 150000.0,
                        "record_stride": 10, "stop_width_factor": 1.6}),
    # Gaussian beam at the same effective width, off / on
    "fig3c": _scenario("fig3c", "1.0.0", _LINEAR, "gaussian",
                       copy.deepcopy(_MATCH10),
                       {"ds": 250.0, "s_max": 30000.0,
                        "record_stride": 1, "stop_width_factor": 1.6}),
    "fig3d": _scenario("fig3d", "1.0.0", _FIG3_PHYSICS, "gaussian",
                       copy.deepcopy(_MATCH10),
                       {"ds": 50.0, "s_max": 30000.0,
                        "record_stride": 4, "stop_width_factor": 1.6}),
    # shape-preserving beam, and the same beam launched with equal-power
    # uniform noise
    "fig3e": _scenario("fig3e", "1.0.0", _FIG3_PHYSICS, "shape-preserving",
                       copy.deepcopy(_MATCH10),
                       {"ds": 50.0, "s_max": 320000.0,
                        "record_stride": 20, "stop_width_factor": 1.6}),
    "fig3f": _scenario("fig3f", "1.0.0", _FIG3_PHYSICS, "shape-preserving",
                       copy.deepcopy(_MATCH10),
                       {"ds": 50.0, "s_max": 320000.0,
                        "record_stride": 20, "stop_width_factor": 1.6},
                       noise_ratio=1.0),
    # l = 1 triplet: shape-preserving vs Bessel vs Laguerre-Gauss
    "fig5a": _scenario("fig5a", "1.0.0", dict(_FIG3_PHYSICS, oam_l=1),
                       "shape-preserving",
                       copy.deepcopy(_MATCH10),
                       {"ds": 50.0, "s_max": 320000.0,
                        "record_stride": 20, "stop_width_factor": 1.6}),
    "fig5b": _scenario("fig5b", "1.0.0", dict(_FIG3_PHYSICS, oam_l=1),
                       "bessel", {"lobes": 10},
                       {"ds": 50.0, "s_max": 150000.0,
                        "record_stride": 10, "stop_width_factor": 1.6}),
    "fig5c": _scenario("fig5c", "1.0.0", dict(_FIG3_PHYSICS, oam_l=1),
                       "laguerre-gauss",
                       copy.deepcopy(_MATCH10),
                       {"ds": 50.0, "s_max": 30000.0,
                        "record_stride": 4, "stop_width_factor": 1.6}),
    # width sweep of non-diffraction range and main-lobe current
    "fig4": _scenario("fig4", "1.0.0", _FIG3_PHYSICS, "shape-preserving",
                      None,
                      # ds sized for the deepest potential in the sweep
                      # (narrow Gaussian points); s_max for the slowest
                      # self-consistent points
                      {"ds": 40.0, "s_max": 400000.0,
                       "record_stride": 20, "stop_width_factor": 1.6},
                      # 512^2 resolves the 2.2 nm floor (4 px main lobe);
                      # the tiers differ in sampling density, not grid
                      grid={"n": 512},
                      sweep={"axis": "width", "width_nm_min": 2.2,
                             "width_nm_max": None,
                             "points": {"fast": 4, "full": 12},
                             "families": ["shape-preserving", "bessel",
                                          "gaussian"]}),
    # binary hologram of the shape-preserving profile
    "fig2": _scenario("fig2", "1.0.0", _FIG3_PHYSICS, "shape-preserving",
                      copy.deepcopy(_MATCH10),
                      {"ds": 50.0, "s_max": 320000.0,
                       "record_stride": 20, "stop_width_factor": 1.6}),
}
PRESETS["fig2"]["mask"] = {"n": {"fast": 512, "full": 1024},
                           "threshold": None}

# low-current aperture study: the same three families through a 140 nm
# and a 420 nm aperture; the beam itself (its transverse wavenumber) is
# pinned in the 140 nm aperture and reused unchanged in the wide one
_SUPP_PHYSICS = {"voltage": 20e3, "current": 5e-6,
                 "aperture_radius_nm": 140.0}
_SUPP_WIDE = dict(_SUPP_PHYSICS, aperture_radius_nm=420.0)
_MATCH140 = {"match": {"lobes": 10, "aperture_nm": 140.0}}

_WIDE_GRID = {"n": {"fast": 512, "full": 1024}, "width_apertures": 3.0}

PRESETS.update({
    "supp3-sp-140": _scenario("supp3-sp-140", "1.0.0", _SUPP_PHYSICS,
                              "shape-preserving", copy.deepcopy(_MATCH140),
                              {"ds": 400.0, "s_max": 1200000.0,
                               "record_stride": 10,
                               "stop_width_factor": 1.6}),
    "supp3-sp-420": _scenario("supp3-sp-420", "1.0.0", _SUPP_WIDE,
                              "shape-preserving", copy.deepcopy(_MATCH140),
                              {"ds": 400.0, "s_max": 3000000.0,
                               "record_stride": 25,
                               "stop_width_factor": 1.6},
                              grid=copy.deepcopy(_WIDE_GRID)),
    "supp3-bessel-140": _scenario("supp3-bessel-140", "1.0.0",
                                  _SUPP_PHYSICS, "bessel",
                                  copy.deepcopy(_MATCH140),
                                  {"ds": 400.0, "s_max": 1000000.0,
                                   "record_stride": 4,
                                   "stop_width_factor": 1.6}),
    "supp3-bessel-420": _scenario("supp3-bessel-420", "1.0.0", _SUPP_WIDE,
                                  "bessel", copy.deepcopy(_MATCH140),
                                  {"ds": 400.0, "s_max": 2500000.0,
                                   "record_stride": 10,
                                   "stop_width_factor": 1.6},
                                  grid=copy.deepcopy(_WIDE_GRID)),
    "supp3-gaussian-140": _scenario("supp3-gaussian-140", "1.0.0",
                                    _SUPP_PHYSICS, "gaussian",
                                    copy.deepcopy(_MATCH140),
                                    {"ds": 50.0, "s_max": 60000.0,
                                     "record_stride": 2,
                                     "stop_width_factor": 1.6}),
    "supp3-gaussian-420": _scenario("supp3-gaussian-420", "1.0.0",
                                    _SUPP_WIDE, "gaussian",
                                    copy.deepcopy(_MATCH140),
                                    {"ds": 50.0, "s_max": 60000.0,
                                     "record_stride": 2,
                                     "stop_width_factor": 1.6},
                                    grid=copy.deepcopy(_WIDE_GRID)),
})

PRESET_GROUPS = {
    "fig3": ["fig3a", "fig3b", "fig3c", "fig3d", "fig3e", "fig3f"],
    "fig5": ["fig5a", "fig5b", "fig5c"],
    "supp3": ["supp3-sp-140", "supp3-sp-420", "supp3-bessel-140",
              "supp3-bessel-420", "supp3-gaussian-140",
              "supp3-gaussian-420"],
}


def preset(name: str) -> dict:
    """Deep copy of a named preset (presets themselves are immutable)."""
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise ScenarioError(f"unknown preset {name!r}; have: {known}")
    return copy.deepcopy(PRESETS[name])


def _freeze_check() -> None:
    for name, sc in PRESETS.items():
        validate_scenario(sc)


_freeze_check()
