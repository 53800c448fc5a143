"""JSON experiment configs.

Field names carry their unit and conversion happens once, here:

* ``*_mhz``: a frequency nu in MHz, stored as the angular rate 2 pi nu 1e6 rad/s;
* ``*_ns``: nanoseconds, stored in seconds;
* ``*_rad``: radians, stored unchanged.

So ``"epsilon_mhz": 1.0`` means epsilon = 2 pi x 1 MHz. Unknown keys are
rejected by the schema.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Any

import jsonschema
import numpy as np

from .bath import RandomField, SpinBathModel
from .engine import AXES, ExperimentSpec, SweepSpec
from .engineering import TargetGate
from .errors import ConfigError
from .schedules import build_schedule

MHZ = 2 * math.pi * 1e6
NS = 1e-9

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}


def _range(unit: str) -> dict:
    return {
        "type": "object",
        "additionalProperties": False,
        "required": ["start", "stop", "num"],
        "properties": {"start": _NUM, "stop": _NUM,
                       "num": {"type": "integer", "minimum": 1},
                       "spacing": {"enum": ["linear", "log"]}},
        "description": f"evenly spaced points in {unit}",
    }


SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["experiment", "sweep"],
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0},
        "experiment": {
            "type": "object",
            "additionalProperties": False,
            "required": ["target"],
            "properties": {
                "system_qubits": {"enum": [1, 2]},
                "bath": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "spins": {"type": "integer", "minimum": 0, "maximum": 8},
                        "epsilon_mhz": _NUM,
                        "dm": {"type": "boolean"},
                        "initial": {"enum": ["all-zero", "maximally-mixed"]},
                        "field_max_mhz": {"type": "number", "minimum": 0},
                    },
                },
                "target": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "theta_rad"],
                    "properties": {
                        "kind": {"enum": ["xy", "cr"]},
                        "theta_rad": _NUM,
                        "phi_rad": _NUM,
                        "coupling_mhz": _POS,
                    },
                },
                "sequence": {"type": "string"},
                "gate_duration_ns": _POS,
                "pulse": {
                    "type": "object",
                    "additionalProperties": False,
                    "maxProperties": 1,
                    "properties": {"strength_mhz": _POS, "width_ns": _POS},
                },
                "placement": {"enum": ["insert", "truncate"]},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "required": ["axis"],
            "minProperties": 2,
            "maxProperties": 2,
            "properties": {
                "axis": {"enum": list(AXES)},
                "values_ns": {"type": "array", "items": _NUM, "minItems": 1},
                "values_mhz": {"type": "array", "items": _NUM, "minItems": 1},
                "range_ns": _range("ns"),
                "range_mhz": _range("MHz"),
            },
        },
        "sequences": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "pulse_overrides": {
            "type": "object",
            "additionalProperties": {
                "type": "object", "additionalProperties": False,
                "required": ["width_ns"], "properties": {"width_ns": _POS},
            },
        },
    },
}

_AXIS_UNIT = {"gate_duration": "ns", "pulse_width": "ns", "epsilon": "mhz"}


def config_hash(doc: dict) -> str:
    """SHA-256 of the canonical JSON form."""
    canon = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def validate(doc: dict) -> None:
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{where}: {exc.message}") from exc


def _points(sweep: dict) -> tuple[float, ...]:
    axis = sweep["axis"]
    unit = _AXIS_UNIT[axis]
    scale = NS if unit == "ns" else MHZ
    keys = [k for k in sweep if k != "axis"]
    key = keys[0]
    if not key.endswith(unit):
        raise ConfigError(f"sweep/{key}: axis {axis!r} takes values in {unit}")
    if key.startswith("values"):
        raw = np.asarray(sweep[key], dtype=float)
    else:
        r = sweep[key]
        if r.get("spacing", "linear") == "log":
            if r["start"] <= 0 or r["stop"] <= 0:
                raise ConfigError(f"sweep/{key}: log spacing needs positive bounds")
            raw = np.geomspace(r["start"], r["stop"], r["num"])
        else:
            raw = np.linspace(r["start"], r["stop"], r["num"])
    return tuple(float(v) * scale for v in raw)


@dataclass(frozen=True)
class ResolvedSweep:
    name: str
    seed: int
    sweep: SweepSpec
    document: dict

    @property
    def hash(self) -> str:
        return config_hash(self.document)


def resolve(doc: dict, seed: int | None = None) -> ResolvedSweep:
    """Validate ``doc`` and turn it into a :class:`SweepSpec` in SI units."""
    doc = json.loads(json.dumps(doc))
    if seed is not None:
        doc["seed"] = int(seed)
    validate(doc)
    exp = doc["experiment"]
    seed_value = int(doc.get("seed", 0))
    target_doc = exp["target"]
    kind = target_doc["kind"]
    n_sys = exp.get("system_qubits", 1 if kind == "xy" else 2)
    bath = exp.get("bath", {})
    field_max = bath.get("field_max_mhz", 0.0) * MHZ
    model = SpinBathModel(
        system_qubits=n_sys,
        bath_spins=bath.get("spins", 5),
        epsilon=bath.get("epsilon_mhz", 1.0) * MHZ,
        dm_enabled=bath.get("dm", True),
        bath_field=RandomField(seed_value, field_max) if field_max > 0 else None,
        bath_initial=bath.get("initial", "all-zero"),
    )
    theta = float(target_doc["theta_rad"])
    if kind == "xy":
        if "coupling_mhz" in target_doc:
            raise ConfigError("experiment/target: coupling_mhz applies to cr targets only")
        target = TargetGate.rotation(theta, float(target_doc.get("phi_rad", 0.0)))
    else:
        if "phi_rad" in target_doc:
            raise ConfigError("experiment/target: phi_rad applies to xy targets only")
        target = TargetGate.cross_resonance(theta)
    if "gate_duration_ns" in exp:
        duration = exp["gate_duration_ns"] * NS
        if "coupling_mhz" in target_doc:
            raise ConfigError("experiment: give either gate_duration_ns or target/coupling_mhz")
    elif "coupling_mhz" in target_doc:
        # constant coupling J fixes the drive time through |theta| = 2 J T
        duration = abs(theta) / (2 * target_doc["coupling_mhz"] * MHZ)
    else:
        raise ConfigError("experiment: gate_duration_ns is required")
    pulse = exp.get("pulse", {})
    width, rabi = 0.0, None
    if "strength_mhz" in pulse:
        rabi = pulse["strength_mhz"] * MHZ
        width = math.pi / rabi
    elif "width_ns" in pulse:
        width = pulse["width_ns"] * NS
    sequences = tuple(doc.get("sequences", ["none", "pdd", "cdd2"]))
    for name in sequences:
        try:
            build_schedule(name, 1.0, n_sys)
        except ValueError as exc:
            raise ConfigError(f"sequences: {exc}") from exc
    try:
        base = ExperimentSpec(model, target, exp.get("sequence", "none"), duration / 4,
                              pulse_width=width, rabi_strength=rabi,
                              placement=exp.get("placement", "insert"))
        overrides = tuple((k, v["width_ns"] * NS) for k, v in doc.get("pulse_overrides", {}).items())
        sweep = SweepSpec(base, doc["sweep"]["axis"], _points(doc["sweep"]),
                          sequences, overrides)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return ResolvedSweep(doc.get("name", ""), seed_value, sweep, doc)


def load(path: str, seed: int | None = None) -> ResolvedSweep:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return resolve(doc, seed)
