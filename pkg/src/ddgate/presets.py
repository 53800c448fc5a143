"""Named sweep configs for the standard single- and two-qubit experiments."""
from __future__ import annotations

import copy
import math

from .errors import ConfigError

_ONE_QUBIT = {
    "system_qubits": 1,
    "bath": {"spins": 5, "epsilon_mhz": 1.0},
    "target": {"kind": "xy", "theta_rad": math.pi, "phi_rad": math.pi / 4},
    "gate_duration_ns": 40.0,
    "pulse": {"strength_mhz": 100.0},
}
_DURATIONS = {"axis": "gate_duration", "range_ns": {"start": 2.0, "stop": 300.0, "num": 60}}

_TWO_QUBIT = {
    "system_qubits": 2,
    "bath": {"spins": 5, "epsilon_mhz": 1.0},
    "target": {"kind": "cr", "theta_rad": -math.pi / 2, "coupling_mhz": 5.0},
    "pulse": {"width_ns": 2.5},
}
# epsilon from 0 to 0.2 J with J = 5 MHz
_COUPLINGS = {"axis": "epsilon", "range_mhz": {"start": 0.0, "stop": 1.0, "num": 11}}

PRESETS: dict[str, dict] = {
    "fig1a": {
        "name": "fig1a",
        "experiment": _ONE_QUBIT,
        "sweep": _DURATIONS,
        "sequences": ["none", "pdd", "cdd2"],
    },
    "fig1b": {
        "name": "fig1b",
        "experiment": _ONE_QUBIT,
        "sweep": _DURATIONS,
        "sequences": ["none", "udd2", "udd4"],
    },
    "fig2a": {
        "name": "fig2a",
        "experiment": _TWO_QUBIT,
        "sweep": _COUPLINGS,
        "sequences": ["none", "pdd", "cdd2"],
    },
    "fig2b": {
        "name": "fig2b",
        "experiment": _TWO_QUBIT,
        "sweep": _COUPLINGS,
        "sequences": ["cdd2", "cdd2+x"],
    },
    "fig2c": {
        "name": "fig2c",
        "experiment": _TWO_QUBIT,
        "sweep": _COUPLINGS,
        "sequences": ["udd2", "udd4"],
        "pulse_overrides": {"udd4": {"width_ns": 0.5}},
    },
    "fig2d": {
        "name": "fig2d",
        "experiment": {**_TWO_QUBIT, "bath": {"spins": 5, "epsilon_mhz": 1.0}},
        "sweep": {"axis": "pulse_width", "range_ns": {"start": 0.1, "stop": 1.5, "num": 15}},
        "sequences": ["udd2", "udd4"],
    },
}

DESCRIPTIONS = {
    "fig1a": "one-qubit xy gate vs duration: bare, PDD, CDD2 (100 MHz pulses)",
    "fig1b": "one-qubit xy gate vs duration: bare, nested UDD n=2, n=4 (100 MHz pulses)",
    "fig2a": "CR(-pi/2) gate vs bath coupling up to 0.2 J: bare, PDD, CDD2 (2.5 ns pulses)",
    "fig2b": "CR(-pi/2) gate vs bath coupling: two-level CDD with and without the extra echo layers",
    "fig2c": "CR(-pi/2) gate vs bath coupling: nested UDD n=2 (2.5 ns) and n=4 (0.5 ns)",
    "fig2d": "CR(-pi/2) gate at 0.2 J vs pulse width 0.1-1.5 ns: nested UDD n=2, n=4",
}


def get(name: str) -> dict:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return copy.deepcopy(PRESETS[name])
