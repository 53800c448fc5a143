"""Protected-gate simulation: timeline assembly, propagation, fidelity, sweeps."""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .bath import SpinBathModel, build_environment, build_interaction, initial_state
from .engineering import EngineeredPlan, TargetGate, engineer
from .errors import DDGateError, FloorReached
from .ops import (PAULI_MATRICES, PauliString, QuantumState, eigh_hermitian, embed,
                  expm_from_eigh, partial_trace, phase_distance)
from .schedules import Schedule, build_schedule

INFIDELITY_FLOOR = 1e-12
THREADS_ENV = "DDGATE_THREADS"


def default_system_state(n_qubits: int) -> np.ndarray:
    """(|0> + |1>)/sqrt(2) for one qubit, |11> for two."""
    if n_qubits == 1:
        return np.array([1, 1], dtype=complex) / math.sqrt(2)
    psi = np.zeros(4, dtype=complex)
    psi[3] = 1
    return psi


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    model: SpinBathModel
    target: TargetGate
    sequence: str = "none"
    tau: float = 1e-9
    pulse_width: float = 0.0
    rabi_strength: float | None = None
    placement: str = "insert"
    system_initial: tuple | None = None

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.target.n_qubits != self.model.system_qubits:
            raise ValueError("target gate and model disagree on the number of system qubits")

    @property
    def gate_duration(self) -> float:
        return 4 * self.tau

    def initial_system_state(self) -> np.ndarray:
        if self.system_initial is None:
            return default_system_state(self.model.system_qubits)
        psi = np.asarray(self.system_initial, dtype=complex)
        return psi / np.linalg.norm(psi)

    def schedule(self) -> Schedule:
        pulse = {}
        if self.pulse_width > 0:
            pulse = {"pulse_width": self.pulse_width, "rabi_strength": self.rabi_strength,
                     "placement": self.placement}
        return build_schedule(self.sequence, self.tau, self.model.system_qubits, **pulse)

    def plan(self) -> EngineeredPlan:
        return engineer(self.target, self.schedule())


class TimelineStep(NamedTuple):
    operator: np.ndarray
    duration: float
    unitary: bool  # True: operator is already a propagator (instantaneous pulse)
    key: tuple


def pulse_hamiltonian(pauli: PauliString, rabi: float) -> np.ndarray:
    """Simultaneous square pi pulses: ``(rabi/2) sum_q sigma_q`` on every non-identity factor."""
    n = pauli.n_qubits
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for q, a in enumerate(pauli.axes):
        if a != "I":
            h += embed({q: PAULI_MATRICES[a]}, n)
    return 0.5 * rabi * h


def assemble_timeline(spec: ExperimentSpec, model: SpinBathModel | None = None,
                      plan: EngineeredPlan | None = None) -> list[TimelineStep]:
    """Earliest-first list of evolution steps over the full register."""
    model = spec.model if model is None else model
    plan = spec.plan() if plan is None else plan
    schedule = plan.schedule
    d_bath = 2 ** model.bath_spins
    eye_bath = np.eye(d_bath, dtype=complex)
    h_env = build_interaction(model) + build_environment(model)
    steps: list[TimelineStep] = []
    drives = iter(plan.segments)
    for item in schedule.timeline():
        if item.kind == "drive":
            seg = next(drives)
            h = np.kron(seg.hamiltonian(), eye_bath) + h_env
            steps.append(TimelineStep(h, seg.duration, False, ("drive",) + seg.key()))
        elif schedule.pulse_width == 0:
            u = np.kron(item.pulse.stripped().matrix(), eye_bath)
            steps.append(TimelineStep(u, 0.0, True, ("ideal", item.pulse.stripped().label)))
        else:
            h = np.kron(pulse_hamiltonian(item.pulse.stripped(), schedule.rabi_strength),
                        eye_bath) + h_env
            steps.append(TimelineStep(h, item.duration, False,
                                      ("pulse", item.pulse.stripped().label, schedule.rabi_strength)))
    return steps


def timeline_propagator(steps: Sequence[TimelineStep]) -> np.ndarray:
    """Compose the steps; each distinct Hamiltonian is diagonalised once."""
    cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    u = None
    for step in steps:
        if step.unitary:
            factor = step.operator
        else:
            if step.key not in cache:
                cache[step.key] = eigh_hermitian(step.operator)
            factor = expm_from_eigh(*cache[step.key], step.duration)
        u = factor if u is None else factor @ u
    if u is None:
        raise DDGateError("empty timeline")
    return u


def system_propagator(spec: ExperimentSpec) -> np.ndarray:
    """Propagator of the system alone (no bath factors)."""
    bare = replace(spec.model, bath_spins=0, bath_initial="all-zero", bath_field=None)
    return timeline_propagator(assemble_timeline(spec, bare))


@dataclass
class SimulationResult:
    fidelity: float
    reduced_state: QuantumState
    wall_duration: float
    nominal_duration: float
    full_propagator: np.ndarray | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def infidelity(self) -> float:
        """1 - F, reported as 0 below the numerical floor."""
        inf = 1.0 - self.fidelity
        return 0.0 if inf < INFIDELITY_FLOOR else inf

    @property
    def at_floor(self) -> bool:
        return 1.0 - self.fidelity < INFIDELITY_FLOOR


def run(spec: ExperimentSpec, keep_propagator: bool = False) -> SimulationResult:
    plan = spec.plan()
    schedule = plan.schedule
    steps = assemble_timeline(spec, plan=plan)
    u = timeline_propagator(steps)
    psi_sys = spec.initial_system_state()
    state0 = initial_state(spec.model, QuantumState.qubits(psi_sys, spec.model.system_qubits))
    if state0.is_pure:
        state = QuantumState(u @ state0.data, state0.dims)
    else:
        state = QuantumState(u @ state0.data @ u.conj().T, state0.dims)
    reduced = partial_trace(state, range(spec.model.system_qubits))
    phi = spec.target.unitary() @ psi_sys
    fidelity = float(np.real(phi.conj() @ reduced.data @ phi))
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))
    diagnostics = {
        "sequence": spec.sequence,
        "segments": schedule.segment_count(),
        "physical_pulses": len(schedule.physical_pulses()),
        "steps": len(steps),
        "unitarity_defect": defect,
        "drive_amplitude": plan.amplitude,
    }
    return SimulationResult(fidelity, reduced, schedule.wall_duration, schedule.total_duration,
                            u if keep_propagator else None, diagnostics)


# sweeps ----------------------------------------------------------------

AXES = ("gate_duration", "epsilon", "pulse_width")


@dataclass(frozen=True, eq=False)
class SweepSpec:
    base: ExperimentSpec
    axis: str
    points: tuple[float, ...]
    comparisons: tuple[str, ...] = ("none", "pdd", "cdd2")
    # per-sequence pulse width (seconds) replacing the base one
    pulse_overrides: tuple[tuple[str, float], ...] = ()

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        pts = tuple(float(p) for p in self.points)
        if not pts or any(b <= a for a, b in zip(pts, pts[1:])):
            raise ValueError("sweep points must be non-empty and strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "comparisons", tuple(self.comparisons))
        object.__setattr__(self, "pulse_overrides",
                           tuple((str(k), float(w)) for k, w in self.pulse_overrides))

    def spec_at(self, value: float, sequence: str) -> ExperimentSpec:
        base = replace(self.base, sequence=sequence)
        overrides = dict(self.pulse_overrides)
        if sequence in overrides:
            base = replace(base, pulse_width=overrides[sequence], rabi_strength=None)
        if self.axis == "gate_duration":
            return replace(base, tau=value / 4)
        if self.axis == "epsilon":
            return replace(base, model=replace(base.model, epsilon=value))
        return replace(base, pulse_width=value, rabi_strength=None)


@dataclass
class SweepRow:
    axis: str
    value: float
    sequence: str
    fidelity: float
    wall_duration: float
    status: str = "ok"
    message: str = ""


def _run_point(job: tuple[SweepSpec, float, str]) -> SweepRow:
    sweep_spec, value, sequence = job
    try:
        spec = sweep_spec.spec_at(value, sequence)
        res = run(spec)
        status = "floor" if res.at_floor else "ok"
        return SweepRow(sweep_spec.axis, value, sequence, res.fidelity, res.wall_duration, status)
    except (DDGateError, ValueError) as exc:
        return SweepRow(sweep_spec.axis, value, sequence, float("nan"), float("nan"),
                        "error", f"{type(exc).__name__}: {exc}")


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def sweep(spec: SweepSpec, threads: int | None = None) -> list[SweepRow]:
    """One row per (point, sequence), ordered by point then comparison order."""
    jobs = [(spec, v, s) for v in spec.points for s in spec.comparisons]
    threads = thread_count() if threads is None else threads
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_run_point, jobs))
    return [_run_point(j) for j in jobs]


# analysis --------------------------------------------------------------

def order_fit(points: Sequence[tuple[float, float]]) -> float:
    """Least-squares slope of log(infidelity) against log(tau)."""
    if len(points) < 4:
        raise ValueError("need at least 4 points")
    tau = np.array([p[0] for p in points], dtype=float)
    inf = np.array([p[1] for p in points], dtype=float)
    if np.any(inf <= 1e-13):
        raise FloorReached("infidelities at the numerical floor")
    slope, _ = np.polyfit(np.log(tau), np.log(inf), 1)
    return float(slope)


def duration_at_fidelity(durations: Sequence[float], fidelities: Sequence[float],
                         level: float) -> float:
    """First duration where the fidelity curve drops to ``level`` (linear interpolation).

    Returns ``inf`` when the curve never falls below ``level``, ``0`` when it starts below.
    """
    d = list(durations)
    f = list(fidelities)
    if f[0] < level:
        return 0.0
    for i in range(1, len(d)):
        if f[i] < level:
            t = (f[i - 1] - level) / (f[i - 1] - f[i])
            return d[i - 1] + t * (d[i] - d[i - 1])
    return math.inf


def noise_free_distance(spec: ExperimentSpec) -> float:
    """Phase-insensitive distance between the bath-free propagator and the target."""
    return phase_distance(system_propagator(spec), spec.target.unitary())
