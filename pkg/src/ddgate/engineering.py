"""Engineering the gate drive so it survives the decoupling pulses.

In a segment whose toggling frame is ``Q``, the system effectively sees
``Q H Q``. Applying ``Q H_target Q`` instead makes every toggled segment
equal to the same target Hamiltonian. For the xy drive this is a phase
quench; for the cross-resonance drive it is a sign flip of the coupling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .errors import Unengineerable
from .ops import SX, SY, SZ, PauliString, kron
from .schedules import Schedule

FAMILIES = ("xy", "cr")

_X = PauliString("X")
_Y = PauliString("Y")
_ZX = PauliString("ZX")


@dataclass(frozen=True)
class TargetGate:
    """``exp(-i theta G / 2)`` with ``G = cos(phi) X + sin(phi) Y`` or ``G = Z (x) X``."""

    kind: str
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise ValueError(f"kind must be one of {FAMILIES}")

    @classmethod
    def rotation(cls, theta: float, phi: float) -> "TargetGate":
        return cls("xy", theta, phi)

    @classmethod
    def cross_resonance(cls, theta: float) -> "TargetGate":
        return cls("cr", theta)

    @property
    def n_qubits(self) -> int:
        return 1 if self.kind == "xy" else 2

    def generator(self) -> np.ndarray:
        if self.kind == "xy":
            return math.cos(self.phi) * SX + math.sin(self.phi) * SY
        return kron(SZ, SX)

    def unitary(self) -> np.ndarray:
        # independent of the eigh route used in the engine
        return expm(-0.5j * self.theta * self.generator())


def wrap_phase(phi: float) -> float:
    """Map an angle into (-pi, pi]."""
    out = math.remainder(phi, 2 * math.pi)
    return math.pi if out <= -math.pi else out


def phase_for_frame(frame: PauliString, phi: float) -> float:
    """Drive phase that toggles back to ``phi`` inside a Pauli frame."""
    if frame.n_qubits != 1:
        raise Unengineerable("xy drive acts on one qubit; frame acts on %d" % frame.n_qubits)
    q = frame.stripped()
    sx = q.conjugation_sign(_X)
    sy = q.conjugation_sign(_Y)
    return wrap_phase(math.atan2(sy * math.sin(phi), sx * math.cos(phi)))


@dataclass(frozen=True)
class DriveSegment:
    """Constant drive over ``[start, end]`` (wall-clock seconds).

    xy: ``amplitude * (cos(phase) X + sin(phase) Y)``;
    cr: ``amplitude * sign * Z (x) X``.
    """

    start: float
    end: float
    family: str
    amplitude: float
    phase: float = 0.0
    sign: int = 1
    frame: PauliString = field(default_factory=lambda: PauliString("I"))

    @property
    def duration(self) -> float:
        return self.end - self.start

    @property
    def coupling(self) -> float:
        return self.amplitude * self.sign

    def hamiltonian(self) -> np.ndarray:
        if self.family == "xy":
            return self.amplitude * (math.cos(self.phase) * SX + math.sin(self.phase) * SY)
        return self.coupling * kron(SZ, SX)

    def key(self) -> tuple:
        """Hashable identity of the segment Hamiltonian (for caching)."""
        return (self.family, self.amplitude, self.phase, self.sign)


@dataclass(frozen=True)
class EngineeredPlan:
    schedule: Schedule
    segments: tuple[DriveSegment, ...]
    target: TargetGate
    amplitude: float

    @property
    def drive_time(self) -> float:
        return sum(s.duration for s in self.segments)

    def target_hamiltonian(self) -> np.ndarray:
        return self.amplitude * self.target.generator()

    def to_text(self) -> str:
        from .textio import plan_to_text

        return plan_to_text(self)


def engineer(target: TargetGate, schedule: Schedule, reversible: bool = True) -> EngineeredPlan:
    """Per-segment drive parameters that make every toggled segment equal the target.

    ``reversible=False`` forbids reversing the cross-resonance coupling; frames
    that would need a flip then raise :class:`Unengineerable`.
    """
    if schedule.n_qubits != target.n_qubits:
        raise Unengineerable(
            f"{target.kind} drive acts on {target.n_qubits} qubit(s); "
            f"schedule frames act on {schedule.n_qubits}")
    drives = [item for item in schedule.timeline() if item.kind == "drive"]
    drive_time = sum(item.duration for item in drives)
    if drive_time <= 0:
        raise Unengineerable("no drive-active time left in the schedule")
    amplitude = target.theta / (2 * drive_time)
    segments = []
    for item in drives:
        q = item.frame.stripped()
        if target.kind == "xy":
            seg = DriveSegment(item.start, item.end, "xy", amplitude,
                               phase=phase_for_frame(q, target.phi), frame=item.frame)
        else:
            sign = q.conjugation_sign(_ZX)
            if sign < 0 and not reversible:
                raise Unengineerable(f"frame {q} flips Z(x)X; coupling cannot be reversed")
            seg = DriveSegment(item.start, item.end, "cr", amplitude, sign=sign, frame=item.frame)
        segments.append(seg)
    plan = EngineeredPlan(schedule, tuple(segments), target, amplitude)
    _check_family(plan)
    return plan


def _check_family(plan: EngineeredPlan) -> None:
    # the conjugated generator must remain an xy rotation / a multiple of Z(x)X
    g = plan.target.generator()
    for seg in plan.segments:
        q = seg.frame.stripped().matrix()
        toggled = q @ g @ q
        if plan.target.kind == "xy":
            if abs(toggled[0, 0]) > 1e-12 or abs(toggled[1, 1]) > 1e-12:
                raise Unengineerable(f"frame {seg.frame} leaves the xy family")
        else:
            zx = kron(SZ, SX)
            if np.max(np.abs(toggled - zx)) > 1e-12 and np.max(np.abs(toggled + zx)) > 1e-12:
                raise Unengineerable(f"frame {seg.frame} leaves the Z(x)X family")


@dataclass
class PlanReport:
    passed: bool
    residuals: list[float]
    relative_residuals: list[float]
    area: float
    target_area: float
    area_error: float
    failing_segments: list[int]

    def lines(self) -> list[str]:
        out = []
        worst = max(self.relative_residuals, default=0.0)
        ok = not self.failing_segments
        out.append(f"frame-equality: {'PASS' if ok else 'FAIL'} (max relative residual {worst:.3e})")
        for i in self.failing_segments:
            out.append(f"  segment {i}: residual {self.residuals[i]:.6e}")
        area_ok = self.area_error <= AREA_RTOL
        out.append(f"area-law: {'PASS' if area_ok else 'FAIL'} (relative error {self.area_error:.3e})")
        return out


RESIDUAL_RTOL = 1e-12
AREA_RTOL = 1e-9


def verify_plan(plan: EngineeredPlan, rtol: float = RESIDUAL_RTOL) -> PlanReport:
    """Recompute ``Q H_segment Q`` for every segment and compare with the target.

    Residuals are max-norm operator differences; the pass threshold is
    ``rtol * |amplitude|`` because the generators carry rad/s magnitudes.
    """
    h_target = plan.target_hamiltonian()
    scale = max(abs(plan.amplitude), 1e-300)
    residuals, relative, failing = [], [], []
    for i, seg in enumerate(plan.segments):
        q = seg.frame.stripped().matrix()
        r = float(np.max(np.abs(q @ seg.hamiltonian() @ q - h_target)))
        residuals.append(r)
        relative.append(r / scale)
        if r > rtol * scale:
            failing.append(i)
    if plan.target.kind == "xy":
        area = sum(s.amplitude * s.duration for s in plan.segments)
        target_area = plan.target.theta / 2
    else:
        area = sum(abs(s.coupling) * s.duration for s in plan.segments)
        target_area = abs(plan.target.theta) / 2
    area_error = abs(area - target_area) / max(abs(target_area), 1e-300)
    passed = not failing and area_error <= AREA_RTOL
    return PlanReport(passed, residuals, relative, area, target_area, area_error, failing)


def perturb_segment(plan: EngineeredPlan, index: int, dphase: float = 0.0,
                    scale: float = 1.0) -> EngineeredPlan:
    """Copy of ``plan`` with one segment's phase shifted and/or amplitude scaled."""
    segs = list(plan.segments)
    s = segs[index]
    segs[index] = replace(s, phase=s.phase + dphase, amplitude=s.amplitude * scale)
    return replace(plan, segments=tuple(segs))


def scale_plan(plan: EngineeredPlan, factor: float) -> EngineeredPlan:
    segs = tuple(replace(s, amplitude=s.amplitude * factor) for s in plan.segments)
    return replace(plan, segments=segs)
