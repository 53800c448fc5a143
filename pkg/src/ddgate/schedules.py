"""Decoupling pulse schedules.

A :class:`Schedule` is a list of Pauli pulse events on a nominal time axis
``[0, total_duration]``. Everything else (toggling-frame segments, merged
physical pulses, the wall-clock layout of finite-width pulses) is derived
from the events.

Two placements are supported for finite pulses:

``insert``
    each pulse window is inserted at its nominal position and pushes the rest
    of the timeline back, so drive segments keep their nominal lengths and the
    wall-clock duration grows by one width per physical pulse.
``truncate``
    each window starts at its nominal time and eats into the following drive
    segment; windows that would run into the next pulse raise
    :class:`OverlapError`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Sequence

from .errors import InconsistentArea, OddOrder, OverlapError
from .ops import PauliString

PLACEMENTS = ("insert", "truncate")
_TIME_RTOL = 1e-12


@dataclass(frozen=True)
class PulseEvent:
    nominal_time: float
    operator: PauliString
    layer: int = 0


@dataclass(frozen=True)
class FrameSegment:
    start: float
    end: float
    frame: PauliString

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class PulseGroup:
    """All events sharing one nominal time, merged into one physical pulse."""

    time: float
    operator: PauliString
    events: tuple[PulseEvent, ...]

    @property
    def trivial(self) -> bool:
        return self.operator.is_identity()


@dataclass(frozen=True)
class TimelineItem:
    kind: str  # "drive" or "pulse"
    start: float
    end: float
    frame: PauliString  # frame in force (for pulses: the frame before the pulse)
    pulse: PauliString | None = None
    segment: int = -1

    @property
    def duration(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class Schedule:
    total_duration: float
    n_qubits: int = 1
    events: tuple[PulseEvent, ...] = ()
    pulse_width: float = 0.0
    rabi_strength: float = 0.0
    placement: str = "insert"
    name: str = ""
    _groups: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.total_duration <= 0:
            raise ValueError("total_duration must be positive")
        if self.placement not in PLACEMENTS:
            raise ValueError(f"placement must be one of {PLACEMENTS}")
        if self.pulse_width < 0:
            raise ValueError("pulse_width must be non-negative")
        tol = _TIME_RTOL * self.total_duration
        for e in self.events:
            if e.operator.n_qubits != self.n_qubits:
                raise ValueError("pulse acts on the wrong number of qubits")
            if not (tol < e.nominal_time <= self.total_duration + tol):
                raise ValueError(f"event time {e.nominal_time} outside (0, T]")
        events = tuple(sorted(self.events, key=lambda e: e.nominal_time))
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "_groups", tuple(_group_events(events, tol)))

    # derived structure -------------------------------------------------

    @property
    def tol(self) -> float:
        return _TIME_RTOL * self.total_duration

    def pulse_groups(self) -> list[PulseGroup]:
        return list(self._groups)

    def physical_pulses(self) -> list[PulseGroup]:
        """Merged pulses that are not a multiple of the identity."""
        return [g for g in self._groups if not g.trivial]

    def frame_segments(self) -> list[FrameSegment]:
        frame = PauliString.identity(self.n_qubits)
        start = 0.0
        segments = []
        for g in self._groups:
            if g.time >= self.total_duration - self.tol:
                break
            segments.append(FrameSegment(start, g.time, frame))
            frame = g.operator * frame
            start = g.time
        segments.append(FrameSegment(start, self.total_duration, frame))
        return segments

    def net_frame(self) -> PauliString:
        frame = PauliString.identity(self.n_qubits)
        for g in self._groups:
            frame = g.operator * frame
        return frame

    def _trailing_group(self) -> PulseGroup | None:
        if self._groups and self._groups[-1].time >= self.total_duration - self.tol:
            return self._groups[-1]
        return None

    def timeline(self) -> list[TimelineItem]:
        """Wall-clock layout of drive segments and pulse windows."""
        check_overlaps(self)
        w = self.pulse_width
        segments = self.frame_segments()
        groups = [g for g in self._groups if g.time < self.total_duration - self.tol]
        trailing = self._trailing_group()
        items: list[TimelineItem] = []
        shift = 0.0
        carry = 0.0  # truncate mode: window spilling into the next segment
        for i, seg in enumerate(segments):
            if self.placement == "insert":
                start, end = seg.start + shift, seg.end + shift
            else:
                start, end = seg.start + carry, seg.end
                end = max(end, start)
            items.append(TimelineItem("drive", start, end, seg.frame, segment=i))
            group = groups[i] if i < len(groups) else trailing
            if group is None or group.trivial:
                carry = 0.0
                continue
            t0 = end if self.placement == "insert" else seg.end
            items.append(TimelineItem("pulse", t0, t0 + w, seg.frame, group.operator, segment=i))
            if self.placement == "insert":
                shift += w
            carry = w
        return items

    @property
    def wall_duration(self) -> float:
        items = self.timeline()
        return max(self.total_duration, items[-1].end) if items else self.total_duration

    def segment_count(self) -> int:
        return len(self.frame_segments())

    def to_text(self) -> str:
        from .textio import schedule_to_text

        return schedule_to_text(self)


def _group_events(events: Sequence[PulseEvent], tol: float) -> list[PulseGroup]:
    groups: list[list[PulseEvent]] = []
    for e in events:
        if groups and abs(e.nominal_time - groups[-1][0].nominal_time) <= tol:
            groups[-1].append(e)
        else:
            groups.append([e])
    out = []
    for evs in groups:
        op = PauliString.identity(evs[0].operator.n_qubits)
        for e in evs:  # applied in listed order: later events multiply from the left
            op = e.operator * op
        out.append(PulseGroup(evs[0].nominal_time, op, tuple(evs)))
    return out


def check_overlaps(schedule: Schedule) -> None:
    """Raise OverlapError if realized windows collide (truncate placement only)."""
    if schedule.pulse_width <= 0 or schedule.placement == "insert":
        return
    w = schedule.pulse_width
    times = [g.time for g in schedule.physical_pulses()]
    for a, b in zip(times, times[1:]):
        if a + w > b + schedule.tol:
            raise OverlapError(
                f"pulse window [{a:.6g}, {a + w:.6g}] runs into the pulse at {b:.6g}")
    if times and times[0] <= 0:
        raise OverlapError("pulse at t=0")


# builders --------------------------------------------------------------

def _uniform(axis: str, n_qubits: int) -> PauliString:
    return PauliString(axis * n_qubits)


def pauli_cycle(n_qubits: int = 1) -> list[PauliString]:
    """The decoupling group {I, X, Y, Z}, applied identically to every qubit."""
    return [_uniform(a, n_qubits) for a in "IXYZ"]


def _max_layer(events: Sequence[PulseEvent]) -> int:
    return max((e.layer for e in events), default=-1)


def concatenate(cycle: Sequence[PauliString], total: float,
                inner: Schedule | None = None) -> list[PulseEvent]:
    """Events for one pass through ``cycle`` with ``inner`` nested in each block.

    Block k is spent in frame ``cycle[k]``; the pulse closing block k is
    ``cycle[k+1] cycle[k]^dagger`` (with ``cycle[K] = cycle[0]``), so the net
    frame of the pass is the identity.
    """
    k_len = len(cycle)
    block = total / k_len
    layer = 0 if inner is None else _max_layer(inner.events) + 1
    events: list[PulseEvent] = []
    for k in range(k_len):
        offset = k * block
        if inner is not None:
            scale = block / inner.total_duration
            events.extend(PulseEvent(offset + e.nominal_time * scale, e.operator, e.layer)
                          for e in inner.events)
        pulse = cycle[(k + 1) % k_len] * cycle[k].dagger()
        if not pulse.is_identity():
            events.append(PulseEvent((k + 1) * block, pulse, layer))
    return events


def no_dd_schedule(tau: float, n_qubits: int = 1) -> Schedule:
    return Schedule(4 * tau, n_qubits, (), name="none")


def pdd_schedule(tau: float, n_qubits: int = 1, **pulse) -> Schedule:
    if tau <= 0:
        raise ValueError("tau must be positive")
    sched = Schedule(4 * tau, n_qubits, tuple(concatenate(pauli_cycle(n_qubits), 4 * tau)),
                     name="pdd")
    return realize_pulses(sched, **pulse) if pulse else sched


def cdd_schedule(tau: float, levels: int, n_qubits: int = 1, **pulse) -> Schedule:
    """Level-``levels`` concatenated sequence over ``4*tau`` (4**levels segments)."""
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if tau <= 0:
        raise ValueError("tau must be positive")
    total = 4 * tau
    sched = Schedule(total, n_qubits, tuple(concatenate(pauli_cycle(n_qubits), total)))
    for _ in range(levels - 1):
        sched = Schedule(total, n_qubits,
                         tuple(concatenate(pauli_cycle(n_qubits), total, inner=sched)))
    sched = replace(sched, name=f"cdd{levels}")
    return realize_pulses(sched, **pulse) if pulse else sched


def udd_times(n: int, total: float) -> list[float]:
    """Uhrig times ``total * sin^2(j pi / (2n + 2))`` for j = 1..n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if total <= 0:
        raise ValueError("total must be positive")
    return [total * math.sin(j * math.pi / (2 * n + 2)) ** 2 for j in range(1, n + 1)]


def nested_udd_schedule(tau: float, n: int, n_qubits: int = 1, **pulse) -> Schedule:
    """Outer X pulses at Uhrig times, inner Z pulses at Uhrig times of each interval.

    Inner times use the affine map ``a + (b - a) sin^2(k pi / (2n + 2))`` on the
    outer interval ``[a, b]``.
    """
    if n % 2:
        raise OddOrder(f"nested UDD needs an even order, got {n}")
    if n < 2:
        raise ValueError("n must be >= 2")
    if tau <= 0:
        raise ValueError("tau must be positive")
    total = 4 * tau
    outer = [0.0] + udd_times(n, total) + [total]
    x, z = _uniform("X", n_qubits), _uniform("Z", n_qubits)
    events = []
    fractions = [math.sin(k * math.pi / (2 * n + 2)) ** 2 for k in range(1, n + 1)]
    for j in range(n + 1):
        a, b = outer[j], outer[j + 1]
        events.extend(PulseEvent(a + (b - a) * f, z, 0) for f in fractions)
        if j < n:
            events.append(PulseEvent(b, x, 1))
    sched = Schedule(total, n_qubits, tuple(events), name=f"udd{n}")
    return realize_pulses(sched, **pulse) if pulse else sched


def two_qubit_schedule(tau: float, base: str = "pdd", extra_layers: bool = False,
                       **pulse) -> Schedule:
    """Two-qubit sequence with pulses sigma_k (x) sigma_k.

    With ``extra_layers`` the base sequence is nested inside a Z(x)I echo and
    an outer I(x)X echo, each doubling the block count.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    total = 4 * tau
    levels = {"pdd": 1, "cdd2": 2}.get(base)
    if levels is None:
        raise ValueError(f"unknown two-qubit base {base!r}")
    if not extra_layers:
        sched = replace(cdd_schedule(tau, levels, n_qubits=2), name=base)
        return realize_pulses(sched, **pulse) if pulse else sched
    inner = cdd_schedule(tau / 4, levels, n_qubits=2)
    ii = PauliString("II")
    echo = Schedule(total / 2, 2, tuple(concatenate([ii, PauliString("ZI")], total / 2, inner)))
    sched = Schedule(total, 2, tuple(concatenate([ii, PauliString("IX")], total, echo)),
                     name=f"{base}+x")
    return realize_pulses(sched, **pulse) if pulse else sched


def pulse_width_for(rabi_strength: float) -> float:
    """Width of a pi pulse under H = (rabi/2) sigma."""
    return math.pi / rabi_strength


def realize_pulses(schedule: Schedule, pulse_width: float = 0.0,
                   rabi_strength: float | None = None,
                   placement: str | None = None) -> Schedule:
    """Attach finite square pulses of the given width to every physical pulse."""
    placement = placement or schedule.placement
    if pulse_width < 0:
        raise ValueError("pulse_width must be non-negative")
    if pulse_width == 0:
        return replace(schedule, pulse_width=0.0, rabi_strength=0.0, placement=placement)
    if rabi_strength is None:
        rabi_strength = math.pi / pulse_width
    if abs(rabi_strength * pulse_width - math.pi) > 1e-9:
        raise InconsistentArea(
            f"rabi*width = {rabi_strength * pulse_width!r}, a pi pulse needs {math.pi!r}")
    out = replace(schedule, pulse_width=float(pulse_width),
                  rabi_strength=float(rabi_strength), placement=placement)
    check_overlaps(out)
    return out


_NAME = re.compile(r"^(none|pdd|cdd(\d+)|udd(\d+))(\+x)?$")


def build_schedule(sequence: str, tau: float, n_qubits: int = 1, **pulse) -> Schedule:
    """Build a schedule from a short name.

    Names: ``none``, ``pdd``, ``cdd<L>``, ``udd<n>`` (nested UDD); two-qubit
    ``pdd`` and ``cdd2`` accept a ``+x`` suffix for the extra echo layers.
    """
    m = _NAME.match(sequence.strip().lower())
    if not m:
        raise ValueError(f"unknown sequence {sequence!r}")
    base, cdd_level, udd_order, extra = m.groups()
    if extra and (n_qubits != 2 or base not in ("pdd", "cdd2")):
        raise ValueError("the +x layers exist only for two-qubit pdd and cdd2")
    if base == "none":
        sched = no_dd_schedule(tau, n_qubits)
    elif extra:
        sched = two_qubit_schedule(tau, base, extra_layers=True)
    elif base == "pdd":
        sched = pdd_schedule(tau, n_qubits)
    elif cdd_level is not None:
        sched = cdd_schedule(tau, int(cdd_level), n_qubits)
    else:
        sched = nested_udd_schedule(tau, int(udd_order), n_qubits)
    return realize_pulses(sched, **pulse) if pulse else sched
