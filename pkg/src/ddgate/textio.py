"""Line-oriented text format for schedules and engineered plans.

Example::

    # ddgate-schedule 1
    # total_duration 4e-08
    # n_qubits 1
    # pulse_width 0.0
    # rabi_strength 0.0
    # placement insert
    # name pdd
    # t_nominal width pauli_label layer
    1e-08 0.0 X 0
    2e-08 0.0 -iZ 0
    ...
    # target xy 3.141592653589793 0.7853981633974483
    # seg start end frame family amplitude phase_or_sign
    seg 0.0 1e-08 I xy 39269908.16987241 0.7853981633974483

Event lines carry four whitespace-separated columns. Plan segment lines start
with ``seg``. Floats are written with ``repr`` so a round trip is exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .engineering import DriveSegment, EngineeredPlan, TargetGate, verify_plan
from .errors import DDGateError, OverlapError
from .ops import PauliString
from .schedules import PulseEvent, Schedule, check_overlaps

MAGIC = "# ddgate-schedule 1"


def schedule_to_text(schedule: Schedule) -> str:
    lines = [
        MAGIC,
        f"# total_duration {schedule.total_duration!r}",
        f"# n_qubits {schedule.n_qubits}",
        f"# pulse_width {schedule.pulse_width!r}",
        f"# rabi_strength {schedule.rabi_strength!r}",
        f"# placement {schedule.placement}",
        f"# name {schedule.name or '-'}",
        "# t_nominal width pauli_label layer",
    ]
    for e in schedule.events:
        lines.append(f"{e.nominal_time!r} {schedule.pulse_width!r} {e.operator.label} {e.layer}")
    return "\n".join(lines) + "\n"


def plan_to_text(plan: EngineeredPlan) -> str:
    t = plan.target
    lines = [schedule_to_text(plan.schedule).rstrip("\n"),
             f"# target {t.kind} {t.theta!r} {t.phi!r}",
             "# seg start end frame family amplitude phase_or_sign"]
    for s in plan.segments:
        last = repr(s.phase) if s.family == "xy" else str(s.sign)
        lines.append(f"seg {s.start!r} {s.end!r} {s.frame.label} {s.family} {s.amplitude!r} {last}")
    return "\n".join(lines) + "\n"


@dataclass
class ParsedDocument:
    schedule: Schedule
    widths: list[float]
    target: TargetGate | None = None
    segments: list[DriveSegment] = field(default_factory=list)

    @property
    def plan(self) -> EngineeredPlan | None:
        if self.target is None:
            return None
        amplitude = self.target.theta / (2 * sum(s.duration for s in self.segments)) \
            if self.segments else 0.0
        return EngineeredPlan(self.schedule, tuple(self.segments), self.target, amplitude)


def parse_text(text: str) -> ParsedDocument:
    header: dict[str, str] = {}
    events, widths, segments = [], [], []
    target = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        try:
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) >= 2 and parts[0] == "target":
                    target = TargetGate(parts[1], float(parts[2]), float(parts[3]))
                elif len(parts) == 2:
                    header[parts[0]] = parts[1]
                continue
            parts = line.split()
            if parts[0] == "seg":
                _, start, end, frame, family, amp, last = parts
                kw = {"phase": float(last)} if family == "xy" else {"sign": int(last)}
                segments.append(DriveSegment(float(start), float(end), family, float(amp),
                                             frame=PauliString.parse(frame), **kw))
            else:
                t, w, label, layer = parts
                events.append(PulseEvent(float(t), PauliString.parse(label), int(layer)))
                widths.append(float(w))
        except (ValueError, IndexError) as exc:
            raise DDGateError(f"line {lineno}: cannot parse {raw!r} ({exc})") from exc
    if "total_duration" not in header:
        raise DDGateError("missing '# total_duration' header")
    schedule = Schedule(
        float(header["total_duration"]),
        int(header.get("n_qubits", 1)),
        tuple(events),
        pulse_width=float(header.get("pulse_width", 0.0)),
        rabi_strength=float(header.get("rabi_strength", 0.0)),
        placement=header.get("placement", "insert"),
        name="" if header.get("name", "-") == "-" else header["name"],
    )
    return ParsedDocument(schedule, widths, target, segments)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'}" + (f" ({self.detail})" if self.detail else "")


def verify_text(text: str) -> list[CheckResult]:
    """Run the schedule (and, when present, plan) invariants on a document."""
    doc = parse_text(text)
    s = doc.schedule
    checks: list[CheckResult] = []

    bad_widths = [w for w in doc.widths if abs(w - s.pulse_width) > 1e-15]
    checks.append(CheckResult("widths", not bad_widths,
                              "" if not bad_widths else f"{len(bad_widths)} event widths differ from header"))
    try:
        check_overlaps(s)
        checks.append(CheckResult("overlap", True))
    except OverlapError as exc:
        checks.append(CheckResult("overlap", False, f"OverlapError: {exc}"))

    segs = s.frame_segments()
    tiled = abs(segs[0].start) <= s.tol and abs(segs[-1].end - s.total_duration) <= s.tol and all(
        abs(a.end - b.start) <= s.tol and a.end >= a.start for a, b in zip(segs, segs[1:]))
    checks.append(CheckResult("tiling", tiled, f"{len(segs)} segments"))
    checks.append(CheckResult("first-frame-identity", segs[0].frame.is_identity()))
    net = s.net_frame()
    checks.append(CheckResult("cycle-closure", net.is_identity(), f"net frame {net.label}"))

    plan = doc.plan
    if plan is not None:
        drive_frames = [item.frame for item in s.timeline() if item.kind == "drive"]
        mismatch = [i for i, (a, b) in enumerate(zip(drive_frames, plan.segments))
                    if a.stripped() != b.frame.stripped()]
        same_len = len(drive_frames) == len(plan.segments)
        checks.append(CheckResult(
            "segment-frames", same_len and not mismatch,
            "" if same_len and not mismatch else
            f"segments {mismatch}" if same_len else
            f"{len(plan.segments)} plan segments for {len(drive_frames)} frame segments"))
        report = verify_plan(plan)
        detail = f"max relative residual {max(report.relative_residuals, default=0):.3e}"
        if report.failing_segments:
            detail += "; failing segment(s) " + ", ".join(str(i) for i in report.failing_segments)
        checks.append(CheckResult("frame-equality", not report.failing_segments, detail))
        checks.append(CheckResult("area-law", report.area_error <= 1e-9,
                                  f"relative error {report.area_error:.3e}"))
    return checks
