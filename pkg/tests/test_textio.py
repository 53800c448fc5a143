import math

import pytest

from ddgate.engineering import TargetGate, engineer
from ddgate.errors import DDGateError
from ddgate.schedules import build_schedule, pdd_schedule
from ddgate.textio import parse_text, plan_to_text, schedule_to_text, verify_text


def checks_by_name(text):
    return {c.name: c for c in verify_text(text)}


@pytest.mark.parametrize("name,n_qubits", [("pdd", 1), ("cdd2", 1), ("udd4", 1), ("cdd2+x", 2)])
def test_schedule_roundtrip_exact(name, n_qubits):
    s = build_schedule(name, 3.3e-9, n_qubits)
    doc = parse_text(schedule_to_text(s))
    assert doc.schedule.events == s.events
    assert doc.schedule.total_duration == s.total_duration
    assert schedule_to_text(doc.schedule) == schedule_to_text(s)


def test_plan_roundtrip_passes_all_checks():
    s = pdd_schedule(10e-9, pulse_width=1e-9, placement="truncate")
    text = plan_to_text(engineer(TargetGate.rotation(math.pi, math.pi / 4), s))
    checks = verify_text(text)
    assert all(c.passed for c in checks), [c.line() for c in checks]
    assert {"overlap", "tiling", "frame-equality", "area-law"} <= {c.name for c in checks}


def test_hand_edited_overlap_reported():
    s = pdd_schedule(10e-9, pulse_width=1e-9, placement="truncate")
    text = schedule_to_text(s).replace("2e-08 1e-09", "1.05e-08 1e-09")
    result = checks_by_name(text)["overlap"]
    assert not result.passed
    assert "OverlapError" in result.detail


def test_perturbed_phase_names_segment():
    plan = engineer(TargetGate.rotation(math.pi, 0.3), pdd_schedule(5e-9))
    lines = plan_to_text(plan).splitlines()
    seg_lines = [i for i, line in enumerate(lines) if line.startswith("seg ")]
    parts = lines[seg_lines[2]].split()
    parts[-1] = repr(float(parts[-1]) + 0.1)
    lines[seg_lines[2]] = " ".join(parts)
    result = checks_by_name("\n".join(lines) + "\n")["frame-equality"]
    assert not result.passed
    assert "failing segment(s) 2" in result.detail


def test_broken_cycle_detected():
    text = schedule_to_text(pdd_schedule(5e-9))
    lines = [line for line in text.splitlines() if not line.startswith("2e-08")]
    result = checks_by_name("\n".join(lines) + "\n")["cycle-closure"]
    assert not result.passed


def test_garbage_line_raises():
    text = schedule_to_text(pdd_schedule(5e-9)) + "not a number X 0\n"
    with pytest.raises(DDGateError, match="line"):
        parse_text(text)


def test_missing_header_raises():
    with pytest.raises(DDGateError):
        parse_text("1e-9 0.0 X 0\n")
