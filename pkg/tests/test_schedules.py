import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddgate.errors import InconsistentArea, OddOrder, OverlapError
from ddgate.ops import PauliString
from ddgate.schedules import (PulseEvent, Schedule, build_schedule, cdd_schedule, check_overlaps,
                              nested_udd_schedule, pdd_schedule, pulse_width_for,
                              realize_pulses, two_qubit_schedule, udd_times)

from oracles import udd_times_mp

TAU = 2.5e-9


def axes_of(segments):
    return [s.frame.stripped().axes for s in segments]


def test_pdd_frames_and_pulses():
    s = pdd_schedule(TAU)
    assert s.total_duration == 4 * TAU
    assert axes_of(s.frame_segments()) == ["I", "X", "Y", "Z"]
    assert s.frame_segments()[0].frame.is_identity()
    times = [g.time for g in s.physical_pulses()]
    assert np.allclose(times, [TAU, 2 * TAU, 3 * TAU, 4 * TAU], rtol=1e-15)
    assert [g.operator.label for g in s.physical_pulses()] == ["X", "-iZ", "-iX", "Z"]
    widths = [seg.duration for seg in s.frame_segments()]
    assert np.allclose(widths, TAU, rtol=1e-12)


def test_cdd1_is_pdd():
    a, b = cdd_schedule(TAU, 1), pdd_schedule(TAU)
    assert a.events == b.events


def test_cdd2_segments():
    s = cdd_schedule(TAU, 2)
    segs = s.frame_segments()
    assert len(segs) == 16
    assert np.allclose([x.duration for x in segs], TAU / 4, rtol=1e-9)
    # segment (m=1, k=2): frame sigma_1 sigma_2 = iZ, which conjugates like Z
    q = segs[4 * 1 + 2].frame
    assert q.axes == "Z"
    zm = PauliString("Z").matrix()
    for p in "XYZ":
        m = PauliString(p).matrix()
        assert np.allclose(q.matrix() @ m @ q.dagger().matrix(), zm @ m @ zm)


def test_cdd2_frames_are_outer_times_inner():
    s = cdd_schedule(TAU, 2)
    cycle = [PauliString(a) for a in "IXYZ"]
    for idx, seg in enumerate(s.frame_segments()):
        m, k = divmod(idx, 4)
        assert seg.frame.stripped() == (cycle[m] * cycle[k]).stripped()


def test_cdd2_pulse_count():
    s = cdd_schedule(TAU, 2)
    assert len(s.events) == 20
    assert len(s.pulse_groups()) == 16
    # two block boundaries merge Z (inner) with Z (outer) into the identity
    assert len(s.physical_pulses()) == 14


@pytest.mark.parametrize("levels", [1, 2, 3])
def test_cdd_segment_count(levels):
    assert cdd_schedule(TAU, levels).segment_count() == 4 ** levels


def test_udd_times_examples():
    assert udd_times(1, 4.0) == pytest.approx([2.0], abs=1e-15)
    assert udd_times(2, 1.0) == pytest.approx([0.25, 0.75], abs=1e-15)
    assert udd_times(4, 1.0) == pytest.approx([0.095492, 0.345492, 0.654508, 0.904508], abs=1e-6)


@pytest.mark.parametrize("n", range(1, 13))
def test_udd_times_against_high_precision(n):
    ours = udd_times(n, 3.7e-8)
    ref = udd_times_mp(n, 3.7e-8)
    assert np.max(np.abs(np.array(ours) - np.array(ref))) <= 1e-12 * 3.7e-8


@settings(max_examples=50, deadline=None)
@given(n=st.integers(1, 12), total=st.floats(1e-9, 1e-5))
def test_udd_times_symmetric_and_increasing(n, total):
    t = udd_times(n, total)
    assert all(0 < a < b < total for a, b in zip(t, t[1:])) or n == 1
    for j in range(n):
        assert abs(t[j] + t[n - 1 - j] - total) <= 1e-12 * total


def test_nested_udd2_frames():
    s = nested_udd_schedule(TAU, 2)
    segs = s.frame_segments()
    assert len(segs) == 9
    rows = [axes_of(segs[3 * j:3 * j + 3]) for j in range(3)]
    # X Z is Y up to phase
    assert rows == [["I", "Z", "I"], ["X", "Y", "X"], ["I", "Z", "I"]]
    assert len(s.physical_pulses()) == 8


def test_nested_udd_inner_times():
    s = nested_udd_schedule(TAU, 2)
    t1 = udd_times(2, 4 * TAU)[0]
    inner = [e.nominal_time for e in s.events if e.layer == 0 and e.nominal_time < t1]
    assert inner == pytest.approx([0.25 * t1, 0.75 * t1], rel=1e-14)


def test_nested_udd_inner_times_are_affine():
    s = nested_udd_schedule(TAU, 4)
    outer = [0.0] + udd_times(4, 4 * TAU) + [4 * TAU]
    fr = [math.sin(k * math.pi / 10) ** 2 for k in range(1, 5)]
    inner = sorted(e.nominal_time for e in s.events if e.layer == 0)
    expected = sorted(a + (b - a) * f for a, b in zip(outer, outer[1:]) for f in fr)
    assert inner == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_nested_udd_odd_order(n):
    with pytest.raises(OddOrder):
        nested_udd_schedule(TAU, n)


def test_two_qubit_pdd_frames():
    s = two_qubit_schedule(TAU, "pdd")
    assert axes_of(s.frame_segments()) == ["II", "XX", "YY", "ZZ"]
    zx = PauliString("ZX")
    assert PauliString("XX").conjugation_sign(zx) == -1
    assert PauliString("YY").conjugation_sign(zx) == 1


def test_two_qubit_extra_layers_segment_count():
    s = two_qubit_schedule(TAU, "cdd2", extra_layers=True)
    assert s.segment_count() == 64
    assert two_qubit_schedule(TAU, "pdd", extra_layers=True).segment_count() == 16


def test_pulse_width_for_100mhz():
    assert pulse_width_for(2 * math.pi * 100e6) == pytest.approx(5e-9, rel=1e-14)


def test_realize_zero_width_leaves_schedule():
    s = pdd_schedule(TAU)
    r = realize_pulses(s, 0.0)
    assert r.events == s.events
    assert r.wall_duration == s.total_duration


def test_truncate_overlap_raises():
    with pytest.raises(OverlapError):
        pdd_schedule(1e-9, pulse_width=2.5e-9, placement="truncate")


def test_insert_placement_grows_wall_clock():
    s = pdd_schedule(1e-9, pulse_width=2.5e-9, placement="insert")
    assert s.wall_duration == pytest.approx(4e-9 + 4 * 2.5e-9, rel=1e-12)
    drives = [i.duration for i in s.timeline() if i.kind == "drive"]
    assert drives == pytest.approx([1e-9] * 4, rel=1e-9)


def test_truncate_placement_keeps_total():
    s = pdd_schedule(10e-9, pulse_width=1e-9, placement="truncate")
    assert s.wall_duration == pytest.approx(40e-9 + 1e-9, rel=1e-12)
    drives = [i.duration for i in s.timeline() if i.kind == "drive"]
    assert drives == pytest.approx([10e-9, 9e-9, 9e-9, 9e-9], rel=1e-9)


def test_inconsistent_area():
    with pytest.raises(InconsistentArea):
        pdd_schedule(TAU, pulse_width=5e-9, rabi_strength=2 * math.pi * 50e6)
    pdd_schedule(TAU, pulse_width=5e-9, rabi_strength=2 * math.pi * 100e6)


def test_check_overlaps_accepts_insert():
    s = realize_pulses(pdd_schedule(1e-9), 2.5e-9, placement="insert")
    check_overlaps(s)


def test_event_outside_window_rejected():
    with pytest.raises(ValueError):
        Schedule(1.0, 1, (PulseEvent(2.0, PauliString("X")),))


SEQUENCES_1Q = ["none", "pdd", "cdd2", "cdd3", "udd2", "udd4", "udd6"]
SEQUENCES_2Q = ["none", "pdd", "cdd2", "pdd+x", "cdd2+x", "udd2", "udd4"]


@pytest.mark.parametrize("n_qubits,name", [(1, s) for s in SEQUENCES_1Q] + [(2, s) for s in SEQUENCES_2Q])
def test_tiling_frames_and_closure(n_qubits, name):
    s = build_schedule(name, TAU, n_qubits)
    segs = s.frame_segments()
    assert segs[0].start == 0.0
    assert segs[-1].end == pytest.approx(s.total_duration, rel=1e-15)
    for a, b in zip(segs, segs[1:]):
        assert a.end == b.start
        assert a.end > a.start
    assert segs[0].frame.is_identity()
    assert s.net_frame().is_identity()
    # every frame is the ordered product of all earlier pulses
    for seg in segs:
        q = PauliString.identity(n_qubits)
        for e in s.events:
            if e.nominal_time <= seg.start + s.tol:
                q = e.operator * q
        assert q == seg.frame


@settings(max_examples=30, deadline=None)
@given(name=st.sampled_from(SEQUENCES_1Q), tau=st.floats(1e-10, 1e-6),
       width_fraction=st.floats(0.0, 0.9))
def test_insert_timeline_tiles_wall_clock(name, tau, width_fraction):
    s = build_schedule(name, tau)
    if width_fraction > 0:
        s = realize_pulses(s, width_fraction * tau, placement="insert")
    items = s.timeline()
    assert items[0].start == 0.0
    for a, b in zip(items, items[1:]):
        assert b.start == pytest.approx(a.end, abs=1e-12 * s.total_duration)
    assert items[-1].end == pytest.approx(s.wall_duration, rel=1e-12)


def test_unknown_sequence_name():
    with pytest.raises(ValueError):
        build_schedule("xy8", TAU)
    with pytest.raises(ValueError):
        build_schedule("pdd+x", TAU, 1)
