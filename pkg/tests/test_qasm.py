from pathlib import Path

import numpy as np
import pytest

from ddgate.circuits import (ECR, Circuit, Gate, build_bare_stack, build_first_order_circuit,
                             build_second_order_circuit, gate)
from ddgate.errors import DDGateError, UnsupportedGate
from ddgate.ops import phase_distance
from ddgate.qasm import HEADER, export_circuit, parse_qasm

DATA = Path(__file__).parent / "data"

CIRCUITS = [build_first_order_circuit(m) for m in range(1, 6)] + \
    [build_second_order_circuit(m, x) for m in (4, 8) for x in (False, True)] + \
    [build_bare_stack(8), build_bare_stack(8, crosstalk=True)]


def test_golden_first_order_m1():
    golden = (DATA / "first_order_m1.qasm").read_bytes()
    assert export_circuit(build_first_order_circuit(1)).encode() == golden


def test_single_cnot_body():
    text = export_circuit(Circuit(2, (gate("CNOT", 0, 1),)))
    assert text == HEADER + "qreg q[2];\ncx q[0],q[1];\n"


@pytest.mark.parametrize("c", CIRCUITS, ids=lambda c: c.name)
def test_roundtrip_unitary(c):
    parsed = parse_qasm(export_circuit(c, measure=True))
    assert parsed.qubit_count == c.qubit_count
    assert phase_distance(parsed.unitary(), c.unitary()) <= 1e-9


def test_engineered_gates_export_as_sandwiches():
    text = export_circuit(Circuit(2, (gate("U4", 0, 1),)))
    assert "z q[0];\nz q[1];\ncx q[0],q[1];\nz q[0];\nz q[1];" in text


def test_ecr_roundtrip_matches_matrix():
    c = Circuit(2, (gate("ECR", 0, 1),))
    text = export_circuit(c)
    assert text.count("gate ecr") == 1
    assert phase_distance(parse_qasm(text).unitary(), ECR) <= 1e-12


def test_custom_gate_unsupported():
    c = Circuit(2, (Gate("custom", (0,), np.diag([1, 1j])),))
    with pytest.raises(UnsupportedGate):
        export_circuit(c)


def test_parser_rejects_unknown_gate():
    with pytest.raises(UnsupportedGate):
        parse_qasm(HEADER + "qreg q[1];\nu3(0,0,0) q[0];\n")


def test_parser_angle_expressions():
    text = HEADER + "qreg q[1];\nrz(-pi/2) q[0];\nrz(3*pi/4 + 0.5) q[0];\n"
    u = parse_qasm(text).unitary()
    angle = -np.pi / 2 + 3 * np.pi / 4 + 0.5
    assert phase_distance(u, np.diag([1, np.exp(1j * angle)])) < 1e-12


def test_parser_rejects_code_in_angles():
    with pytest.raises(DDGateError):
        parse_qasm(HEADER + "qreg q[1];\nrz(__import__('os')) q[0];\n")


def test_parser_needs_qreg():
    with pytest.raises(DDGateError):
        parse_qasm(HEADER + "x q[0];\n")
