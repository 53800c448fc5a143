import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from ddgate.errors import BadPartition, DimensionMismatch, NonHermitianInput
from ddgate.ops import (I2, SX, SY, SZ, PauliString, QuantumState, embed, expm_hermitian,
                        is_unitary, kron, partial_trace, pauli_group, phase_distance,
                        propagate)

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

pauli_labels = st.text(alphabet="IXYZ", min_size=1, max_size=4)


def test_kron_identity():
    assert np.array_equal(kron(I2, I2), np.eye(4))


def test_kron_block_structure():
    m = kron(SZ, SX)
    assert np.array_equal(m[:2, :2], SX)
    assert np.array_equal(m[2:, 2:], -SX)
    assert not m[:2, 2:].any() and not m[2:, :2].any()


def test_kron_involution():
    a = kron(SX, SY)
    assert np.allclose(a @ a, np.eye(4), atol=0)


def test_kron_rejects_non_square():
    with pytest.raises(DimensionMismatch):
        kron(np.ones((2, 3)), I2)


def test_embed_places_factor():
    assert np.array_equal(embed({1: SZ}, 3), np.kron(np.kron(I2, SZ), I2))


@pytest.mark.parametrize("label,expected", [
    ("X", "X"), ("-Y", "-Y"), ("iZ", "iZ"), ("-iXX", "-iXX"), ("+ZI", "ZI"),
])
def test_parse_label_roundtrip(label, expected):
    assert PauliString.parse(label).label == expected


def test_pauli_products_carry_phase():
    x, y, z = PauliString("X"), PauliString("Y"), PauliString("Z")
    assert x * y == PauliString("Z", 1)
    assert y * x == PauliString("Z", 3)
    assert (y * z).label == "iX"
    assert (x * x).is_identity()


@settings(max_examples=60, deadline=None)
@given(a=pauli_labels, data=st.data())
def test_pauli_product_matches_matrices(a, data):
    b = data.draw(st.text(alphabet="IXYZ", min_size=len(a), max_size=len(a)))
    pa, pb = PauliString(a), PauliString(b)
    assert np.allclose((pa * pb).matrix(), pa.matrix() @ pb.matrix(), atol=1e-15)


@settings(max_examples=60, deadline=None)
@given(a=pauli_labels, data=st.data())
def test_commutation_matches_matrices(a, data):
    b = data.draw(st.text(alphabet="IXYZ", min_size=len(a), max_size=len(a)))
    pa, pb = PauliString(a).matrix(), PauliString(b).matrix()
    commutes = np.allclose(pa @ pb, pb @ pa)
    assert PauliString(a).commutes_with(PauliString(b)) == commutes
    s = PauliString(a).conjugation_sign(PauliString(b))
    assert np.allclose(pa @ pb @ pa.conj().T, s * pb)


def test_pauli_group_size_and_closure():
    group = pauli_group(2)
    assert len(group) == 16
    axes = {p.axes for p in group}
    for p in group:
        for q in group:
            assert (p * q).axes in axes


def test_expm_half_pi_sigma_x():
    assert np.allclose(expm_hermitian(SX, math.pi / 2), -1j * SX, atol=1e-15)


def test_expm_zero_generator():
    assert np.allclose(expm_hermitian(np.zeros((4, 4)), 3.7), np.eye(4), atol=0)


def test_cross_resonance_to_cnot():
    # generator -Z(x)X for time pi/4 is the CR(-pi/2) gate
    u_cr = expm_hermitian(-kron(SZ, SX), math.pi / 4)
    local = np.kron(expm(-0.25j * math.pi * SZ), expm(-0.25j * math.pi * SX))
    assert np.allclose(local @ u_cr, np.exp(-1j * math.pi / 4) * CNOT, atol=1e-14)
    assert phase_distance(local @ u_cr, CNOT) < 1e-14


def test_expm_rejects_non_hermitian():
    with pytest.raises(NonHermitianInput):
        expm_hermitian(np.array([[0, 1], [0, 0]], dtype=complex), 1.0)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), s=st.floats(-3, 3), t=st.floats(-3, 3))
def test_expm_group_property(seed, s, t):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = a + a.conj().T
    lhs = expm_hermitian(h, s) @ expm_hermitian(h, t)
    assert np.allclose(lhs, expm_hermitian(h, s + t), atol=1e-10)
    assert is_unitary(expm_hermitian(h, s))


def test_expm_matches_scipy():
    rng = np.random.default_rng(3)
    a = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    h = a + a.conj().T
    assert np.allclose(expm_hermitian(h, 0.3), expm(-0.3j * h), atol=1e-12)


def test_propagate_same_generator_composes():
    u = propagate([(SX, math.pi / 4), (SX, math.pi / 4)])
    assert np.allclose(u, -1j * SX, atol=1e-15)


def test_propagate_empty_is_identity():
    assert np.array_equal(propagate([]), np.eye(1))


def test_propagate_ordering():
    first = propagate([(SZ, math.pi / 2), (SX, math.pi / 2)])
    second = propagate([(SX, math.pi / 2), (SZ, math.pi / 2)])
    # (-iX)(-iZ) = iY and (-iZ)(-iX) = -iY: the orders differ by a sign
    assert np.max(np.abs(first - second)) > 1.9
    assert np.allclose(first, 1j * SY, atol=1e-15)
    # brute force: many small steps of each piece, first piece applied first
    k = 64
    ref = np.linalg.matrix_power(expm(-0.5j * math.pi / k * SX), k) @ \
        np.linalg.matrix_power(expm(-0.5j * math.pi / k * SZ), k)
    assert np.allclose(first, ref, atol=1e-12)


def test_propagate_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        propagate([(SX, 1.0), (kron(SX, SX), 1.0)])


def test_phase_distance_ignores_global_phase():
    u = expm_hermitian(kron(SZ, SX), 0.4)
    assert phase_distance(np.exp(0.7j) * u, u) < 1e-15
    assert phase_distance(SX, SZ) > 0.5


def test_partial_trace_product_state():
    state = QuantumState.qubits(np.array([1, 0, 0, 0]))
    rho = partial_trace(state, [0]).data
    assert np.allclose(rho, np.diag([1, 0]))


def test_partial_trace_bell_state():
    bell = QuantumState.qubits(np.array([1, 0, 0, 1]) / math.sqrt(2))
    assert np.allclose(partial_trace(bell, [0]).data, I2 / 2, atol=1e-15)
    assert np.allclose(partial_trace(bell, [1]).data, I2 / 2, atol=1e-15)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), keep=st.sets(st.integers(0, 2), min_size=1))
def test_partial_trace_pure_and_mixed_agree(seed, keep):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=8) + 1j * rng.normal(size=8)
    psi /= np.linalg.norm(psi)
    pure = partial_trace(QuantumState.qubits(psi), sorted(keep)).data
    mixed = partial_trace(QuantumState.qubits(np.outer(psi, psi.conj()), 3), sorted(keep)).data
    assert np.allclose(pure, mixed, atol=1e-13)
    assert abs(np.trace(pure) - 1) < 1e-13


def test_partial_trace_bad_partition():
    with pytest.raises(BadPartition):
        partial_trace(QuantumState.qubits(np.array([1, 0])), [3])
    with pytest.raises(BadPartition):
        QuantumState(np.zeros(3), (2,))
