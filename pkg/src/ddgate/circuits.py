"""Discrete-circuit versions of the protected CNOT stacks.

A stack of CNOT gates is split into blocks (first order, 4 blocks) or
subblocks (second order, 16 subblocks) with single-qubit X/Z decoupling
pulses on both data qubits between them. Inside a block the data qubits sit
in a Pauli frame ``sigma``; when a block holds an odd number of gates its
first gate is replaced by the engineered gate ``sigma CNOT sigma`` so the
whole circuit still composes to the bare stack.

Qubit 0 is the control and the leftmost tensor factor; bitstrings list qubit
0 first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotDivisible
from .ops import I2, SX, SY, SZ, PauliString, is_unitary, kron, phase_distance
from .schedules import Schedule, cdd_schedule, pdd_schedule

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)

CNOT = kron(P0, I2) + kron(P1, SX)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
ECR = np.array([[0, 1, 0, 1j],
                [1, 0, -1j, 0],
                [0, 1j, 0, 1],
                [-1j, 0, 1, 0]], dtype=complex) / math.sqrt(2)

# frame Pauli of each engineered gate: U_{k+1} = (s_k (x) s_k) CNOT (s_k (x) s_k)
FRAME_OF = {"U1": "I", "U2": "X", "U3": "Y", "U4": "Z"}
ENGINEERED_FOR = {v: k for k, v in FRAME_OF.items()}

GATE_MATRICES: dict[str, np.ndarray] = {
    "X": SX,
    "Y": SY,
    "Z": SZ,
    "CNOT": CNOT,
    "CZ": CZ,
    "ECR": ECR,
    "U1": kron(P0, I2) + kron(P1, SX),
    "U2": kron(P1, I2) + kron(P0, SX),
    "U3": kron(P1, I2) - kron(P0, SX),
    "U4": kron(P0, I2) - kron(P1, SX),
}
LABELS = tuple(GATE_MATRICES) + ("custom",)
ROLES = ("gate", "dd", "crosstalk")


@dataclass(frozen=True, eq=False)
class Gate:
    """A gate on ``targets``; ``role`` separates data gates, DD pulses and crosstalk."""

    label: str
    targets: tuple[int, ...]
    matrix: np.ndarray
    role: str = "gate"
    layer: int = -1

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown gate label {self.label!r}")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("repeated target qubit")
        if m.shape != (2 ** len(self.targets),) * 2:
            raise DimensionMismatch(f"{self.label}: matrix {m.shape} for {len(self.targets)} target(s)")
        if not is_unitary(m):
            raise ValueError(f"{self.label}: matrix is not unitary")

    @property
    def arity(self) -> int:
        return len(self.targets)

    def __repr__(self):
        return f"Gate({self.label}, {self.targets}, role={self.role})"


def gate(label: str, *targets: int, role: str = "gate", layer: int = -1) -> Gate:
    return Gate(label, targets, GATE_MATRICES[label], role, layer)


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...] = ()
    # slot -> (first gate index, one past the last gate index)
    blocks: tuple[tuple[int, int], ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.qubit_count < 1:
            raise ValueError("qubit_count must be >= 1")
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(t < 0 or t >= self.qubit_count for t in g.targets):
                raise ValueError(f"{g!r} targets outside a {self.qubit_count}-qubit register")

    @property
    def two_qubit_count(self) -> int:
        """Two-qubit data gates (crosstalk excluded)."""
        return sum(1 for g in self.gates if g.arity == 2 and g.role == "gate")

    def count(self, label: str) -> int:
        return sum(1 for g in self.gates if g.label == label)

    def without(self, index: int) -> "Circuit":
        gates = self.gates[:index] + self.gates[index + 1:]
        return Circuit(self.qubit_count, gates, (), self.name)

    def unitary(self) -> np.ndarray:
        d = 2 ** self.qubit_count
        cols = np.eye(d, dtype=complex)
        return apply_circuit(cols, self).T


# dense application -------------------------------------------------------

def apply_gate(states: np.ndarray, matrix: np.ndarray, targets: Sequence[int],
               n_qubits: int) -> np.ndarray:
    """Apply ``matrix`` on ``targets`` to each row of ``states`` (shape (S, 2**n))."""
    s = states.shape[0]
    k = len(targets)
    psi = states.reshape((s,) + (2,) * n_qubits)
    axes = [1 + t for t in targets]
    psi = np.moveaxis(psi, axes, list(range(n_qubits + 1 - k, n_qubits + 1)))
    shape = psi.shape
    psi = psi.reshape(s, -1, 2 ** k) @ matrix.T
    psi = np.moveaxis(psi.reshape(shape), list(range(n_qubits + 1 - k, n_qubits + 1)), axes)
    return psi.reshape(s, 2 ** n_qubits)


def apply_circuit(states: np.ndarray, circuit: Circuit) -> np.ndarray:
    out = np.array(states, dtype=complex)
    for g in circuit.gates:
        out = apply_gate(out, g.matrix, g.targets, circuit.qubit_count)
    return out


# builders -----------------------------------------------------------------

def _crosstalk_gates() -> list[Gate]:
    return [gate("CZ", 0, 2, role="crosstalk"), gate("CZ", 1, 3, role="crosstalk")]


class _Builder:
    def __init__(self, qubit_count: int, cz_every: int | None):
        self.qubit_count = qubit_count
        self.cz_every = cz_every
        self.gates: list[Gate] = []
        self.two_qubit = 0

    def two_qubit_gate(self, label: str) -> None:
        self.gates.append(gate(label, 0, 1))
        self.two_qubit += 1
        if self.cz_every and self.two_qubit % self.cz_every == 0:
            self.gates.extend(_crosstalk_gates())

    def pulse(self, pauli: PauliString, layer: int) -> None:
        for q, a in enumerate(pauli.stripped().axes):
            if a != "I":
                self.gates.append(gate(a, q, role="dd", layer=layer))


def _dd_circuit(schedule: Schedule, per_slot: int, crosstalk: bool, name: str) -> Circuit:
    """Fill the frame segments of ``schedule`` with ``per_slot`` CNOT-type gates each."""
    n = 4 if crosstalk else 2
    b = _Builder(n, 4 if crosstalk else None)
    engineer = per_slot % 2 == 1
    events = sorted(schedule.events, key=lambda e: (e.nominal_time, e.layer))
    slot_len = min(s.duration for s in schedule.frame_segments())
    n_slots = round(schedule.total_duration / slot_len)
    frame = PauliString.identity(1)
    blocks = []
    i = 0
    for slot in range(n_slots):
        start = len(b.gates)
        first = ENGINEERED_FOR[frame.stripped().label] if engineer else "CNOT"
        for k in range(per_slot):
            b.two_qubit_gate(first if k == 0 else "CNOT")
        blocks.append((start, len(b.gates)))
        t_end = (slot + 1) * slot_len
        while i < len(events) and events[i].nominal_time <= t_end + schedule.tol:
            p = events[i].operator.stripped()
            b.pulse(p.tensor(p), events[i].layer)
            frame = (p * frame).stripped()
            i += 1
    return Circuit(n, tuple(b.gates), tuple(blocks), name)


def build_first_order_circuit(m: int) -> Circuit:
    """Four blocks of ``m`` gates with X, Z, X, Z pulses on both qubits after each block."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return _dd_circuit(pdd_schedule(1.0), m, False, f"order1-m{m}")


def build_second_order_circuit(m: int, crosstalk: bool = False) -> Circuit:
    """Four blocks of ``m`` gates, each split into four subblocks, under a two-level CDD.

    With ``crosstalk`` two spectator qubits (2 and 3) are added and
    ``CZ(0, 2)``, ``CZ(1, 3)`` follow every fourth two-qubit gate.
    """
    if m < 4 or m % 4:
        raise NotDivisible(f"second-order blocks need m divisible by 4, got {m}")
    name = f"order2-m{m}" + ("-crosstalk" if crosstalk else "")
    return _dd_circuit(cdd_schedule(1.0, 2), m // 4, crosstalk, name)


def build_bare_stack(total: int, crosstalk: bool = False) -> Circuit:
    """``total`` CNOT gates with no decoupling (the reference stack)."""
    if total < 0:
        raise ValueError("total must be >= 0")
    b = _Builder(4 if crosstalk else 2, 4 if crosstalk else None)
    for _ in range(total):
        b.two_qubit_gate("CNOT")
    return Circuit(b.qubit_count, tuple(b.gates), ((0, len(b.gates)),), f"bare-{total}")


def engineered_labels(c: Circuit) -> list[str]:
    """Labels of the two-qubit data gates in order."""
    return [g.label for g in c.gates if g.arity == 2 and g.role == "gate"]


def bare_reference(c: Circuit) -> Circuit:
    """Drop DD pulses and replace every engineered gate by CNOT; crosstalk gates stay."""
    gates = []
    for g in c.gates:
        if g.role == "dd":
            continue
        gates.append(gate("CNOT", *g.targets) if g.label in FRAME_OF else g)
    return Circuit(c.qubit_count, tuple(gates), (), f"{c.name}-bare")


def verify_circuit_identity(c: Circuit) -> float:
    """Phase-insensitive distance between ``c`` and its bare CNOT stack."""
    return phase_distance(c.unitary(), bare_reference(c).unitary())


# noisy sampling ------------------------------------------------------------

@dataclass(frozen=True)
class NoiseModel:
    """Gate-located depolarizing noise plus readout flips.

    ``coherent_zx`` adds a systematic over-rotation ``exp(-i d Z(x)X / 2)`` to
    every native CNOT-type gate (the engineered gates carry it in their
    frame), which decoupling can echo away. It is off by default.
    """

    two_qubit_depolarizing: float = 7e-3
    one_qubit_depolarizing: float = 3e-4
    readout_flip: float = 1e-2
    dd_noiseless: bool = True
    coherent_zx: float = 0.0

    def __post_init__(self):
        for name in ("two_qubit_depolarizing", "one_qubit_depolarizing", "readout_flip"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {p}")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(0.0, 0.0, 0.0)

    def probability(self, g: Gate) -> float:
        if g.role == "dd" and self.dd_noiseless:
            return 0.0
        return self.two_qubit_depolarizing if g.arity == 2 else self.one_qubit_depolarizing

    def actual_matrix(self, g: Gate) -> np.ndarray:
        if self.coherent_zx == 0.0 or not (g.label == "CNOT" or g.label in FRAME_OF):
            return g.matrix
        zx = kron(SZ, SX)
        err = math.cos(self.coherent_zx / 2) * np.eye(4) - 1j * math.sin(self.coherent_zx / 2) * zx
        if g.label == "CNOT":
            return CNOT @ err
        s = PauliString(FRAME_OF[g.label] * 2).matrix()
        return s @ CNOT @ err @ s


@dataclass
class NoisyResult:
    counts: dict[str, int]
    shots: int
    target: str
    probability_fidelity: float
    probability_error: float
    amplitude_fidelity: float
    amplitude_error: float


def _paulis(k: int) -> list[np.ndarray]:
    mats = [I2, SX, SY, SZ]
    if k == 1:
        return mats
    return [kron(a, b) for a in mats for b in mats]


def basis_state(bits: str) -> np.ndarray:
    psi = np.zeros(2 ** len(bits), dtype=complex)
    psi[int(bits, 2)] = 1
    return psi


def ideal_output(c: Circuit, initial: str | None = None) -> np.ndarray:
    initial = "0" * c.qubit_count if initial is None else initial
    return apply_circuit(basis_state(initial)[None, :], c)[0]


def _data_target(c: Circuit, initial: str) -> str:
    probs = np.abs(ideal_output(c, initial)) ** 2
    probs = probs.reshape(4, -1).sum(axis=1)
    return format(int(np.argmax(probs)), "02b")


CHUNK = 10_000
DEFAULT_SHOTS = 10_000


def simulate_noisy(c: Circuit, noise: NoiseModel, shots: int = DEFAULT_SHOTS, seed: int = 0,
                   initial: str | None = None, target: str | None = None) -> NoisyResult:
    """Monte-Carlo trajectories with Pauli errors after noisy gates.

    Shots are drawn in chunks of ``CHUNK``; chunk ``i`` uses the generator
    ``default_rng([seed, i])`` so counts depend only on ``seed`` and ``shots``.
    The fidelity is measured on the data qubits (0, 1) against ``target``,
    which defaults to the most likely ideal outcome.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = c.qubit_count
    initial = "0" * n if initial is None else initial
    if len(initial) != n or set(initial) - {"0", "1"}:
        raise ValueError(f"initial must be a {n}-bit string")
    target = _data_target(c, initial) if target is None else target
    plan = [(noise.actual_matrix(g), g.targets, noise.probability(g), _paulis(g.arity))
            for g in c.gates]
    psi0 = basis_state(initial)
    tally = np.zeros(2 ** n, dtype=np.int64)
    for chunk, start in enumerate(range(0, shots, CHUNK)):
        size = min(CHUNK, shots - start)
        rng = np.random.default_rng([seed, chunk])
        states = np.tile(psi0, (size, 1))
        for matrix, targets, p, paulis in plan:
            states = apply_gate(states, matrix, targets, n)
            if p <= 0:
                continue
            hit = np.flatnonzero(rng.random(size) < p)
            if hit.size == 0:
                continue
            which = rng.integers(1, len(paulis), size=hit.size)
            for w in np.unique(which):
                rows = hit[which == w]
                states[rows] = apply_gate(states[rows], paulis[w], targets, n)
        probs = np.abs(states) ** 2
        cdf = np.cumsum(probs, axis=1)
        draws = rng.random(size)[:, None] * cdf[:, -1:]
        outcomes = np.minimum((cdf < draws).sum(axis=1), 2 ** n - 1)
        if noise.readout_flip > 0:
            flips = rng.random((size, n)) < noise.readout_flip
            masks = (flips * (1 << np.arange(n - 1, -1, -1))).sum(axis=1)
            outcomes = outcomes ^ masks
        tally += np.bincount(outcomes, minlength=2 ** n)
    counts = {format(i, f"0{n}b"): int(k) for i, k in enumerate(tally) if k}
    hits = sum(k for b, k in counts.items() if b[:2] == target)
    p = hits / shots
    se = math.sqrt(p * (1 - p) / shots)
    amp = math.sqrt(p)
    amp_se = se / (2 * amp) if amp > 0 else float("inf")
    return NoisyResult(counts, shots, target, p, se, amp, amp_se)
