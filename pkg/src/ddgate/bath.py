"""Spin-bath environment: Heisenberg plus Dzyaloshinskii-Moriya coupling.

Register layout is system qubits first, then bath spins. Angular units
throughout (rad/s); the coupling ``epsilon`` multiplies every term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DimensionMismatch
from .ops import SX, SY, SZ, QuantumState, embed

BathInitial = Union[str, tuple]


@dataclass(frozen=True)
class RandomField:
    """Bath self-Hamiltonian ``sum_b h_b A_b`` with ``h_b ~ U[-max, max]``.

    ``axis`` picks ``A`` (Z by default). A transverse field makes the bath
    operators of a pure-dephasing coupling time dependent.
    """

    seed: int = 0
    max_strength: float = 0.0
    axis: str = "z"

    def __post_init__(self):
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")


@dataclass(frozen=True)
class SpinBathModel:
    system_qubits: int = 1
    bath_spins: int = 5
    epsilon: float = 2 * math.pi * 1e6
    dm_enabled: bool = True
    # keep only the sigma_z (x) sigma_z part of the coupling
    pure_dephasing: bool = False
    bath_field: RandomField | None = None
    # "all-zero", "maximally-mixed", or a tuple of single-spin state vectors
    bath_initial: BathInitial = "all-zero"

    def __post_init__(self):
        if self.system_qubits not in (1, 2):
            raise ValueError("system_qubits must be 1 or 2")
        if self.bath_spins < 0:
            raise ValueError("bath_spins must be non-negative")
        if isinstance(self.bath_initial, str):
            if self.bath_initial not in ("all-zero", "maximally-mixed"):
                raise ValueError(f"unknown bath_initial {self.bath_initial!r}")
        else:
            states = tuple(tuple(complex(a) for a in v) for v in self.bath_initial)
            if len(states) != self.bath_spins or any(len(v) != 2 for v in states):
                raise ValueError("need one 2-component state per bath spin")
            object.__setattr__(self, "bath_initial", states)

    @property
    def n_qubits(self) -> int:
        return self.system_qubits + self.bath_spins

    @property
    def dimension(self) -> int:
        return 2 ** self.n_qubits

    def attachment(self) -> list[int]:
        """System qubit each bath spin couples to (3 + 2 split for five spins)."""
        if self.system_qubits == 1:
            return [0] * self.bath_spins
        first = (self.bath_spins + 1) // 2
        return [0] * first + [1] * (self.bath_spins - first)


def build_interaction(model: SpinBathModel) -> np.ndarray:
    """``epsilon * sum_b [XX + YY + ZZ + (X_s Y_b - Y_s X_b)]``.

    With ``pure_dephasing`` only the ``Z_s Z_b`` terms are kept.
    """
    n = model.n_qubits
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for b, s in enumerate(model.attachment()):
        q = model.system_qubits + b
        if model.pure_dephasing:
            h += embed({s: SZ, q: SZ}, n)
            continue
        for a in (SX, SY, SZ):
            h += embed({s: a, q: a}, n)
        if model.dm_enabled:
            h += embed({s: SX, q: SY}, n) - embed({s: SY, q: SX}, n)
    return model.epsilon * h


def bath_operators(model: SpinBathModel) -> dict[str, np.ndarray]:
    """Bath operators E_x, E_y, E_z of ``H_I = sum_a sigma_a (x) E_a`` (one system qubit).

    They act on the bath factors only.
    """
    if model.system_qubits != 1:
        raise DimensionMismatch("decomposition defined for one system qubit")
    nb = model.bath_spins
    ex = np.zeros((2 ** nb, 2 ** nb), dtype=complex)
    ey, ez = ex.copy(), ex.copy()
    dm = 1.0 if model.dm_enabled else 0.0
    full = 0.0 if model.pure_dephasing else 1.0
    for b in range(nb):
        x, y, z = embed({b: SX}, nb), embed({b: SY}, nb), embed({b: SZ}, nb)
        ex += full * (x + dm * y)
        ey += full * (y - dm * x)
        ez += z
    eps = model.epsilon
    return {"x": eps * ex, "y": eps * ey, "z": eps * ez}


def field_strengths(model: SpinBathModel) -> np.ndarray:
    f = model.bath_field
    if f is None or f.max_strength == 0 or model.bath_spins == 0:
        return np.zeros(model.bath_spins)
    rng = np.random.default_rng(f.seed)
    return rng.uniform(-f.max_strength, f.max_strength, model.bath_spins)


def build_environment(model: SpinBathModel) -> np.ndarray:
    """Bath self-Hamiltonian (zero unless a random field is configured)."""
    n = model.n_qubits
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    if model.bath_field is None:
        return h
    a = {"x": SX, "y": SY, "z": SZ}[model.bath_field.axis]
    for b, hb in enumerate(field_strengths(model)):
        if hb:
            h += hb * embed({model.system_qubits + b: a}, n)
    return h


def bath_state(model: SpinBathModel) -> QuantumState:
    nb = model.bath_spins
    dims = (2,) * nb
    if model.bath_initial == "maximally-mixed":
        d = 2 ** nb
        return QuantumState(np.eye(d, dtype=complex) / d, dims)
    if model.bath_initial == "all-zero":
        psi = np.zeros(2 ** nb, dtype=complex)
        psi[0] = 1
        return QuantumState(psi, dims)
    psi = np.ones(1, dtype=complex)
    for v in model.bath_initial:
        v = np.asarray(v, dtype=complex)
        psi = np.kron(psi, v / np.linalg.norm(v))
    return QuantumState(psi, dims)


def initial_state(model: SpinBathModel, system_state: QuantumState | Sequence[complex]) -> QuantumState:
    """System state tensored with the configured bath state."""
    if not isinstance(system_state, QuantumState):
        data = np.asarray(system_state, dtype=complex)
        if data.shape[0] != 2 ** model.system_qubits:
            raise DimensionMismatch(
                f"system state has dimension {data.shape[0]}, "
                f"model expects {2 ** model.system_qubits}")
        system_state = QuantumState.qubits(data, model.system_qubits)
    if system_state.dimension != 2 ** model.system_qubits:
        raise DimensionMismatch(
            f"system state has dimension {system_state.dimension}, "
            f"model expects {2 ** model.system_qubits}")
    return system_state.tensor(bath_state(model))
