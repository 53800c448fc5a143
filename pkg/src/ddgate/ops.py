"""Dense operator algebra for small spin systems.

Pauli strings with an explicit phase, tensor products, exponentials of
Hermitian generators and time-ordered products of piecewise-constant
evolutions. Qubit 0 is the leftmost tensor factor everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import BadPartition, DimensionMismatch, NonHermitianInput

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI_MATRICES = {"I": I2, "X": SX, "Y": SY, "Z": SZ}

HERMITIAN_TOL = 1e-12

# single-qubit product table: (a, b) -> (power of i, result axis)
_PRODUCT = {}
for _a in "IXYZ":
    _PRODUCT[("I", _a)] = (0, _a)
    _PRODUCT[(_a, "I")] = (0, _a)
    _PRODUCT[(_a, _a)] = (0, "I")
for _a, _b, _c in (("X", "Y", "Z"), ("Y", "Z", "X"), ("Z", "X", "Y")):
    _PRODUCT[(_a, _b)] = (1, _c)
    _PRODUCT[(_b, _a)] = (3, _c)

_PHASE_LABELS = {0: "", 1: "i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli operator ``i**power * axes[0] (x) axes[1] (x) ...``."""

    axes: str
    power: int = 0

    def __post_init__(self):
        if not self.axes or any(a not in "IXYZ" for a in self.axes):
            raise ValueError(f"bad Pauli axes {self.axes!r}")
        object.__setattr__(self, "power", self.power % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls("I" * n)

    @classmethod
    def parse(cls, label: str) -> "PauliString":
        """Parse labels such as ``"XZ"``, ``"-Y"``, ``"iZ"``, ``"+XX"``."""
        s = label.strip()
        power = 0
        if s.startswith("+"):
            s = s[1:]
        if s.startswith("-"):
            power += 2
            s = s[1:]
        if s.startswith("i"):
            power += 1
            s = s[1:]
        return cls(s, power)

    @property
    def phase(self) -> complex:
        return (1, 1j, -1, -1j)[self.power]

    @property
    def n_qubits(self) -> int:
        return len(self.axes)

    @property
    def label(self) -> str:
        return _PHASE_LABELS[self.power] + self.axes

    def __str__(self):
        return self.label

    def is_hermitian(self) -> bool:
        return self.power in (0, 2)

    def is_identity(self) -> bool:
        """True when the operator is a multiple of the identity."""
        return set(self.axes) == {"I"}

    def stripped(self) -> "PauliString":
        return PauliString(self.axes)

    def dagger(self) -> "PauliString":
        return PauliString(self.axes, -self.power)

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n_qubits != other.n_qubits:
            raise DimensionMismatch("Pauli strings act on different qubit counts")
        power = self.power + other.power
        axes = []
        for a, b in zip(self.axes, other.axes):
            p, c = _PRODUCT[(a, b)]
            power += p
            axes.append(c)
        return PauliString("".join(axes), power)

    def __neg__(self):
        return PauliString(self.axes, self.power + 2)

    def tensor(self, other: "PauliString") -> "PauliString":
        return PauliString(self.axes + other.axes, self.power + other.power)

    def commutes_with(self, other: "PauliString") -> bool:
        anti = sum(1 for a, b in zip(self.axes, other.axes)
                   if a != "I" and b != "I" and a != b)
        return anti % 2 == 0

    def conjugation_sign(self, other: "PauliString") -> int:
        """Sign s with ``P other P^dagger = s * other``."""
        return 1 if self.commutes_with(other) else -1

    def matrix(self) -> np.ndarray:
        return self.phase * reduce(np.kron, (PAULI_MATRICES[a] for a in self.axes))


def pauli_group(n: int) -> list[PauliString]:
    """All 4**n Hermitian Pauli strings with phase +1."""
    labels = [""]
    for _ in range(n):
        labels = [s + a for s in labels for a in "IXYZ"]
    return [PauliString(s) for s in labels]


def kron(*ops: np.ndarray) -> np.ndarray:
    for op in ops:
        if op.ndim != 2 or op.shape[0] != op.shape[1]:
            raise DimensionMismatch("kron operands must be square")
    return reduce(np.kron, ops)


def embed(local: dict[int, np.ndarray], n_qubits: int) -> np.ndarray:
    """Tensor single-qubit operators into an n-qubit register (identity elsewhere)."""
    factors = [local.get(q, I2) for q in range(n_qubits)]
    return reduce(np.kron, factors) if factors else np.eye(1, dtype=complex)


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    # tolerance is relative to the operator scale (generators here reach ~1e9 rad/s)
    scale = max(1.0, float(np.max(np.abs(h)))) if h.size else 1.0
    return bool(np.max(np.abs(h - h.conj().T), initial=0.0) <= tol * scale)


def is_unitary(u: np.ndarray, tol: float = 1e-10) -> bool:
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def eigh_hermitian(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise DimensionMismatch("generator must be square")
    if not is_hermitian(h):
        raise NonHermitianInput("generator is not Hermitian")
    return np.linalg.eigh(0.5 * (h + h.conj().T))


def expm_from_eigh(evals: np.ndarray, evecs: np.ndarray, t: float) -> np.ndarray:
    return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Return exp(-i h t) via the eigendecomposition of Hermitian ``h``."""
    evals, evecs = eigh_hermitian(np.asarray(h, dtype=complex))
    return expm_from_eigh(evals, evecs, t)


def propagate(segments: Iterable[tuple[np.ndarray, float]]) -> np.ndarray:
    """Time-ordered product of ``exp(-i H_k dt_k)``; the first segment acts first."""
    u = None
    for h, dt in segments:
        if dt < 0:
            raise ValueError("segment durations must be non-negative")
        step = expm_hermitian(h, dt)
        if u is None:
            u = step
        elif u.shape != step.shape:
            raise DimensionMismatch("segment Hamiltonians differ in dimension")
        else:
            u = step @ u
    return np.eye(1, dtype=complex) if u is None else u


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """Max-norm distance between ``u`` and ``v`` after aligning global phase.

    The phase is ``c = Tr(v^dagger u) / |Tr(v^dagger u)|``.
    """
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    overlap = np.trace(v.conj().T @ u)
    c = overlap / abs(overlap) if abs(overlap) > 1e-300 else 1.0
    return float(np.max(np.abs(u - c * v))) if u.size else 0.0


@dataclass(frozen=True, eq=False)
class QuantumState:
    """Pure vector or density matrix over a register with per-factor dimensions."""

    data: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        total = int(np.prod(self.dims)) if self.dims else 1
        if data.ndim == 1:
            ok = data.shape == (total,)
        else:
            ok = data.shape == (total, total)
        if not ok:
            raise BadPartition(f"data shape {data.shape} does not match dims {self.dims}")

    @classmethod
    def qubits(cls, data, n_qubits: int | None = None) -> "QuantumState":
        data = np.asarray(data, dtype=complex)
        if n_qubits is None:
            n_qubits = int(round(np.log2(data.shape[0])))
        return cls(data, (2,) * n_qubits)

    @property
    def is_pure(self) -> bool:
        return self.data.ndim == 1

    @property
    def dimension(self) -> int:
        return self.data.shape[0]

    def density(self) -> np.ndarray:
        if self.is_pure:
            return np.outer(self.data, self.data.conj())
        return self.data

    def check(self, tol: float = 1e-10) -> None:
        if self.is_pure:
            if abs(np.linalg.norm(self.data) - 1) > tol:
                raise ValueError("state vector is not normalised")
            return
        rho = self.data
        if abs(np.trace(rho) - 1) > tol:
            raise ValueError("density matrix trace differs from 1")
        if not is_hermitian(rho, tol):
            raise ValueError("density matrix is not Hermitian")
        if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -tol:
            raise ValueError("density matrix is not positive semidefinite")

    def tensor(self, other: "QuantumState") -> "QuantumState":
        dims = self.dims + other.dims
        if self.is_pure and other.is_pure:
            return QuantumState(np.kron(self.data, other.data), dims)
        return QuantumState(np.kron(self.density(), other.density()), dims)


def partial_trace(state: QuantumState, keep: Sequence[int]) -> QuantumState:
    """Reduced density matrix over the factors listed in ``keep``."""
    dims = state.dims
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise BadPartition(f"keep={keep} outside {n} factors")
    drop = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep])) if keep else 1
    if state.is_pure:
        psi = state.data.reshape(dims).transpose(keep + drop).reshape(dk, -1)
        rho = psi @ psi.conj().T
    else:
        rho = state.data.reshape(dims + dims)
        # contract each dropped factor's row and column index
        letters = "abcdefghijklmnopqrstuvwxyz"
        if 2 * n > len(letters):
            raise BadPartition("too many tensor factors")
        row = list(letters[:n])
        col = list(letters[n:2 * n])
        for i in drop:
            col[i] = row[i]
        out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
        rho = np.einsum("".join(row) + "".join(col) + "->" + out, rho).reshape(dk, dk)
    return QuantumState(rho, tuple(dims[i] for i in keep))
