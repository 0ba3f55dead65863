"""Dense pure states and density matrices over labeled qubits.

Conventions used throughout the library:

* entropies are in bits (log base 2),
* the system qubit carries register index 0, environment qubits 1..N,
* label position i in a register corresponds to axis i of the
  amplitude tensor (index 0 is the most significant bit).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DomainError,
    InvalidSubsystem,
    NotPositiveSemidefinite,
    RegisterTooLarge,
)

MAX_QUBITS = 24

# Eigenvalues in [-1e-9, 0] are rounding noise and get clamped to 0;
# anything below is a hard error.
EIG_CLAMP = 1e-9

_LN2 = np.log(2.0)


class Role(Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


@dataclass(frozen=True)
class QubitLabel:
    index: int
    role: Role = Role.ENVIRONMENT

    def __repr__(self):
        tag = "S" if self.role is Role.SYSTEM else "E"
        return f"{tag}{self.index}"


def system_register(n_env: int, n_system: int = 1) -> tuple[QubitLabel, ...]:
    """Standard register: system qubit(s) first, then environment qubits."""
    sys_labels = [QubitLabel(i, Role.SYSTEM) for i in range(n_system)]
    env_labels = [QubitLabel(n_system + i, Role.ENVIRONMENT) for i in range(n_env)]
    return tuple(sys_labels + env_labels)


def _check_labels(labels: Sequence[QubitLabel]):
    indices = [lab.index for lab in labels]
    if len(set(indices)) != len(indices):
        raise InvalidSubsystem(f"duplicate qubit indices in register: {indices}")
    if len(labels) > MAX_QUBITS:
        raise RegisterTooLarge(f"{len(labels)} qubits exceeds cap of {MAX_QUBITS}")


class PureState:
    """Normalized complex amplitude vector over a labeled qubit register."""

    def __init__(self, labels: Sequence[QubitLabel], amplitudes: np.ndarray):
        _check_labels(labels)
        amp = np.asarray(amplitudes, dtype=complex).ravel()
        if amp.size != 2 ** len(labels):
            raise DomainError(
                f"amplitude length {amp.size} != 2^{len(labels)}"
            )
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-12:
            raise DomainError(f"state norm {norm} deviates from 1 beyond 1e-12")
        self.labels = tuple(labels)
        self.amplitudes = amp

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index_of(self, label_index: int) -> int:
        for pos, lab in enumerate(self.labels):
            if lab.index == label_index:
                return pos
        raise InvalidSubsystem(f"qubit index {label_index} not in register")

    def system_indices(self) -> tuple[int, ...]:
        return tuple(l.index for l in self.labels if l.role is Role.SYSTEM)

    def environment_indices(self) -> tuple[int, ...]:
        return tuple(l.index for l in self.labels if l.role is Role.ENVIRONMENT)

    def density_matrix(self) -> "DensityMatrix":
        amp = self.amplitudes
        return DensityMatrix(self.labels, np.outer(amp, amp.conj()))


class DensityMatrix:
    """Hermitian, unit-trace operator on a labeled qubit subsystem."""

    def __init__(self, labels: Sequence[QubitLabel], matrix: np.ndarray):
        _check_labels(labels)
        mat = np.asarray(matrix, dtype=complex)
        dim = 2 ** len(labels)
        if mat.shape != (dim, dim):
            raise DomainError(f"matrix shape {mat.shape} != ({dim}, {dim})")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise DomainError("matrix is not Hermitian within 1e-10")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > 1e-10:
            raise DomainError(f"trace {tr} deviates from 1 beyond 1e-10")
        self.labels = tuple(labels)
        self.matrix = mat

    @property
    def n_qubits(self) -> int:
        return len(self.labels)

    def index_of(self, label_index: int) -> int:
        for pos, lab in enumerate(self.labels):
            if lab.index == label_index:
                return pos
        raise InvalidSubsystem(f"qubit index {label_index} not in register")


def _resolve_keep(labels: Sequence[QubitLabel], keep: Iterable[int]) -> list[int]:
    """Map kept label indices to register positions, preserving register order."""
    keep = set(keep)
    register = {lab.index for lab in labels}
    missing = keep - register
    if missing:
        raise InvalidSubsystem(f"labels {sorted(missing)} not in register")
    return [pos for pos, lab in enumerate(labels) if lab.index in keep]


def partial_trace(state: PureState | DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the kept qubits (given by label index)."""
    keep_pos = _resolve_keep(state.labels, keep)
    kept_labels = [state.labels[p] for p in keep_pos]
    n = len(state.labels)
    other = [p for p in range(n) if p not in keep_pos]
    d_keep = 2 ** len(keep_pos)

    if isinstance(state, PureState):
        psi = state.amplitudes.reshape([2] * n)
        psi = np.transpose(psi, keep_pos + other).reshape(d_keep, -1)
        rho = psi @ psi.conj().T
    else:
        rho_t = state.matrix.reshape([2] * (2 * n))
        perm = keep_pos + other + [n + p for p in keep_pos] + [n + p for p in other]
        rho_t = np.transpose(rho_t, perm)
        d_other = 2 ** len(other)
        rho_t = rho_t.reshape(d_keep, d_other, d_keep, d_other)
        rho = np.einsum("ikjk->ij", rho_t)

    # rounding in the transpose/contraction can leave ~1e-16 asymmetry
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(kept_labels, rho)


def eigenvalues_hermitian(dm: DensityMatrix) -> np.ndarray:
    """Eigenvalues of a density matrix, sorted descending and clamped to [0, 1]."""
    vals = np.linalg.eigvalsh(dm.matrix)
    if vals.min() < -EIG_CLAMP:
        raise NotPositiveSemidefinite(
            f"eigenvalue {vals.min():.3e} below -{EIG_CLAMP:.0e}"
        )
    vals = np.clip(vals, 0.0, 1.0)
    return np.sort(vals)[::-1]


def entropy_from_probs(probs: np.ndarray) -> float:
    """Shannon entropy in bits with the 0 log 0 = 0 convention."""
    p = np.asarray(probs, dtype=float)
    p = p[p > 0.0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(dm: DensityMatrix) -> float:
    """Von Neumann entropy of a density matrix, in bits."""
    return entropy_from_probs(eigenvalues_hermitian(dm))


def binary_entropy(x: float) -> float:
    """h(x) = -x log2 x - (1-x) log2 (1-x), in bits."""
    if x < -1e-12 or x > 1 + 1e-12:
        raise DomainError(f"binary_entropy argument {x} outside [0, 1]")
    x = min(max(x, 0.0), 1.0)
    if x == 0.0 or x == 1.0:
        return 0.0
    return float(-x * np.log2(x) - (1 - x) * np.log2(1 - x))
