"""Measurements on the system: tilted projective bases and POVMs.

Only the system is ever measured; fragments are read out through their
reduced density matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np

from .errors import InvalidMeasurement, InvalidPartition
from .qstate import DensityMatrix, PureState, partial_trace


@dataclass(frozen=True)
class ProjectiveBasis:
    """Two-outcome basis on a qubit, tilted by mu from the pointer basis."""

    mu: float
    vectors: tuple[tuple[complex, complex], tuple[complex, complex]]

    def effects(self) -> list[np.ndarray]:
        return [np.outer(v, np.conj(v)) for v in map(np.asarray, self.vectors)]

    @property
    def dim(self) -> int:
        return 2


class Povm:
    """A set of PSD effects summing to the identity."""

    def __init__(self, effects: Iterable[np.ndarray]):
        effects = [np.asarray(e, dtype=complex) for e in effects]
        dim = effects[0].shape[0]
        for e in effects:
            if e.shape != (dim, dim):
                raise InvalidMeasurement("effects have inconsistent shapes")
            if np.max(np.abs(e - e.conj().T)) > 1e-10:
                raise InvalidMeasurement("effect is not Hermitian")
            if np.linalg.eigvalsh(e).min() < -1e-10:
                raise InvalidMeasurement("effect is not PSD within 1e-10")
        resid = np.max(np.abs(sum(effects) - np.eye(dim)))
        if resid > 1e-10:
            raise InvalidMeasurement(f"completeness residual {resid:.3e} > 1e-10")
        self._effects = effects
        self.dim = dim

    def effects(self) -> list[np.ndarray]:
        return list(self._effects)


Measurement = Union[ProjectiveBasis, Povm]


def tilted_basis(mu: float) -> ProjectiveBasis:
    """Basis |+> = cos(mu)|0> + sin(mu)|1>, |-> = sin(mu)|0> - cos(mu)|1>.

    mu = 0 is the pointer (computational) basis, mu = pi/4 the
    complementary (Hadamard) basis.
    """
    c, s = np.cos(mu), np.sin(mu)
    return ProjectiveBasis(mu, ((c, s), (s, -c)))


def _effect_sqrts(meas: Measurement) -> list[np.ndarray]:
    out = []
    for e in meas.effects():
        w, v = np.linalg.eigh(e)
        w = np.clip(w, 0.0, None)
        out.append((v * np.sqrt(w)) @ v.conj().T)
    return out


def _apply_on_block(state: PureState, op: np.ndarray, block: list[int]) -> np.ndarray:
    """Apply a 2^k x 2^k operator to the given register positions (unnormalized)."""
    n = state.n_qubits
    k = len(block)
    rest = [p for p in range(n) if p not in block]
    psi = state.amplitudes.reshape([2] * n)
    psi = np.transpose(psi, block + rest).reshape(2**k, -1)
    psi = op @ psi
    psi = psi.reshape([2] * n)
    inv = np.argsort(block + rest)
    return np.transpose(psi, inv).ravel()


def conditional_states(
    state: PureState,
    frag: Iterable[int],
    meas: Measurement,
) -> list[tuple[float, DensityMatrix]]:
    """Post-measurement fragment states (p_i, rho_F^(i)).

    The measurement acts on the system block; the fragment must not
    overlap it. Outcomes with probability below 1e-14 are dropped.
    """
    frag = set(frag)
    sys_idx = state.system_indices()
    if not sys_idx:
        raise InvalidMeasurement("state has no system qubit to measure")
    if frag & set(sys_idx):
        raise InvalidPartition("fragment overlaps the measured system")
    block = [state.index_of(i) for i in sys_idx]
    if meas.effects()[0].shape[0] != 2 ** len(block):
        raise InvalidMeasurement(
            f"measurement dimension != system dimension 2^{len(block)}"
        )

    out = []
    total = 0.0
    for m_sqrt in _effect_sqrts(meas):
        phi = _apply_on_block(state, m_sqrt, block)
        p = float(np.vdot(phi, phi).real)
        total += p
        if p < 1e-14:
            continue
        cond = PureState(state.labels, phi / np.sqrt(p))
        out.append((p, partial_trace(cond, frag)))
    if abs(total - 1.0) > 1e-10:
        raise InvalidMeasurement(f"outcome probabilities sum to {total}")
    return out


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Gaussian with phase fix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_povm(seed: int, n_outcomes: int, dim: int = 2) -> Povm:
    """Random POVM from a Haar-random dilation unitary.

    The system is embedded in a dim * n_outcomes space; effect i is the
    pullback of the projector onto ancilla outcome i.
    """
    if not 2 <= n_outcomes <= 6:
        raise InvalidMeasurement("n_outcomes must be in 2..6")
    rng = np.random.default_rng(seed)
    u = random_unitary(dim * n_outcomes, rng)
    v = u[:, :dim]  # isometry C^dim -> C^(dim * n_outcomes)
    effects = []
    for i in range(n_outcomes):
        block = v[i * dim : (i + 1) * dim, :]
        effects.append(block.conj().T @ block)
    return Povm(effects)
