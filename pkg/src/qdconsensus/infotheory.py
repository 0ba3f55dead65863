"""Mutual-information measures, consensus quantities, and theorem checkers.

Branching states are handled through the Gram matrices of their branch
records: every marginal of

    |Psi> = sum_n sqrt(q_n) |s_n>|A_n>|B_n>|R_n>

has its nonzero spectrum determined by D x D matrices, so checkers run
at cost polynomial in the number of branches regardless of how large the
underlying registers would be. Dense realization is kept for cross-checks.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateSystem,
    InvalidOverlaps,
    InvalidPartition,
    PreconditionViolated,
)
from .measurement import Measurement, conditional_states, tilted_basis
from .qstate import (
    DensityMatrix,
    PureState,
    QubitLabel,
    Role,
    entropy_from_probs,
    partial_trace,
    von_neumann_entropy,
)

H_S_FLOOR = 1e-12

SUBSYSTEMS = ("system", "frag_a", "frag_b", "remainder")


# ---------------------------------------------------------------------------
# entropic measures on dense states


def _reduced(joint: PureState | DensityMatrix, part: Iterable[int]) -> DensityMatrix:
    return partial_trace(joint, part)


def subsystem_entropy(state: PureState, part: Iterable[int]) -> float:
    """Entropy of a subsystem of a pure state, reduced over the smaller side.

    Uses H_A = H_{A^c} for pure global states to keep the eigenproblem
    at dimension 2^min(|A|, n - |A|).
    """
    part = set(part)
    comp = {lab.index for lab in state.labels} - part
    side = part if len(part) <= len(comp) else comp
    if not side:
        return 0.0
    return von_neumann_entropy(partial_trace(state, side))


def _entropy(joint: PureState | DensityMatrix, part: set) -> float:
    if isinstance(joint, PureState):
        return subsystem_entropy(joint, part)
    return von_neumann_entropy(partial_trace(joint, part))


def _check_disjoint(*parts: Iterable[int]) -> list[set]:
    sets = [set(p) for p in parts]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise InvalidPartition(
                    f"parts overlap on labels {sorted(sets[i] & sets[j])}"
                )
    return sets


def mutual_information(
    joint: PureState | DensityMatrix,
    part_a: Iterable[int],
    part_b: Iterable[int],
) -> float:
    """I(A:B) = H_A + H_B - H_AB in bits."""
    a, b = _check_disjoint(part_a, part_b)
    return _entropy(joint, a) + _entropy(joint, b) - _entropy(joint, a | b)


def quantum_cmi(
    joint: PureState | DensityMatrix,
    part_a: Iterable[int],
    part_b: Iterable[int],
    part_c: Iterable[int],
) -> float:
    """Conditional mutual information I(A:B|C) = H_AC + H_BC - H_C - H_ABC."""
    a, b, c = _check_disjoint(part_a, part_b, part_c)
    return (
        _entropy(joint, a | c)
        + _entropy(joint, b | c)
        - _entropy(joint, c)
        - _entropy(joint, a | b | c)
    )


def holevo(state: PureState, fragment: Iterable[int], meas: Measurement) -> float:
    """Holevo quantity chi(F : S_Lambda) = H_F - sum_i p_i H(rho_F^(i))."""
    frag = set(fragment)
    h_f = von_neumann_entropy(partial_trace(state, frag))
    cond = conditional_states(state, frag, meas)
    return h_f - sum(p * von_neumann_entropy(rho) for p, rho in cond)


def measured_cmi(
    state: PureState,
    frag_a: Iterable[int],
    frag_b: Iterable[int],
    meas: Measurement,
) -> float:
    """I(A:B | S_Lambda) = sum_i p_i [H(rho_A^i) + H(rho_B^i) - H(rho_AB^i)]."""
    a, b = _check_disjoint(frag_a, frag_b)
    total = 0.0
    for p, rho_ab in conditional_states(state, a | b, meas):
        h_a = von_neumann_entropy(partial_trace(rho_ab, a))
        h_b = von_neumann_entropy(partial_trace(rho_ab, b))
        h_ab = von_neumann_entropy(rho_ab)
        total += p * (h_a + h_b - h_ab)
    return total


def refined_mi(
    state: PureState,
    frag_a: Iterable[int],
    frag_b: Iterable[int],
    meas: Measurement,
) -> float:
    """Refined mutual information I(A:B) - I(A:B | S_Lambda); may be negative."""
    a, b = _check_disjoint(frag_a, frag_b)
    return mutual_information(state, a, b) - measured_cmi(state, a, b, meas)


def system_entropy(state: PureState) -> float:
    """Entropy of the system block, in bits."""
    return von_neumann_entropy(partial_trace(state, state.system_indices()))


# ---------------------------------------------------------------------------
# normalized consensus measures


def _require_h_s(h_s: float) -> float:
    if h_s <= H_S_FLOOR:
        raise DegenerateSystem(f"H_S = {h_s} carries no classical information")
    return h_s


def consensus_c_fs(mi_sf: float, h_s: float) -> float:
    """c(F:S) = I(S:F) / H_S, in [0, 2]."""
    return mi_sf / _require_h_s(h_s)


def consensus_c_slf(chi: float, h_s: float) -> float:
    """c(S_Lambda : F) = chi / H_S, in [0, 1]."""
    return chi / _require_h_s(h_s)


def consensus_c_ff(mi_ff: float, h_s: float) -> float:
    """c(F:F') = I(F:F') / H_S."""
    return mi_ff / _require_h_s(h_s)


def information_deficit(mi: float, h_s: float) -> float:
    """delta = 1 - I / H_S."""
    return 1.0 - mi / _require_h_s(h_s)


def consensus_big_c(
    state: PureState,
    frag_a: Iterable[int],
    frag_b: Iterable[int],
    meas: Measurement,
) -> float:
    """C(F:F'|S_Lambda) = refined MI / H_S; can be negative."""
    h_s = _require_h_s(system_entropy(state))
    return refined_mi(state, frag_a, frag_b, meas) / h_s


def consensus_big_c_optimized(
    state: PureState,
    frag_a: Iterable[int],
    frag_b: Iterable[int],
    mus: Iterable[float] | None = None,
) -> float:
    """C(F:F'|S) maximized over a grid of tilted projective bases.

    Defaults to the pointer basis plus tilts mu = k*pi/48. A true optimum
    over all POVMs is not attempted.
    """
    if mus is None:
        mus = [k * np.pi / 48 for k in range(25)]
    return max(consensus_big_c(state, frag_a, frag_b, tilted_basis(mu)) for mu in mus)


# ---------------------------------------------------------------------------
# branching states via Gram matrices


def _validate_gram(g: np.ndarray, d: int) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.shape != (d, d):
        raise InvalidOverlaps(f"Gram shape {g.shape} != ({d}, {d})")
    if np.max(np.abs(g - g.conj().T)) > 1e-10:
        raise InvalidOverlaps("Gram matrix is not Hermitian")
    if np.max(np.abs(np.diag(g) - 1.0)) > 1e-10:
        raise InvalidOverlaps("Gram diagonal is not 1")
    if np.linalg.eigvalsh(g).min() < -1e-9:
        raise InvalidOverlaps("Gram matrix is not PSD")
    return g


@dataclass(frozen=True)
class BranchingState:
    """Branch probabilities plus per-subsystem record Gram matrices.

    Pointer states of the system are orthonormal by definition; the
    stored Grams describe the records in frag_a, frag_b and the
    remainder of the environment.
    """

    q: np.ndarray
    grams: Mapping[str, np.ndarray]

    @property
    def d_s(self) -> int:
        return len(self.q)

    def gram(self, name: str) -> np.ndarray:
        if name == "system":
            return np.eye(self.d_s)
        return np.asarray(self.grams[name])


def make_branching_state(q: Iterable[float], overlaps: Mapping[str, np.ndarray]) -> BranchingState:
    q = np.asarray(list(q), dtype=float)
    if q.min() < 0 or abs(q.sum() - 1.0) > 1e-12:
        raise InvalidOverlaps("branch probabilities must be nonnegative and sum to 1")
    d = len(q)
    grams = {name: _validate_gram(g, d) for name, g in overlaps.items()}
    for name in ("frag_a", "frag_b", "remainder"):
        grams.setdefault(name, np.eye(d, dtype=complex))
    return BranchingState(q, grams)


def _kept_traced_grams(bs: BranchingState, kept: Iterable[str]):
    kept = set(kept)
    unknown = kept - set(SUBSYSTEMS)
    if unknown:
        raise InvalidPartition(f"unknown subsystems {sorted(unknown)}")
    g_kept = np.ones((bs.d_s, bs.d_s), dtype=complex)
    g_traced = np.ones((bs.d_s, bs.d_s), dtype=complex)
    for name in SUBSYSTEMS:
        if name in kept:
            g_kept = g_kept * bs.gram(name)
        else:
            g_traced = g_traced * bs.gram(name)
    return g_kept, g_traced


def _psd_sqrt(g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def branching_marginal_spectrum(bs: BranchingState, kept: Iterable[str]) -> np.ndarray:
    """Nonzero spectrum of the reduced state on the kept subsystems.

    For rho_K = X C X^dag with Gram(X) = G_K and
    C_mn = sqrt(q_m q_n) conj(G_T)_mn, the nonzero spectrum equals that
    of sqrt(G_K) C sqrt(G_K).
    """
    g_kept, g_traced = _kept_traced_grams(bs, kept)
    rq = np.sqrt(bs.q)
    c = np.outer(rq, rq) * np.conj(g_traced)
    root = _psd_sqrt(g_kept)
    vals = np.linalg.eigvalsh(root @ c @ root)
    return np.clip(vals, 0.0, 1.0)


def branching_entropy(bs: BranchingState, kept: Iterable[str]) -> float:
    """Entropy (bits) of the reduced state on the kept subsystems."""
    return entropy_from_probs(branching_marginal_spectrum(bs, kept))


def branching_mi(bs: BranchingState, part_a: Iterable[str], part_b: Iterable[str]) -> float:
    a, b = set(part_a), set(part_b)
    if a & b:
        raise InvalidPartition("parts overlap")
    return (
        branching_entropy(bs, a)
        + branching_entropy(bs, b)
        - branching_entropy(bs, a | b)
    )


# ---------------------------------------------------------------------------
# dense realization


def _gram_vectors(g: np.ndarray, n_qubits: int) -> np.ndarray:
    """Columns are branch vectors reproducing the Gram matrix, padded to 2^n."""
    d = g.shape[0]
    w, v = np.linalg.eigh(g)
    w = np.clip(w, 0.0, None)
    x = (np.sqrt(w)[:, None] * v.conj().T)  # x^dag x = g
    dim = 2**n_qubits
    padded = np.zeros((dim, d), dtype=complex)
    padded[:d, :] = x
    return padded


def realize_dense(bs: BranchingState):
    """Embed a branching state into the minimal dense qubit register.

    Returns (PureState, parts) where parts maps each subsystem name to
    the tuple of qubit label indices it occupies.
    """
    d = bs.d_s
    n_sub = max(1, int(np.ceil(np.log2(d))))
    vecs = {"system": _gram_vectors(np.eye(d, dtype=complex), n_sub)}
    for name in ("frag_a", "frag_b", "remainder"):
        vecs[name] = _gram_vectors(bs.gram(name), n_sub)

    labels: list[QubitLabel] = []
    parts: dict[str, tuple[int, ...]] = {}
    idx = 0
    for name in SUBSYSTEMS:
        role = Role.SYSTEM if name == "system" else Role.ENVIRONMENT
        parts[name] = tuple(range(idx, idx + n_sub))
        labels += [QubitLabel(idx + j, role) for j in range(n_sub)]
        idx += n_sub

    amp = np.zeros(2 ** (4 * n_sub), dtype=complex)
    for n in range(d):
        branch = np.sqrt(bs.q[n]) * vecs["system"][:, n]
        for name in ("frag_a", "frag_b", "remainder"):
            branch = np.kron(branch, vecs[name][:, n])
        amp += branch
    amp = amp / np.linalg.norm(amp)
    return PureState(labels, amp), parts


# ---------------------------------------------------------------------------
# theorem and lemma checkers


@dataclass(frozen=True)
class DeficitReport:
    delta: float
    delta_prime: float
    delta_tilde: float
    delta_hat: float
    h_s: float
    mi_ff: float
    identity_residual: float
    bound_ok: bool


@dataclass(frozen=True)
class LemmaReport:
    delta: float
    delta_prime: float
    delta_tilde: float
    eps: float
    eps_prime: float
    eps_tilde: float
    h_s: float
    mi_ff: float
    identity_residual: float
    bound_ok: bool


def _deficit_quantities(bs: BranchingState):
    h_s = branching_entropy(bs, {"system"})
    if h_s <= H_S_FLOOR:
        raise DegenerateSystem("branching state has H_S ~ 0")
    mi_sa = branching_mi(bs, {"system"}, {"frag_a"})
    mi_sb = branching_mi(bs, {"system"}, {"frag_b"})
    mi_sab = branching_mi(bs, {"system"}, {"frag_a", "frag_b"})
    mi_ff = branching_mi(bs, {"frag_a"}, {"frag_b"})
    delta = 1.0 - mi_sa / h_s
    delta_p = 1.0 - mi_sb / h_s
    delta_t = 1.0 - mi_sab / h_s
    return h_s, mi_ff, delta, delta_p, delta_t


def theorem1_check(bs: BranchingState, tol: float = 1e-9) -> DeficitReport:
    """Consensus-deficit identity for completely decohered branching states.

    Requires the remainder records to be orthogonal; verifies
    I(F:F') = (1 - delta - delta' + delta~) H_S and
    delta~ <= min(delta, delta').
    """
    g_r = bs.gram("remainder")
    if np.max(np.abs(g_r - np.eye(bs.d_s))) > 1e-10:
        raise PreconditionViolated(
            "remainder records are not orthogonal; use lemma1_check"
        )
    h_s, mi_ff, delta, delta_p, delta_t = _deficit_quantities(bs)
    residual = abs(mi_ff - (1.0 - delta - delta_p + delta_t) * h_s)
    bound_ok = -tol <= delta_t <= min(delta, delta_p) + tol
    return DeficitReport(
        delta=delta,
        delta_prime=delta_p,
        delta_tilde=delta_t,
        delta_hat=delta + delta_p - delta_t,
        h_s=h_s,
        mi_ff=mi_ff,
        identity_residual=residual,
        bound_ok=bound_ok and residual <= tol,
    )


def lemma1_check(bs: BranchingState, tol: float = 1e-9) -> LemmaReport:
    """Finite-environment decomposition with entropy deviations eps.

    eps terms measure how far the joint entropies H_SX sit from H_S:
    H_SF = (1 - eps) H_S and analogues. Verifies
    I(F:F') = (1 - delta - delta' - eps - eps' + delta~ + eps~) H_S and
    delta~ + eps~ <= min(delta + eps, delta' + eps').
    """
    h_s, mi_ff, delta, delta_p, delta_t = _deficit_quantities(bs)
    eps = 1.0 - branching_entropy(bs, {"system", "frag_a"}) / h_s
    eps_p = 1.0 - branching_entropy(bs, {"system", "frag_b"}) / h_s
    eps_t = 1.0 - branching_entropy(bs, {"system", "frag_a", "frag_b"}) / h_s
    residual = abs(
        mi_ff - (1.0 - delta - delta_p - eps - eps_p + delta_t + eps_t) * h_s
    )
    bound_ok = delta_t + eps_t <= min(delta + eps, delta_p + eps_p) + tol
    return LemmaReport(
        delta=delta,
        delta_prime=delta_p,
        delta_tilde=delta_t,
        eps=eps,
        eps_prime=eps_p,
        eps_tilde=eps_t,
        h_s=h_s,
        mi_ff=mi_ff,
        identity_residual=residual,
        bound_ok=bound_ok and residual <= tol,
    )


# ---------------------------------------------------------------------------
# random instance generators for the stress suites


def random_gram(rng: np.random.Generator, d: int) -> np.ndarray:
    """Gram matrix of d random unit vectors in C^d."""
    v = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    v = v / np.linalg.norm(v, axis=0)
    g = v.conj().T @ v
    np.fill_diagonal(g, 1.0)
    return g


def random_branching_state(
    rng: np.random.Generator,
    d_s: int,
    orthogonal: Iterable[str] = ("remainder",),
) -> BranchingState:
    """Random branching state; subsystems in `orthogonal` get identity Grams."""
    q = rng.dirichlet(np.ones(d_s))
    # keep branch probabilities away from 0 so H_S is well conditioned
    q = (q + 0.05) / (1.0 + 0.05 * d_s)
    orthogonal = set(orthogonal)
    grams = {}
    for name in ("frag_a", "frag_b", "remainder"):
        grams[name] = (
            np.eye(d_s, dtype=complex) if name in orthogonal else random_gram(rng, d_s)
        )
    return make_branching_state(q, grams)
