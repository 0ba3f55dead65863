"""All-to-all sigma^z spin model: dynamics, PIPs, redundancy, consensus.

H = sigma_S^z * sum_i d_i sigma_i^z + sum_{j<k} g_jk sigma_j^z sigma_k^z

is diagonal in the z basis, so time evolution is a pure phase per basis
configuration and reduced density matrices factorize: the phase sum over
each traced qubit collapses to a cosine. That keeps fragment-sized
matrices cheap for environments far beyond the dense cap.

Qubit indexing follows the register convention: system = label 0,
environment = labels 1..N.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateSystem,
    DomainError,
    FragmentTooLarge,
    PreconditionViolated,
    RegisterTooLarge,
)
from .measurement import Measurement, tilted_basis
from .qstate import (
    DensityMatrix,
    PureState,
    partial_trace,
    system_register,
    von_neumann_entropy,
)

DENSE_CAP = 23  # qubits incl. system, dense statevector path
KEEP_CAP = 12  # qubits incl. system, factorized reduced-DM path


@dataclass(frozen=True)
class SpinModelParams:
    n: int
    delta_d: float = 1.0
    delta_g: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("need at least two environment qubits")
        if self.delta_d <= 0 or self.delta_g < 0:
            raise DomainError("delta_d must be > 0 and delta_g >= 0")


@dataclass(frozen=True)
class SpinRealization:
    d: np.ndarray  # (N,) system-environment couplings
    g: np.ndarray  # (N, N) symmetric, zero diagonal
    params: SpinModelParams


@dataclass(frozen=True)
class TimeSeriesSpec:
    times: tuple[float, ...]
    fragments: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    mus: tuple[float, ...] = (0.0,)
    delta_target: float = 0.1
    quantum_cmi: bool = False  # use entropic I(F:F'|S) instead of measured

    def __post_init__(self):
        for frag_a, frag_b in self.fragments:
            if set(frag_a) & set(frag_b):
                raise DomainError("fragment pair overlaps")


def subseed(master: int, i: int) -> int:
    """Deterministic 64-bit sub-seed: splitmix64 of (master + i * golden)."""
    x = (master + i * 0x9E3779B97F4A7C15) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & 0xFFFFFFFFFFFFFFFF
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & 0xFFFFFFFFFFFFFFFF
    return x ^ (x >> 31)


def sample_couplings(params: SpinModelParams) -> SpinRealization:
    """Draw d_i ~ N(0, delta_d^2) and g_{j<k} ~ N(0, delta_g^2)."""
    rng = np.random.default_rng(params.seed)
    n = params.n
    d = rng.normal(0.0, params.delta_d, size=n)
    g = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    g[iu] = rng.normal(0.0, params.delta_g, size=len(iu[0]))
    g = g + g.T
    return SpinRealization(d=d, g=g, params=params)


def _env_z_columns(n: int) -> list[np.ndarray]:
    """z_i = +/-1 per environment config (qubit 1 is the most significant bit)."""
    idx = np.arange(2**n, dtype=np.int64)
    cols = []
    for i in range(n):
        bits = (idx >> (n - 1 - i)) & 1
        cols.append((1 - 2 * bits).astype(np.int8))
    return cols


def evolve(real: SpinRealization, t: float) -> PureState:
    """Dense state at time t from the uniform product initial state."""
    n = real.params.n
    if n + 1 > DENSE_CAP:
        raise RegisterTooLarge(f"N = {n} exceeds the dense cap")
    z = _env_z_columns(n)
    a = np.zeros(2**n)
    for i in range(n):
        a += real.d[i] * z[i]
    b = np.zeros(2**n)
    for j in range(n):
        for k in range(j + 1, n):
            if real.g[j, k] != 0.0:
                b += real.g[j, k] * (z[j] * z[k])
    norm = 2.0 ** (-(n + 1) / 2.0)
    amp = np.empty(2 ** (n + 1), dtype=complex)
    amp[: 2**n] = norm * np.exp(-1j * t * (a + b))  # system |0>, z_S = +1
    amp[2**n :] = norm * np.exp(-1j * t * (-a + b))  # system |1>, z_S = -1
    return PureState(system_register(n), amp)


def reduced_dm_factorized(real: SpinRealization, t: float, keep: Iterable[int]) -> DensityMatrix:
    """Reduced density matrix on the kept labels without the global state.

    Matrix element between kept configs u, u' is
    2^{-|keep|} exp(-i t [E_A(u) - E_A(u')]) prod_b cos(t Delta_b(u, u'))
    with the product over traced qubits b.
    """
    n = real.params.n
    keep = sorted(set(keep))
    if any(i < 0 or i > n for i in keep):
        raise DomainError(f"labels {keep} outside register 0..{n}")
    k = len(keep)
    if k > KEEP_CAP:
        raise FragmentTooLarge(f"|keep| = {k} exceeds cap {KEEP_CAP}")

    with_system = 0 in keep
    kept_env = [i for i in keep if i != 0]  # label = env qubit index
    traced_env = [i for i in range(1, n + 1) if i not in kept_env]

    # kept-config spin values, axis order matches register order (S first)
    dim = 2**k
    idx = np.arange(dim, dtype=np.int64)
    u = np.empty((dim, k), dtype=np.int8)
    for pos in range(k):
        u[:, pos] = 1 - 2 * ((idx >> (k - 1 - pos)) & 1)
    cols = {lab: u[:, pos].astype(float) for pos, lab in enumerate(keep)}

    # energy terms internal to the kept block
    e_a = np.zeros(dim)
    for ai, a in enumerate(kept_env):
        if with_system:
            e_a += real.d[a - 1] * cols[0] * cols[a]
        for b in kept_env[ai + 1 :]:
            e_a += real.g[a - 1, b - 1] * cols[a] * cols[b]

    # linear form of each traced qubit against the kept configuration
    ell = []
    for b in traced_env:
        l = np.zeros(dim)
        if with_system:
            l += real.d[b - 1] * cols[0]
        for a in kept_env:
            l += real.g[a - 1, b - 1] * cols[a]
        ell.append(l)
    if not with_system:
        l = np.zeros(dim)
        for a in kept_env:
            l += real.d[a - 1] * cols[a]
        ell.append(l)  # the traced system qubit

    rho = np.exp(-1j * t * (e_a[:, None] - e_a[None, :]))
    for l in ell:
        rho *= np.cos(t * (l[:, None] - l[None, :]))
    rho /= dim

    labels = [lab for lab in system_register(n) if lab.index in keep]
    return DensityMatrix(labels, rho)


# ---------------------------------------------------------------------------
# information measures via the factorized path


def _entropy_keep(real: SpinRealization, t: float, keep: Iterable[int]) -> float:
    return von_neumann_entropy(reduced_dm_factorized(real, t, keep))


def system_entropy(real: SpinRealization, t: float) -> float:
    return _entropy_keep(real, t, {0})


def mutual_info_sf(real: SpinRealization, t: float, frag: Iterable[int]) -> float:
    """I(S:F) for an environment fragment, using the complement identity
    I(S:F) = 2 H_S - I(S:E\\F) when the fragment itself is over the cap."""
    frag = set(frag)
    n = real.params.n
    if len(frag) + 1 > KEEP_CAP:
        comp = set(range(1, n + 1)) - frag
        if len(comp) + 1 > KEEP_CAP:
            raise FragmentTooLarge("neither fragment nor complement fits the cap")
        return 2.0 * system_entropy(real, t) - mutual_info_sf(real, t, comp)
    h_s = system_entropy(real, t)
    h_f = _entropy_keep(real, t, frag)
    h_sf = _entropy_keep(real, t, frag | {0})
    return h_s + h_f - h_sf


def mutual_info_ff(
    real: SpinRealization, t: float, frag_a: Iterable[int], frag_b: Iterable[int]
) -> float:
    a, b = set(frag_a), set(frag_b)
    return (
        _entropy_keep(real, t, a)
        + _entropy_keep(real, t, b)
        - _entropy_keep(real, t, a | b)
    )


def _conditional_from_joint(rho_s_ab: DensityMatrix, meas: Measurement):
    """Outcome (p_i, rho_AB^(i)) from a joint S+fragments density matrix.

    The system is the first qubit of rho_s_ab.
    """
    n = rho_s_ab.n_qubits
    d_rest = 2 ** (n - 1)
    mat = rho_s_ab.matrix.reshape(2, d_rest, 2, d_rest)
    ab_labels = rho_s_ab.labels[1:]
    out = []
    for e in meas.effects():
        w, v = np.linalg.eigh(np.asarray(e))
        m = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
        post = np.einsum("ab,bxcy,cd->axdy", m, mat, m.conj().T)
        p = float(np.einsum("axax->", post).real)
        if p < 1e-14:
            continue
        rho_ab = np.einsum("axay->xy", post) / p
        rho_ab = 0.5 * (rho_ab + rho_ab.conj().T)
        out.append((p, DensityMatrix(ab_labels, rho_ab)))
    return out


def measured_cmi_ff(
    real: SpinRealization,
    t: float,
    frag_a: Iterable[int],
    frag_b: Iterable[int],
    meas: Measurement,
) -> float:
    """I(F:F'|S_Lambda) from the factorized joint on S + F + F'."""
    a, b = set(frag_a), set(frag_b)
    rho = reduced_dm_factorized(real, t, a | b | {0})
    total = 0.0
    for p, rho_ab in _conditional_from_joint(rho, meas):
        h_a = von_neumann_entropy(partial_trace(rho_ab, a))
        h_b = von_neumann_entropy(partial_trace(rho_ab, b))
        h_ab = von_neumann_entropy(rho_ab)
        total += p * (h_a + h_b - h_ab)
    return total


def quantum_cmi_ff(
    real: SpinRealization, t: float, frag_a: Iterable[int], frag_b: Iterable[int]
) -> float:
    a, b = set(frag_a), set(frag_b)
    return (
        _entropy_keep(real, t, a | {0})
        + _entropy_keep(real, t, b | {0})
        - system_entropy(real, t)
        - _entropy_keep(real, t, a | b | {0})
    )


# ---------------------------------------------------------------------------
# fragment samplers, PIPs, redundancy


def contiguous_fragments(n: int, m: int) -> list[tuple[int, ...]]:
    """All disjoint contiguous blocks of m environment qubits."""
    return [tuple(range(1 + j * m, 1 + (j + 1) * m)) for j in range(n // m)]


def random_fragments(
    n: int, m: int, k_samples: int, seed: int
) -> list[tuple[int, ...]]:
    rng = np.random.default_rng(seed)
    return [
        tuple(sorted(rng.choice(np.arange(1, n + 1), size=m, replace=False)))
        for _ in range(k_samples)
    ]


def pip(
    real: SpinRealization,
    t: float,
    sizes: Sequence[int],
    sampler: str = "contiguous",
    k_samples: int = 8,
    seed: int = 0,
) -> list[tuple[int, float, float]]:
    """Partial information plot: (m, mean I(S:F_m), std) over fragment draws."""
    n = real.params.n
    rows = []
    for m in sizes:
        if m == 0:
            rows.append((0, 0.0, 0.0))
            continue
        if m == n:
            rows.append((n, 2.0 * system_entropy(real, t), 0.0))
            continue
        if sampler == "contiguous":
            frags = contiguous_fragments(n, m)
        elif sampler == "random":
            frags = random_fragments(n, m, k_samples, seed)
        else:
            raise DomainError(f"unknown sampler {sampler!r}")
        vals = np.array([mutual_info_sf(real, t, f) for f in frags])
        rows.append((m, float(vals.mean()), float(vals.std())))
    return rows


def redundancy(
    real: SpinRealization,
    t: float,
    delta: float,
    sampler: str = "contiguous",
    k_samples: int = 8,
    seed: int = 0,
) -> float:
    """R_delta = N / m_delta, the number of fragments that each hold
    (1 - delta) H_S; 1 when no fragment up to N/2 qualifies."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta = {delta} outside (0, 1)")
    n = real.params.n
    h_s = system_entropy(real, t)
    if h_s < 1e-12:
        return 1.0
    target = (1.0 - delta) * h_s
    for m in range(1, n // 2 + 1):
        if m + 1 > KEEP_CAP:
            break
        mean_i = pip(real, t, [m], sampler, k_samples, seed)[0][1]
        if mean_i >= target:
            return n / m
    return 1.0


# ---------------------------------------------------------------------------
# consensus time series and ensembles


def consensus_timeseries(real: SpinRealization, spec: TimeSeriesSpec) -> list[dict]:
    """Rows of (t, fragment pair, mu) with all consensus measures."""
    rows = []
    for t in spec.times:
        h_s = system_entropy(real, t)
        r_delta = redundancy(real, t, spec.delta_target)
        for frag_a, frag_b in spec.fragments:
            i_sf = mutual_info_sf(real, t, frag_a)
            i_ff = mutual_info_ff(real, t, frag_a, frag_b)
            for mu in spec.mus:
                if spec.quantum_cmi:
                    i_cond = quantum_cmi_ff(real, t, frag_a, frag_b)
                else:
                    i_cond = measured_cmi_ff(real, t, frag_a, frag_b, tilted_basis(mu))
                refined = i_ff - i_cond
                big_c = refined / h_s if h_s > 1e-12 else 0.0
                rows.append(
                    {
                        "t": t,
                        "m": len(frag_a),
                        "m_prime": len(frag_b),
                        "mu": mu,
                        "h_s": h_s,
                        "i_sf": i_sf,
                        "i_ff": i_ff,
                        "i_cond": i_cond,
                        "refined_mi": refined,
                        "big_c": big_c,
                        "r_delta": r_delta,
                    }
                )
    return rows


def ensemble_average(
    params: SpinModelParams, n_real: int, spec: TimeSeriesSpec
) -> tuple[list[dict], list[list[dict]]]:
    """Pointwise ensemble average over deterministically sub-seeded runs.

    Returns (averaged rows, per-realization row tables). Realization i
    uses seed subseed(params.seed, i), so ensembles can be extended
    without recomputing earlier members.
    """
    if n_real < 1:
        raise DomainError("n_real must be >= 1")
    tables = []
    for i in range(n_real):
        p_i = SpinModelParams(params.n, params.delta_d, params.delta_g, subseed(params.seed, i))
        tables.append(consensus_timeseries(sample_couplings(p_i), spec))
    keys = ("h_s", "i_sf", "i_ff", "i_cond", "refined_mi", "big_c", "r_delta")
    avg = []
    for rows in zip(*tables):
        row = dict(rows[0])
        for key in keys:
            row[key] = float(np.mean([r[key] for r in rows]))
        avg.append(row)
    return avg, tables


# ---------------------------------------------------------------------------
# branching structure checks (Delta_g = 0 keeps the state exactly branching)


def record_overlap(real: SpinRealization, t: float, qubits: Iterable[int]) -> float:
    """Branch-record overlap prod_i cos(2 d_i t) over the given environment
    qubits; only meaningful when the intra-environment couplings vanish."""
    qubits = sorted(set(qubits))
    if any(i < 1 or i > real.params.n for i in qubits):
        raise DomainError(f"labels {qubits} outside environment 1..{real.params.n}")
    return float(np.prod([np.cos(2.0 * real.d[i - 1] * t) for i in qubits]))


def spin_branching_state(
    real: SpinRealization, t: float, frag_a: Iterable[int], frag_b: Iterable[int]
):
    """BranchingState (two branches, z_S = +/-1) for the Delta_g = 0 model.

    Each subsystem Gram is [[1, gamma], [gamma, 1]] with gamma the product
    of the per-qubit record overlaps cos(2 d_i t). Raises if any
    intra-environment coupling is nonzero, since the state is then not
    exactly branching.
    """
    from .infotheory import make_branching_state

    if np.max(np.abs(real.g)) > 0.0:
        raise PreconditionViolated(
            "intra-environment couplings present; state is not exactly branching"
        )
    a, b = set(frag_a), set(frag_b)
    if a & b:
        raise DomainError("fragment pair overlaps")
    rest = set(range(1, real.params.n + 1)) - a - b
    grams = {}
    for name, part in (("frag_a", a), ("frag_b", b), ("remainder", rest)):
        gamma = record_overlap(real, t, part)
        grams[name] = np.array([[1.0, gamma], [gamma, 1.0]], dtype=complex)
    return make_branching_state([0.5, 0.5], grams)


def branching_deficit_report(
    real: SpinRealization, t: float, frag_a: Iterable[int], frag_b: Iterable[int]
) -> dict:
    """Deficits and the Theorem-1 identity residual from measured MIs."""
    a, b = set(frag_a), set(frag_b)
    h_s = system_entropy(real, t)
    if h_s < 1e-12:
        raise DegenerateSystem("H_S ~ 0; deficits undefined")
    delta = 1.0 - mutual_info_sf(real, t, a) / h_s
    delta_p = 1.0 - mutual_info_sf(real, t, b) / h_s
    delta_t = 1.0 - mutual_info_sf(real, t, a | b) / h_s
    i_ff = mutual_info_ff(real, t, a, b)
    residual = abs(i_ff - (1.0 - delta - delta_p + delta_t) * h_s)
    return {
        "h_s": h_s,
        "delta": delta,
        "delta_prime": delta_p,
        "delta_tilde": delta_t,
        "i_ff": i_ff,
        "identity_residual": residual,
    }
