"""The exactly solvable c-maybe model.

A system qubit couples to N non-interacting environment qubits through
imperfect c-not gates, leaving a record overlap s per environment qubit.
Every reduced state of the resulting two-branch state has rank <= 2, so
all measures reduce to 2x2 eigenproblems ("Gram reduction") whose cost
is independent of N.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidPartition, RegisterTooLarge
from .measurement import Measurement
from .qstate import MAX_QUBITS, PureState, binary_entropy, system_register

_LN2 = np.log(2.0)

# below this |q - p| the displayed deficit formulas are replaced by their
# p = q analytic limits to avoid catastrophic cancellation
P_DEGENERATE = 1e-6


@dataclass(frozen=True)
class CMaybeParams:
    n: int
    p: float
    s: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need at least one environment qubit")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p = {self.p} outside [0, 1]")
        if not 0.0 <= self.s <= 1.0:
            raise DomainError(f"s = {self.s} outside [0, 1]")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def c(self) -> float:
        return float(np.sqrt(1.0 - self.s**2))


@dataclass(frozen=True)
class FragmentPair:
    m: int
    m_prime: int

    def __post_init__(self):
        if self.m < 0 or self.m_prime < 0:
            raise DomainError("fragment sizes must be nonnegative")


def cmaybe_gate(s: float) -> np.ndarray:
    """The 4x4 c-maybe unitary (control = system). s=0 is a perfect c-not."""
    if not 0.0 <= s <= 1.0:
        raise DomainError(f"s = {s} outside [0, 1]")
    c = np.sqrt(1.0 - s**2)
    return np.array(
        [
            [1, 0, 0, 0],
            [0, 1, 0, 0],
            [0, 0, s, c],
            [0, 0, c, -s],
        ],
        dtype=complex,
    )


def build_cmaybe_state(params: CMaybeParams) -> PureState:
    """Dense branching state sqrt(p)|0>|e0..e0> + sqrt(q)|1>|e1..e1>.

    Record states are |e0> = |0> and |e1> = s|0> + c|1>, so the
    per-qubit record overlap is s.
    """
    n = params.n
    if n + 1 > MAX_QUBITS:
        raise RegisterTooLarge(f"N = {n} exceeds the dense cap")
    e1 = np.array([params.s, params.c], dtype=complex)
    branch1 = np.array([1.0], dtype=complex)
    for _ in range(n):
        branch1 = np.kron(branch1, e1)
    amp = np.zeros(2 ** (n + 1), dtype=complex)
    amp[0] = np.sqrt(params.p)
    amp[2**n :] = np.sqrt(params.q) * branch1
    return PureState(system_register(n), amp)


def build_cmaybe_state_by_gates(params: CMaybeParams) -> PureState:
    """Same state built by applying the c-maybe gate to each (S, E_k) pair."""
    n = params.n
    if n + 1 > MAX_QUBITS:
        raise RegisterTooLarge(f"N = {n} exceeds the dense cap")
    amp = np.zeros(2 ** (n + 1), dtype=complex)
    amp[0] = np.sqrt(params.p)
    amp[2**n] = np.sqrt(params.q)
    gate = cmaybe_gate(params.s).reshape(2, 2, 2, 2)
    for k in range(1, n + 1):
        psi = amp.reshape([2] * (n + 1))
        psi = np.moveaxis(psi, (0, k), (0, 1))
        psi = np.einsum("abcd,cd...->ab...", gate, psi)
        amp = np.moveaxis(psi, (0, 1), (0, k)).ravel()
    return PureState(system_register(n), amp)


def lambda_pm(k: int, p: float, s: float) -> tuple[float, float]:
    """Eigenvalue pair of a rank-2 reduced state with record overlap s^k."""
    if k < 0:
        raise DomainError("k must be nonnegative")
    if not 0.0 <= p <= 1.0 or not 0.0 <= s <= 1.0:
        raise DomainError("p and s must lie in [0, 1]")
    q = 1.0 - p
    root = np.sqrt((q - p) ** 2 + 4.0 * s ** (2 * k) * p * q)
    return 0.5 * (1.0 + root), 0.5 * (1.0 - root)


def _h_lambda(k: int, p: float, s: float) -> float:
    return binary_entropy(lambda_pm(k, p, s)[0])


def mi_sf_exact(params: CMaybeParams, m: int) -> float:
    """Closed-form I(S:F) = h(l+_N) + h(l+_m) - h(l+_{N-m})."""
    if not 0 <= m <= params.n:
        raise DomainError(f"m = {m} outside 0..{params.n}")
    p, s, n = params.p, params.s, params.n
    return _h_lambda(n, p, s) + _h_lambda(m, p, s) - _h_lambda(n - m, p, s)


def mi_ff_exact(params: CMaybeParams, frag: FragmentPair) -> float:
    """I(F:F') = h(l+_m) + h(l+_m') - h(l+_{m+m'}).

    Exact at any N: the orthogonal pointer states of S decohere the
    cross terms in rho_FF' regardless of the remainder size.
    """
    m, mp = frag.m, frag.m_prime
    if m + mp > params.n:
        raise DomainError("fragments exceed the environment")
    p, s = params.p, params.s
    return _h_lambda(m, p, s) + _h_lambda(mp, p, s) - _h_lambda(m + mp, p, s)


def _deficit_coefficient(p: float) -> float:
    """pq |log2(q/p)| / |q - p|, with the analytic p = q limit 1/(2 ln 2)."""
    q = 1.0 - p
    if abs(q - p) < P_DEGENERATE:
        return 1.0 / (2.0 * _LN2)
    return p * q * abs(np.log2(q / p)) / abs(q - p)


def h_s_max(params: CMaybeParams) -> float:
    """Plateau-level system entropy h(p) (good-decoherence limit)."""
    return binary_entropy(params.p)


def plateau_expansions(params: CMaybeParams, frag: FragmentPair) -> tuple[float, float, float]:
    """Near-plateau approximations (I_SF, I_SF', I_FF')."""
    coeff = _deficit_coefficient(params.p)
    h_s = h_s_max(params)
    s2m = params.s ** (2 * frag.m)
    s2mp = params.s ** (2 * frag.m_prime)
    i_sf = h_s - coeff * s2m
    i_sfp = h_s - coeff * s2mp
    i_ff = h_s - coeff * (s2m + s2mp - s2m * s2mp)
    return i_sf, i_sfp, i_ff


def deficits(params: CMaybeParams, frag: FragmentPair) -> tuple[float, float, float]:
    """Near-plateau information deficits (delta, delta', delta~)."""
    h_s = h_s_max(params)
    coeff = _deficit_coefficient(params.p) / h_s
    s = params.s
    return (
        coeff * s ** (2 * frag.m),
        coeff * s ** (2 * frag.m_prime),
        coeff * s ** (2 * (frag.m + frag.m_prime)),
    )


def finite_size_epsilons(params: CMaybeParams, frag: FragmentPair) -> tuple[float, float, float]:
    """Finite-N entropy deviations (eps, eps', eps~) with H_SX = (1 - eps) H_S.

    All three are >= 0: tracing more of a finite environment brings the
    joint entropy below H_S by coeff * (s^{2(N-m)} - s^{2N}) / H_S.
    """
    h_s = _h_lambda(params.n, params.p, params.s)
    coeff = _deficit_coefficient(params.p) / h_s
    s, n = params.s, params.n
    m, mp = frag.m, frag.m_prime
    return (
        coeff * (s ** (2 * (n - m)) - s ** (2 * n)),
        coeff * (s ** (2 * (n - mp)) - s ** (2 * n)),
        coeff * (s ** (2 * (n - m - mp)) - s ** (2 * n)),
    )


class CMaybeGram:
    """Rank-2 (Gram) reduction of the c-maybe state for one S/F/F'/R split.

    All entropies, conditional states under any measurement on S, and
    the derived mutual-information measures are computed from 2x2
    eigenproblems, so N can be arbitrarily large.
    """

    PARTS = ("S", "F", "F2", "R")

    def __init__(self, params: CMaybeParams, m: int, m_prime: int = 0):
        if m < 0 or m_prime < 0 or m + m_prime > params.n:
            raise InvalidPartition(
                f"fragments ({m}, {m_prime}) do not fit in N = {params.n}"
            )
        self.params = params
        self.sizes = {"F": m, "F2": m_prime, "R": params.n - m - m_prime}
        self._rq = np.array([np.sqrt(params.p), np.sqrt(params.q)])

    def _env_size(self, parts: set[str]) -> int:
        return sum(self.sizes[name] for name in parts if name != "S")

    def _genv(self, k: int) -> np.ndarray:
        ov = self.params.s**k
        return np.array([[1.0, ov], [ov, 1.0]])

    def entropy(self, parts) -> float:
        """Entropy of the reduced state on the given parts (subset of S,F,F2,R)."""
        parts = set(parts)
        unknown = parts - set(self.PARTS)
        if unknown:
            raise InvalidPartition(f"unknown parts {sorted(unknown)}")
        k = self._env_size(parts)
        p, s = self.params.p, self.params.s
        if "S" in parts:
            return _h_lambda(self.params.n - k, p, s)
        return _h_lambda(k, p, s)

    def h_s(self) -> float:
        return self.entropy({"S"})

    def mi(self, part_a, part_b) -> float:
        a, b = set(part_a), set(part_b)
        if a & b:
            raise InvalidPartition("parts overlap")
        return self.entropy(a) + self.entropy(b) - self.entropy(a | b)

    def mi_sf(self) -> float:
        return self.mi({"S"}, {"F"})

    def mi_sf2(self) -> float:
        return self.mi({"S"}, {"F2"})

    def mi_ff(self) -> float:
        return self.mi({"F"}, {"F2"})

    def quantum_cmi(self) -> float:
        """I(F:F2|S) from entropies."""
        return (
            self.entropy({"S", "F"})
            + self.entropy({"S", "F2"})
            - self.entropy({"S"})
            - self.entropy({"S", "F", "F2"})
        )

    # -- measured quantities -------------------------------------------------

    def _conditional(self, kept: set[str], effect: np.ndarray):
        """(p_i, spectrum of the normalized conditional state on kept env parts)."""
        k = self._env_size(kept)
        g_kept = self._genv(k)
        g_traced = self._genv(self.params.n - k)
        c = np.outer(self._rq, self._rq) * np.conj(g_traced * effect)
        prob = float(np.sum(c * g_kept).real)
        root = _psd_sqrt_2x2(g_kept)
        vals = np.linalg.eigvalsh(root @ c @ root)
        return prob, np.clip(vals, 0.0, None)

    def _cond_entropy_avg(self, kept: set[str], meas: Measurement) -> float:
        """sum_i p_i H(rho_kept^(i)) over measurement outcomes on S."""
        total = 0.0
        psum = 0.0
        for effect in meas.effects():
            prob, vals = self._conditional(kept, np.asarray(effect))
            psum += prob
            if prob < 1e-14:
                continue
            vals = vals / prob
            vals = vals[vals > 0]
            total += prob * float(-np.sum(vals * np.log2(vals)))
        if abs(psum - 1.0) > 1e-10:
            raise InvalidPartition(f"outcome probabilities sum to {psum}")
        return total

    def holevo(self, meas: Measurement, part: str = "F") -> float:
        """chi(part : S_Lambda) = H_part - avg conditional entropy."""
        return self.entropy({part}) - self._cond_entropy_avg({part}, meas)

    def measured_cmi(self, meas: Measurement) -> float:
        """I(F:F2 | S_Lambda)."""
        return (
            self._cond_entropy_avg({"F"}, meas)
            + self._cond_entropy_avg({"F2"}, meas)
            - self._cond_entropy_avg({"F", "F2"}, meas)
        )

    def refined_mi(self, meas: Measurement) -> float:
        return self.mi_ff() - self.measured_cmi(meas)

    def consensus_big_c(self, meas: Measurement) -> float:
        return self.refined_mi(meas) / self.h_s()


def _psd_sqrt_2x2(g: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(g)
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def gram_reduce(params: CMaybeParams, m: int, m_prime: int = 0) -> CMaybeGram:
    """Low-rank handle for the S / F(m) / F'(m') / remainder split."""
    return CMaybeGram(params, m, m_prime)
