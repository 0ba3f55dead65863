import numpy as np
import pytest

from qdconsensus.errors import (
    DegenerateSystem,
    InvalidOverlaps,
    InvalidPartition,
    PreconditionViolated,
)
from qdconsensus.infotheory import (
    branching_entropy,
    branching_mi,
    consensus_big_c,
    holevo,
    lemma1_check,
    make_branching_state,
    measured_cmi,
    mutual_information,
    quantum_cmi,
    random_branching_state,
    realize_dense,
    refined_mi,
    subsystem_entropy,
    theorem1_check,
)
from qdconsensus.measurement import random_povm, tilted_basis
from qdconsensus.qstate import PureState, system_register, von_neumann_entropy, partial_trace


def ghz(n_env):
    amp = np.zeros(2 ** (n_env + 1), dtype=complex)
    amp[0] = amp[-1] = 1.0 / np.sqrt(2.0)
    return PureState(system_register(n_env), amp)


def random_pure(n_qubits, seed):
    rng = np.random.default_rng(seed)
    amp = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
    amp /= np.linalg.norm(amp)
    return PureState(system_register(n_qubits - 1), amp)


def test_mutual_information_ghz():
    state = ghz(3)
    assert mutual_information(state, {0}, {1}) == pytest.approx(1.0)
    assert mutual_information(state, {0}, {1, 2, 3}) == pytest.approx(2.0)


def test_mutual_information_rejects_overlap():
    with pytest.raises(InvalidPartition):
        mutual_information(ghz(2), {0, 1}, {1, 2})


def test_subsystem_entropy_uses_complement():
    state = random_pure(6, 11)
    for part in ({0}, {1, 2}, {0, 2, 4, 5}, {1, 2, 3, 4, 5}):
        direct = von_neumann_entropy(partial_trace(state, part))
        assert subsystem_entropy(state, part) == pytest.approx(direct, abs=1e-10)


def test_quantum_cmi_pure_tripartition():
    # for a pure state on A|B|C, I(A:B|C) = I(A:B|empty) computed via SSA >= 0
    state = random_pure(5, 3)
    val = quantum_cmi(state, {0}, {1, 2}, {3, 4})
    assert val >= -1e-10


def test_holevo_ghz_pointer_full():
    # pointer measurement on GHZ extracts the full bit from any fragment
    state = ghz(3)
    assert holevo(state, {1, 2}, tilted_basis(0.0)) == pytest.approx(1.0)
    # complementary basis extracts nothing
    assert holevo(state, {1, 2}, tilted_basis(np.pi / 4)) == pytest.approx(0.0, abs=1e-10)


def test_measured_and_refined_mi_ghz():
    state = ghz(4)
    a, b = {1, 2}, {3, 4}
    assert measured_cmi(state, a, b, tilted_basis(0.0)) == pytest.approx(0.0, abs=1e-10)
    assert refined_mi(state, a, b, tilted_basis(0.0)) == pytest.approx(1.0)
    assert consensus_big_c(state, a, b, tilted_basis(0.0)) == pytest.approx(1.0)


def test_consensus_requires_nondegenerate_system():
    amp = np.zeros(8)
    amp[0] = 1.0
    state = PureState(system_register(2), amp)
    with pytest.raises(DegenerateSystem):
        consensus_big_c(state, {1}, {2}, tilted_basis(0.0))


# ---------------------------------------------------------------------------
# branching states


def two_branch(gamma_a, gamma_b, gamma_r, q0=0.5):
    def gram(gamma):
        return np.array([[1.0, gamma], [gamma, 1.0]], dtype=complex)

    return make_branching_state(
        [q0, 1.0 - q0],
        {"frag_a": gram(gamma_a), "frag_b": gram(gamma_b), "remainder": gram(gamma_r)},
    )


def test_make_branching_state_validation():
    with pytest.raises(InvalidOverlaps):
        make_branching_state([0.6, 0.6], {})
    with pytest.raises(InvalidOverlaps):
        two_branch(1.5, 0.0, 0.0)  # Gram not PSD


def test_branching_entropy_perfect_records():
    bs = two_branch(0.0, 0.0, 0.0)
    assert branching_entropy(bs, {"system"}) == pytest.approx(1.0)
    assert branching_mi(bs, {"system"}, {"frag_a"}) == pytest.approx(1.0)
    assert branching_mi(bs, {"frag_a"}, {"frag_b"}) == pytest.approx(1.0)


def test_branching_marginals_match_dense_realization():
    rng = np.random.default_rng(17)
    for d_s in (2, 3, 4):
        bs = random_branching_state(rng, d_s, orthogonal=())
        state, parts = realize_dense(bs)
        pairs = [
            ({"system"}, parts["system"]),
            ({"frag_a"}, parts["frag_a"]),
            ({"system", "frag_b"}, parts["system"] + parts["frag_b"]),
        ]
        for names, qubits in pairs:
            direct = von_neumann_entropy(partial_trace(state, qubits))
            assert branching_entropy(bs, names) == pytest.approx(direct, abs=1e-10)


def test_theorem1_check_requires_orthogonal_remainder():
    with pytest.raises(PreconditionViolated):
        theorem1_check(two_branch(0.3, 0.2, 0.5))


def test_theorem1_identity_and_bound():
    rng = np.random.default_rng(23)
    for _ in range(20):
        bs = random_branching_state(rng, 3, orthogonal=("remainder",))
        rep = theorem1_check(bs)
        assert rep.identity_residual < 1e-9
        assert rep.delta_tilde <= min(rep.delta, rep.delta_prime) + 1e-9
        assert rep.bound_ok


def test_lemma1_identity_and_bound():
    rng = np.random.default_rng(29)
    for _ in range(20):
        bs = random_branching_state(rng, 2, orthogonal=())
        rep = lemma1_check(bs)
        assert rep.identity_residual < 1e-9
        assert rep.delta_tilde + rep.eps_tilde <= min(
            rep.delta + rep.eps, rep.delta_prime + rep.eps_prime
        ) + 1e-9
        assert rep.bound_ok


def test_refined_mi_nonnegative_orthogonal_records():
    # Theorem 2 setting: orthogonal frag_a records and remainder, any POVM
    rng = np.random.default_rng(31)
    for i in range(10):
        bs = random_branching_state(rng, 2, orthogonal=("frag_a", "remainder"))
        state, parts = realize_dense(bs)
        povm = random_povm(i, 3)
        val = refined_mi(state, parts["frag_a"], parts["frag_b"], povm)
        assert val >= -1e-9
