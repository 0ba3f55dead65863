import numpy as np
import pytest

from qdconsensus.errors import InvalidMeasurement, InvalidPartition
from qdconsensus.measurement import (
    Povm,
    conditional_states,
    random_povm,
    random_unitary,
    tilted_basis,
)
from qdconsensus.qstate import PureState, system_register


def test_tilted_basis_orthonormal():
    for mu in (0.0, 0.3, np.pi / 4):
        basis = tilted_basis(mu)
        v0, v1 = (np.asarray(v) for v in basis.vectors)
        assert np.vdot(v0, v0) == pytest.approx(1.0)
        assert np.vdot(v1, v1) == pytest.approx(1.0)
        assert abs(np.vdot(v0, v1)) < 1e-12
        assert np.allclose(sum(basis.effects()), np.eye(2), atol=1e-12)


def test_tilted_basis_endpoints():
    e0 = tilted_basis(0.0).effects()[0]
    assert np.allclose(e0, np.diag([1.0, 0.0]), atol=1e-12)
    plus = np.asarray(tilted_basis(np.pi / 4).vectors[0])
    assert np.allclose(plus, np.array([1.0, 1.0]) / np.sqrt(2.0))


def test_povm_validation():
    with pytest.raises(InvalidMeasurement):
        Povm([np.diag([0.5, 0.5]), np.diag([0.4, 0.5])])  # incomplete
    with pytest.raises(InvalidMeasurement):
        Povm([np.diag([1.5, 0.5]), np.diag([-0.5, 0.5])])  # not PSD


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(3)
    u = random_unitary(6, rng)
    assert np.allclose(u.conj().T @ u, np.eye(6), atol=1e-12)


def test_random_povm_complete_and_deterministic():
    povm = random_povm(42, 4)
    assert np.allclose(sum(povm.effects()), np.eye(2), atol=1e-10)
    again = random_povm(42, 4)
    for a, b in zip(povm.effects(), again.effects()):
        assert np.allclose(a, b)
    with pytest.raises(InvalidMeasurement):
        random_povm(0, 7)


def ghz_state(n_env):
    amp = np.zeros(2 ** (n_env + 1), dtype=complex)
    amp[0] = amp[-1] = 1.0 / np.sqrt(2.0)
    return PureState(system_register(n_env), amp)


def test_conditional_states_pointer_basis():
    # measuring the GHZ system in the pointer basis leaves pure records
    state = ghz_state(2)
    cond = conditional_states(state, {1, 2}, tilted_basis(0.0))
    assert len(cond) == 2
    for p, rho in cond:
        assert p == pytest.approx(0.5)
        vals = np.linalg.eigvalsh(rho.matrix)
        assert vals.max() == pytest.approx(1.0, abs=1e-12)


def test_conditional_states_probabilities_sum():
    state = ghz_state(3)
    cond = conditional_states(state, {1}, random_povm(7, 3))
    assert sum(p for p, _ in cond) == pytest.approx(1.0, abs=1e-10)


def test_conditional_states_rejects_overlap():
    with pytest.raises(InvalidPartition):
        conditional_states(ghz_state(2), {0, 1}, tilted_basis(0.0))


def test_conditional_states_rejects_dim_mismatch():
    with pytest.raises(InvalidMeasurement):
        conditional_states(ghz_state(2), {1}, random_povm(0, 2, dim=4))
