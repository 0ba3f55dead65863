import numpy as np
import pytest

from qdconsensus.errors import (
    DomainError,
    InvalidSubsystem,
    NotPositiveSemidefinite,
    RegisterTooLarge,
)
from qdconsensus.qstate import (
    DensityMatrix,
    PureState,
    QubitLabel,
    Role,
    binary_entropy,
    eigenvalues_hermitian,
    entropy_from_probs,
    partial_trace,
    system_register,
    von_neumann_entropy,
)


def bell_state():
    amp = np.zeros(4, dtype=complex)
    amp[0] = amp[3] = 1.0 / np.sqrt(2.0)
    return PureState(system_register(1), amp)


def test_system_register_layout():
    reg = system_register(3)
    assert [lab.index for lab in reg] == [0, 1, 2, 3]
    assert reg[0].role is Role.SYSTEM
    assert all(lab.role is Role.ENVIRONMENT for lab in reg[1:])


def test_pure_state_rejects_bad_norm():
    with pytest.raises(DomainError):
        PureState(system_register(1), np.array([1.0, 0.0, 0.0, 0.5]))


def test_pure_state_rejects_wrong_length():
    with pytest.raises(DomainError):
        PureState(system_register(1), np.array([1.0, 0.0]))


def test_register_cap():
    labels = [QubitLabel(i) for i in range(25)]
    with pytest.raises(RegisterTooLarge):
        PureState(labels, np.zeros(2**25))


def test_duplicate_labels_rejected():
    labels = [QubitLabel(0, Role.SYSTEM), QubitLabel(0)]
    with pytest.raises(InvalidSubsystem):
        PureState(labels, np.array([1.0, 0, 0, 0]))


def test_density_matrix_validation():
    labels = system_register(0)
    with pytest.raises(DomainError):
        DensityMatrix(labels, np.array([[0.5, 0.5j], [0.5j, 0.5]]))  # not Hermitian
    with pytest.raises(DomainError):
        DensityMatrix(labels, np.eye(2))  # trace 2


def test_partial_trace_bell():
    rho = partial_trace(bell_state(), {0})
    assert np.allclose(rho.matrix, 0.5 * np.eye(2))
    assert von_neumann_entropy(rho) == pytest.approx(1.0)


def test_partial_trace_product_state():
    # |0> (x) |+> : both marginals pure
    amp = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2.0)
    state = PureState(system_register(1), amp)
    assert von_neumann_entropy(partial_trace(state, {0})) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(partial_trace(state, {1})) == pytest.approx(0.0, abs=1e-12)


def test_partial_trace_keeps_label_order():
    amp = np.zeros(8)
    amp[0] = 1.0
    state = PureState(system_register(2), amp)
    rho = partial_trace(state, {2, 0})
    assert [lab.index for lab in rho.labels] == [0, 2]


def test_partial_trace_unknown_label():
    with pytest.raises(InvalidSubsystem):
        partial_trace(bell_state(), {5})


def test_partial_trace_of_density_matrix_matches_pure_path():
    rng = np.random.default_rng(5)
    amp = rng.normal(size=8) + 1j * rng.normal(size=8)
    amp /= np.linalg.norm(amp)
    state = PureState(system_register(2), amp)
    a = partial_trace(state, {0, 2})
    b = partial_trace(state.density_matrix(), {0, 2})
    assert np.allclose(a.matrix, b.matrix, atol=1e-12)


def test_eigenvalue_clamp_and_error():
    labels = system_register(0)
    mat = np.diag([1.0 + 5e-10, -5e-10])
    vals = eigenvalues_hermitian(DensityMatrix(labels, mat))
    assert vals.min() == 0.0
    bad = np.diag([1.0 + 1e-6, -1e-6])
    with pytest.raises(NotPositiveSemidefinite):
        eigenvalues_hermitian(DensityMatrix(labels, bad))


def test_entropy_conventions():
    assert entropy_from_probs([0.5, 0.5]) == pytest.approx(1.0)
    assert entropy_from_probs([1.0, 0.0]) == 0.0
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.5) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        binary_entropy(1.5)
