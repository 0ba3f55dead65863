import numpy as np
import pytest

from qdconsensus import infotheory
from qdconsensus.errors import (
    DomainError,
    FragmentTooLarge,
    PreconditionViolated,
    RegisterTooLarge,
)
from qdconsensus.qstate import partial_trace
from qdconsensus.spinmodel import (
    SpinModelParams,
    TimeSeriesSpec,
    branching_deficit_report,
    consensus_timeseries,
    contiguous_fragments,
    ensemble_average,
    evolve,
    mutual_info_ff,
    mutual_info_sf,
    pip,
    record_overlap,
    reduced_dm_factorized,
    redundancy,
    sample_couplings,
    spin_branching_state,
    subseed,
    system_entropy,
)


def make_real(n=8, delta_g=0.03, seed=1):
    return sample_couplings(SpinModelParams(n, 1.0, delta_g, seed))


def test_params_validation():
    with pytest.raises(DomainError):
        SpinModelParams(1)
    with pytest.raises(DomainError):
        SpinModelParams(8, delta_d=0.0)
    with pytest.raises(DomainError):
        SpinModelParams(8, delta_g=-1.0)


def test_sample_couplings_shapes_and_symmetry():
    real = make_real(6)
    assert real.d.shape == (6,)
    assert np.allclose(real.g, real.g.T)
    assert np.allclose(np.diag(real.g), 0.0)
    # deterministic per seed
    again = make_real(6)
    assert np.allclose(real.d, again.d) and np.allclose(real.g, again.g)


def test_evolve_norm_and_cap():
    real = make_real(6)
    state = evolve(real, 2.5)
    assert np.linalg.norm(state.amplitudes) == pytest.approx(1.0)
    big = sample_couplings(SpinModelParams(23, 1.0, 0.0, 0))
    with pytest.raises(RegisterTooLarge):
        evolve(big, 1.0)


def test_factorized_matches_dense():
    real = make_real(8)
    rng = np.random.default_rng(4)
    for _ in range(8):
        t = float(rng.uniform(0.1, 20.0))
        keep = set(rng.choice(np.arange(0, 9), size=3, replace=False))
        fact = reduced_dm_factorized(real, t, keep)
        dense = partial_trace(evolve(real, t), keep)
        assert np.max(np.abs(fact.matrix - dense.matrix)) < 1e-12


def test_factorized_cap_and_label_validation():
    real = make_real(16)
    with pytest.raises(FragmentTooLarge):
        reduced_dm_factorized(real, 1.0, set(range(13)))
    with pytest.raises(DomainError):
        reduced_dm_factorized(real, 1.0, {0, 99})


def test_complement_identity():
    # pure global state: I(S:F) + I(S:E\F) = 2 H_S
    real = make_real(10, delta_g=0.02, seed=9)
    for t in (0.7, 5.0, 31.0):
        h_s = system_entropy(real, t)
        frag = set(range(1, 4))
        comp = set(range(4, 11))
        total = mutual_info_sf(real, t, frag) + mutual_info_sf(real, t, comp)
        assert total == pytest.approx(2.0 * h_s, abs=1e-8)


def test_mutual_info_sf_over_cap_uses_complement():
    real = make_real(14, seed=2)
    frag = set(range(1, 13))  # too big directly, complement has 2 qubits
    val = mutual_info_sf(real, 3.0, frag)
    expected = 2.0 * system_entropy(real, 3.0) - mutual_info_sf(
        real, 3.0, set(range(13, 15))
    )
    assert val == pytest.approx(expected, abs=1e-10)


def test_t_zero_is_product():
    real = make_real(8)
    assert mutual_info_sf(real, 0.0, {1, 2}) == pytest.approx(0.0, abs=1e-10)
    assert mutual_info_ff(real, 0.0, {1}, {2, 3}) == pytest.approx(0.0, abs=1e-10)


def test_subseed_is_deterministic_and_spread():
    vals = [subseed(2024, i) for i in range(100)]
    assert vals == [subseed(2024, i) for i in range(100)]
    assert len(set(vals)) == 100


def test_contiguous_fragments():
    frags = contiguous_fragments(10, 3)
    assert frags == [(1, 2, 3), (4, 5, 6), (7, 8, 9)]


def test_pip_monotone_endpoints():
    real = make_real(8, seed=5)
    t = 4.0
    curve = pip(real, t, [0, 2, 8])
    assert curve[0] == (0, 0.0, 0.0)
    assert curve[-1][1] == pytest.approx(2.0 * system_entropy(real, t), abs=1e-10)


def test_redundancy_bounds():
    real = make_real(10, seed=3)
    with pytest.raises(DomainError):
        redundancy(real, 1.0, 0.0)
    r = redundancy(real, 5.0, 0.1)
    assert 1.0 <= r <= 10.0
    # t = 0: nothing recorded, fallback
    assert redundancy(real, 0.0, 0.1) == 1.0


def test_consensus_timeseries_rows():
    real = make_real(8, seed=6)
    spec = TimeSeriesSpec(
        times=(1.0, 10.0),
        fragments=(((1, 2), (3, 4)),),
        mus=(0.0, np.pi / 4),
    )
    rows = consensus_timeseries(real, spec)
    assert len(rows) == 4
    for r in rows:
        assert r["refined_mi"] == pytest.approx(r["i_ff"] - r["i_cond"], abs=1e-12)
        assert set(r) == {
            "t", "m", "m_prime", "mu", "h_s", "i_sf", "i_ff",
            "i_cond", "refined_mi", "big_c", "r_delta",
        }


def test_timeseries_spec_rejects_overlap():
    with pytest.raises(DomainError):
        TimeSeriesSpec(times=(1.0,), fragments=(((1, 2), (2, 3)),))


def test_ensemble_average_is_pointwise_mean():
    params = SpinModelParams(8, 1.0, 0.02, 77)
    spec = TimeSeriesSpec(times=(2.0,), fragments=(((1, 2), (3, 4)),))
    avg, tables = ensemble_average(params, 3, spec)
    assert len(tables) == 3
    manual = np.mean([t[0]["big_c"] for t in tables])
    assert avg[0]["big_c"] == pytest.approx(manual, abs=1e-12)


def test_spin_branching_state_matches_factorized():
    params = SpinModelParams(9, 1.0, 0.0, 13)
    real = sample_couplings(params)
    a, b = {1, 2}, {3, 4}
    for t in (0.8, 3.3, 12.0):
        bs = spin_branching_state(real, t, a, b)
        assert infotheory.branching_mi(bs, {"system"}, {"frag_a"}) == pytest.approx(
            mutual_info_sf(real, t, a), abs=1e-9
        )
        assert infotheory.branching_mi(bs, {"frag_a"}, {"frag_b"}) == pytest.approx(
            mutual_info_ff(real, t, a, b), abs=1e-9
        )


def test_spin_branching_state_requires_zero_g():
    real = make_real(8, delta_g=0.05)
    with pytest.raises(PreconditionViolated):
        spin_branching_state(real, 1.0, {1}, {2})


def test_record_overlap():
    params = SpinModelParams(6, 1.0, 0.0, 8)
    real = sample_couplings(params)
    t = 1.7
    expected = np.prod(np.cos(2.0 * real.d[:3] * t))
    assert record_overlap(real, t, {1, 2, 3}) == pytest.approx(float(expected))
    with pytest.raises(DomainError):
        record_overlap(real, t, {0})


def test_branching_deficit_report_identity_when_decohered():
    params = SpinModelParams(10, 1.0, 0.0, 21)
    real = sample_couplings(params)
    rest = set(range(5, 11))
    ts = [t for t in np.linspace(0.3, 30.0, 400)
          if abs(record_overlap(real, float(t), rest)) < 2e-4]
    assert len(ts) >= 3
    for t in ts[:5]:
        rep = branching_deficit_report(real, float(t), {1, 2}, {3, 4})
        if min(rep["delta"], rep["delta_prime"]) < 0.2:
            assert rep["identity_residual"] < 1e-6
