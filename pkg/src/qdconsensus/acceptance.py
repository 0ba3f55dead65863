"""End-to-end acceptance criteria, runnable via `qdc verify` or pytest.

Each criterion returns (ok, detail). The fast suite covers everything
that completes in a couple of minutes; the full suite adds the heavy
stress and ensemble runs.
"""
from __future__ import annotations

import time

import numpy as np

from . import cmaybe, infotheory, spinmodel
from .cmaybe import CMaybeParams, FragmentPair
from .measurement import random_povm, tilted_basis
from .qstate import partial_trace


def _frag(start: int, m: int) -> set[int]:
    return set(range(start, start + m))


def check_cmaybe_closed_form() -> tuple[bool, str]:
    """mi_sf_exact vs dense mutual information, <= 1e-8 over the grid."""
    worst = 0.0
    for n in (4, 6, 8, 10):
        for p in (0.1, 0.3, 0.5):
            for s in (0.0, 0.3, 0.5, 0.8, 1.0):
                params = CMaybeParams(n, p, s)
                state = cmaybe.build_cmaybe_state(params)
                for m in range(n + 1):
                    exact = cmaybe.mi_sf_exact(params, m)
                    if m == 0:
                        dense = 0.0
                    else:
                        dense = infotheory.mutual_information(state, {0}, _frag(1, m))
                    worst = max(worst, abs(exact - dense))
    return worst <= 1e-8, f"max |closed form - dense| = {worst:.3e}"


def check_gram_oracle(n_points: int = 50, seed: int = 20240917) -> tuple[bool, str]:
    """gram_reduce vs the dense engine on a random grid, <= 1e-8."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        n = int(rng.integers(4, 13))
        m = int(rng.integers(1, n - 1))
        m_prime = int(rng.integers(1, n - m))
        p = float(rng.uniform(0.1, 0.9))
        s = float(rng.uniform(0.0, 0.95))
        mu = float(rng.uniform(0.0, np.pi / 4))
        params = CMaybeParams(n, p, s)
        gram = cmaybe.gram_reduce(params, m, m_prime)
        state = cmaybe.build_cmaybe_state(params)
        frag_a, frag_b = _frag(1, m), _frag(1 + m, m_prime)
        meas = tilted_basis(mu)
        pairs = [
            (gram.mi_sf(), infotheory.mutual_information(state, {0}, frag_a)),
            (gram.mi_ff(), infotheory.mutual_information(state, frag_a, frag_b)),
            (gram.holevo(meas), infotheory.holevo(state, frag_a, meas)),
            (gram.refined_mi(meas), infotheory.refined_mi(state, frag_a, frag_b, meas)),
        ]
        worst = max(worst, max(abs(g - d) for g, d in pairs))
    return worst <= 1e-8, f"max |gram - dense| = {worst:.3e} over {n_points} points"


def check_plateau_reproduction() -> tuple[bool, str]:
    """N=20, p=0.5 plateau: c >= 0.99 from m=2 at s=0.3; threshold ~11 at s=0.8.

    The s=0.8 threshold is read off the closed-form plateau deficit
    delta(m) = s^(2m) / (2 ln 2 H_S). The exact finite-N curve crosses
    0.99 slightly earlier because I(S:F) picks up entanglement as m
    approaches N/2, which the near-plateau expansion ignores.
    """
    n, p = 20, 0.5
    probs = []

    def c_exact(s, m):
        params = CMaybeParams(n, p, s)
        return cmaybe.mi_sf_exact(params, m) / cmaybe._h_lambda(n, p, s)

    def c_plateau(s, m):
        delta, _, _ = cmaybe.deficits(CMaybeParams(n, p, s), FragmentPair(m, 0))
        return 1.0 - delta

    ok3 = all(
        c_exact(0.3, m) >= 0.99 - 1e-6 and c_plateau(0.3, m) >= 0.99 - 1e-6
        for m in range(2, n + 1)
    )
    probs.append(f"s=0.3 plateau from m=2: {ok3}")
    first = next(m for m in range(1, n + 1) if c_plateau(0.8, m) >= 0.99 - 1e-6)
    first_exact = next(m for m in range(1, n + 1) if c_exact(0.8, m) >= 0.99 - 1e-6)
    ok8 = first in (10, 11, 12)
    probs.append(f"s=0.8 closed-form threshold m={first} (exact crossing m={first_exact})")
    # closed form vs gram reduction, same quantity two ways
    worst = 0.0
    for s in (0.3, 0.8):
        params = CMaybeParams(n, p, s)
        for m in range(1, n):
            worst = max(
                worst,
                abs(cmaybe.mi_sf_exact(params, m) - cmaybe.gram_reduce(params, m).mi_sf()),
            )
    probs.append(f"closed form vs gram: {worst:.3e}")
    return ok3 and ok8 and worst <= 1e-6, "; ".join(probs)


def check_holevo_null() -> tuple[bool, str]:
    """Complementary-basis projections reveal no Holevo information at N=100."""
    n = 100
    meas = tilted_basis(np.pi / 4)
    worst_chi = 0.0
    worst_c = 0.0
    for p in (0.3, 0.5):
        for s in (0.3, 0.8):
            params = CMaybeParams(n, p, s)
            for m in range(1, 21):
                worst_chi = max(worst_chi, abs(cmaybe.gram_reduce(params, m).holevo(meas)))
            gram = cmaybe.gram_reduce(params, 10, 10)
            worst_c = max(worst_c, abs(gram.consensus_big_c(meas)))
    ok = worst_chi <= 1e-6 and worst_c <= 1e-6
    return ok, f"max chi = {worst_chi:.3e}, max |C| = {worst_c:.3e}"


def check_theorem1_suite(n_states: int = 500, seed: int = 11) -> tuple[bool, str]:
    """Identity and bound on random completely decohered branching states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_states):
        d_s = int(rng.choice([2, 3, 4]))
        bs = infotheory.random_branching_state(rng, d_s, orthogonal=("remainder",))
        rep = infotheory.theorem1_check(bs)
        worst = max(worst, rep.identity_residual)
        if not rep.bound_ok:
            return False, f"instance {i}: residual {rep.identity_residual:.3e}, bound violated"
    return worst <= 1e-9, f"{n_states} instances, max residual {worst:.3e}"


def check_lemma1_suite(n_states: int = 200, seed: int = 12) -> tuple[bool, str]:
    """Finite-remainder decomposition plus the c-maybe eps formulas at N=10."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for i in range(n_states):
        d_s = int(rng.choice([2, 3, 4]))
        bs = infotheory.random_branching_state(rng, d_s, orthogonal=())
        rep = infotheory.lemma1_check(bs)
        worst = max(worst, rep.identity_residual)
        if not rep.bound_ok:
            return False, f"instance {i}: residual {rep.identity_residual:.3e}, bound violated"

    # eps formulas against exactly measured entropy deviations
    n = 10
    worst_eps = 0.0
    for p in (0.3, 0.5):
        for s in (0.3, 0.5):
            params = CMaybeParams(n, p, s)
            for m, m_prime in ((1, 1), (2, 1), (2, 2), (3, 2)):
                gram = cmaybe.gram_reduce(params, m, m_prime)
                h_s = gram.h_s()
                measured = (
                    1.0 - gram.entropy({"S", "F"}) / h_s,
                    1.0 - gram.entropy({"S", "F2"}) / h_s,
                    1.0 - gram.entropy({"S", "F", "F2"}) / h_s,
                )
                formula = cmaybe.finite_size_epsilons(params, FragmentPair(m, m_prime))
                worst_eps = max(
                    worst_eps, max(abs(a - b) for a, b in zip(measured, formula))
                )
    ok = worst <= 1e-9 and worst_eps <= 1e-6
    return ok, f"max residual {worst:.3e}, max |eps - formula| {worst_eps:.3e}"


def check_theorem2_stress(n_states: int = 200, n_povms: int = 5, seed: int = 13) -> tuple[bool, str]:
    """Refined MI >= -1e-9 for branching states with orthogonal F and remainder."""
    rng = np.random.default_rng(seed)
    worst = np.inf
    count = 0
    for i in range(n_states):
        d_s = int(rng.choice([2, 3, 4]))
        bs = infotheory.random_branching_state(
            rng, d_s, orthogonal=("frag_a", "remainder")
        )
        state, parts = infotheory.realize_dense(bs)
        dim = 2 ** len(parts["system"])
        for j in range(n_povms):
            n_out = int(rng.integers(2, 7))
            povm = random_povm(int(rng.integers(0, 2**32)), n_out, dim=dim)
            val = infotheory.refined_mi(state, parts["frag_a"], parts["frag_b"], povm)
            worst = min(worst, val)
            count += 1
            if val < -1e-9:
                return False, f"instance {i}/povm {j}: refined MI {val:.3e}"
    return True, f"{count} cases, min refined MI {worst:.3e}"


def check_spin_structural(seed: int = 14) -> tuple[bool, str]:
    """Dense-verifiable spin identities at N=10."""
    n = 10
    rng = np.random.default_rng(seed)
    notes = []

    # factorized vs brute force
    worst = 0.0
    for _ in range(20):
        params = spinmodel.SpinModelParams(n, 1.0, 0.05, int(rng.integers(0, 2**32)))
        real = spinmodel.sample_couplings(params)
        t = float(rng.uniform(0.1, 30.0))
        k = int(rng.integers(1, 6))
        keep = {0} | set(rng.choice(np.arange(1, n + 1), size=k - 1, replace=False)) if k > 1 else {0}
        fact = spinmodel.reduced_dm_factorized(real, t, keep)
        dense = partial_trace(spinmodel.evolve(real, t), keep)
        worst = max(worst, float(np.max(np.abs(fact.matrix - dense.matrix))))
    ok_fact = worst <= 1e-10
    notes.append(f"factorized vs dense {worst:.3e}")

    # complement identity
    params = spinmodel.SpinModelParams(n, 1.0, 0.02, 7)
    real = spinmodel.sample_couplings(params)
    worst_c = 0.0
    for t in rng.uniform(0.1, 50.0, size=20):
        h_s = spinmodel.system_entropy(real, float(t))
        frag = set(range(1, 5))
        comp = set(range(5, n + 1))
        lhs = spinmodel.mutual_info_sf(real, float(t), frag) + spinmodel.mutual_info_sf(
            real, float(t), comp
        )
        worst_c = max(worst_c, abs(lhs - 2.0 * h_s))
    ok_comp = worst_c <= 1e-8
    notes.append(f"complement identity {worst_c:.3e}")

    # t = 0: product state, all MIs zero
    mi0 = spinmodel.mutual_info_sf(real, 0.0, {1, 2, 3})
    ff0 = spinmodel.mutual_info_ff(real, 0.0, {1, 2}, {3, 4})
    ok_zero = abs(mi0) <= 1e-10 and abs(ff0) <= 1e-10
    notes.append(f"t=0 MIs ({mi0:.1e}, {ff0:.1e})")

    # Delta_g = 0: exactly branching at all times. Cross-check the
    # factorized MIs against the two-branch Gram prediction, then verify
    # the Theorem 1 identity at times where the remainder has actually
    # decohered the branches (the theorem's precondition).
    params0 = spinmodel.SpinModelParams(n, 1.0, 0.0, 21)
    real0 = spinmodel.sample_couplings(params0)
    frag_a, frag_b = {1, 2}, {3, 4}
    rest = set(range(1, n + 1)) - frag_a - frag_b
    worst_g = 0.0
    for t in np.linspace(0.3, 20.0, 15):
        bs = spinmodel.spin_branching_state(real0, float(t), frag_a, frag_b)
        worst_g = max(
            worst_g,
            abs(
                spinmodel.mutual_info_sf(real0, float(t), frag_a)
                - infotheory.branching_mi(bs, {"system"}, {"frag_a"})
            ),
            abs(
                spinmodel.mutual_info_ff(real0, float(t), frag_a, frag_b)
                - infotheory.branching_mi(bs, {"frag_a"}, {"frag_b"})
            ),
        )
    ok_branch = worst_g <= 1e-8
    notes.append(f"branching Gram vs factorized {worst_g:.3e}")

    worst_t1 = 0.0
    checked = 0
    for t in np.linspace(0.3, 30.0, 400):
        if abs(spinmodel.record_overlap(real0, float(t), rest)) > 2e-4:
            continue
        rep = spinmodel.branching_deficit_report(real0, float(t), frag_a, frag_b)
        if min(rep["delta"], rep["delta_prime"]) < 0.2:
            worst_t1 = max(worst_t1, rep["identity_residual"])
            checked += 1
    ok_t1 = checked >= 3 and worst_t1 <= 1e-6
    notes.append(f"theorem1 residual {worst_t1:.3e} over {checked} decohered times")

    return ok_fact and ok_comp and ok_zero and ok_branch and ok_t1, "; ".join(notes)


def check_rise_and_fall() -> tuple[bool, str]:
    """Qualitative consensus dynamics at N=16, ensemble of 10."""
    n, m = 16, 4
    times = tuple(np.geomspace(0.05, 500.0, 24))
    spec = spinmodel.TimeSeriesSpec(
        times=times,
        fragments=((tuple(range(1, 1 + m)), tuple(range(1 + m, 1 + 2 * m))),),
        mus=(0.0, np.pi / 4),
        delta_target=0.1,
    )
    params = spinmodel.SpinModelParams(n, 1.0, 0.01, 2024)
    avg, _ = spinmodel.ensemble_average(params, 10, spec)

    c0 = np.array([r["big_c"] for r in avg if r["mu"] == 0.0])
    c4 = np.array([r["big_c"] for r in avg if r["mu"] != 0.0])
    r_delta = np.array([r["r_delta"] for r in avg if r["mu"] == 0.0])
    peak_idx = int(np.argmax(c0))

    ok_a = c0.max() > 0.8
    ok_b = c0[-1] < 0.5 * c0.max()
    r_peak_idx = int(np.argmax(r_delta))
    ok_c = r_delta.max() >= 3.0 and 0 < r_peak_idx < len(times) - 1
    ok_d = c0[peak_idx] >= c4[peak_idx]
    detail = (
        f"peak C = {c0.max():.3f} at t = {times[peak_idx]:.2f}, "
        f"final/peak = {c0[-1] / c0.max():.3f}, "
        f"peak R = {r_delta.max():.2f} at t = {times[r_peak_idx]:.2f}, "
        f"C(0) vs C(pi/4) at peak: {c0[peak_idx]:.3f} vs {c4[peak_idx]:.3f}"
    )
    return ok_a and ok_b and ok_c and ok_d, detail


def check_determinism() -> tuple[bool, str]:
    """Repeated runs with the same config emit byte-identical data sections."""
    import tempfile
    from pathlib import Path

    from .cli import ExperimentConfig, run, write_table

    cfg = ExperimentConfig(
        kind="cmaybe-scan",
        params={"n": 8, "p": [0.4], "s": [0.3, 0.8], "m": list(range(9))},
        seed=0,
    )
    with tempfile.TemporaryDirectory() as tmp:
        sections = []
        for tag in ("a", "b"):
            table = run(cfg)
            path = Path(tmp) / f"{tag}.csv"
            write_table(table, path)
            lines = path.read_text().splitlines()
            sections.append("\n".join(l for l in lines if not l.startswith("#")))
        ok = sections[0] == sections[1]
    return ok, f"data sections identical: {ok}"


CRITERIA = [
    ("1 c-maybe closed-form oracle", check_cmaybe_closed_form, "fast"),
    ("2 Gram-reduction oracle", check_gram_oracle, "fast"),
    ("3 Fig 2a plateau reproduction", check_plateau_reproduction, "fast"),
    ("4 Fig 3 Holevo null", check_holevo_null, "fast"),
    ("5 Theorem 1 suite", check_theorem1_suite, "fast"),
    ("6 Lemma 1 suite", check_lemma1_suite, "fast"),
    ("7 Theorem 2 stress", check_theorem2_stress, "fast"),
    ("8 Spin structural identities", check_spin_structural, "fast"),
    ("9 Rise and fall of consensus", check_rise_and_fall, "full"),
    ("10 Determinism", check_determinism, "fast"),
]


def verify(suite: str = "fast", printer=print) -> bool:
    """Run the acceptance criteria; returns True when all pass."""
    if suite not in ("fast", "full"):
        raise ValueError(f"unknown suite {suite!r}")
    all_ok = True
    for name, fn, tier in CRITERIA:
        if suite == "fast" and tier == "full":
            printer(f"SKIP {name} (full suite only)")
            continue
        start = time.perf_counter()
        ok, detail = fn()
        elapsed = time.perf_counter() - start
        all_ok &= ok
        printer(f"{'PASS' if ok else 'FAIL'} {name} [{elapsed:.1f}s] {detail}")
    return all_ok
