"""Numerical stress tests of the consensus theorems on random branching states.

Three checks, all driven by Gram matrices of the branch records:

1. With orthogonal remainder records, I(F:F') = (1 - delta - delta' +
   delta~) H_S exactly, and delta~ <= min(delta, delta'): good records
   in both fragments force agreement.
2. With a finite (non-orthogonal) remainder, the same decomposition
   holds once the entropy deviations eps are included.
3. With orthogonal F records, the refined mutual information
   I(F:F') - I(F:F'|S_Lambda) stays nonnegative for arbitrary POVMs
   Lambda on the system.
"""
import numpy as np

from qdconsensus.infotheory import (
    lemma1_check,
    random_branching_state,
    realize_dense,
    refined_mi,
    theorem1_check,
)
from qdconsensus.measurement import random_povm


def main():
    rng = np.random.default_rng(7)

    worst = 0.0
    for _ in range(200):
        bs = random_branching_state(rng, int(rng.choice([2, 3, 4])), orthogonal=("remainder",))
        rep = theorem1_check(bs)
        assert rep.bound_ok
        worst = max(worst, rep.identity_residual)
    print(f"Theorem 1: 200 random states, max identity residual {worst:.2e}")

    worst = 0.0
    for _ in range(200):
        bs = random_branching_state(rng, int(rng.choice([2, 3, 4])), orthogonal=())
        rep = lemma1_check(bs)
        assert rep.bound_ok
        worst = max(worst, rep.identity_residual)
    print(f"Lemma 1:   200 random states, max identity residual {worst:.2e}")

    lowest = np.inf
    for i in range(50):
        bs = random_branching_state(rng, int(rng.choice([2, 3])), orthogonal=("frag_a", "remainder"))
        state, parts = realize_dense(bs)
        povm = random_povm(i, int(rng.integers(2, 7)), dim=2 ** len(parts["system"]))
        lowest = min(lowest, refined_mi(state, parts["frag_a"], parts["frag_b"], povm))
    print(f"Theorem 2: 50 random POVM cases, min refined MI {lowest:.2e} (>= 0)")


if __name__ == "__main__":
    main()
