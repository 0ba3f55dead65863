"""What a fragment reveals about different system observables (N = 100).

For a measurement of the system tilted by mu away from the pointer
basis, the Holevo quantity chi(F : S_mu) tells how much of that
observable the fragment can resolve. At mu = 0 (the pointer basis) the
fragment knows everything the environment recorded; at mu = pi/4 (the
complementary basis) it knows exactly nothing. The refined consensus
C(F:F'|S_mu) behaves the same way: agreement is only about the pointer
observable.
"""
import numpy as np

from qdconsensus.cmaybe import CMaybeParams, gram_reduce
from qdconsensus.measurement import tilted_basis


def main():
    n, p, s, m = 100, 0.5, 0.3, 10
    params = CMaybeParams(n, p, s)
    gram = gram_reduce(params, m, m)
    h_s = gram.h_s()
    print(f"N = {n}, p = {p}, s = {s}, fragments of m = {m}")
    print(f"{'mu/pi':>8} {'chi/H_S':>10} {'C(F:F_|S_mu)':>14}")
    for k in range(0, 13):
        mu = k * np.pi / 48
        meas = tilted_basis(mu)
        chi = gram.holevo(meas)
        big_c = gram.consensus_big_c(meas)
        print(f"{mu / np.pi:>8.4f} {chi / h_s:>10.6f} {big_c:>14.6f}")
    print("\nBoth consensus measures die off as the measured observable")
    print("rotates from the pointer basis to its complement.")


if __name__ == "__main__":
    main()
