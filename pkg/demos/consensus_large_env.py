"""Consensus between two observers in a large environment (N = 100).

Two disjoint fragments F and F' of equal size m are read out of the same
c-maybe environment. The Gram reduction keeps every quantity a 2x2
eigenproblem, so N = 100 (or 10^6) costs the same as N = 10. The table
shows how I(F:F') climbs to H_S: once both fragments hold the system's
classical record, the observers agree.
"""
from qdconsensus.cmaybe import CMaybeParams, gram_reduce


def main():
    n, p = 100, 0.5
    for s in (0.3, 0.8):
        params = CMaybeParams(n, p, s)
        print(f"\nN = {n}, p = {p}, s = {s}")
        print(f"{'m':>3} {'I(S:F)':>10} {'I(F:F_)':>10} {'c(F:F_)':>10}")
        for m in (1, 2, 3, 4, 5, 6, 8, 10, 15, 20, 30, 50):
            if 2 * m > n:
                break
            gram = gram_reduce(params, m, m)
            h_s = gram.h_s()
            print(
                f"{m:>3} {gram.mi_sf():>10.6f} {gram.mi_ff():>10.6f} "
                f"{gram.mi_ff() / h_s:>10.6f}"
            )
        print("c(F:F') -> 1: independent observers converge on the same outcome.")


if __name__ == "__main__":
    main()
