#!/usr/bin/env python3
"""Mean competitive ratio of Ranking on upper-triangular instances as n grows."""
import argparse

from onlinerank.experiments import ONE_MINUS_INV_E, competitive_ratio_summary, monte_carlo
from onlinerank.generators import gen_upper_triangular


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[2, 5, 10, 20, 40, 80, 160])
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print(f"{'n':>5} {'mean':>8} {'lower99':>8} {'std':>8} {'min':>6}   (1-1/e = {ONE_MINUS_INV_E:.4f})")
    for n in args.sizes:
        d = monte_carlo(gen_upper_triangular(n), "ranking", args.trials, args.seed)
        s = competitive_ratio_summary(d, n)
        print(f"{n:>5} {s.mean:>8.4f} {s.lower_99:>8.4f} {s.std:>8.4f} {s.min:>6.3f}")


if __name__ == "__main__":
    main()
