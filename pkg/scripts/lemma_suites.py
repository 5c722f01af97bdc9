#!/usr/bin/env python3
"""Run every exact structural-property suite and print a violation count per suite."""
import argparse
import sys
import time

from onlinerank.checks import EXACT_LEMMAS, LEMMA_ENGINE, run_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--eps", type=float, default=None,
                    help="fix eps for weighted suites (default: draw per case)")
    args = ap.parse_args()

    failed = 0
    for lemma in EXACT_LEMMAS:
        t0 = time.perf_counter()
        eps = args.eps if LEMMA_ENGINE[lemma] == "eps_ranking" else None
        bad = [seed for seed, rep in run_suite(lemma, args.cases, args.seed, eps) if not rep.holds]
        failed += len(bad)
        print(f"{lemma:>10} ({LEMMA_ENGINE[lemma]:>12}): {args.cases} cases, "
              f"{len(bad)} violations, {time.perf_counter() - t0:.1f}s")
        for seed in bad[:5]:
            print(f"    reproduce with suite_case({lemma!r}, {seed})")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
