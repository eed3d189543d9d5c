#!/usr/bin/env python3
"""Measure how the classical collision baseline scales with field size.

Runs the birthday-style collision search on degree-1 instances over a range
of prime fields, prints the per-size medians, and fits the query-cost
exponent (expected near 1/2).
"""

import argparse
import sys

from hpp.baseline import DEFAULT_SIZES, scaling_experiment


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default=",".join(str(d) for d in DEFAULT_SIZES))
    parser.add_argument("--trials", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    ds = tuple(int(tok) for tok in args.sizes.split(","))
    stats, fit = scaling_experiment(ds=ds, trials=args.trials, seed=args.seed)

    print(f"{'d':>6} {'median':>8} {'mean':>8} {'success':>8}")
    for s in stats:
        print(f"{s.d:>6} {s.median_queries:>8.1f} {s.mean_queries:>8.2f} "
              f"{s.success_rate:>8.2f}")
    lo, hi = fit.ci95
    print(f"\nfitted exponent: {fit.exponent:.4f}  (95% CI [{lo:.4f}, {hi:.4f}])")
    return 0


if __name__ == "__main__":
    sys.exit(main())
