"""Log-log growth of the median periodic count for an irrational-like scale.

    python3 scripts/growth_exponent.py --r fixed:0.41421356237 --grid 1000 10000 100000
"""
import argparse

from cyclic_dyn.circle import parse_scale
from cyclic_dyn.montecarlo import growth_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", default="fixed:0.41421356237309503")
    ap.add_argument("--grid", type=int, nargs="+", default=[1_000, 10_000, 100_000])
    ap.add_argument("--trials", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    fit = growth_exponent(parse_scale(args.r), args.grid, args.trials, args.seed, args.workers)
    for n, med in zip(fit.n_grid, fit.medians):
        print(f"n={n:>9}  median per={med:>10.1f}  per/n={med / n:.5f}")
    print(f"log-log slope: {fit.slope:.3f}")


if __name__ == "__main__":
    main()
