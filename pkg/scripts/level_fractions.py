"""Observed level, periodic and swiftness fractions against their exact limits.

    python3 scripts/level_fractions.py --r 2/5 --n 20000 --trials 200
"""
import argparse

from cyclic_dyn.circle import parse_scale
from cyclic_dyn.montecarlo import ExperimentConfig, compare_with_theory, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", default="1/3")
    ap.add_argument("--n", type=int, default=20_000)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--i-max", type=int, default=6)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    r = parse_scale(args.r)
    cfg = ExperimentConfig(n=args.n, r=r, trials=args.trials, seed=args.seed, i_max=args.i_max, workers=args.workers)
    _, agg = run_experiment(cfg)
    print(f"r={r} n={cfg.n} trials={cfg.trials} single-orbit freq={agg.single_orbit_freq:.3f}")
    print(f"{'statistic':<10} {'observed':>10} {'predicted':>12} {'z':>7}")
    for row in compare_with_theory(agg, r):
        mark = "  <-- |z|>4" if row.flagged else ""
        print(f"{row.name:<10} {row.observed:>10.5f} {float(row.predicted):>12.6f} {row.z:>+7.2f}{mark}")


if __name__ == "__main__":
    main()
