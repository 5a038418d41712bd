"""Dismantle Vietoris-Rips complexes of random samples and tally core sizes and types.

    python3 scripts/vr_core.py --r 1/3 --n 1000 --trials 100
"""
import argparse
from collections import Counter
from statistics import mean

from cyclic_dyn.catalan import predicted_periodic_fraction
from cyclic_dyn.circle import parse_scale, sample_uniform
from cyclic_dyn.montecarlo import trial_rng
from cyclic_dyn.vr import analyze, expected_sphere_dimension


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--r", default="1/3")
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    r = parse_scale(args.r)
    out = [analyze(sample_uniform(args.n, trial_rng(args.seed, t)), r) for t in range(args.trials)]
    sizes = [o["core_size"] for o in out]
    print(f"r={r} n={args.n} trials={args.trials}")
    print(f"mean core size {mean(sizes):.1f} (limit n * per-fraction = {args.n * float(predicted_periodic_fraction(r)):.1f})")
    print(f"core == periodic set in {sum(o['core_is_periodic_set'] for o in out)}/{args.trials} trials")
    print(f"homotopy types: {dict(Counter(o['homotopy_str'] for o in out))}")
    print(f"odd-sphere dimension for irrational r at this scale: {expected_sphere_dimension(r)}")


if __name__ == "__main__":
    main()
