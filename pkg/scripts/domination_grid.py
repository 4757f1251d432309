"""Run the standard domination grid and print one line per (model, bound, metric)."""

import argparse
import sys

from randsum import montecarlo as mc
from randsum.cli import PRESETS


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--reps", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=mc.DEFAULT_SEED)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args(argv)

    violated = False
    print(f"{'index':<26} {'summand':<28} {'bound':<18} {'emp':>9} {'band':>9} {'total':>9}  verdict")
    for index, summand in PRESETS["standard"]:
        rep = mc.run_experiment(mc.ExperimentConfig(index, summand, reps=args.reps, seed=args.seed, jobs=args.jobs))
        for v in rep.verdicts:
            violated |= v.verdict == "violated"
            label = f"{v.theorem}:{v.metric[:4]}"
            print(f"{index:<26} {summand:<28} {label:<18} {v.empirical:9.5f} {v.band:9.5f} {v.bound:9.5f}  {v.verdict}")
    return 1 if violated else 0


if __name__ == "__main__":
    sys.exit(main())
