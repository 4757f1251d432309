"""Fit log d_K against log λ for compound Poisson sums with exponential summands."""

import argparse

import numpy as np

from randsum import metrics
from randsum import models as m
from randsum import montecarlo as mc


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambdas", type=float, nargs="+", default=[25, 100, 400, 1600])
    ap.add_argument("--reps", type=int, default=4_000_000)
    ap.add_argument("--seed", type=int, default=mc.DEFAULT_SEED)
    ap.add_argument("--jobs", type=int, default=4)
    args = ap.parse_args(argv)

    d_k = []
    for lam in args.lambdas:
        w = mc.sample_w(m.Poisson(lam), m.Exponential(1.0), args.reps, args.seed, jobs=args.jobs)
        est = metrics.empirical_distance_to_normal(w)[0]
        d_k.append(est.value)
        print(f"lambda={lam:<8g} d_K={est.value:.6f}  band={est.conf_band:.6f}  sqrt(lambda)*d_K={np.sqrt(lam) * est.value:.4f}")
    slope, _ = np.polyfit(np.log(args.lambdas), np.log(d_k), 1)
    print(f"slope {slope:.4f}")


if __name__ == "__main__":
    main()
