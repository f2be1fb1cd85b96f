"""Mean reset threshold of random binary automata at one size.

    python scripts/mean_threshold.py --n 100 --samples 500 --out n100.csv

Compares the sample mean with the fitted estimate 2.284 * n**0.515.
"""
import argparse
import statistics
import sys
import time

from resetword.experiment import ExperimentSpec, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=2024, help="seed base")
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="-", help="CSV path, '-' for stdout")
    args = ap.parse_args(argv)

    spec = ExperimentSpec([args.n], k=args.k, samples=args.samples, seed_base=args.seed,
                          time_limit=args.time_limit, timing=True)
    start = time.perf_counter()
    if args.out == "-":
        records = run_experiment(spec, sys.stdout, args.threads)
    else:
        with open(args.out, "w", newline="") as fh:
            records = run_experiment(spec, fh, args.threads)
    ok = [r.threshold for r in records if r.status == "ok"]
    target = 2.284 * args.n ** 0.515
    mean = statistics.fmean(ok)
    print(
        f"n={args.n} solved={len(ok)}/{len(records)} mean={mean:.3f} "
        f"sd={statistics.stdev(ok):.3f} estimate={target:.3f} "
        f"rel_diff={(mean - target) / target:+.3%} time={time.perf_counter() - start:.0f}s",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
