"""Sweep sizes, write one CSV and fit mean threshold ~ a * n**c.

    python scripts/fit_sweep.py --sizes 50,75,100,125,150 --samples 300 --out sweep.csv
"""
import argparse
import sys
import time

from resetword.cli import parse_sizes
from resetword.experiment import ExperimentSpec, fit_power_law, run_experiment


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=parse_sizes, default=[50, 75, 100, 125, 150])
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--seed", type=int, default=2024, help="seed base")
    ap.add_argument("--time-limit", type=float, default=60.0)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--out", default="sweep.csv")
    args = ap.parse_args(argv)

    spec = ExperimentSpec(args.sizes, k=args.k, samples=args.samples, seed_base=args.seed,
                          time_limit=args.time_limit, timing=True)
    start = time.perf_counter()
    with open(args.out, "w", newline="") as fh:
        records = run_experiment(spec, fh, args.threads)
    fit = fit_power_law(records)
    for n, m in zip(fit.sizes, fit.means):
        print(f"n={n:4d} mean={m:8.3f} fit={fit.predict(n):8.3f} paper={2.284 * n ** 0.515:8.3f}")
    failed = sum(r.status != "ok" for r in records)
    print(f"a={fit.a:.4f} c={fit.c:.4f} residual={fit.residual:.4g} "
          f"rows={len(records)} not_ok={failed} time={time.perf_counter() - start:.0f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main())
