"""Exact thresholds and solve times for the Cerny series.

    python scripts/cerny_table.py --max-n 14
"""
import argparse
import time

from resetword import cerny_automaton, solve_exact


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--min-n", type=int, default=2)
    ap.add_argument("--max-n", type=int, default=12)
    args = ap.parse_args(argv)
    print("n,threshold,expected,steps,time_s")
    for n in range(args.min_n, args.max_n + 1):
        start = time.perf_counter()
        res = solve_exact(cerny_automaton(n))
        print(f"{n},{res.threshold},{(n - 1) ** 2},{res.steps},{time.perf_counter() - start:.3f}")


if __name__ == "__main__":
    main()
