"""Command line: ``resetword {exact,heuristic,gen,oracle,experiment,fit}``.

Results go to stdout and are a pure function of the arguments; wall-clock
timings go to stderr so that repeated runs produce identical output.
"""
from __future__ import annotations

import argparse
import re
import sys
import time
from contextlib import ExitStack
from dataclasses import replace

from . import __version__
from .automaton import (
    PRNG_NAME,
    Automaton,
    AutomatonFormatError,
    NotSynchronizingError,
    cerny_automaton,
    random_automaton,
)
from .cost import OutOfMemory, TuningParams
from .dfs import DFSConfig, SearchTimeout
from .engine import SCHEDULES, SolverConfig, solve_exact
from .experiment import (
    DEFAULT_TIME_LIMIT,
    SOLVERS,
    ExperimentSpec,
    fit_power_law,
    mean_thresholds,
    read_records,
    run_experiment,
)
from .heuristics import adaptive_upper_bound, beam_ibfs, eppstein
from .memory import DEFAULT_BUDGET
from .oracle import power_set_bfs_oracle

EXIT_OK = 0
EXIT_USAGE = 2  # argparse's own code for bad flags
EXIT_NOT_SYNCHRONIZING = 3
EXIT_PARSE_ERROR = 4
EXIT_OUT_OF_MEMORY = 5
EXIT_TIMEOUT = 6
EXIT_NO_WORD = 7

_UNITS = {"": 1, "b": 1, "k": 1 << 10, "kb": 1000, "kib": 1 << 10, "m": 1 << 20,
          "mb": 1000 ** 2, "mib": 1 << 20, "g": 1 << 30, "gb": 1000 ** 3, "gib": 1 << 30}


def parse_bytes(text: str) -> int:
    """``"4294967296"``, ``"256MiB"``, ``"4G"`` and the like."""
    m = re.fullmatch(r"\s*(\d+(?:\.\d+)?)\s*([a-zA-Z]*)\s*", text)
    if not m or m.group(2).lower() not in _UNITS:
        raise argparse.ArgumentTypeError(f"bad byte count {text!r}")
    value = int(float(m.group(1)) * _UNITS[m.group(2).lower()])
    if value <= 0:
        raise argparse.ArgumentTypeError("byte count must be positive")
    return value


def parse_sizes(text: str) -> list[int]:
    """``"50,75,100"`` or ``"50:150:25"`` (inclusive stop)."""
    try:
        if ":" in text:
            parts = [int(p) for p in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step <= 0 or len(parts) > 3:
                raise ValueError
            sizes = list(range(start, stop + 1, step))
        else:
            sizes = [int(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or min(sizes) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive")
    return sizes


def _floats(count: int):
    def parse(text: str) -> tuple[float, ...]:
        try:
            vals = tuple(float(p) for p in text.split(","))
        except ValueError:
            vals = ()
        if len(vals) != count:
            raise argparse.ArgumentTypeError(f"expected {count} comma-separated numbers")
        return vals

    return parse


def parse_cadence(text: str) -> tuple[int, ...]:
    """``DEDUPE,REDUCE[,COUNT]``; 0 turns the corresponding pass off."""
    try:
        vals = tuple(int(p) for p in text.split(","))
    except ValueError:
        vals = ()
    if len(vals) not in (2, 3) or min(vals) < 0:
        raise argparse.ArgumentTypeError("expected DEDUPE,REDUCE[,COUNT] as non-negative ints")
    return vals


def load_automaton(args, default_seed: int | None = None) -> Automaton:
    """The automaton named by ``--input`` or ``--gen``."""
    if args.input is not None and args.gen is not None:
        raise AutomatonFormatError("give either --input or --gen, not both")
    if args.input is not None:
        if args.input == "-":
            return Automaton.from_text(sys.stdin.read())
        try:
            with open(args.input, encoding="utf-8") as fh:
                return Automaton.from_text(fh.read())
        except OSError as exc:
            raise AutomatonFormatError(f"cannot read {args.input}: {exc.strerror}") from None
    if args.gen is None:
        raise AutomatonFormatError("no automaton: pass --input FILE or --gen SPEC")
    return parse_generator(args.gen, default_seed)


def parse_generator(spec: str, default_seed: int | None = None) -> Automaton:
    kind, _, rest = spec.partition(":")
    try:
        vals = [int(p) for p in rest.split(",")] if rest else []
    except ValueError:
        raise AutomatonFormatError(f"bad generator spec {spec!r}") from None
    if kind == "cerny" and len(vals) == 1 and vals[0] >= 2:
        return cerny_automaton(vals[0])
    if kind == "random" and len(vals) in (2, 3) and vals[0] >= 1 and vals[1] >= 1:
        if len(vals) == 2:
            if default_seed is None:
                raise AutomatonFormatError("random:N,K needs a seed (random:N,K,SEED or --seed)")
            vals.append(default_seed)
        if vals[2] < 0:
            raise AutomatonFormatError("seed must be non-negative")
        return random_automaton(vals[0], vals[1], vals[2])
    raise AutomatonFormatError(f"bad generator spec {spec!r}; use cerny:N or random:N,K,SEED")


def solver_config(args) -> SolverConfig:
    params = TuningParams()
    if args.set_cost is not None:
        params = replace(params, set_cost=args.set_cost)
    if args.dfs_weights is not None:
        params = replace(
            params, dfs_set_cost_weight=args.dfs_weights[0], dfs_check_cost_weight=args.dfs_weights[1]
        )
    dfs = DFSConfig()
    if args.min_brute is not None:
        dfs = replace(dfs, min_brute=args.min_brute)
    if args.reduce_cadence is not None:
        dedupe, reduce = args.reduce_cadence[:2]
        dfs = replace(dfs, dedupe_every=dedupe or None, reduce_every=reduce or None)
        if len(args.reduce_cadence) == 3:
            dfs = replace(dfs, reduce_count=max(1, args.reduce_cadence[2]))
    config = SolverConfig(memory=args.memory, params=params, dfs=dfs)
    if args.min_brute is not None:
        config = replace(config, min_brute=args.min_brute)
    if args.min_leaf is not None:
        config = replace(config, min_leaf=args.min_leaf)
    return config


def _word_text(word) -> str:
    return " ".join(str(a) for a in word)


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = 0
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _non_negative_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        v = -1
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        v = 0.0
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("automaton source")
    src.add_argument("--input", metavar="FILE", help="automaton file ('-' for stdin)")
    src.add_argument("--gen", metavar="SPEC", help="cerny:N or random:N,K,SEED")
    lim = common.add_argument_group("limits")
    lim.add_argument("--memory", type=parse_bytes, default=DEFAULT_BUDGET, metavar="BYTES",
                     help="search memory budget, e.g. 268435456 or 256MiB (default 4GiB)")
    lim.add_argument("--time-limit", type=_positive_float, default=None, metavar="S",
                     help="wall-clock limit per search in seconds")
    lim.add_argument("--threads", type=_positive_int, default=1, metavar="T",
                     help="worker processes for experiments; searches themselves run single-threaded")
    lim.add_argument("--seed", type=_non_negative_int, default=0, metavar="S",
                     help="seed for random:N,K and the experiment seed base")
    tune = common.add_argument_group("tuning")
    tune.add_argument("--set-cost", type=_positive_float, metavar="C",
                      help="cost of storing one set relative to one subset check")
    tune.add_argument("--min-leaf", type=_positive_int, metavar="M", help="trie leaf size")
    tune.add_argument("--min-brute", type=_positive_int, metavar="M",
                      help="interval size below which marking scans pairwise")
    tune.add_argument("--dfs-weights", type=_floats(2), metavar="WS,WC",
                      help="DFS set-cost and check-cost weights")
    tune.add_argument("--reduce-cadence", type=parse_cadence, metavar="D,R[,C]",
                      help="DFS dedupe every D levels, reduce every R levels against the C largest")

    parser = argparse.ArgumentParser(prog="resetword", description="Reset thresholds of synchronizing automata.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="exact reset threshold")
    p.add_argument("--track-word", action="store_true", help="also print a shortest reset word")
    p.add_argument("--schedule", choices=sorted(SCHEDULES), default="auto",
                   help="step selection: cost model or a forced kind (then DFS)")
    p.add_argument("--trace", metavar="FILE", help="write the per-iteration log ('-' for stdout)")
    p.add_argument("--upper-bound", type=_positive_int, metavar="R",
                   help="start from this bound instead of the adaptive heuristic")

    p = sub.add_parser("heuristic", parents=[common], help="upper bound with a reset word")
    p.add_argument("--algorithm", choices=("eppstein", "beam", "adaptive"), default="adaptive")
    p.add_argument("--beam-size", type=_positive_int, default=1000, metavar="B")
    p.add_argument("--track-word", action="store_true", help="accepted for symmetry; the word is always printed")

    p = sub.add_parser("gen", parents=[common], help="print an automaton in the text format")

    p = sub.add_parser("oracle", parents=[common], help="threshold by plain power-set BFS (n <= 20)")

    p = sub.add_parser("experiment", parents=[common], help="CSV over random automata")
    p.add_argument("--sizes", type=parse_sizes, required=True, metavar="LIST",
                   help="e.g. 50,75,100 or 50:150:25")
    p.add_argument("--k", type=_positive_int, default=2, help="alphabet size")
    p.add_argument("--samples", type=_positive_int, default=10, help="instances per size")
    p.add_argument("--solver", choices=SOLVERS, default="exact")
    p.add_argument("--beam-size", type=_positive_int, default=1000, metavar="B")
    p.add_argument("--output", metavar="FILE", help="CSV destination (default stdout)")
    p.add_argument("--timing", action="store_true",
                   help="record wall time in time_s (otherwise 0, keeping the CSV reproducible)")

    p = sub.add_parser("fit", help="fit mean threshold ~ a*n^c to experiment CSVs")
    p.add_argument("csv", nargs="+", metavar="CSV")
    return parser


def _exact(args, out, err) -> int:
    aut = load_automaton(args, args.seed)
    config = solver_config(args)
    time_limit = args.time_limit
    with ExitStack() as stack:
        trace = None
        if args.trace == "-":
            trace = lambda line: print(line, file=out)  # noqa: E731
        elif args.trace:
            fh = stack.enter_context(open(args.trace, "w", encoding="utf-8"))
            trace = lambda line: print(line, file=fh)  # noqa: E731
        start = time.perf_counter()
        res = solve_exact(
            aut,
            config,
            upper_bound=args.upper_bound,
            schedule=args.schedule,
            track_word=args.track_word,
            trace=trace,
            time_limit=time_limit,
        )
        elapsed = time.perf_counter() - start
    print(f"threshold {res.threshold}", file=out)
    if res.word is not None:
        print(f"word {_word_text(res.word)}", file=out)
    print(f"upper_bound {res.upper_bound}", file=out)
    print(f"steps {res.steps}", file=out)
    print(f"peak_mem_bytes {res.peak_bytes}", file=out)
    print(f"time_s {elapsed:.3f}", file=err)
    return EXIT_OK


def _heuristic(args, out, err) -> int:
    aut = load_automaton(args, args.seed)
    start = time.perf_counter()
    if args.algorithm == "eppstein":
        res = eppstein(aut)
    elif args.algorithm == "beam":
        res = beam_ibfs(aut, args.beam_size)
        if res is None:
            print("no reset word found", file=out)
            return EXIT_NO_WORD
    else:
        res = adaptive_upper_bound(aut, memory=args.memory)
    elapsed = time.perf_counter() - start
    if not aut.is_reset_word(res.word):  # pragma: no cover - the heuristics check this already
        raise AssertionError("heuristic returned a word that does not reset the automaton")
    print(f"bound {res.length}", file=out)
    print(f"word {_word_text(res.word)}", file=out)
    print(f"time_s {elapsed:.3f}", file=err)
    return EXIT_OK


def _gen(args, out, err) -> int:
    aut = load_automaton(args, args.seed)
    comment = args.gen if args.gen else None
    if comment and comment.startswith("random"):
        comment = f"{comment} prng={PRNG_NAME}"
    out.write(aut.to_text(comment))
    return EXIT_OK


def _oracle(args, out, err) -> int:
    aut = load_automaton(args, args.seed)
    try:
        value = power_set_bfs_oracle(aut)
    except ValueError as exc:
        if isinstance(exc, NotSynchronizingError):
            raise
        print(f"error: {exc}", file=err)
        return EXIT_USAGE
    print(f"threshold {value}", file=out)
    return EXIT_OK


def _experiment(args, out, err) -> int:
    spec = ExperimentSpec(
        sizes=args.sizes,
        k=args.k,
        samples=args.samples,
        seed_base=args.seed,
        solver=args.solver,
        time_limit=args.time_limit if args.time_limit is not None else DEFAULT_TIME_LIMIT,
        memory=args.memory,
        beam_size=args.beam_size,
        timing=args.timing,
        config=solver_config(args),
    )
    print(f"prng={PRNG_NAME} seed_base={args.seed} solver={args.solver}", file=err)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            records = run_experiment(spec, fh, args.threads)
    else:
        records = run_experiment(spec, out, args.threads)
    for n, m in mean_thresholds(records).items():
        print(f"n={n} mean={m:.4f}", file=err)
    return EXIT_OK


def _fit(args, out, err) -> int:
    records = []
    for path in args.csv:
        try:
            with open(path, encoding="utf-8", newline="") as fh:
                records.extend(read_records(fh))
        except OSError as exc:
            print(f"error: cannot read {path}: {exc.strerror}", file=err)
            return EXIT_PARSE_ERROR
        except (ValueError, KeyError) as exc:
            print(f"error: {path}: {exc}", file=err)
            return EXIT_PARSE_ERROR
    means = mean_thresholds(records)
    try:
        fit = fit_power_law(means)
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_PARSE_ERROR
    for n, m in means.items():
        print(f"n={n} mean={m:.6g}", file=out)
    print(f"a={fit.a:.6g} c={fit.c:.6g} residual={fit.residual:.6g}", file=out)
    return EXIT_OK


COMMANDS = {
    "exact": _exact,
    "heuristic": _heuristic,
    "gen": _gen,
    "oracle": _oracle,
    "experiment": _experiment,
    "fit": _fit,
}


def main(argv=None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out, err)
    except AutomatonFormatError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_PARSE_ERROR
    except NotSynchronizingError:
        print("not synchronizing", file=out)
        return EXIT_NOT_SYNCHRONIZING
    except OutOfMemory as exc:
        print(f"out of memory: {exc}", file=err)
        return EXIT_OUT_OF_MEMORY
    except SearchTimeout:
        print("time limit reached", file=err)
        return EXIT_TIMEOUT


if __name__ == "__main__":
    sys.exit(main())
