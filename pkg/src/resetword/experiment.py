"""Batch runs over random automata, CSV emission and the power-law fit.

Instance ``i`` of size ``n`` is ``random_automaton(n, k, seed)`` with
``seed = seed_base ^ instance_hash(n, i)``, where ``instance_hash`` is the
splitmix64 finalizer applied to ``(n << 32) | i``.
"""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Sequence, TextIO

import numpy as np

from .automaton import NotSynchronizingError, random_automaton
from .cost import OutOfMemory
from .dfs import SearchTimeout
from .engine import SolverConfig, solve_exact
from .heuristics import adaptive_upper_bound, beam_ibfs, eppstein
from .memory import DEFAULT_BUDGET
from .oracle import power_set_bfs_oracle

CSV_HEADER = ("n", "k", "seed", "solver", "threshold", "status", "time_s", "peak_mem_bytes")
SOLVERS = ("exact", "oracle", "eppstein", "beam", "adaptive")
DEFAULT_TIME_LIMIT = 60.0

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def instance_hash(n: int, i: int) -> int:
    return splitmix64(((n & 0xFFFFFFFF) << 32) | (i & 0xFFFFFFFF))


def instance_seed(seed_base: int, n: int, i: int) -> int:
    return (seed_base ^ instance_hash(n, i)) & _MASK


@dataclass
class ExperimentSpec:
    sizes: Sequence[int]
    k: int = 2
    samples: int = 10
    seed_base: int = 0
    solver: str = "exact"
    time_limit: float | None = DEFAULT_TIME_LIMIT
    memory: int = DEFAULT_BUDGET
    beam_size: int = 1000
    timing: bool = False
    config: SolverConfig | None = None


@dataclass
class ExperimentRecord:
    n: int
    k: int
    seed: int
    solver: str
    threshold: int | None
    status: str = "ok"
    time_s: float = 0.0
    peak_mem_bytes: int = 0
    steps: str = ""
    index: int = 0

    def row(self) -> list[str]:
        return [
            str(self.n),
            str(self.k),
            str(self.seed),
            self.solver,
            "" if self.threshold is None else str(self.threshold),
            self.status,
            f"{self.time_s:.3f}",
            str(self.peak_mem_bytes),
        ]


@dataclass
class FitResult:
    a: float
    c: float
    residual: float
    sizes: list[int] = field(default_factory=list)
    means: list[float] = field(default_factory=list)

    def predict(self, n: float) -> float:
        return self.a * n ** self.c


def run_instance(spec: ExperimentSpec, n: int, i: int) -> ExperimentRecord:
    """Solve one instance; failures become records instead of exceptions."""
    seed = instance_seed(spec.seed_base, n, i)
    rec = ExperimentRecord(n, spec.k, seed, spec.solver, None, index=i)
    aut = random_automaton(n, spec.k, seed)
    start = time.perf_counter()
    try:
        if not aut.is_synchronizing():
            raise NotSynchronizingError("automaton is not synchronizing")
        if spec.solver == "exact":
            config = replace(spec.config or SolverConfig(), memory=spec.memory)
            res = solve_exact(
                aut, config, time_limit=spec.time_limit, check_synchronizing=False
            )
            rec.threshold, rec.peak_mem_bytes, rec.steps = res.threshold, res.peak_bytes, res.steps
        elif spec.solver == "oracle":
            rec.threshold = power_set_bfs_oracle(aut)
        elif spec.solver == "eppstein":
            rec.threshold = eppstein(aut).length
        elif spec.solver == "beam":
            found = beam_ibfs(aut, spec.beam_size)
            if found is None:
                rec.status = "no_word"
            else:
                rec.threshold = found.length
        elif spec.solver == "adaptive":
            rec.threshold = adaptive_upper_bound(aut, memory=spec.memory).length
        else:
            raise ValueError(f"unknown solver {spec.solver!r}")
    except NotSynchronizingError:
        rec.status = "not_synchronizing"
    except OutOfMemory:
        rec.status = "out_of_memory"
    except SearchTimeout:
        rec.status = "timeout"
    if spec.timing:
        rec.time_s = time.perf_counter() - start
    return rec


def _jobs(spec: ExperimentSpec):
    return [(n, i) for n in spec.sizes for i in range(spec.samples)]


def _run_job(args):
    spec, n, i = args
    return run_instance(spec, n, i)


def iter_experiment(spec: ExperimentSpec, threads: int = 1) -> Iterator[ExperimentRecord]:
    """Records ordered by ``(n, index)`` whatever the completion order."""
    if spec.solver not in SOLVERS:
        raise ValueError(f"unknown solver {spec.solver!r}")
    jobs = _jobs(spec)
    if threads <= 1:
        for n, i in jobs:
            yield run_instance(spec, n, i)
        return
    with ProcessPoolExecutor(max_workers=threads) as pool:
        yield from pool.map(_run_job, [(spec, n, i) for n, i in jobs])


def run_experiment(
    spec: ExperimentSpec, out: TextIO, threads: int = 1, header: bool = True
) -> list[ExperimentRecord]:
    """Write one CSV row per instance, flushing after each, and return the records."""
    writer = csv.writer(out, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
        out.flush()
    records = []
    for rec in iter_experiment(spec, threads):
        writer.writerow(rec.row())
        out.flush()
        records.append(rec)
    return records


def read_records(stream: Iterable[str]) -> list[ExperimentRecord]:
    reader = csv.DictReader(stream)
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_HEADER:
        raise ValueError("not an experiment CSV: unexpected header")
    out = []
    for row in reader:
        out.append(
            ExperimentRecord(
                n=int(row["n"]),
                k=int(row["k"]),
                seed=int(row["seed"]),
                solver=row["solver"],
                threshold=int(row["threshold"]) if row["threshold"] else None,
                status=row["status"],
                time_s=float(row["time_s"]),
                peak_mem_bytes=int(row["peak_mem_bytes"]),
            )
        )
    return out


def mean_thresholds(records: Iterable[ExperimentRecord]) -> dict[int, float]:
    """Mean threshold per n over successful rows."""
    groups: dict[int, list[int]] = {}
    for rec in records:
        if rec.status == "ok" and rec.threshold is not None:
            groups.setdefault(rec.n, []).append(rec.threshold)
    return {n: sum(v) / len(v) for n, v in sorted(groups.items())}


def fit_power_law(means: dict[int, float] | Iterable[ExperimentRecord]) -> FitResult:
    """Least-squares line through ``(log n, log mean)``: ``mean ~ a * n**c``."""
    if not isinstance(means, dict):
        means = mean_thresholds(means)
    pts = sorted((n, m) for n, m in means.items())
    if len(pts) < 2:
        raise ValueError("need at least two distinct sizes to fit")
    if any(n <= 0 or not m > 0 or not math.isfinite(m) for n, m in pts):
        raise ValueError("sizes and means must be positive")
    x = np.log([float(n) for n, _ in pts])
    y = np.log([m for _, m in pts])
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.linalg.norm(design @ coef - y))
    return FitResult(
        a=float(math.exp(coef[0])),
        c=float(coef[1]),
        residual=residual,
        sizes=[n for n, _ in pts],
        means=[m for _, m in pts],
    )


def csv_text(spec: ExperimentSpec, threads: int = 1) -> str:
    buf = io.StringIO()
    run_experiment(spec, buf, threads)
    return buf.getvalue()
