"""Exact reset threshold: bidirectional BFS with a cost-driven switch to inverse DFS."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

from .automaton import Automaton, NotSynchronizingError
from .cost import (
    PREFERENCE,
    OutOfMemory,
    SearchStats,
    StepKind,
    TuningParams,
    decide,
    evaluate_steps,
)
from .dfs import DFSConfig, InverseDFS, SearchTimeout, SharedBound
from .heuristics import HeuristicResult, adaptive_upper_bound
from .memory import DEFAULT_BUDGET, MemoryLedger
from .subsets import (
    density,
    find_superset,
    lex_sort_dedupe,
    mark_subsets,
    mark_supersets,
    maximal_sets,
    minimal_sets,
)
from .trie import MIN_LEAF, StaticTrie

__all__ = [
    "ExactResult",
    "SolverConfig",
    "BidirectionalSearch",
    "solve_exact",
    "forced_schedule",
    "SearchTimeout",
]

Schedule = Callable[[SearchStats, dict, dict], StepKind]


@dataclass
class SolverConfig:
    memory: int = DEFAULT_BUDGET
    params: TuningParams = field(default_factory=TuningParams)
    min_brute: int = 64
    min_leaf: int = MIN_LEAF
    dfs: DFSConfig = field(default_factory=DFSConfig)
    history_growth: float = 2.0
    ratio_weight: float = 0.5


@dataclass
class ExactResult:
    threshold: int
    word: tuple[int, ...] | None
    upper_bound: int
    peak_bytes: int
    steps: str = ""
    dfs_bounds: list = field(default_factory=list)
    dfs_splits: int = 0


def forced_schedule(kind: StepKind | str, dfs_at: int | None = None) -> Schedule:
    """Always take ``kind`` until iteration ``dfs_at`` (default: halfway to R), then DFS.

    ``kind="DFS"`` hands over to the depth-first search immediately.
    """
    kind = StepKind(kind.upper()) if isinstance(kind, str) else kind

    def schedule(stats: SearchStats, costs: dict, preds: dict) -> StepKind:
        if kind is StepKind.DFS:
            return StepKind.DFS
        switch = dfs_at if dfs_at is not None else (stats.R + 1) // 2
        if stats.r >= switch or not stats.feasible[kind]:
            return StepKind.DFS
        return kind

    return schedule


def _auto(stats: SearchStats, costs: dict, preds: dict) -> StepKind:
    return decide(costs, preds)


SCHEDULES = {
    "auto": None,
    "bfs": StepKind.BFS,
    "ibfs": StepKind.IBFS,
    "dfs": StepKind.DFS,
}


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.6g}"


def _unfold_forward(node):
    word = []
    while node is not None:
        node, a = node
        word.append(a)
    word.reverse()
    return word


def _unfold_back(node):
    word = []
    while node is not None:
        a, node = node
        word.append(a)
    return word


class BidirectionalSearch:
    """State of one exact search: forward list, inverse list and their histories."""

    def __init__(
        self,
        aut: Automaton,
        bound: int,
        config: SolverConfig | None = None,
        schedule: Schedule | None = None,
        track_words: bool = False,
        trace: Callable[[str], None] | None = None,
        deadline: float | None = None,
    ):
        self.aut = aut
        self.config = config or SolverConfig()
        self.schedule = schedule or _auto
        self.track_words = track_words
        self.trace = trace
        self.deadline = deadline
        n, k = aut.n, aut.k
        self.n, self.k = n, k
        self.ledger = MemoryLedger(self.config.memory, n)
        self.bound = SharedBound(bound)
        self.stats = SearchStats(n, k, R=bound)
        self.l_bfs = [aut.full]
        self.h_bfs = [aut.full]
        self.l_ibfs = sorted(aut.singletons())
        self.h_ibfs = list(self.l_ibfs)
        self.h_bfs_mark = len(self.h_bfs)
        self.h_ibfs_mark = len(self.h_ibfs)
        self.bfs_words = {aut.full: None} if track_words else None
        self.ibfs_words = {s: None for s in self.l_ibfs} if track_words else None
        self.steps: list[str] = []
        self.dfs_search: InverseDFS | None = None
        self._resident = 0
        self._sync_memory()

    # -- bookkeeping ------------------------------------------------------

    def _lists_bytes(self) -> int:
        lb = self.ledger.list_bytes
        total = lb(len(self.l_bfs)) + lb(len(self.l_ibfs))
        if not self.stats.bfs.history_dropped:
            total += lb(len(self.h_bfs))
        if not self.stats.ibfs.history_dropped:
            total += lb(len(self.h_ibfs))
        return total

    def _sync_memory(self) -> None:
        new = self._lists_bytes()
        if new > self._resident:
            self.ledger.charge(new - self._resident)
        else:
            self.ledger.release(self._resident - new)
        self._resident = new

    def _refresh_stats(self) -> None:
        n, st = self.n, self.stats
        for side, l, h in ((st.bfs, self.l_bfs, self.h_bfs), (st.ibfs, self.l_ibfs, self.h_ibfs)):
            side.size = len(l)
            side.density = density(l, n)
            if side.history_dropped:
                side.history_size, side.history_density = 0, 0.0
            else:
                side.history_size = len(h)
                side.history_density = density(h, n)
        self._update_feasibility()

    def _update_feasibility(self) -> None:
        st, lb, k = self.stats, self.ledger.list_bytes, self.k
        fits = self.ledger.fits
        st.feasible[StepKind.BFS] = fits(2 * lb(k * len(self.l_bfs)))
        st.feasible[StepKind.BFS_NH] = fits(lb(k * len(self.l_bfs)))
        st.feasible[StepKind.IBFS] = fits(2 * lb(k * len(self.l_ibfs)))
        st.feasible[StepKind.IBFS_NH] = fits(lb(k * len(self.l_ibfs)))
        st.feasible[StepKind.DFS] = self._dfs_need() <= self.ledger.budget

    def _dfs_need(self) -> int:
        lb = self.ledger.list_bytes
        steps = max(1, self.bound.value - self.stats.r + 1)
        trie = self.ledger.trie_bytes(len(self.l_bfs), 2 * len(self.l_bfs))
        kept = lb(len(self.l_ibfs)) + (lb(len(self.l_bfs)) if self.track_words else 0)
        return trie + kept + (self.k + 1) * steps * self.ledger.set_bytes

    def _check_time(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchTimeout("time limit reached")

    # -- steps ------------------------------------------------------------

    def _expand(self, sets, words, forward: bool):
        aut, k = self.aut, self.k
        if words is None:
            out = aut.images(sets) if forward else aut.preimages(sets)
            return out, None
        new_words = {}
        out = []
        act = aut.image if forward else aut.preimage
        for s in sets:
            node = words[s]
            for a in range(k):
                p = act(s, a)
                out.append(p)
                if p not in new_words:
                    new_words[p] = (node, a) if forward else (a, node)
        return out, new_words

    def bfs_step(self, with_history: bool) -> None:
        n, mb, side = self.n, self.config.min_brute, self.stats.bfs
        transient = self.ledger.list_bytes(self.k * len(self.l_bfs))
        self.ledger.charge(transient)
        try:
            h = self.h_bfs
            if with_history and len(h) >= self.config.history_growth * self.h_bfs_mark:
                largest = max(s.bit_count() for s in self.l_bfs)
                h = minimal_sets([s for s in h if s.bit_count() <= largest], n, mb)
                self.h_bfs_mark = max(1, len(h))
            images, words = self._expand(self.l_bfs, self.bfs_words, True)
            l, r_dupl = lex_sort_dedupe(images)
            before = len(l)
            l = minimal_sets(l, n, mb)
            r_self = (before - len(l)) / before if before else 0.0
            r_hist = None
            if with_history:
                before = len(l)
                l, _ = mark_supersets(h, l, n, mb)
                l.sort()
                r_hist = (before - len(l)) / before if before else 0.0
                h = sorted(h + l)
            else:
                h = []
        finally:
            self.ledger.release(transient)
        self.l_bfs, self.h_bfs = l, h
        if words is not None:
            self.bfs_words = words
        if with_history:
            side.history_steps += 1
        else:
            side.history_dropped = True
        side.record(r_dupl, r_self, r_hist, self.config.ratio_weight)

    def ibfs_step(self, with_history: bool) -> None:
        n, mb, side = self.n, self.config.min_brute, self.stats.ibfs
        transient = self.ledger.list_bytes(self.k * len(self.l_ibfs))
        self.ledger.charge(transient)
        try:
            h = self.h_ibfs
            if with_history and len(h) >= self.config.history_growth * self.h_ibfs_mark:
                smallest = min(s.bit_count() for s in self.l_ibfs)
                h = maximal_sets([s for s in h if s.bit_count() >= smallest], n, mb)
                self.h_ibfs_mark = max(1, len(h))
            pre, words = self._expand(self.l_ibfs, self.ibfs_words, False)
            pre = [s for s in pre if s]
            l, r_dupl = lex_sort_dedupe(pre)
            before = len(l)
            l = maximal_sets(l, n, mb)
            r_self = (before - len(l)) / before if before else 0.0
            r_hist = None
            if with_history:
                before = len(l)
                l, _ = mark_subsets(h, l, n, mb)
                l.sort()
                r_hist = (before - len(l)) / before if before else 0.0
                h = sorted(h + l)
            else:
                h = []
        finally:
            self.ledger.release(transient)
        self.l_ibfs, self.h_ibfs = l, h
        if words is not None:
            self.ibfs_words = words
        if with_history:
            side.history_steps += 1
        else:
            side.history_dropped = True
        side.record(r_dupl, r_self, r_hist, self.config.ratio_weight)

    def _word_for(self, x: int, y: int, y_word=None) -> tuple[int, ...] | None:
        if not self.track_words:
            return None
        if y_word is None:
            y_word = _unfold_back(self.ibfs_words[y])
        word = tuple(_unfold_forward(self.bfs_words[x]) + list(y_word))
        if not self.aut.is_reset_word(word):
            raise AssertionError("reconstructed word does not reset the automaton")
        return word

    def _meet(self) -> tuple[int, ...] | bool:
        y = find_superset(self.l_bfs, self.l_ibfs, self.n, self.config.min_brute)
        if y is None:
            return False
        if not self.track_words:
            return True
        x = next(s for s in self.l_bfs if s & y == s)
        return self._word_for(x, y)

    def dfs_phase(self, r: int) -> None:
        self.h_bfs, self.h_ibfs = [], []
        self.stats.bfs.history_dropped = self.stats.ibfs.history_dropped = True
        trie = StaticTrie(self.l_bfs, self.n, self.config.min_leaf)
        trie_bytes = self.ledger.trie_bytes(len(trie), trie.node_count)
        if not self.track_words:
            self.l_bfs = []
        self._sync_memory()
        self.ledger.charge(trie_bytes)
        l_bfs = self.l_bfs

        def on_hit(depth, y, y_word):
            if not self.track_words:
                return None
            x = next(s for s in l_bfs if s & y == s)
            return self._word_for(x, y, y_word)

        search = InverseDFS(
            self.aut,
            trie,
            self.bound,
            self.ledger,
            self.config.dfs,
            track_words=self.track_words,
            on_hit=on_hit,
            deadline=self.deadline,
        )
        self.dfs_search = search
        try:
            search.run(self.l_ibfs, r, self.ibfs_words)
        finally:
            self.ledger.release(trie_bytes)

    # -- main loop --------------------------------------------------------

    def _log(self, r, kind, costs, preds) -> None:
        if self.trace is None:
            return
        st = self.stats
        parts = [
            f"iter={r}",
            f"step={kind.value}",
            f"R={self.bound.value}",
        ]
        for name, side in (("bfs", st.bfs), ("ibfs", st.ibfs)):
            parts += [
                f"{name}_size={side.size}",
                f"{name}_density={_fmt(side.density)}",
                f"h{name}_size={side.history_size}",
                f"h{name}_density={_fmt(side.history_density)}",
                f"{name}_r_dupl={_fmt(side.r_dupl)}",
                f"{name}_r_self={_fmt(side.r_self)}",
                f"{name}_r_hist={_fmt(side.r_hist)}",
            ]
        for kind_ in PREFERENCE:
            if kind_ in costs:
                parts.append(f"cost_{kind_.value}={_fmt(costs[kind_])}")
            parts.append(f"pred_{kind_.value}={_fmt(preds[kind_])}")
        parts.append(f"mem={self.ledger.used}")
        self.trace(" ".join(parts))

    def run(self) -> int:
        """Return the reset threshold; ``self.bound.word`` holds a witness if tracked."""
        if self.aut.n == 1:
            self.bound.lower(0, () if self.track_words else None)
            return 0
        for r in range(1, self.bound.value):
            self._check_time()
            self.stats.r = r
            self.stats.R = self.bound.value
            self._refresh_stats()
            costs, preds = evaluate_steps(self.stats, self.config.params)
            kind = self.schedule(self.stats, costs, preds)
            while True:
                if not self.stats.feasible[kind]:
                    # forced or auto choice does not fit: let the cost model pick among the rest
                    costs[kind] = math.inf
                    preds[kind] = math.inf
                    kind = decide(costs, preds)
                    continue
                try:
                    self._log(r, kind, costs, preds)
                    self._take(kind, r)
                    break
                except OutOfMemory:
                    if kind is StepKind.DFS:
                        raise
                    self.stats.feasible[kind] = False
            self.steps.append(kind.value)
            if kind is StepKind.DFS:
                if self.trace is not None:
                    d = self.dfs_search
                    self.trace(
                        f"dfs start={r} R={self.bound.value} expanded={d.expanded} "
                        f"depth={d.max_depth} splits={d.splits} peak={self.ledger.peak}"
                    )
                return self.bound.value
            self._sync_memory()
            met = self._meet()
            if met:
                self.bound.lower(r, met if self.track_words else None)
                return r
        return self.bound.value

    def _take(self, kind: StepKind, r: int) -> None:
        if kind is StepKind.BFS:
            self.bfs_step(True)
        elif kind is StepKind.BFS_NH:
            self.bfs_step(False)
        elif kind is StepKind.IBFS:
            self.ibfs_step(True)
        elif kind is StepKind.IBFS_NH:
            self.ibfs_step(False)
        else:
            self.dfs_phase(r)


def solve_exact(
    aut: Automaton,
    config: SolverConfig | None = None,
    *,
    upper_bound: int | HeuristicResult | None = None,
    schedule: str | Schedule = "auto",
    track_word: bool = False,
    trace: Callable[[str], None] | None = None,
    time_limit: float | None = None,
    check_synchronizing: bool = True,
) -> ExactResult:
    """Reset threshold of ``aut`` (and a shortest reset word with ``track_word``)."""
    config = config or SolverConfig()
    if check_synchronizing and not aut.is_synchronizing():
        raise NotSynchronizingError("automaton is not synchronizing")
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    if upper_bound is None:
        upper_bound = adaptive_upper_bound(aut, memory=config.memory)
    if isinstance(upper_bound, HeuristicResult):
        bound, word = upper_bound.length, upper_bound.word
    else:
        bound, word = int(upper_bound), None
    if isinstance(schedule, str):
        kind = SCHEDULES[schedule]
        schedule = None if kind is None else forced_schedule(kind)
    search_bound = bound
    if track_word and word is None:
        # no witness of length ``bound`` yet, so let the search reach it
        search_bound = bound + 1
    search = BidirectionalSearch(
        aut, search_bound, config, schedule, track_word, trace, deadline
    )
    if word is not None:
        search.bound.word = tuple(word)
    threshold = search.run()
    out_word = search.bound.word if track_word else None
    if track_word and (out_word is None or len(out_word) != threshold):
        raise AssertionError("search finished without a witness of the threshold length")
    dfs_bounds = list(search.bound.history)
    return ExactResult(
        threshold=threshold,
        word=tuple(out_word) if out_word is not None else None,
        upper_bound=bound,
        peak_bytes=search.ledger.peak,
        steps="".join(s[0] if s in ("BFS", "IBFS", "DFS") else s[0].lower() for s in search.steps),
        dfs_bounds=dfs_bounds,
        dfs_splits=search.dfs_search.splits if search.dfs_search is not None else 0,
    )
