"""Memory-bounded inverse depth-first search against a frozen forward list."""
from __future__ import annotations

import time
from dataclasses import dataclass

from .automaton import Automaton
from .cost import OutOfMemory
from .memory import MemoryLedger
from .subsets import mark_proper_subsets, mark_subsets
from .trie import StaticTrie

REDUCE_COUNT = 20_000


class SearchTimeout(RuntimeError):
    pass


class SharedBound:
    """Best known reset word length; only ever lowered."""

    def __init__(self, value: int, word=None):
        self.value = value
        self.word = word
        self.history = [value]

    def lower(self, value: int, word=None) -> bool:
        if value < self.value:
            self.value = value
            self.word = word
            self.history.append(value)
            return True
        return False


@dataclass
class DFSConfig:
    dedupe_every: int | None = 2
    reduce_every: int | None = 3
    reduce_count: int = REDUCE_COUNT
    min_brute: int = 64


def _unfold_back(node):
    word = []
    while node is not None:
        a, node = node
        word.append(a)
    return word


def cardinality_groups(sets):
    """``(card, start, stop)`` for each run of equal cardinality."""
    groups = []
    start = 0
    for i in range(1, len(sets) + 1):
        if i == len(sets) or sets[i].bit_count() != sets[start].bit_count():
            groups.append((sets[start].bit_count(), start, i))
            start = i
    return groups


class InverseDFS:
    """Explores preimages depth first, splitting every level to fit the budget.

    ``on_hit(depth, y, y_word)`` turns a meet at preimage ``y`` into a full
    reset word (or None when words are not tracked).
    """

    def __init__(
        self,
        aut: Automaton,
        trie: StaticTrie,
        bound: SharedBound,
        ledger: MemoryLedger,
        config: DFSConfig | None = None,
        track_words: bool = False,
        on_hit=None,
        deadline: float | None = None,
    ):
        self.aut = aut
        self.trie = trie
        self.bound = bound
        self.ledger = ledger
        self.config = config or DFSConfig()
        self.track_words = track_words
        self.on_hit = on_hit
        self.deadline = deadline
        self.start = 0
        self.expanded = 0
        self.max_depth = 0
        self.splits = 0  # lists cut into more than one part

    def part_size(self, r: int) -> int:
        """Largest list part that may be expanded at depth ``r``."""
        steps = max(1, self.bound.value - r)
        return self.ledger.available // ((self.aut.k + 1) * steps * self.ledger.set_bytes)

    def split(self, sets, r: int):
        size = self.part_size(r)
        if size < 1:
            raise OutOfMemory("no room left for the depth-first search")
        if len(sets) > size:
            self.splits += 1
        for i in range(0, len(sets), size):
            yield sets[i:i + size]

    def run(self, sets, r: int, words=None) -> None:
        """Search from ``sets`` whose preimages have word length ``r``."""
        self.start = r
        if r >= self.bound.value:
            return
        for part in self.split(sorted(sets), r):
            self._visit(part, r, words)
            if r >= self.bound.value - 1:
                return

    def _visit(self, sets, r, words):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SearchTimeout("time limit reached")
        aut, cfg = self.aut, self.config
        n, k = aut.n, aut.k
        charged = self.ledger.list_bytes(k * len(sets))
        self.ledger.charge(charged)
        try:
            self.expanded += 1
            self.max_depth = max(self.max_depth, r - self.start + 1)
            nxt_words = None
            if self.track_words:
                nxt_words = {}
                nxt = []
                for s in sets:
                    node = words[s]
                    for a in range(k):
                        p = aut.preimage(s, a)
                        if p:
                            nxt.append(p)
                            if p not in nxt_words:
                                nxt_words[p] = (a, node)
            else:
                nxt = [p for p in aut.preimages(sets) if p]
            level = r - self.start
            if cfg.dedupe_every and level % cfg.dedupe_every == 0:
                nxt = list(set(nxt))
            nxt.sort()
            nxt.sort(key=int.bit_count, reverse=True)
            if cfg.reduce_every and level % cfg.reduce_every == 0 and len(nxt) > 1:
                nxt = self._reduce(nxt, n)
            for card, lo, hi in cardinality_groups(nxt):
                hit = self.trie.contains_subset(nxt[lo:hi], card)
                if hit is not None:
                    word = None
                    if self.on_hit is not None:
                        word = self.on_hit(r, hit, _unfold_back(nxt_words[hit]) if nxt_words else None)
                    self.bound.lower(r, word)
                    return
            if r >= self.bound.value - 1:
                return
            for part in self.split(nxt, r + 1):
                self._visit(part, r + 1, nxt_words)
                if r >= self.bound.value - 1:
                    return
        finally:
            self.ledger.release(charged)

    def _reduce(self, nxt, n):
        """Drop sets contained in one of the ``reduce_count`` largest sets."""
        c = self.config.reduce_count
        top = sorted(set(nxt[:c]))
        top, _ = mark_proper_subsets(top, top, n, self.config.min_brute)
        top.sort()
        rest, _ = mark_subsets(top, nxt[c:], n, self.config.min_brute)
        out = top + rest
        out.sort()
        out.sort(key=int.bit_count, reverse=True)
        return out
