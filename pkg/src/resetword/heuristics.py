"""Polynomial upper bounds on the reset threshold."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .automaton import Automaton, NotSynchronizingError

DEFAULT_BEAM_FRACTION = 0.05
# a loose first bound inflates the exponential estimate far past what pays off
DEFAULT_MAX_BEAM = 1 << 14


@dataclass(frozen=True)
class HeuristicResult:
    word: tuple[int, ...]
    algorithm: str = ""

    @property
    def length(self) -> int:
        return len(self.word)


def _checked(aut: Automaton, word, algorithm: str) -> HeuristicResult:
    word = tuple(int(a) for a in word)
    if not aut.is_reset_word(word):
        raise AssertionError(f"{algorithm} produced a word that does not reset the automaton")
    return HeuristicResult(word, algorithm)


def eppstein(aut: Automaton) -> HeuristicResult:
    """Greedy pair merging: always apply a shortest word merging two current states."""
    n = aut.n
    if n == 1:
        return HeuristicResult((), "eppstein")
    dist, letter = aut.pair_merge_table()
    if (dist < 0).any():
        raise NotSynchronizingError("automaton is not synchronizing")
    big = np.iinfo(np.int64).max
    dist = dist.copy()
    np.fill_diagonal(dist, big)
    letters = letter.tolist()
    delta = aut.delta
    current = list(range(n))
    word: list[int] = []
    while len(current) > 1:
        idx = np.asarray(current)
        sub = dist[np.ix_(idx, idx)]
        flat = int(np.argmin(sub))
        p, q = current[flat // len(current)], current[flat % len(current)]
        merge = []
        while p != q:
            a = letters[p][q]
            merge.append(a)
            p, q = delta[p][a], delta[q][a]
        for a in merge:
            current = sorted({delta[s][a] for s in current})
        word.extend(merge)
    return _checked(aut, word, "eppstein")


_POPCOUNT = np.array([bin(v).count("1") for v in range(256)], dtype=np.int64)


def beam_ibfs(aut: Automaton, beam_size: int, max_length: int | None = None) -> HeuristicResult | None:
    """Inverse BFS from the singletons keeping the ``beam_size`` largest preimages.

    Ties in size go to the lexicographically smaller set; a preimage reached
    several times keeps its first word.  Returns None when no reset word
    turns up: the beam died out, repeated an earlier level, or ran past
    ``max_length`` (default ``n * k * beam_size``).
    """
    if beam_size < 1:
        raise ValueError("beam size must be positive")
    n, k = aut.n, aut.k
    if n == 1:
        return HeuristicResult((), "beam")
    cap = n * k * beam_size
    if max_length is not None:
        cap = min(cap, max_length)
    full = aut.to_matrix([aut.full])[0]
    level = aut.to_matrix(aut.singletons())
    parents: list[tuple[np.ndarray, np.ndarray]] = []
    seen = set()
    for _ in range(cap):
        pre = aut.preimage_matrix(level)
        cards = _POPCOUNT[pre].sum(axis=1)
        # most significant byte is the last column; lexsort's last key is primary
        order = np.lexsort(tuple(pre[:, c] for c in range(pre.shape[1])) + (-cards,))
        order = order[cards[order] > 0]
        if order.size == 0:
            return None
        rows = pre[order]
        first = np.ones(order.size, dtype=bool)
        first[1:] = (rows[1:] != rows[:-1]).any(axis=1)
        order = order[first]
        parents.append((order // k, order % k))
        if (pre[order[0]] == full).all():
            return _checked(aut, _unfold_levels(parents, 0), "beam")
        order = order[:beam_size]
        parents[-1] = (parents[-1][0][:beam_size], parents[-1][1][:beam_size])
        level = pre[order]
        key = level.tobytes()
        if key in seen:
            return None
        seen.add(key)
    return None


def _unfold_levels(parents, i):
    word = []
    for up, letters in reversed(parents):
        word.append(int(letters[i]))
        i = int(up[i])
    return word


def estimated_exact_sets(n: int, k: int, bound: int) -> float:
    """Rough count of sets a bidirectional search computes up to length ``bound``."""
    return n * k ** (bound / 2)


def adaptive_upper_bound(
    aut: Automaton,
    memory: int | None = None,
    small_beam: int | None = None,
    fraction: float = DEFAULT_BEAM_FRACTION,
    max_beam: int | None = DEFAULT_MAX_BEAM,
) -> HeuristicResult:
    """Eppstein, then a small beam, then a beam sized from the resulting bound."""
    n, k = aut.n, aut.k
    best = eppstein(aut)
    if best.length <= 1:
        return best
    beam = small_beam if small_beam is not None else max(64, n)
    found = beam_ibfs(aut, beam, max_length=best.length)
    if found is not None and found.length < best.length:
        best = found
    bound = best.length
    target = int(fraction * estimated_exact_sets(n, k, bound) / (k * bound))
    if memory is not None:
        set_bytes = 8 * math.ceil(n / 64) + 8
        target = min(target, memory // (2 * k * set_bytes))
    if max_beam is not None:
        target = min(target, max_beam)
    if target > beam:
        found = beam_ibfs(aut, target, max_length=bound)
        if found is not None and found.length < best.length:
            best = found
    return HeuristicResult(best.word, "adaptive")
