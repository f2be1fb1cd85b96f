"""Extremal-set marking on lists of int-encoded state sets.

All marking routines take a lexicographically sorted, duplicate-free list
``a`` and an arbitrary list ``b`` and return ``(unmarked, marked)``, a
partition of ``b``.  The order inside either part is unspecified.

The search over ``a`` descends state by state (state 0 first), so each
recursion level works on a contiguous interval of ``a`` that shares its
prefix; intervals shorter than ``min_brute`` are checked pairwise.
"""
from __future__ import annotations

import random
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from typing import Sequence

import numpy as np

MIN_BRUTE = 64


class _Found(Exception):
    pass


def density(sets: Sequence[int], n: int) -> float:
    if not sets:
        return 0.0
    return sum(s.bit_count() for s in sets) / (n * len(sets))


def lex_sort_dedupe(sets: Sequence[int]) -> tuple[list[int], float]:
    """Sorted unique copy of ``sets`` and the fraction of entries removed."""
    if not sets:
        return [], 0.0
    out = sorted(set(sets))
    return out, (len(sets) - len(out)) / len(sets)


def _brute(a, lo, hi, b, proper, marked, stop):
    # one filtering pass per member of ``a``; the passes shrink as sets get marked
    for i in range(lo, hi):
        x = a[i]
        if stop:
            if proper:
                hit = next((y for y in b if y & x == x != y), None)
            else:
                hit = next((y for y in b if y & x == x), None)
            if hit is not None:
                marked.append(hit)
                raise _Found
            continue
        if proper:
            keep = [y for y in b if y & x != x or y == x]
        else:
            keep = [y for y in b if y & x != x]
        if len(keep) != len(b):
            if proper:
                marked.extend(y for y in b if y & x == x != y)
            else:
                marked.extend(y for y in b if y & x == x)
            b = keep
            if not b:
                break
    return b


def _mark(a, lo, hi, b, d, n, min_brute, proper, marked, stop):
    while True:
        if not b:
            return b
        if hi - lo < min_brute or d >= n:
            return _brute(a, lo, hi, b, proper, marked, stop)
        bit = 1 << (n - 1 - d)
        mid = bisect_left(a, True, lo, hi, key=lambda x: (x & bit) != 0)
        d += 1
        if mid == hi:
            # nobody in this interval contains state d-1
            continue
        if mid > lo:
            b = _mark(a, lo, mid, b, d, n, min_brute, proper, marked, stop)
        b0 = [y for y in b if not y & bit]
        b1 = [y for y in b if y & bit]
        if not b1:
            return b0
        b1 = _mark(a, mid, hi, b1, d, n, min_brute, proper, marked, stop)
        b0.extend(b1)
        return b0


def unpack(sets: Sequence[int], n: int) -> np.ndarray:
    """``(len(sets), n)`` uint8 0/1 matrix, state 0 in column 0."""
    nb = (n + 7) // 8
    raw = b"".join(s.to_bytes(nb, "big") for s in sets)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(sets), nb), axis=1)
    return bits[:, 8 * nb - n:]


# rows of ``b`` per matrix product
_BLOCK = 1 << 13


def _brute_np(a, b, idx, d, proper, stop):
    """Boolean mask over ``idx``: rows of ``b`` containing some row of ``a``.

    Every row of ``a`` agrees on the states before ``d`` and the rows of
    ``b`` already contain those of them that ``a`` has, so only the later
    states occurring in ``a`` are compared.  ``x`` lies inside ``y`` exactly
    when no state of ``x`` is missing from ``y``, which one matrix product
    counts for all pairs at once.  A contained set of equal size is the set
    itself.
    """
    cols = np.flatnonzero(a[:, d:].any(axis=0)) + d
    xa = a[:, cols].T.astype(np.float32)
    if proper:
        card_a = a.sum(axis=1, dtype=np.int64)
    hit = np.zeros(idx.size, dtype=bool)
    for start in range(0, idx.size, _BLOCK):
        rows = idx[start:start + _BLOCK]
        inside = (1.0 - b[rows][:, cols].astype(np.float32)) @ xa == 0
        if proper:
            inside &= b[rows].sum(axis=1, dtype=np.int64)[:, None] != card_a[None, :]
        hit[start:start + _BLOCK] = inside.any(axis=1)
        if stop and hit[start:start + _BLOCK].any():
            break
    return hit


def _mark_np(a, lo, hi, b, idx, d, n, min_brute, proper, marked, stop):
    while True:
        if idx.size == 0:
            return idx
        if hi - lo < min_brute or d >= n:
            hit = _brute_np(a[lo:hi], b, idx, d, proper, stop)
            if hit.any():
                marked.append(idx[hit])
                if stop:
                    raise _Found
            return idx[~hit]
        mid = lo + int(np.searchsorted(a[lo:hi, d], 1))
        d += 1
        if mid == hi:
            continue
        if mid > lo:
            idx = _mark_np(a, lo, mid, b, idx, d, n, min_brute, proper, marked, stop)
        has = b[idx, d - 1] != 0
        b1 = idx[has]
        if b1.size == 0:
            return idx
        b1 = _mark_np(a, mid, hi, b, b1, d, n, min_brute, proper, marked, stop)
        return np.concatenate((idx[~has], b1))


# below this many candidate pairs the plain int loops win
NUMPY_PAIRS = 1 << 14


def _mark_any(a, b, n, min_brute, proper, stop):
    """Returns ``(unmarked, marked)``; raises ``_Found`` carrying nothing on early exit."""
    if len(a) * len(b) < NUMPY_PAIRS:
        marked: list[int] = []
        try:
            unmarked = _mark(a, 0, len(a), list(b), 0, n, min_brute, proper, marked, stop)
        except _Found:
            return None, marked
        return unmarked, marked
    pa, pb = unpack(a, n), unpack(b, n)
    parts: list[np.ndarray] = []
    try:
        keep = _mark_np(pa, 0, len(a), pb, np.arange(len(b)), 0, n, min_brute, proper, parts, stop)
    except _Found:
        return None, [b[int(i)] for i in parts[-1][:1]]
    if parts:
        hit = np.concatenate(parts)
        return [b[i] for i in keep.tolist()], [b[i] for i in hit.tolist()]
    return [b[i] for i in keep.tolist()], []


def mark_supersets(
    a: Sequence[int],
    b: Sequence[int],
    n: int,
    min_brute: int = MIN_BRUTE,
    proper: bool = False,
) -> tuple[list[int], list[int]]:
    """Split ``b`` into sets containing no member of ``a`` and sets that do.

    ``a`` must be lex-sorted and duplicate-free.  With ``proper=True`` a set
    equal to its only subset in ``a`` stays unmarked.
    """
    if not a:
        return list(b), []
    if not isinstance(b, list):
        b = list(b)
    return _mark_any(a, b, n, max(1, min_brute), proper, False)


def mark_proper_supersets(a, b, n, min_brute=MIN_BRUTE):
    return mark_supersets(a, b, n, min_brute, proper=True)


def _complemented(a, full):
    # complementing reverses lexicographic order
    return [x ^ full for x in reversed(a)]


def mark_subsets(a, b, n, min_brute=MIN_BRUTE, proper=False):
    """Split ``b`` into sets contained in no member of ``a`` and sets that are."""
    full = (1 << n) - 1
    un, mk = mark_supersets(_complemented(a, full), [y ^ full for y in b], n, min_brute, proper)
    return [y ^ full for y in un], [y ^ full for y in mk]


def mark_proper_subsets(a, b, n, min_brute=MIN_BRUTE):
    return mark_subsets(a, b, n, min_brute, proper=True)


def find_superset(a: Sequence[int], b: Sequence[int], n: int, min_brute: int = MIN_BRUTE) -> int | None:
    """First member of ``b`` found to contain some member of ``a``, else None."""
    if not a or not b:
        return None
    if not isinstance(b, list):
        b = list(b)
    unmarked, marked = _mark_any(a, b, n, max(1, min_brute), False, True)
    return marked[0] if unmarked is None else None


def meet_check(l_bfs: Sequence[int], l_ibfs: Sequence[int], n: int, min_brute: int = MIN_BRUTE) -> bool:
    """True iff some set of ``l_bfs`` is contained in some set of ``l_ibfs``."""
    return find_superset(l_bfs, l_ibfs, n, min_brute) is not None


def minimal_sets(sorted_sets, n, min_brute=MIN_BRUTE):
    """Drop non-minimal sets from a sorted unique list; result stays sorted."""
    keep, _ = mark_proper_supersets(sorted_sets, sorted_sets, n, min_brute)
    keep.sort()
    return keep


def maximal_sets(sorted_sets, n, min_brute=MIN_BRUTE):
    keep, _ = mark_proper_subsets(sorted_sets, sorted_sets, n, min_brute)
    keep.sort()
    return keep


def parallel_mark_supersets(a, b, n, workers=2, min_brute=MIN_BRUTE, proper=False, seed=0):
    """Shuffle ``b``, cut it into ``workers`` parts and mark them independently.

    Only the split is parallel; the partition is the same as the sequential
    call up to order.
    """
    items = list(b)
    random.Random(seed).shuffle(items)
    size = -(-len(items) // workers) if items else 0
    parts = [items[i:i + size] for i in range(0, len(items), size)] if size else []
    unmarked: list[int] = []
    marked: list[int] = []
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for un, mk in pool.map(lambda p: mark_supersets(a, p, n, min_brute, proper), parts):
            unmarked.extend(un)
            marked.extend(mk)
    return unmarked, marked
