"""Static radix trie over the frozen forward list, queried for subsets."""
from __future__ import annotations

from typing import Iterator, Sequence

import numpy as np

MIN_LEAF = 10


class Node:
    __slots__ = ("state", "bit", "min_card", "zero", "zero_sets", "one", "sets")

    def __init__(self):
        self.state = -1  # division state, -1 for a leaf
        self.bit = 0
        self.min_card = 0
        self.zero = None  # child node, or None when zero_sets holds the sets
        self.zero_sets = None
        self.one = None
        self.sets = None  # leaf payload

    @property
    def is_leaf(self):
        return self.sets is not None


def _as_matrix(sets: Sequence[int], n: int) -> np.ndarray:
    nb = (n + 7) // 8
    raw = b"".join(s.to_bytes(nb, "big") for s in sets)
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8).reshape(len(sets), nb), axis=1)
    return bits[:, 8 * nb - n:]


class StaticTrie:
    """Immutable trie answering "does some stored set lie inside this one".

    Each inner node splits its sets by the state contained in the most of
    them (never one contained in all); subtrees of at most ``min_leaf`` sets
    are stored flat.  Every node knows the smallest cardinality below it.
    """

    def __init__(self, sets: Sequence[int], n: int, min_leaf: int = MIN_LEAF):
        if not sets:
            raise ValueError("cannot build a trie over an empty list")
        self.n = n
        self.min_leaf = max(1, min_leaf)
        self.size = len(sets)
        self.node_count = 0
        sets = list(sets)
        cards = np.fromiter((s.bit_count() for s in sets), dtype=np.int64, count=len(sets))
        self.root = self._build(sets, _as_matrix(sets, n), np.arange(len(sets)), cards)

    def _leaf(self, sets, idx, cards):
        node = Node()
        node.sets = [sets[i] for i in idx]
        node.min_card = int(cards[idx].min())
        self.node_count += 1
        return node

    def _build(self, sets, mat, idx, cards):
        if len(idx) <= self.min_leaf:
            return self._leaf(sets, idx, cards)
        counts = mat[idx].sum(axis=0, dtype=np.int64)
        counts[counts == len(idx)] = -1
        x = int(np.argmax(counts))
        if counts[x] <= 0:
            raise ValueError("duplicate sets in trie input")
        node = Node()
        self.node_count += 1
        node.state = x
        node.bit = 1 << (self.n - 1 - x)
        node.min_card = int(cards[idx].min())
        has = mat[idx, x].astype(bool)
        zero_idx, one_idx = idx[~has], idx[has]
        if len(zero_idx) <= self.min_leaf:
            node.zero_sets = [sets[i] for i in zero_idx]
        else:
            node.zero = self._build(sets, mat, zero_idx, cards)
        node.one = self._build(sets, mat, one_idx, cards)
        return node

    def __len__(self):
        return self.size

    def __iter__(self) -> Iterator[int]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield from node.sets
                continue
            if node.zero_sets is not None:
                yield from node.zero_sets
            else:
                stack.append(node.zero)
            stack.append(node.one)

    def contains_subset(self, group: Sequence[int], card: int | None = None) -> int | None:
        """A member of ``group`` containing some stored set, or None.

        All members of ``group`` must have the same cardinality ``card``;
        that cardinality is what the size elimination compares against.
        """
        if not group:
            return None
        if card is None:
            card = group[0].bit_count()
        return _query(self.root, list(group), card)


def _scan(stored, group):
    for x in stored:
        for y in group:
            if x & y == x:
                return y
    return None


def _query(node, group, card):
    while True:
        if node.min_card > card:
            return None
        if node.sets is not None:
            return _scan(node.sets, group)
        if node.zero_sets is not None:
            hit = _scan(node.zero_sets, group)
        else:
            hit = _query(node.zero, group, card)
        if hit is not None:
            return hit
        bit = node.bit
        group = [y for y in group if y & bit]
        if not group:
            return None
        node = node.one
