"""Complete deterministic automata and the subset actions used by every search.

Subsets of states are plain Python ints.  State ``q`` of an ``n``-state
automaton lives at int bit ``n - 1 - q``, so state 0 is the most significant
position of the characteristic vector and ordinary integer order is the
lexicographic order of characteristic vectors.
"""
from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

PRNG_NAME = "numpy-PCG64"

# batches at least this long go through numpy
BATCH_MIN = 256
_ROWS = 4096


class AutomatonFormatError(ValueError):
    pass


class NotSynchronizingError(ValueError):
    pass


def _chunk_tables(n: int, targets: Sequence[int]) -> list[list[int]]:
    """Tables mapping each byte of a set to the union of its members' targets.

    ``targets[q]`` is the set assigned to state ``q``; the action of a whole set
    is then the OR of one lookup per byte.
    """
    tables = []
    for c in range((n + 7) // 8):
        t = [0] * 256
        for v in range(1, 256):
            low = v & -v
            pos = 8 * c + low.bit_length() - 1
            t[v] = t[v ^ low] | (targets[n - 1 - pos] if pos < n else 0)
        tables.append(t)
    return tables


class Automaton:
    """Complete DFA ``(Q, Sigma, delta)`` with ``delta[q][a]`` in ``range(n)``."""

    __slots__ = ("n", "k", "delta", "inverse", "full", "_img", "_pre", "_nbytes", "_np_tables")

    def __init__(self, delta: Sequence[Sequence[int]]):
        rows = [tuple(int(x) for x in row) for row in delta]
        n = len(rows)
        if n < 1:
            raise ValueError("automaton needs at least one state")
        k = len(rows[0])
        if k < 1:
            raise ValueError("automaton needs at least one letter")
        for q, row in enumerate(rows):
            if len(row) != k:
                raise ValueError(f"row {q} has {len(row)} entries, expected {k}")
            for p in row:
                if not 0 <= p < n:
                    raise ValueError(f"transition from {q} leads to invalid state {p}")
        self.n = n
        self.k = k
        self.delta = tuple(rows)
        inv = [[[] for _ in range(n)] for _ in range(k)]
        for q, row in enumerate(rows):
            for a, p in enumerate(row):
                inv[a][p].append(q)
        self.inverse = tuple(tuple(tuple(ps) for ps in per) for per in inv)
        self.full = (1 << n) - 1
        self._nbytes = (n + 7) // 8
        self._img = [
            _chunk_tables(n, [self.bit(rows[q][a]) for q in range(n)]) for a in range(k)
        ]
        self._pre = [
            _chunk_tables(n, [self.to_set(inv[a][q]) for q in range(n)]) for a in range(k)
        ]
        self._np_tables = {}

    def __repr__(self):
        return f"Automaton(n={self.n}, k={self.k})"

    def __eq__(self, other):
        return isinstance(other, Automaton) and self.delta == other.delta

    def __hash__(self):
        return hash(self.delta)

    # -- state sets -------------------------------------------------------

    def bit(self, q: int) -> int:
        return 1 << (self.n - 1 - q)

    def to_set(self, states: Iterable[int]) -> int:
        s = 0
        for q in states:
            s |= 1 << (self.n - 1 - q)
        return s

    def states(self, s: int) -> list[int]:
        n = self.n
        out = []
        while s:
            low = s & -s
            out.append(n - low.bit_length())
            s ^= low
        out.reverse()
        return out

    def singletons(self) -> list[int]:
        return [1 << p for p in range(self.n - 1, -1, -1)]

    def complement(self, s: int) -> int:
        return s ^ self.full

    # -- actions ----------------------------------------------------------

    def image(self, s: int, a: int) -> int:
        out = 0
        for t, v in zip(self._img[a], s.to_bytes(self._nbytes, "little")):
            if v:
                out |= t[v]
        return out

    def preimage(self, s: int, a: int) -> int:
        out = 0
        for t, v in zip(self._pre[a], s.to_bytes(self._nbytes, "little")):
            if v:
                out |= t[v]
        return out

    def images(self, sets: Iterable[int]) -> list[int]:
        """All successors, element ``i*k + a`` being the image of ``sets[i]`` under ``a``."""
        return self._apply_all(self._img, sets)

    def preimages(self, sets: Iterable[int]) -> list[int]:
        return self._apply_all(self._pre, sets)

    def _apply_all(self, tables, sets):
        if not isinstance(sets, list):
            sets = list(sets)
        if len(sets) >= BATCH_MIN:
            return self.from_matrix(self._apply_matrix(tables, self.to_matrix(sets)))
        nb = self._nbytes
        out = []
        append = out.append
        for s in sets:
            bs = s.to_bytes(nb, "little")
            for tab in tables:
                r = 0
                for t, v in zip(tab, bs):
                    if v:
                        r |= t[v]
                append(r)
        return out

    # -- batched actions on byte matrices ---------------------------------
    #
    # A batch of sets is an ``(m, ceil(n/8))`` uint8 array holding each set's
    # little-endian bytes, so row ``i`` is ``s.to_bytes(nb, "little")``.

    def to_matrix(self, sets: Sequence[int]) -> np.ndarray:
        nb = self._nbytes
        raw = b"".join(s.to_bytes(nb, "little") for s in sets)
        return np.frombuffer(raw, dtype=np.uint8).reshape(len(sets), nb)

    def from_matrix(self, mat: np.ndarray) -> list[int]:
        nb = self._nbytes
        raw = np.ascontiguousarray(mat).tobytes()
        frm = int.from_bytes
        return [frm(raw[i:i + nb], "little") for i in range(0, len(raw), nb)]

    def _np_table(self, tables):
        key = id(tables)
        if key not in self._np_tables:
            nb = self._nbytes
            arr = np.zeros((len(tables), nb, 256, nb), dtype=np.uint8)
            for a, tab in enumerate(tables):
                for c, t in enumerate(tab):
                    raw = b"".join(v.to_bytes(nb, "little") for v in t)
                    arr[a, c] = np.frombuffer(raw, dtype=np.uint8).reshape(256, nb)
            self._np_tables[key] = arr
        return self._np_tables[key]

    def _apply_matrix(self, tables, mat):
        """Row ``i*k + a`` is the action of letter ``a`` on row ``i``."""
        arr = self._np_table(tables)
        m, nb = mat.shape
        out = np.empty((m, len(tables), nb), dtype=np.uint8)
        cols = np.arange(nb)
        for start in range(0, m, _ROWS):
            block = mat[start:start + _ROWS]
            for a in range(len(tables)):
                out[start:start + _ROWS, a] = np.bitwise_or.reduce(arr[a, cols, block], axis=1)
        return out.reshape(m * len(tables), nb)

    def preimage_matrix(self, mat: np.ndarray) -> np.ndarray:
        return self._apply_matrix(self._pre, mat)

    def image_matrix(self, mat: np.ndarray) -> np.ndarray:
        return self._apply_matrix(self._img, mat)

    def apply_word(self, s: int, word: Iterable[int]) -> int:
        for a in word:
            s = self.image(s, a)
        return s

    def is_reset_word(self, word: Sequence[int]) -> bool:
        return self.apply_word(self.full, word).bit_count() == 1

    # -- pair automaton ---------------------------------------------------

    def pair_merge_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Shortest merging words for all pairs, via backward BFS from the diagonal.

        Returns ``(dist, letter)``, both ``n x n``.  ``dist[p, q]`` is the length
        of a shortest word merging ``p`` and ``q`` (-1 if none) and
        ``letter[p, q]`` is its first letter.
        """
        n, k, inv = self.n, self.k, self.inverse
        dist = np.full((n, n), -1, dtype=np.int64)
        letter = np.full((n, n), -1, dtype=np.int64)
        d = dist.tolist()
        lt = letter.tolist()
        queue = deque()
        for q in range(n):
            d[q][q] = 0
            queue.append((q, q))
        while queue:
            p, q = queue.popleft()
            nd = d[p][q] + 1
            for a in range(k):
                ip, iq = inv[a][p], inv[a][q]
                for x in ip:
                    dx, lx = d[x], lt[x]
                    for y in iq:
                        if dx[y] < 0:
                            dx[y] = nd
                            d[y][x] = nd
                            lx[y] = a
                            lt[y][x] = a
                            queue.append((x, y))
        return np.array(d, dtype=np.int64), np.array(lt, dtype=np.int64)

    def is_synchronizing(self) -> bool:
        if self.n == 1:
            return True
        dist, _ = self.pair_merge_table()
        return bool((dist >= 0).all())

    # -- text format ------------------------------------------------------

    def to_text(self, comment: str | None = None) -> str:
        lines = []
        if comment:
            lines.extend(f"# {c}" for c in comment.splitlines())
        lines.append(f"{self.n} {self.k}")
        lines.extend(" ".join(str(p) for p in row) for row in self.delta)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Automaton":
        tokens = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.append(line.split())
        if not tokens:
            raise AutomatonFormatError("empty automaton description")
        head = tokens[0]
        if len(head) != 2:
            raise AutomatonFormatError("first line must be 'n k'")
        try:
            n, k = int(head[0]), int(head[1])
            rows = [[int(x) for x in row] for row in tokens[1:]]
        except ValueError as exc:
            raise AutomatonFormatError(str(exc)) from None
        if n < 1 or k < 1:
            raise AutomatonFormatError("n and k must be positive")
        if len(rows) != n:
            raise AutomatonFormatError(f"expected {n} transition rows, got {len(rows)}")
        try:
            return cls(rows)
        except ValueError as exc:
            raise AutomatonFormatError(str(exc)) from None


def random_automaton(n: int, k: int, seed: int) -> Automaton:
    """Uniformly random complete automaton; PCG64 stream seeded by ``seed``."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    rng = np.random.Generator(np.random.PCG64(seed))
    return Automaton(rng.integers(0, n, size=(n, k)).tolist())


def cerny_automaton(n: int) -> Automaton:
    """Letter 0 rotates the states, letter 1 sends 0 to 1 and fixes the rest."""
    if n < 2:
        raise ValueError("Cerny automaton needs n >= 2")
    return Automaton([((q + 1) % n, 1 if q == 0 else q) for q in range(n)])
