"""Byte accounting for the exact search.

The ledger does not measure the interpreter; it charges every stored state
set ``ceil(n/64)`` machine words plus one pointer, every list a fixed header
and every trie node a fixed record, and refuses any charge that would push
the total past the budget.
"""
from __future__ import annotations

from .cost import OutOfMemory

WORD = 8
LIST_OVERHEAD = 64
NODE_BYTES = 48
DEFAULT_BUDGET = 4 << 30


class MemoryLedger:
    def __init__(self, budget: int, n: int):
        if budget <= 0:
            raise ValueError("memory budget must be positive")
        self.budget = int(budget)
        self.set_bytes = WORD * -(-n // 64) + WORD
        self.used = 0
        self.peak = 0

    def list_bytes(self, count: int) -> int:
        return LIST_OVERHEAD + count * self.set_bytes

    def trie_bytes(self, sets: int, nodes: int) -> int:
        return self.list_bytes(sets) + nodes * NODE_BYTES

    @property
    def available(self) -> int:
        return self.budget - self.used

    def fits(self, nbytes: int) -> bool:
        return self.used + nbytes <= self.budget

    def charge(self, nbytes: int) -> None:
        if self.used + nbytes > self.budget:
            raise OutOfMemory(
                f"charge of {nbytes} bytes exceeds budget ({self.used}/{self.budget} used)"
            )
        self.used += nbytes
        if self.used > self.peak:
            self.peak = self.used

    def release(self, nbytes: int) -> None:
        self.used -= nbytes
        assert self.used >= 0, "released more than was charged"
