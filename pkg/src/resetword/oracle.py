"""Plain breadth-first search in the power automaton; the ground truth for tests."""
from __future__ import annotations

from .automaton import Automaton, NotSynchronizingError

MAX_ORACLE_STATES = 20


def power_set_bfs_oracle(aut: Automaton, max_states: int = MAX_ORACLE_STATES) -> int:
    """Length of a shortest path from Q to a singleton in the power automaton."""
    if aut.n > max_states:
        raise ValueError(f"oracle limited to n <= {max_states}, got n={aut.n}")
    if aut.n == 1:
        return 0
    seen = {aut.full}
    frontier = [aut.full]
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for s in aut.images(frontier):
            if s in seen:
                continue
            if s.bit_count() == 1:
                return depth
            seen.add(s)
            nxt.append(s)
        frontier = nxt
    raise NotSynchronizingError("automaton is not synchronizing")
