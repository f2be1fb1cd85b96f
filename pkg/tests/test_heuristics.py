import pytest
from hypothesis import given
from hypothesis import strategies as st

from resetword import (
    NotSynchronizingError,
    adaptive_upper_bound,
    beam_ibfs,
    cerny_automaton,
    eppstein,
    power_set_bfs_oracle,
    random_automaton,
)
from resetword import heuristics
from resetword.heuristics import DEFAULT_MAX_BEAM, estimated_exact_sets

from conftest import all_to_one, permutation_automaton


@given(st.integers(2, 11), st.integers(1, 3), st.integers(0, 2**32))
def test_heuristics_are_sound(n, k, seed):
    aut = random_automaton(n, k, seed)
    if not aut.is_synchronizing():
        with pytest.raises(NotSynchronizingError):
            eppstein(aut)
        return
    exact = power_set_bfs_oracle(aut)
    for res in (eppstein(aut), adaptive_upper_bound(aut), beam_ibfs(aut, 4)):
        if res is None:
            continue
        assert aut.is_reset_word(res.word)
        assert res.length >= exact
    assert beam_ibfs(aut, 2 ** n).length == exact


def test_all_to_one():
    aut = all_to_one(7, 2)
    assert eppstein(aut).length == 1
    assert beam_ibfs(aut, 1).length == 1
    assert adaptive_upper_bound(aut).length == 1


def test_beam_on_cerny():
    assert beam_ibfs(cerny_automaton(4), 16).length == 9
    assert beam_ibfs(cerny_automaton(4), 16).word == beam_ibfs(cerny_automaton(4), 16).word


def test_beam_failure_is_none():
    assert beam_ibfs(permutation_automaton(4), 8) is None
    assert beam_ibfs(cerny_automaton(6), 50, max_length=10) is None
    with pytest.raises(ValueError):
        beam_ibfs(cerny_automaton(4), 0)


def test_adaptive_beats_eppstein_on_average():
    total_e = total_a = 0
    for seed in range(10):
        aut = random_automaton(40, 2, seed)
        if aut.is_synchronizing():
            total_e += eppstein(aut).length
            total_a += adaptive_upper_bound(aut).length
    assert total_a <= total_e


def test_adaptive_respects_memory_cap():
    aut = random_automaton(60, 2, 1)
    assert aut.is_reset_word(adaptive_upper_bound(aut, memory=1, max_beam=10).word)


def test_adaptive_beam_is_capped_by_default(monkeypatch):
    # Eppstein gives 53 here (exact is 33), so the estimate alone would ask for millions of sets
    aut = random_automaton(100, 2, 442426930455031841)
    sizes = []
    real = heuristics.beam_ibfs

    def spy(a, beam, **kw):
        sizes.append(beam)
        return real(a, beam, **kw)

    monkeypatch.setattr(heuristics, "beam_ibfs", spy)
    res = adaptive_upper_bound(aut, memory=4 << 30)
    assert aut.is_reset_word(res.word)
    assert max(sizes) == DEFAULT_MAX_BEAM


def test_estimate_grows_with_bound():
    assert estimated_exact_sets(10, 2, 20) > estimated_exact_sets(10, 2, 10)


def test_single_state():
    aut = all_to_one(1)
    assert eppstein(aut).length == 0 and beam_ibfs(aut, 3).length == 0


def test_adaptive_close_to_exact_at_n100():
    from resetword import solve_exact

    bounds, exact = [], []
    for seed in range(12):
        aut = random_automaton(100, 2, seed)
        if not aut.is_synchronizing():
            continue
        ub = adaptive_upper_bound(aut)
        bounds.append(ub.length)
        exact.append(solve_exact(aut, upper_bound=ub, check_synchronizing=False).threshold)
    assert sum(bounds) <= 1.2 * sum(exact)
    assert all(b >= e for b, e in zip(bounds, exact))
