import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from resetword import (
    Automaton,
    AutomatonFormatError,
    cerny_automaton,
    power_set_bfs_oracle,
    random_automaton,
)
from resetword.automaton import PRNG_NAME

from conftest import all_to_one, permutation_automaton


@st.composite
def automata(draw, max_n=9, max_k=3):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_k))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=k, max_size=k), min_size=n, max_size=n))
    return Automaton(rows)


def naive_image(aut, states, a):
    return {aut.delta[q][a] for q in states}


def naive_preimage(aut, states, a):
    return {q for q in range(aut.n) if aut.delta[q][a] in states}


def test_cerny_shape():
    aut = cerny_automaton(5)
    assert aut.n == 5 and aut.k == 2
    assert [row[0] for row in aut.delta] == [1, 2, 3, 4, 0]
    assert [row[1] for row in aut.delta] == [1, 1, 2, 3, 4]


def test_cerny_threshold_small():
    for n in range(2, 8):
        assert power_set_bfs_oracle(cerny_automaton(n)) == (n - 1) ** 2


def test_random_deterministic():
    assert random_automaton(30, 3, 99).delta == random_automaton(30, 3, 99).delta
    assert random_automaton(30, 3, 99).delta != random_automaton(30, 3, 100).delta
    assert PRNG_NAME


def test_random_entries_in_range_and_spread():
    aut = random_automaton(50, 4, 1)
    vals = np.array(aut.delta)
    assert vals.min() >= 0 and vals.max() < 50
    assert len(np.unique(vals)) > 25


def test_random_mostly_synchronizing():
    sync = sum(random_automaton(50, 2, s).is_synchronizing() for s in range(1000))
    assert sync >= 950


def test_set_helpers():
    aut = random_automaton(10, 2, 0)
    s = aut.to_set([0, 3, 9])
    assert aut.states(s) == [0, 3, 9]
    assert s == aut.bit(0) | aut.bit(3) | aut.bit(9)
    assert aut.bit(0) == 1 << 9
    assert aut.complement(s) | s == aut.full
    assert [aut.states(s) for s in aut.singletons()] == [[q] for q in range(10)]
    # lexicographic order: sets containing state 0 come last
    assert aut.to_set([1, 2]) < aut.to_set([0])


@given(automata(), st.data())
def test_image_and_preimage_match_definitions(aut, data):
    states = data.draw(st.sets(st.integers(0, aut.n - 1)))
    s = aut.to_set(states)
    for a in range(aut.k):
        assert set(aut.states(aut.image(s, a))) == naive_image(aut, states, a)
        assert set(aut.states(aut.preimage(s, a))) == naive_preimage(aut, states, a)


@given(st.integers(1, 40), st.integers(1, 3), st.integers(0, 2**32), st.integers(0, 600))
def test_batched_actions_match_single(n, k, seed, count):
    aut = random_automaton(n, k, seed)
    rs = np.random.default_rng(seed)
    sets = [int(x) for x in rs.integers(0, 2**n, size=count, dtype=np.uint64)] if n < 64 else []
    assert aut.images(sets) == [aut.image(s, a) for s in sets for a in range(k)]
    assert aut.preimages(sets) == [aut.preimage(s, a) for s in sets for a in range(k)]


@given(automata())
def test_text_round_trip(aut):
    again = Automaton.from_text(aut.to_text("a comment\nover two lines"))
    assert again == aut and hash(again) == hash(aut)


@pytest.mark.parametrize(
    "text",
    ["", "2\n0 1\n", "2 1\n0\n", "2 1\n0\n5\n", "2 1\n0\nx\n", "0 1\n", "2 2\n0 1\n1\n"],
)
def test_bad_text_is_format_error(text):
    with pytest.raises(AutomatonFormatError):
        Automaton.from_text(text)


def test_constructor_validation():
    with pytest.raises(ValueError):
        Automaton([])
    with pytest.raises(ValueError):
        Automaton([[0, 1], [0]])
    with pytest.raises(ValueError):
        Automaton([[2], [0]])


def test_reset_word():
    aut = cerny_automaton(4)
    assert aut.is_reset_word([1, 0, 0, 0, 1, 0, 0, 0, 1])
    assert not aut.is_reset_word([1, 0, 0, 0])
    assert all_to_one(5).is_reset_word([0])


@given(automata(max_n=8))
def test_is_synchronizing_agrees_with_power_set(aut):
    try:
        power_set_bfs_oracle(aut)
        expected = True
    except ValueError:
        expected = False
    assert aut.is_synchronizing() == expected


@given(automata(max_n=7))
def test_pair_table_merges(aut):
    dist, letter = aut.pair_merge_table()
    for p in range(aut.n):
        for q in range(aut.n):
            if dist[p, q] < 0:
                continue
            x, y, steps = p, q, 0
            while x != y:
                a = letter[x, y]
                x, y = aut.delta[x][a], aut.delta[y][a]
                steps += 1
            assert steps == dist[p, q]


def test_permutation_not_synchronizing():
    assert not permutation_automaton(4).is_synchronizing()
