import random

import pytest
from hypothesis import HealthCheck, settings

from resetword import Automaton

settings.register_profile(
    "default",
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.function_scoped_fixture],
)
settings.load_profile("default")

# filled by test_acceptance, one line per criterion
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])


def pairwise_superset_mask(a, b, proper=False):
    """Reference: which members of b contain some member of a."""
    out = []
    for y in b:
        out.append(any(x & y == x and (not proper or x != y) for x in a))
    return out


def all_to_one(n: int, k: int = 1) -> Automaton:
    return Automaton([[0] * k for _ in range(n)])


def permutation_automaton(n: int) -> Automaton:
    return Automaton([[(q + 1) % n, q] for q in range(n)])


@pytest.fixture
def rng():
    return random.Random(12345)
