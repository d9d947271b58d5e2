import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from nurs.perm import Permutation
from nurs.rng import make_rng

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def permutations(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    return Permutation([v + 1 for v in draw(st.permutations(range(n)))])


@st.composite
def permutation_pairs(draw, min_n=1, max_n=12):
    n = draw(st.integers(min_n, max_n))
    a = draw(st.permutations(range(n)))
    b = draw(st.permutations(range(n)))
    return Permutation([v + 1 for v in a]), Permutation([v + 1 for v in b])


@pytest.fixture
def rng():
    return make_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
