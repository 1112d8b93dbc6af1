import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sunprod.poly import NuSeries, Polynomial, Rational, indices_up_to

settings.register_profile(
    "exact", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("exact")

rationals = st.builds(
    lambda p, q: Rational(p, q),
    st.integers(-6, 6).filter(bool),
    st.integers(1, 4),
)


def polynomials(dim, max_degree=3, max_terms=4):
    pool = indices_up_to(dim, max_degree)
    return st.dictionaries(st.sampled_from(pool), rationals, max_size=max_terms).map(
        lambda d: Polynomial(dim, d))


def series(dim, order, max_degree=2):
    return st.lists(polynomials(dim, max_degree, 3), min_size=order + 1, max_size=order + 1).map(
        lambda cs: NuSeries(dim, order, cs))


@pytest.fixture
def rng():
    return random.Random(20240601)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
