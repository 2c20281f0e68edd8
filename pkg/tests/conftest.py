from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from goursat.krforms import KRWord, Regular, Singular
from goursat.symcore import Poly, PolyVF

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

small_rationals = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def polys(draw, nvars: int, max_degree: int = 2, max_terms: int = 4):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        mono = tuple(draw(st.integers(0, max_degree)) for _ in range(nvars))
        if sum(mono) <= max_degree:
            terms[mono] = draw(small_rationals.filter(lambda c: c != 0))
    return Poly(nvars, terms)


@st.composite
def poly_fields(draw, dim: int, max_degree: int = 2):
    return PolyVF([draw(polys(dim, max_degree, 3)) for _ in range(dim)])


@st.composite
def kr_words(draw, min_len: int = 0, max_len: int = 4):
    n = draw(st.integers(min_len, max_len))
    steps = []
    for _ in range(n):
        if draw(st.booleans()):
            steps.append(Singular())
        else:
            steps.append(Regular(draw(st.sampled_from([Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2)]))))
    return KRWord(tuple(steps))


@st.composite
def rational_points(draw, dim: int):
    return tuple(draw(small_rationals) for _ in range(dim))


@pytest.fixture
def engel():
    from goursat.krforms import build

    return build("R0")


# one pass/fail line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
