import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import kr_words, rational_points
from goursat.errors import GeneratorCapExceeded, GoursatError
from goursat.flags import (
    DualSeq,
    GrowthVector,
    derived_flag_dims,
    dual,
    growth_report,
    growth_vector,
    is_goursat,
    murray_regular,
    nonholonomy_degree,
    undual,
)
from goursat.krforms import all_words, build
from goursat.sigtype import beta_sequence, delta_at
from goursat.symcore import Poly, PolyVF


def test_derived_flag_examples():
    assert derived_flag_dims(build("R0")) == [2, 3, 4]
    assert derived_flag_dims(build("R0.S")) == [2, 3, 4, 5]
    assert derived_flag_dims(build(""), (Fraction(1, 3), -2, 5)) == [2, 3]


def test_generator_cap():
    with pytest.raises(GeneratorCapExceeded):
        derived_flag_dims(build("R0.S.S.R0"), cap=5)


@pytest.mark.parametrize(
    "word, growth",
    [
        ("R0.S", (2, 3, 4, 4, 5)),
        ("R0.S.S.R1", (2, 3, 4, 5, 5, 6, 6, 6, 7)),
        ("R0.S.S.R0", (2, 3, 4, 5, 5, 5, 6, 6, 6, 6, 7)),
    ],
)
def test_growth_examples(word, growth):
    assert growth_vector(build(word)) == growth


def test_growth_cap_exceeded():
    with pytest.raises(GeneratorCapExceeded):
        growth_vector(build("R0.S.S.R0"), cap_N=3)


def test_non_bracket_generating_pair():
    with pytest.raises(GoursatError):
        growth_vector([PolyVF.partial(3, 3), PolyVF.partial(3, 1)])


@pytest.mark.parametrize(
    "growth, expected",
    [
        ((2, 3, 4, 5, 6), (1, 2, 3, 4, 5)),
        ((2, 3, 4, 5, 5, 5, 6), (1, 2, 3, 4, 7)),
        ((2, 3, 4, 4, 5, 5, 5, 6), (1, 2, 3, 5, 8)),
    ],
)
def test_dual_examples(growth, expected):
    assert dual(growth) == expected
    assert undual(expected, len(expected) + 1) == growth


def test_invalid_sequences():
    with pytest.raises(ValueError):
        GrowthVector((2, 4))
    with pytest.raises(ValueError):
        GrowthVector((2, 3, 3))
    with pytest.raises(ValueError):
        DualSeq((1, 3, 3))
    with pytest.raises(ValueError):
        DualSeq((2, 3))
    with pytest.raises(ValueError):
        undual((1, 2, 3), 5)


def test_nonholonomy_degree_examples():
    assert nonholonomy_degree(build("R0")) == 2
    assert nonholonomy_degree(build("R0.S")) == 4
    assert nonholonomy_degree(build("")) == 1


def test_murray_examples():
    assert murray_regular(build("R0.R0"))
    assert not murray_regular(build("R0.S"))
    assert murray_regular(build("R0.S"), (0, 0, 0, 0, 1))


def test_goursat_examples():
    rng = random.Random(11)
    points = lambda n: [tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)) for _ in range(20)]
    for word in ("R0", "R0.S", "R0.S.R1", "R0.R0.S.R0.R1"):
        sys = build(word)
        assert is_goursat(sys, points(sys.dim))
    report = is_goursat([PolyVF.partial(3, 3), PolyVF.partial(3, 1)], [(0, 0, 0)])
    assert not report and report.first_failure[1][:2] == [2, 2]


def test_generic_pair_on_five_dims_is_not_goursat():
    rng = random.Random(5)
    n = 5

    def linear():
        return Poly.const(n, rng.randint(-3, 3)) + sum(
            (Poly.var(n, k) * rng.randint(-3, 3) for k in range(1, n + 1)), Poly.zero(n)
        )

    f = PolyVF([linear() for _ in range(n)])
    g = PolyVF([linear() for _ in range(n)])
    report = is_goursat([f, g], [(0,) * n])
    assert not report
    assert derived_flag_dims([f, g], maxlevel=2)[2] == 5


def test_report_shape():
    assert growth_report("R0.S") == {
        "word": "R0.S",
        "point": ["0"] * 5,
        "growth": [2, 3, 4, 4, 5],
        "dual": [1, 2, 3, 5],
        "degree": 4,
        "murray_regular": False,
    }


@st.composite
def dual_sequences(draw):
    n = draw(st.integers(2, 14))
    gaps = [draw(st.integers(1, 4)) for _ in range(n - 2)]
    seq = [1]
    for g in gaps:
        seq.append(seq[-1] + g)
    return tuple(seq), n


@given(dual_sequences())
def test_dual_round_trip(data):
    s, n = data
    assert dual(undual(s, n)) == s
    d = undual(s, n)
    assert undual(dual(d), n) == d


@pytest.mark.parametrize("length", range(1, 6))
def test_growth_follows_sigtype_at_random_points(length):
    rng = random.Random(length)
    for word in all_words(length):
        sys = build(word)
        for _ in range(5):
            p = tuple(Fraction(rng.choice([0, 0, 1, -1, 2, Fraction(1, 2)])) for _ in range(sys.dim))
            expected = undual(beta_sequence(delta_at(word, p), sys.dim), sys.dim)
            assert growth_vector(sys, p) == expected, (word.text(), p)


@given(kr_words(1, 3), st.data())
def test_lie_flag_inside_derived_flag(word, data):
    sys = build(word)
    p = data.draw(rational_points(sys.dim))
    growth = list(growth_vector(sys, p))
    derived = derived_flag_dims(sys, p)
    for i, d in enumerate(derived):
        assert growth[min(i, len(growth) - 1)] <= d


@given(kr_words(1, 3), st.fractions(min_value=-3, max_value=3).filter(lambda c: c != 0),
       st.fractions(min_value=-3, max_value=3).filter(lambda c: c != 0))
def test_growth_invariant_under_relabel_and_scaling(word, a, b):
    sys = build(word)
    assert growth_vector([sys.f2 * b, sys.f1 * a]) == growth_vector(sys)
