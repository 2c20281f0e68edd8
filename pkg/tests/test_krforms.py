from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import kr_words
from goursat.errors import DimensionMismatch, GoursatError
from goursat.flags import derived_flag_dims, is_goursat
from goursat.krforms import (
    KRWord,
    Regular,
    Singular,
    all_words,
    build,
    catalog,
    explicit_form,
    lift,
    normalize_first_step,
    pfaff_darboux,
    prolong_regular,
    prolong_singular,
    r9_word,
    r11_word,
    weber_extend,
)
from goursat.symcore import PolyVF
from goursat.vfdsl import parse_vector_field


def field(text: str) -> PolyVF:
    return parse_vector_field(text)


R5A = "dim 5; x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1"
R5B = "dim 5; d/dx4 + x5*(x4*d/dx3 + x3*d/dx2 + d/dx1)"
R6 = {
    "R6a": "dim 6; x6*d/dx5 + x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1",
    "R6b": "dim 6; d/dx5 + x6*(x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1)",
    "R6c": "dim 6; x6*d/dx5 + d/dx4 + x5*(x4*d/dx3 + x3*d/dx2 + d/dx1)",
    "R6d": "dim 6; (x6 + 1)*d/dx5 + d/dx4 + x5*(x4*d/dx3 + x3*d/dx2 + d/dx1)",
    "R6e": "dim 6; d/dx5 + x6*(d/dx4 + x5*(x4*d/dx3 + x3*d/dx2 + d/dx1))",
}


def test_lift_examples():
    k3 = pfaff_darboux().f2
    assert lift(k3, 4) == field("dim 4; x3*d/dx2 + d/dx1")
    assert lift(k3, 3) == k3
    assert lift(lift(k3, 4), 5) == lift(k3, 5)
    with pytest.raises(DimensionMismatch):
        lift(lift(k3, 4), 3)


def test_regular_prolongations():
    engel = prolong_regular(pfaff_darboux(), 0)
    assert engel.f1 == field("dim 4; d/dx4")
    assert engel.f2 == field("dim 4; x4*d/dx3 + x3*d/dx2 + d/dx1")
    assert prolong_regular(engel, 0).f2 == field(R5A)
    r5b = prolong_singular(engel)
    assert prolong_regular(r5b, 1).f2 == field(R6["R6d"])


def test_singular_prolongations():
    engel = build("R0")
    assert prolong_singular(engel).f2 == field(R5B)
    assert prolong_singular(prolong_singular(engel)).f2 == field(R6["R6e"])
    assert prolong_singular(pfaff_darboux()).f2 == field("dim 4; d/dx3 + x4*(x3*d/dx2 + d/dx1)")


def test_build_examples():
    assert build("") == pfaff_darboux()
    assert build("").f2 == field("dim 3; x3*d/dx2 + d/dx1")
    for c9 in (0, 1):
        assert build(r9_word(c9)).f2 == field(
            f"dim 9; (x9 + {c9})*d/dx8 + (x8 + 1)*d/dx7 + x7*d/dx6 + d/dx5"
            " + x6*(x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1)"
        )
    c = Fraction(-7, 3)
    assert build(r11_word(c)).f2 == field(
        "dim 11; (x11 - 7/3)*d/dx10 + (x10 + 1)*d/dx9 + (x9 + 1)*d/dx8 + x8*d/dx7"
        " + x7*d/dx6 + d/dx5 + x6*(x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1)"
    )


def test_catalog():
    assert [w.text() for _, w in catalog(3)] == [""]
    assert [w.text() for _, w in catalog(4)] == ["R0"]
    assert {w.text() for _, w in catalog(5)} == {"R0.R0", "R0.S"}
    six = dict(catalog(6))
    assert len(six) == 5 and six["R6d"].text() == "R0.S.R1"
    for name, text in R6.items():
        assert build(six[name]).f2 == field(text)
    five = dict(catalog(5))
    assert build(five["R5a"]).f2 == field(R5A)
    assert build(five["R5b"]).f2 == field(R5B)
    with pytest.raises(GoursatError):
        catalog(7)


@pytest.mark.parametrize(
    "word, m, k",
    [("R0", 0, (3, 1)), ("R0.S", 1, (1, 3, 1)), ("R0.R0.S.R0.R1.R0", 1, None)],
)
def test_explicit_form_examples(word, m, k):
    ex = explicit_form(word)
    assert ex.m == m
    if k is not None:
        assert ex.k == k
    assert sum(ex.k) == build(word).dim
    assert ex.expand() == build(word).f2
    assert ex.expand_f1() == build(word).f1


def test_explicit_form_constants_of_nine_dim_word():
    ex = explicit_form(r9_word(1))
    assert ex.k == (4, 4, 1)
    assert sorted(ex.constants.values()) == [1, 1]


def test_explicit_form_normalises_a_singular_first_step():
    ex = explicit_form("S.R0.S")
    assert ex.normalized_from == KRWord.parse("S.R0.S")
    assert ex.word == KRWord.parse("R0.R0.S")
    assert normalize_first_step("S.R1") == KRWord.parse("R0.R1")
    with pytest.raises(GoursatError):
        explicit_form("")


@given(kr_words(1, 6))
def test_explicit_form_expands_to_normal_form(word):
    ex = explicit_form(word)
    assert ex.expand() == build(ex.word).f2
    assert 0 <= ex.m <= ex.n - 4
    assert all(kk >= 1 for kk in ex.k[: ex.m]) and ex.k[ex.m] >= 3 and ex.k[-1] == 1


def test_weber_examples():
    assert weber_extend("", 2) == list(pfaff_darboux().fields)
    fields = weber_extend("R0", 3)
    assert fields[0] == PolyVF.partial(5, 5) and fields[1:] == [lift(f, 5) for f in build("R0").fields]
    assert len(weber_extend("R0.S", 4)) == 4 and weber_extend("R0.S", 4)[0].dim == 7
    with pytest.raises(GoursatError):
        weber_extend("R0", 1)


@pytest.mark.parametrize("word, k", [("R0", 3), ("R0.S", 4), ("R0.R0", 3), ("R0.S.R1", 3)])
def test_weber_flag_grows_by_one(word, k):
    m = build(word).dim
    dims = derived_flag_dims(weber_extend(word, k), maxlevel=m - 2)
    assert dims == [k + i for i in range(m - 1)]


@pytest.mark.parametrize("length", range(0, 7))
def test_every_word_is_goursat_at_the_center(length):
    for word in all_words(length):
        sys = build(word)
        assert derived_flag_dims(sys, maxlevel=sys.dim - 2) == list(range(2, sys.dim + 1)), word.text()


def test_json_export():
    data = build("R0").to_json()
    assert data == {
        "dim": 4,
        "f1": ["0", "0", "0", "1"],
        "f2": ["1", "x3", "x4", "0"],
        "word": "R0",
    }


@given(kr_words(0, 4))
def test_word_text_round_trip_and_dim(word):
    assert KRWord.parse(word.text()) == word
    assert build(word).dim == 3 + len(word)
    assert build(word).f1 == PolyVF.partial(word.dim, word.dim)
