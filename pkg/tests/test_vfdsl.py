from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import kr_words, poly_fields, polys
from goursat.errors import DslSyntaxError, GoursatError
from goursat.krforms import KRWord, Regular, Singular, build, r9_word
from goursat.sigtype import STWord, jacquard_enum
from goursat.symcore import Poly, PolyVF, RatFn, RatVF, evaluate
from goursat.vfdsl import (
    FIXTURES,
    load_fixture,
    parse_document,
    parse_kr_word,
    parse_point,
    parse_scalar,
    parse_st_word,
    parse_vector_field,
    parse_vector_fields,
    print_canonical,
)


def test_parse_partial():
    assert parse_vector_field("dim 4; d/dx4") == build("R0").f1


def test_parse_engel_field():
    assert parse_vector_field("dim 4; x4*d/dx3 + x3*d/dx2 + d/dx1") == build("R0").f2


def test_parse_rational_field():
    f = parse_vector_field("dim 3; (1/x1)*d/dx2")
    assert isinstance(f, RatVF)
    assert f.components[1] == RatFn(Poly.const(3, 1), Poly.var(3, 1))
    assert f.components[0].is_zero() and f.components[2].is_zero()


def test_parse_powers_and_unary_minus():
    f = parse_vector_field("dim 2; -x1^2*d/dx1 + 3/4*(x1 - x2)*d/dx2")
    x1, x2 = Poly.var(2, 1), Poly.var(2, 2)
    assert f == PolyVF([-(x1**2), (x1 - x2).scale(Fraction(3, 4))])


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("dim 3; x4*d/dx1", 1, 8),
        ("dim 3; (1/0)*d/dx1", 1, 10),
        ("dim 3;\n x1 * * d/dx1", 2, 7),
    ],
)
def test_syntax_errors_carry_position(text, line, column):
    with pytest.raises(DslSyntaxError) as info:
        parse_vector_field(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_missing_header_is_an_error():
    with pytest.raises(DslSyntaxError):
        parse_vector_field("x1*d/dx1")


def test_parse_kr_words():
    assert parse_kr_word("R0") == KRWord((Regular(Fraction(0)),))
    assert parse_kr_word("R0.S") == KRWord((Regular(Fraction(0)), Singular()))
    assert parse_kr_word("") == KRWord(())
    assert parse_kr_word("R-3/2.S").steps[0] == Regular(Fraction(-3, 2))
    with pytest.raises(DslSyntaxError):
        parse_kr_word("R0.Q")
    with pytest.raises(DslSyntaxError):
        parse_kr_word("R1/0")


def test_nine_dim_word_reproduces_kappa2_at_origin():
    word = parse_kr_word("R0.R0.S.R0.R1.R0")
    assert word == r9_word(0)
    expected = parse_vector_field(
        "dim 9; x9*d/dx8 + (x8 + 1)*d/dx7 + x7*d/dx6 + d/dx5"
        " + x6*(x5*d/dx4 + x4*d/dx3 + x3*d/dx2 + d/dx1)"
    )
    assert build(word).f2 == expected
    assert evaluate(expected, [0] * 9) == tuple(Fraction(int(k in (5, 7))) for k in range(1, 10))


def test_print_canonical_examples():
    assert print_canonical(build("R0").f2) == "dim 4; x4*d/dx3 + x3*d/dx2 + d/dx1"
    assert print_canonical(KRWord((Regular(Fraction(1)),))) == "R1"
    assert print_canonical(STWord((0, 1, 2))) == "a0.a1.a2"
    assert print_canonical((Fraction(1, 2), Fraction(-3))) == "(1/2, -3)"


def test_parse_st_word_and_point():
    assert parse_st_word("a0.a1.a2") == STWord((0, 1, 2))
    assert parse_point("(1/2, -3, 0)") == (Fraction(1, 2), Fraction(-3), Fraction(0))
    assert parse_point("dim 2; (1, 2)") == (1, 2)
    with pytest.raises(GoursatError):
        parse_point("dim 3; (1, 2)")
    with pytest.raises(DslSyntaxError):
        parse_st_word("a0.b1")


def test_document_kind_detection():
    assert parse_document("dim 4; d/dx4").kind == "vectorfield"
    assert parse_document("R0.S").kind == "krword"
    assert parse_document("a0.a1").kind == "stword"
    assert parse_document("(1, 2)").kind == "point"


@pytest.mark.parametrize("name", [n for n in FIXTURES if n != "manipulator"])
def test_kr_fixtures_match_builder(name):
    from importlib import resources

    text = resources.files("goursat").joinpath("fixtures", f"{name}.vf").read_text()
    word_line = next(line for line in text.splitlines() if line.startswith("# word:"))
    sys = build(word_line.split(":", 1)[1].strip())
    assert load_fixture(name) == [sys.f1, sys.f2]
    assert parse_vector_fields("\n".join(print_canonical(f) for f in sys.fields)) == [sys.f1, sys.f2]


def test_manipulator_fixture_parses_to_trig_fields():
    from goursat.trailer import TrigVF

    fields = load_fixture("manipulator")
    assert len(fields) == 2
    assert all(isinstance(f, TrigVF) for f in fields)
    assert parse_vector_field(print_canonical(fields[1])) == fields[1]


def test_unknown_fixture():
    with pytest.raises(GoursatError):
        load_fixture("nothing")


@given(kr_words(0, 6))
def test_kr_word_round_trip(word):
    assert parse_kr_word(print_canonical(word)) == word


@given(st.integers(0, 6).flatmap(lambda n: st.sampled_from(jacquard_enum(n))))
def test_st_word_round_trip(word):
    assert parse_st_word(print_canonical(word)) == word


@given(st.integers(1, 5).flatmap(lambda n: poly_fields(n, 3)))
def test_polynomial_field_round_trip(field):
    text = print_canonical(field)
    assert parse_vector_field(text) == field
    assert print_canonical(parse_vector_field(text)) == text


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(polys(n), polys(n).filter(lambda p: not p.is_zero()))))
def test_rational_function_round_trip(pair):
    r = RatFn(*pair)
    assert RatFn.of(parse_scalar(print_canonical(r))) == r


@given(st.integers(1, 3).flatmap(lambda n: st.lists(polys(n).filter(lambda p: not p.is_zero()), min_size=n, max_size=n)))
def test_rational_field_round_trip(dens):
    n = len(dens)
    field = RatVF([RatFn(Poly.var(n, 1) + 1, d) for d in dens])
    assert parse_vector_field(print_canonical(field)) == field
