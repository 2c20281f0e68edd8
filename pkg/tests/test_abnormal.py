import math
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import kr_words
from goursat.abnormal import (
    abnormal_cone,
    characteristic_basis,
    characteristic_check,
    characteristic_fields,
    cone_report,
    derived_generators,
    is_rigid_direction,
    l_locus,
    singular_locus,
    trailer_rigid_classify,
)
from goursat.errors import GoursatError
from goursat.flags import derived_flag_generators
from goursat.krforms import all_words, build
from goursat.symcore import PolyVF, bareiss_rank, evaluate, lie_bracket, rank_at
from goursat.trailer import TrailerConfig

C7_WORDS = {0: "R0.S.S.R0", 1: "R0.S.S.R1"}


def test_characteristic_bases():
    assert characteristic_basis("R0.S.S.R0", 0) == [7]
    assert characteristic_basis("R0.S.S.R0", 1) == [7, 6]
    assert len(characteristic_basis("R0.S.S.R0", 3)) == 4
    with pytest.raises(GoursatError):
        characteristic_basis("R0.S.S.R0", 4)


@pytest.mark.parametrize("c7", [0, 1])
def test_dim7_cones_and_loci(c7):
    word = C7_WORDS[c7]
    a0 = "(d/dx7) U (d/dx5)" if c7 == 0 else "(d/dx7)"
    assert abnormal_cone(word, 0).text() == a0
    assert abnormal_cone(word, 1).text() == "(d/dx7, d/dx6) U (d/dx7, d/dx5)"
    assert abnormal_cone(word, 2).text() == "(d/dx7, d/dx6, d/dx5) U (d/dx7, d/dx6, d/dx4)"
    assert singular_locus(word, 0).text() == "{x6x5=0}"
    assert singular_locus(word, 2).text() == "{x5=0}"
    l0 = l_locus(word, 0)
    if c7 == 0:
        assert l0.text() == "{x7=x6=0}"
    else:
        assert l0 is None


def test_cone_at_a_point_with_x6_zero():
    cone = abnormal_cone("R0.S.S.R0", 1, (1, 2, 3, 4, 0, 0, 5))
    assert cone.text() == "(d/dx7, d/dx6) U (d/dx7, d/dx5)"
    # off L_0 the level-0 cone is just C_0
    assert abnormal_cone("R0.S.S.R0", 0, (1, 2, 3, 4, 0, 0, 5)).text() == "(d/dx7)"


def test_degenerate_levels():
    word = "R0.S.S.R0"
    assert abnormal_cone(word, 5).kind == "empty"
    assert not abnormal_cone(word, 5).contains((0,) * 7)
    assert abnormal_cone(word, 4).text() == "(d/dx7, d/dx6, d/dx5, d/dx4)"
    assert abnormal_cone(word, 3).text() == "(d/dx7, d/dx6, d/dx5, d/dx4)"
    contact = abnormal_cone("", 0)
    assert contact.kind == "zero" and contact.contains((0, 0, 0))
    with pytest.raises(GoursatError):
        abnormal_cone(word, 6)


def test_loci_outside_range():
    assert singular_locus("R0.S", 1) is None
    assert l_locus("R0.R0", 0) is None
    assert singular_locus("R0.R0", 0) is None


def test_weak_determination_pair():
    a, b = "R0.R0.R0", "R0.S.R1"
    assert abnormal_cone(a, 0).text() == abnormal_cone(b, 0).text() == "(d/dx6)"
    from goursat.sigtype import delta_of_word

    assert delta_of_word(a) != delta_of_word(b)


def test_rigid_directions():
    for word in ("R0.S", "R0.R0", "R0.S.R1"):
        n = build(word).dim
        e_n = tuple(int(k == n) for k in range(1, n + 1))
        assert is_rigid_direction(word, None, e_n)
        assert "C0" in is_rigid_direction(word, None, e_n).reason
    k2 = evaluate(build("R0.S").f2, [0] * 5)
    verdict = is_rigid_direction("R0.S", None, k2)
    assert verdict.rigid and verdict.j == 0
    assert not is_rigid_direction("R0.R0", None, evaluate(build("R0.R0").f2, [0] * 5))
    with pytest.raises(GoursatError):
        is_rigid_direction("R0.R0", None, (0, 0, 0, 1, 0))
    with pytest.raises(GoursatError):
        is_rigid_direction("R0.R0", None, (0,) * 5)


def test_rigid_direction_matches_direct_basis():
    # the second branch of A^(0) at the center of R0.S is spanned by d/dx4
    cone = abnormal_cone("R0.S", 0)
    assert cone.kind == "union"
    assert cone.bases[1] == ((0, 0, 0, 1, 0),)


def test_trailer_rigid_classification():
    two = trailer_rigid_classify(TrailerConfig(0, 0, (0.3, 0.5, 0.5 + math.pi / 2)))
    assert two.generators == [(2,), (2, 1)]
    assert two.to_json()["generators"] == ["d/dth2", "d/dth2 + d/dth1"]
    generic = trailer_rigid_classify(TrailerConfig(0, 0, (0.3, 0.5, 0.9)))
    assert generic.generators == [(2,)]
    three = trailer_rigid_classify(TrailerConfig(0, 0, (0.3, 0.5, 0.5 + math.pi / 2, 0.5 + 3 * math.pi / 4)))
    assert three.j == 1


def test_report_shape():
    report = cone_report("R0.S.S.R0", 0)
    assert set(report) == {"word", "level", "point", "cone", "K_equation", "L_subspace"}
    assert report["cone"]["kind"] == "union"
    assert report["cone"]["text"] == ["(d/dx7)", "(d/dx5)"]


def _points(word, rng, k=10):
    n = build(word).dim
    return [tuple(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(n)) for _ in range(k)]


@pytest.mark.parametrize("length", range(1, 5))
def test_characteristic_property(length):
    rng = random.Random(length)
    for word in all_words(length):
        points = _points(word, rng)
        for i in range(0, word.dim - 3):
            report = characteristic_check(word, i, points)
            assert report.passed, report


def test_characteristic_check_rejects_a_wrong_direction():
    # d/dx_{n-1} alone is inside D^(1) but is not characteristic for it
    word = "R0.R0"
    flag = derived_flag_generators(build(word), 1)
    wrong = PolyVF.partial(5, 4)
    bad = [lie_bracket(wrong, g) for g in flag[1]]
    p = (0,) * 5
    assert any(rank_at(flag[1] + [b], p) > rank_at(flag[1], p) for b in bad)


def test_closed_form_flag_matches_brackets():
    for word in ("R0.S", "R0.S.R1", "R0.R0.S"):
        n = build(word).dim
        flag = derived_flag_generators(build(word), n - 2)
        for i in range(n - 1):
            p = (0,) * n
            assert rank_at(flag[i] + derived_generators(word, i), p) == rank_at(derived_generators(word, i), p) == i + 2


@given(kr_words(2, 4), st.data())
def test_cone_coherent_with_l_locus(word, data):
    n = word.dim
    q = data.draw(st.tuples(*[st.sampled_from([Fraction(0), Fraction(1, 3)]) for _ in range(n)]))
    for i in range(0, n - 4):
        cone = abnormal_cone(word, i, q)
        locus = l_locus(word, i)
        on_locus = locus is not None and locus.contains(q)
        assert (cone.kind == "union") == on_locus, (word.text(), i, q)


@given(kr_words(2, 4))
def test_union_branches(word):
    n = word.dim
    for i in range(0, n - 4):
        cone = abnormal_cone(word, i)
        if cone.kind != "union":
            continue
        c_basis, a_basis = cone.bases
        assert len(a_basis) == i + 1
        both = bareiss_rank(list(c_basis) + list(a_basis))
        assert len(c_basis) + len(a_basis) - both == i
