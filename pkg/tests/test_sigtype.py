import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import kr_words
from goursat.abnormal import derived_generators
from goursat.errors import GoursatError
from goursat.flags import growth_vector
from goursat.krforms import all_words, build, r9_word, r11_word
from goursat.sigtype import (
    NoMatch,
    STWord,
    beta,
    beta_sequence,
    delta_at,
    delta_of_word,
    growth_from_sigtype,
    is_jacquard,
    jacquard_count,
    jacquard_enum,
    prefix_criterion,
    sigtype_from_growth,
    sji_locus,
    sji_membership,
)
from goursat.suites import CAPTIONS


def texts(words):
    return {w.text() for w in words}


def test_jacquard_listings():
    assert texts(jacquard_enum(2)) == {"a0.a0", "a0.a1"}
    assert texts(jacquard_enum(3)) == {"a0.a0.a0", "a0.a0.a1", "a0.a1.a0", "a0.a1.a1", "a0.a1.a2"}
    assert jacquard_count(4) == 13


@pytest.mark.parametrize("n", range(2, 13))
def test_jacquard_count_recurrence(n):
    assert jacquard_count(n) == 3 * jacquard_count(n - 1) - jacquard_count(n - 2)
    assert jacquard_count(n) == len(set(jacquard_enum(n)))


@pytest.mark.parametrize("n", range(0, 7))
def test_membership_test_matches_enumeration(n):
    members = {w.letters for w in jacquard_enum(n)}
    for letters in itertools.product(range(n + 1), repeat=n):
        assert is_jacquard(letters) == (letters in members)


@pytest.mark.parametrize(
    "word, sig",
    [
        ("R0.S", "a0.a1"),
        ("R0.S.R0", "a0.a1.a2"),
        ("R0.S.R1", "a0.a1.a0"),
        ("R0.S.R1/2", "a0.a1.a0"),
    ],
)
def test_delta_examples(word, sig):
    assert delta_of_word(word).text() == sig


@pytest.mark.parametrize("c9", [0, 1, -3])
def test_delta_of_nine_dim_family(c9):
    assert delta_of_word(r9_word(c9)).text() == "a0.a0.a1.a2.a0.a0"


def test_delta_of_eleven_dim_family():
    assert delta_of_word(r11_word(5)).text() == "a0.a0.a1.a2.a3.a0.a0.a0"


def test_delta_away_from_the_center():
    assert delta_at("R0.S", (0, 0, 0, 0, 1)).text() == "a0.a0"
    assert delta_at("R0.S.R1", (0, 0, 0, 0, 0, -1)).text() == "a0.a1.a2"
    with pytest.raises(GoursatError):
        delta_of_word("")


def test_beta_examples():
    assert beta(5, "a0.a1.a0") == 4
    assert beta(6, "a0.a1.a0") == 6
    assert beta(6, "a0.a1.a2") == 7
    assert beta(7, "a0.a1.a1.a0") == 9
    assert [beta(i, "a0.a1") for i in (2, 3, 4)] == [1, 2, 3]
    with pytest.raises(GoursatError):
        beta(1, "a0")


def test_beta_against_brute_force_growth():
    from goursat.flags import dual

    assert dual(growth_vector(build("R0.S.S.R1")))[-1] == beta(7, "a0.a1.a1.a0")


@pytest.mark.parametrize(
    "sig, n, growth",
    [
        ("a0.a1", 5, (2, 3, 4, 4, 5)),
        ("a0.a1.a2", 6, (2, 3, 4, 5, 5, 5, 6)),
        ("a0.a1.a1", 6, (2, 3, 4, 4, 5, 5, 5, 6)),
    ],
)
def test_growth_from_sigtype_examples(sig, n, growth):
    assert growth_from_sigtype(sig, n) == growth


def test_growth_from_sigtype_rejects_invalid_words():
    with pytest.raises(GoursatError):
        growth_from_sigtype("a0.a1", 6)


def test_sigtype_from_growth_examples():
    # the three-letter type is the one shown next to this growth vector in the figure captions
    assert sigtype_from_growth((2, 3, 4, 5, 6)).text() == "a0.a0.a0"
    assert sigtype_from_growth((2, 3, 4, 4, 5, 5, 6)).text() == "a0.a0.a1"
    assert sigtype_from_growth((2, 3, 4, 5, 5, 6)).text() == "a0.a1.a0"
    assert sigtype_from_growth((2, 3, 4, 5)).text() == "a0.a0"
    with pytest.raises(NoMatch):
        sigtype_from_growth((2, 3, 3, 4))
    with pytest.raises(NoMatch):
        sigtype_from_growth((2, 3, 4, 4, 4, 5))


@pytest.mark.parametrize("name, word, growth, sig", [c for c in CAPTIONS if c[1]])
def test_caption_pairs(name, word, growth, sig):
    assert growth_from_sigtype(sig) == growth
    assert sigtype_from_growth(growth).text() == sig
    assert delta_of_word(word).text() == sig


def test_sji_examples():
    assert sji_membership("a0.a1", 0, 0)
    assert sji_locus("R0.S", 0, 0).text() == "{x5=0}"
    assert sji_membership("a0.a1.a2", 1, 1)
    locus = sji_locus("R0.S.R0", 1, 1)
    assert locus.text() == "{x6=x5=0}" and locus.codimension == 2
    assert not sji_membership("a0.a0", 0, 0)
    assert sji_locus("R0.R0", 0, 0) is None
    with pytest.raises(GoursatError):
        sji_membership("a0.a1", 1, 0)


@pytest.mark.parametrize("n", range(5, 11))
def test_loci_are_disjoint(n):
    for w in jacquard_enum(n - 3):
        for i in range(0, n - 4):
            hits = [j for j in range(0, n - 4 - i) if sji_membership(w, i + j, j)]
            assert len(hits) <= 1, (w.text(), i, hits)


@pytest.mark.parametrize("length", range(1, 10))
def test_every_jacquard_word_is_realised(length):
    realised = set()
    # a0 after a_k (k >= 1) needs a nonzero constant; R1 covers it, S gives a1 and R0 climbs
    for word in all_words(length):
        realised.add(delta_of_word(word).letters)
        if len(realised) == jacquard_count(length):
            break
    assert realised == {w.letters for w in jacquard_enum(length)}


@pytest.mark.parametrize("length", range(1, 6))
def test_growth_and_sigtype_agree_at_the_center(length):
    for word in all_words(length):
        expected = growth_from_sigtype(delta_of_word(word))
        assert growth_vector(build(word)) == expected
        assert sigtype_from_growth(expected) == delta_of_word(word)


@pytest.mark.parametrize("k", range(0, 10))
def test_sigtype_inverts_growth(k):
    for w in jacquard_enum(k):
        assert sigtype_from_growth(growth_from_sigtype(w, k + 3)) == w


@given(st.integers(1, 9).flatmap(lambda n: st.sampled_from(jacquard_enum(n))))
def test_beta_strictly_increasing(w):
    seq = beta_sequence(w, len(w) + 3)
    assert all(a < b for a, b in zip(seq, seq[1:]))


@pytest.mark.parametrize("length", range(2, 5))
def test_prefix_criterion_matches_pattern(length):
    for word in all_words(length):
        n = word.dim
        delta = delta_of_word(word)
        for i in range(1, n - 4):
            for j in range(1, i + 1):
                g = growth_vector(derived_generators(word, i - j))
                assert prefix_criterion(g, i, j) == sji_membership(delta, i, j), (word.text(), i, j)


@given(kr_words(1, 5))
def test_delta_is_jacquard(word):
    delta = delta_of_word(word)
    assert len(delta) == len(word)
    assert is_jacquard(delta)
