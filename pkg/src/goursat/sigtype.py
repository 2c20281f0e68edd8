"""Singularity types: the Jacquard language, the beta recursion and S-loci."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from .errors import GoursatError
from .krforms import KRWord, Regular, Singular, as_word


class NoMatch(GoursatError):
    """The sequence is not the growth vector of any Goursat structure."""


@dataclass(frozen=True)
class STWord:
    """A word over letters a_0, a_1, ...; stored as the tuple of letter indices."""

    letters: tuple = ()

    def __post_init__(self):
        letters = tuple(int(a) for a in self.letters)
        if any(a < 0 for a in letters):
            raise ValueError("letter indices are nonnegative")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def parse(cls, text: str) -> "STWord":
        from .vfdsl import parse_st_word

        return parse_st_word(text)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def text(self) -> str:
        return ".".join(f"a{a}" for a in self.letters)

    def __str__(self) -> str:
        return self.text()

    def append(self, letter: int) -> "STWord":
        return STWord(self.letters + (letter,))

    def is_jacquard(self) -> bool:
        return is_jacquard(self)


def as_stword(w) -> STWord:
    if isinstance(w, STWord):
        return w
    if isinstance(w, str):
        return STWord.parse(w)
    return STWord(tuple(w))


def is_jacquard(w) -> bool:
    """Membership in J_len: starts with a0, and each a_k (k >= 2) follows a_{k-1}."""
    letters = as_stword(w).letters
    if not letters:
        return True
    if letters[0] != 0:
        return False
    for prev, cur in zip(letters, letters[1:]):
        if cur >= 2 and prev != cur - 1:
            return False
    return True


@lru_cache(maxsize=None)
def _jacquard(n: int) -> tuple:
    """J_n from the inductive definition, as a tuple of letter tuples."""
    if n == 0:
        return ((),)
    if n == 1:
        return ((0,),)
    words = set()
    for w in _jacquard(n - 1):
        words.add(w + (0,))
        words.add(w + (1,))
    for length in range(2, n):
        tail = tuple(range(1, length + 1))
        for w in _jacquard(n - length):
            words.add(w + tail)
    return tuple(sorted(words))


def jacquard_enum(n: int) -> list[STWord]:
    if n < 0:
        raise ValueError("length must be nonnegative")
    return [STWord(w) for w in _jacquard(n)]


def jacquard_count(n: int) -> int:
    if n < 0:
        raise ValueError("length must be nonnegative")
    return len(_jacquard(n))


def delta_of_word(word) -> STWord:
    """Singularity type at the center of the normal form built from the word."""
    word = as_word(word)
    if not word.steps:
        raise GoursatError("the singularity type needs a nonempty word")
    return delta_at(word, None)


def delta_at(word, q: Sequence | None = None) -> STWord:
    """Singularity type of the normal form at a point q of its chart (default 0).

    Along the word, a singular step whose new coordinate vanishes at q gives a1;
    a regular step R_c whose shifted coordinate x_k + c vanishes at q, right
    after a letter a_i with i >= 1, gives a_{i+1}; everything else gives a0.
    """
    word = as_word(word)
    if not word.steps:
        raise GoursatError("the singularity type needs a nonempty word")
    n = word.dim
    if q is None:
        q = (0,) * n
    if len(q) != n:
        raise GoursatError(f"point has {len(q)} coordinates, the form lives on dimension {n}")
    letters = [0]
    for k in range(5, n + 1):
        step = word.step_at(k)
        value = Fraction(q[k - 1])
        prev = letters[-1]
        if isinstance(step, Singular):
            letters.append(1 if value == 0 else 0)
        elif step.c + value == 0 and prev >= 1:
            letters.append(prev + 1)
        else:
            letters.append(0)
    return STWord(tuple(letters))


@lru_cache(maxsize=None)
def _beta(i: int, letters: tuple) -> int:
    if i == 2:
        return 1
    if i == 3:
        return 2
    if i == 4:
        return 3
    if len(letters) < i - 3:
        raise GoursatError(f"beta_{i} needs a word of length at least {i - 3}")
    last = letters[-1]
    w1 = letters[:-1]
    w2 = letters[:-2]
    if last == 0:
        return _beta(i - 1, w1) + 1
    if last == 1:
        return _beta(i - 1, w1) + _beta(i - 2, w2)
    return 2 * _beta(i - 1, w1) - _beta(i - 2, w2)


def beta(i: int, w) -> int:
    """Jean's beta_i of a singularity type, by recursion on its last letter."""
    if i < 2:
        raise GoursatError("beta_i is defined for i >= 2")
    return _beta(i, as_stword(w).letters)


def beta_sequence(w, n: int) -> tuple:
    """(beta_2(w), ..., beta_n(w))."""
    return tuple(beta(i, w) for i in range(2, n + 1))


def growth_from_sigtype(w, n: int | None = None):
    """Growth vector whose dual sequence is (beta_2(w), ..., beta_n(w))."""
    from .flags import undual

    w = as_stword(w)
    if n is None:
        n = len(w) + 3
    if len(w) != n - 3:
        raise GoursatError(f"a singularity type on dimension {n} has length {n - 3}, got {len(w)}")
    seq = beta_sequence(w, n)
    if any(b >= c for b, c in zip(seq, seq[1:])):
        raise GoursatError(f"beta sequence {seq} of {w.text()} is not strictly increasing")
    return undual(seq, n)


@lru_cache(maxsize=None)
def _growth_table(n: int) -> dict:
    table = {}
    for w in jacquard_enum(n - 3):
        table[tuple(growth_from_sigtype(w, n))] = w
    return table


def sigtype_from_growth(d) -> STWord:
    """The unique singularity type with the given growth vector."""
    d = tuple(int(x) for x in d)
    if not d or d[0] != 2 or d[-1] < 3:
        raise NoMatch(f"{d} is not a Goursat growth vector")
    w = _growth_table(d[-1]).get(d)
    if w is None:
        raise NoMatch(f"{d} is not the growth vector of any singularity type")
    return w


def prefix_criterion(derived_growth: Sequence[int], i: int, j: int) -> bool:
    """Direct test of membership in S_j^(i) from the growth vector of D^(i-j).

    For 1 <= j <= i the growth vector must begin with i-j+2, ..., i+3, then
    i+4 repeated j+2 times, then i+5.
    """
    if not 1 <= j <= i:
        raise GoursatError("the prefix test needs 1 <= j <= i")
    prefix = list(range(i - j + 2, i + 4)) + [i + 4] * (j + 2) + [i + 5]
    return list(derived_growth[: len(prefix)]) == prefix


def _check_range(n: int, i: int, j: int) -> None:
    if not 0 <= j <= i <= n - 5:
        raise GoursatError(f"S_j^(i) needs 0 <= j <= i <= n-5 (n={n}, i={i}, j={j})")


def sji_membership(w, i: int, j: int) -> bool:
    """Whether the singularity type has the shape w1 a1 a2 ... a_{j+1} w2 with |w2| = i-j."""
    w = as_stword(w)
    n = len(w) + 3
    _check_range(n, i, j)
    start = len(w) - 1 - i
    if start < 0:
        return False
    return w.letters[start : start + j + 1] == tuple(range(1, j + 2))


@dataclass(frozen=True)
class SLocus:
    """The coordinate subspace {x_k = 0 : k in indices} of a KR chart."""

    i: int
    j: int
    indices: tuple

    @property
    def codimension(self) -> int:
        return len(self.indices)

    def text(self) -> str:
        return "{" + "=".join(f"x{k}" for k in sorted(self.indices, reverse=True)) + "=0}"

    def contains(self, q: Sequence) -> bool:
        return all(Fraction(q[k - 1]) == 0 for k in self.indices)


def sji_locus(word, i: int, j: int) -> SLocus | None:
    """S_j^(i) near the center of a normal form; None when 0 does not lie on it."""
    word = as_word(word)
    _check_range(word.dim, i, j)
    if not sji_membership(delta_of_word(word), i, j):
        return None
    n = word.dim
    return SLocus(i, j, tuple(range(n - i, n - i + j + 1)))
