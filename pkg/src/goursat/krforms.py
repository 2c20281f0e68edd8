"""Kumpera-Ruiz normal forms built by regular and singular prolongations."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .errors import DimensionMismatch, GoursatError
from .symcore import Poly, PolyVF, as_rational


@dataclass(frozen=True)
class Regular:
    c: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "c", as_rational(self.c))

    def text(self) -> str:
        from .vfdsl import format_rational

        return "R" + format_rational(self.c)


@dataclass(frozen=True)
class Singular:
    def text(self) -> str:
        return "S"


KRStep = Union[Regular, Singular]


@dataclass(frozen=True)
class KRWord:
    """Prolongation steps applied left to right to the contact pair on R^3."""

    steps: tuple = ()

    def __post_init__(self):
        steps = tuple(self.steps)
        for s in steps:
            if not isinstance(s, (Regular, Singular)):
                raise TypeError(f"not a prolongation step: {s!r}")
        object.__setattr__(self, "steps", steps)

    @classmethod
    def parse(cls, text: str) -> "KRWord":
        from .vfdsl import parse_kr_word

        return parse_kr_word(text)

    @property
    def dim(self) -> int:
        return 3 + len(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[KRStep]:
        return iter(self.steps)

    def __getitem__(self, i):
        return self.steps[i]

    def text(self) -> str:
        return ".".join(s.text() for s in self.steps)

    def __str__(self) -> str:
        return self.text()

    def step_at(self, coordinate: int) -> KRStep:
        """The step that introduced coordinate x_k (k >= 4)."""
        if not 4 <= coordinate <= self.dim:
            raise IndexError(f"x{coordinate} is not a prolonged coordinate of a dim-{self.dim} form")
        return self.steps[coordinate - 4]

    def singular_coordinates(self) -> list[int]:
        return [k + 4 for k, s in enumerate(self.steps) if isinstance(s, Singular)]

    def with_constants(self, constants: dict) -> "KRWord":
        """Copy with regular constants replaced, keyed by coordinate index."""
        steps = list(self.steps)
        for k, c in constants.items():
            if not isinstance(steps[k - 4], Regular):
                raise GoursatError(f"x{k} is a singular coordinate")
            steps[k - 4] = Regular(c)
        return KRWord(tuple(steps))


def as_word(word) -> KRWord:
    if isinstance(word, KRWord):
        return word
    if isinstance(word, str):
        return KRWord.parse(word)
    return KRWord(tuple(word))


@dataclass(frozen=True)
class KRSystem:
    dim: int
    f1: PolyVF
    f2: PolyVF
    word: KRWord = field(default_factory=KRWord)

    @property
    def fields(self) -> tuple[PolyVF, PolyVF]:
        return (self.f1, self.f2)

    def to_json(self) -> dict:
        from .vfdsl import format_poly

        return {
            "dim": self.dim,
            "f1": [format_poly(c) for c in self.f1.components],
            "f2": [format_poly(c) for c in self.f2.components],
            "word": self.word.text(),
        }


def lift(f: PolyVF, new_dim: int) -> PolyVF:
    """Extend a field by zero components along new trailing coordinates."""
    if new_dim < f.dim:
        raise DimensionMismatch(f"cannot lift a dim-{f.dim} field to dim {new_dim}")
    return f.lift(new_dim)


def pfaff_darboux() -> KRSystem:
    n = 3
    f1 = PolyVF.partial(n, 3)
    f2 = PolyVF([Poly.const(n, 1), Poly.var(n, 3), Poly.zero(n)])
    return KRSystem(n, f1, f2, KRWord(()))


def prolong_regular(sys: KRSystem, c) -> KRSystem:
    """f2 <- (x_{n+1} + c) * lift(f1) + lift(f2), f1 <- d/dx_{n+1}."""
    c = as_rational(c)
    n = sys.dim + 1
    coeff = Poly.var(n, n) + c
    f2 = lift(sys.f1, n) * coeff + lift(sys.f2, n)
    return KRSystem(n, PolyVF.partial(n, n), f2, KRWord(sys.word.steps + (Regular(c),)))


def prolong_singular(sys: KRSystem) -> KRSystem:
    """f2 <- lift(f1) + x_{n+1} * lift(f2), f1 <- d/dx_{n+1}."""
    n = sys.dim + 1
    f2 = lift(sys.f1, n) + lift(sys.f2, n) * Poly.var(n, n)
    return KRSystem(n, PolyVF.partial(n, n), f2, KRWord(sys.word.steps + (Singular(),)))


@lru_cache(maxsize=4096)
def _build(word: KRWord) -> KRSystem:
    if not word.steps:
        return pfaff_darboux()
    prev = _build(KRWord(word.steps[:-1]))
    last = word.steps[-1]
    if isinstance(last, Singular):
        return prolong_singular(prev)
    return prolong_regular(prev, last.c)


def build(word) -> KRSystem:
    """Fold the word's prolongations starting from the contact pair on R^3."""
    return _build(as_word(word))


def kr_pair(word) -> tuple[PolyVF, PolyVF]:
    s = build(word)
    return s.f1, s.f2


# explicit double-indexed form


@dataclass(frozen=True)
class ExplicitKR:
    """Block sizes k_0..k_{m+1} and constants c^i_j of the double-indexed form.

    Coordinate x^i_j is the flat coordinate ``n - (k_0 + ... + k_{i-1}) - (j - 1)``.
    """

    n: int
    m: int
    k: tuple
    constants: dict
    word: KRWord
    normalized_from: KRWord | None = None

    def flat_index(self, i: int, j: int) -> int:
        return self.n - sum(self.k[:i]) - (j - 1)

    def expand(self) -> PolyVF:
        """Expand the double-indexed display into an ordinary field."""
        n = self.n
        total = PolyVF.zero(n)
        prefix = Poly.const(n, 1)
        for i in range(self.m + 1):
            inner = PolyVF.zero(n)
            for j in range(1, self.k[i]):
                coeff = Poly.var(n, self.flat_index(i, j)) + self.constants.get((i, j), 0)
                inner = inner + PolyVF.partial(n, self.flat_index(i, j + 1)) * coeff
            inner = inner + PolyVF.partial(n, self.flat_index(i + 1, 1))
            total = total + inner * prefix
            prefix = prefix * Poly.var(n, self.flat_index(i, self.k[i]))
        return total

    def expand_f1(self) -> PolyVF:
        return PolyVF.partial(self.n, self.flat_index(0, 1))


def normalize_first_step(word) -> KRWord:
    """Replace a singular first step by R0.

    On R^4 both prolongations of the contact pair are Engel structures, and
    a Legendre-type contact map carries S(w) to R0(w) while fixing every later
    step and constant (checked in the contact module's tests).
    """
    word = as_word(word)
    if word.steps and isinstance(word.steps[0], Singular):
        return KRWord((Regular(0),) + word.steps[1:])
    return word


def explicit_form(word) -> ExplicitKR:
    """Block structure of the double-indexed normal form of a nonempty word."""
    original = as_word(word)
    if not original.steps:
        raise GoursatError("the explicit form needs at least one prolongation step")
    word = normalize_first_step(original)
    n = word.dim
    singular = sorted(word.singular_coordinates(), reverse=True)
    blocks = []
    top = n
    for s in singular:
        blocks.append(list(range(top, s - 1, -1)))
        top = s - 1
    blocks.append(list(range(top, 1, -1)))
    blocks.append([1])
    m = len(singular)
    k = tuple(len(b) for b in blocks)
    if any(kk < 1 for kk in k[:m]) or k[m] < 3 or k[m + 1] != 1 or sum(k) != n:
        raise GoursatError(f"word {original.text()!r} has no double-indexed form")
    constants = {}
    for i, block in enumerate(blocks[:-1]):
        for j, coord in enumerate(block[:-1], start=1):
            if coord >= 4:
                step = word.step_at(coord)
                c = step.c if isinstance(step, Regular) else Fraction(0)
            else:
                c = Fraction(0)
            if c:
                constants[(i, j)] = c
    return ExplicitKR(n, m, k, constants, word, original if word != original else None)


def weber_extend(word, k: int) -> list[PolyVF]:
    """Rank-k family: k-2 straight fields on top of the lifted normal-form pair."""
    if k < 2:
        raise GoursatError("rank must be at least 2")
    s = build(word)
    m = s.dim
    n = m + k - 2
    straight = [PolyVF.partial(n, j) for j in range(n, m, -1)]
    return straight + [lift(s.f1, n), lift(s.f2, n)]


_CATALOG = {
    3: [("pfaff-darboux", "")],
    4: [("engel", "R0")],
    5: [("R5a", "R0.R0"), ("R5b", "R0.S")],
    6: [
        ("R6a", "R0.R0.R0"),
        ("R6b", "R0.R0.S"),
        ("R6c", "R0.S.R0"),
        ("R6d", "R0.S.R1"),
        ("R6e", "R0.S.S"),
    ],
}


def catalog(dim: int) -> list[tuple[str, KRWord]]:
    """Pairwise non-equivalent normal forms at the origin in dimensions 3 to 6."""
    if dim not in _CATALOG:
        raise GoursatError(f"catalog covers dimensions 3..6, not {dim}")
    return [(name, KRWord.parse(text)) for name, text in _CATALOG[dim]]


def all_words(length: int, constants: Sequence = (0, 1)) -> list[KRWord]:
    """Every word of the given length over S and R_c for c in constants."""
    alphabet = [Singular()] + [Regular(c) for c in constants]
    words = [()]
    for _ in range(length):
        words = [w + (s,) for w in words for s in alphabet]
    return [KRWord(w) for w in words]


R9_WORD = "R0.R0.S.R0.R1"
R11_WORD = "R0.R0.S.R0.R0.R1.R1"


def r9_word(c9=0) -> KRWord:
    return KRWord(KRWord.parse(R9_WORD).steps + (Regular(c9),))


def r11_word(c11=0) -> KRWord:
    return KRWord(KRWord.parse(R11_WORD).steps + (Regular(c11),))
