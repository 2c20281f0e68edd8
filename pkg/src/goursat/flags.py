"""Derived flag, Lie flag, growth vectors and their dual sequences."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DimensionMismatch, GeneratorCapExceeded, GoursatError
from .symcore import PolyVF, lie_bracket, origin, qpoint, rank_at

DEFAULT_GENERATOR_CAP = 4096


class GrowthVector(tuple):
    """Pointwise Lie-flag dimensions (d_0, ..., d_N), ending at the ambient dimension."""

    def __new__(cls, dims: Iterable[int]):
        dims = tuple(int(d) for d in dims)
        if not dims:
            raise ValueError("a growth vector is nonempty")
        for a, b in zip(dims, dims[1:]):
            if not a <= b <= a + 1:
                raise ValueError(f"{dims}: consecutive entries must grow by 0 or 1")
        if len(dims) > 1 and dims[-2] == dims[-1]:
            raise ValueError(f"{dims}: the vector stops when it first reaches full rank")
        return super().__new__(cls, dims)

    @property
    def n(self) -> int:
        return self[-1]

    @property
    def degree(self) -> int:
        return len(self) - 1

    def text(self) -> str:
        return ",".join(str(d) for d in self)


class DualSeq(tuple):
    """(d*_2, ..., d*_n): d*_i is one more than the number of levels with d_j < i."""

    def __new__(cls, entries: Iterable[int]):
        entries = tuple(int(d) for d in entries)
        if not entries or entries[0] != 1:
            raise ValueError(f"{entries}: a dual sequence starts with 1")
        if any(a >= b for a, b in zip(entries, entries[1:])):
            raise ValueError(f"{entries}: a dual sequence is strictly increasing")
        return super().__new__(cls, entries)

    def text(self) -> str:
        return ",".join(str(d) for d in self)


def dual(d: Sequence[int]) -> DualSeq:
    d = GrowthVector(d)
    if d[0] != 2:
        raise ValueError(f"{tuple(d)}: a rank-2 growth vector starts with 2")
    return DualSeq(sum(1 for dj in d if dj < i) + 1 for i in range(2, d.n + 1))


def undual(s: Sequence[int], n: int | None = None) -> GrowthVector:
    s = DualSeq(s)
    if n is None:
        n = len(s) + 1
    if len(s) != n - 1:
        raise ValueError(f"a dual sequence for dimension {n} has {n - 1} entries")
    levels = s[-1] - 1
    dims = []
    for j in range(levels + 1):
        dims.append(max(i for i, si in zip(range(2, n + 1), s) if si - 1 <= j))
    return GrowthVector(dims)


# exact span bookkeeping


def _as_vector(f: PolyVF) -> dict:
    """Flatten a field into {(component, monomial): coefficient}."""
    out = {}
    for idx, comp in enumerate(f.components):
        for mono, coeff in comp.terms.items():
            out[(idx, mono)] = coeff
    return out


class _Span:
    """Rational span of polynomial fields, kept in echelon form keyed by leading term."""

    def __init__(self):
        self.pivots: dict = {}

    def add(self, f: PolyVF) -> bool:
        """Insert f; return True iff it was not already in the rational span."""
        v = _as_vector(f)
        while v:
            key = max(v)
            row = self.pivots.get(key)
            if row is None:
                lead = v[key]
                self.pivots[key] = {k: Fraction(c) / lead for k, c in v.items()}
                return True
            factor = v[key]
            for k, c in row.items():
                nc = v.get(k, 0) - factor * c
                if nc:
                    v[k] = nc
                else:
                    v.pop(k, None)
        return False

    def __len__(self) -> int:
        return len(self.pivots)


def _fields_of(sys) -> list[PolyVF]:
    if hasattr(sys, "f1") and hasattr(sys, "f2"):
        return [sys.f1, sys.f2]
    fields = list(sys)
    if not fields:
        raise GoursatError("need at least one generator")
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise DimensionMismatch("generators live on different dimensions")
    return fields


def _point(p, n: int):
    if p is None:
        return origin(n)
    p = qpoint(p)
    if len(p) != n:
        raise DimensionMismatch(f"point has {len(p)} coordinates, fields have {n}")
    return p


def derived_flag_generators(sys, maxlevel: int, cap: int = DEFAULT_GENERATOR_CAP) -> list[list[PolyVF]]:
    """Generators of D^(0), ..., D^(maxlevel), each level closed under brackets of the previous one."""
    gens = _fields_of(sys)
    span = _Span()
    basis: list[PolyVF] = []
    new: list[PolyVF] = []
    for g in gens:
        if span.add(g):
            basis.append(g)
            new.append(g)
    levels = [list(basis)]
    for _ in range(maxlevel):
        added = []
        for w in new:
            for a in basis:
                if a is w:
                    continue
                b = lie_bracket(a, w)
                if span.add(b):
                    added.append(b)
                    if len(span) > cap:
                        raise GeneratorCapExceeded(f"derived flag needs more than {cap} generators")
        basis.extend(added)
        new = added
        levels.append(list(basis))
    return levels


def derived_flag_dims(sys, p=None, maxlevel: int | None = None, cap: int = DEFAULT_GENERATOR_CAP) -> list[int]:
    """dim D^(i)(p) for i = 0..maxlevel, with D^(i+1) = D^(i) + [D^(i), D^(i)]."""
    gens = _fields_of(sys)
    n = gens[0].dim
    p = _point(p, n)
    if maxlevel is None:
        maxlevel = max(n - 2, 0)
    return [rank_at(level, p) for level in derived_flag_generators(gens, maxlevel, cap)]


@dataclass
class LieFlag:
    """Generators of the Lie flag levels as nested rational spans."""

    gens: list
    levels: list  # levels[i] = fields added at level i

    def fields_up_to(self, i: int) -> list:
        out = []
        for level in self.levels[: i + 1]:
            out.extend(level)
        return out


def lie_flag(sys, levels: int, cap: int = DEFAULT_GENERATOR_CAP) -> LieFlag:
    """Level i+1 adds [g, w] for every generator g and every field w new at level i."""
    gens = _fields_of(sys)
    span = _Span()
    first = [g for g in gens if span.add(g)]
    out = [first]
    for _ in range(levels):
        added = []
        for w in out[-1]:
            for g in gens:
                b = lie_bracket(g, w)
                if span.add(b):
                    added.append(b)
                    if len(span) > cap:
                        raise GeneratorCapExceeded(f"Lie flag needs more than {cap} generators")
        out.append(added)
    return LieFlag(gens, out)


def _default_cap_levels(n: int) -> int:
    return 2 ** max(n - 3, 0)


def growth_vector(sys, p=None, cap_N: int | None = None, cap: int = DEFAULT_GENERATOR_CAP) -> GrowthVector:
    """Pointwise Lie-flag dimensions until full rank."""
    gens = _fields_of(sys)
    n = gens[0].dim
    p = _point(p, n)
    if cap_N is None:
        cap_N = _default_cap_levels(n)
    span = _Span()
    current = [g for g in gens if span.add(g)]
    basis = list(current)
    dims = [rank_at(basis, p)]
    while dims[-1] < n:
        if len(dims) > cap_N:
            raise GeneratorCapExceeded(f"no full rank after {cap_N} bracket levels at {tuple(p)}")
        added = []
        for w in current:
            for g in gens:
                b = lie_bracket(g, w)
                if span.add(b):
                    added.append(b)
                    if len(span) > cap:
                        raise GeneratorCapExceeded(f"Lie flag needs more than {cap} generators")
        if not added:
            raise GoursatError(f"the distribution is not bracket generating at {tuple(p)}")
        basis.extend(added)
        current = added
        dims.append(rank_at(basis, p))
    if dims[0] == 2:
        return GrowthVector(dims)
    return tuple(dims)


def nonholonomy_degree(sys, p=None, cap_N: int | None = None) -> int:
    return len(growth_vector(sys, p, cap_N)) - 1


def murray_regular(sys, p=None) -> bool:
    """Whether Lie-flag and derived-flag dimensions agree at p up to level n-2."""
    gens = _fields_of(sys)
    n = gens[0].dim
    top = max(n - 2, 0)
    growth = list(growth_vector(sys, p))
    growth += [n] * (top + 1 - len(growth))
    return growth[: top + 1] == derived_flag_dims(sys, p, top)


@dataclass
class GoursatReport:
    ok: bool
    first_failure: tuple | None = None  # (point, dims)

    def __bool__(self) -> bool:
        return self.ok


def is_goursat(sys, points: Sequence) -> GoursatReport:
    """Check dim D^(i)(p) = i + 2 for 0 <= i <= n-2 at each sample point."""
    gens = _fields_of(sys)
    if len(gens) != 2:
        raise GoursatError("a Goursat structure has rank 2")
    if not points:
        raise GoursatError("need at least one sample point")
    n = gens[0].dim
    expected = list(range(2, n + 1))
    for p in points:
        dims = derived_flag_dims(gens, p, n - 2)
        if dims != expected:
            return GoursatReport(False, (tuple(qpoint(p)), dims))
    return GoursatReport(True)


def growth_report(word, p=None) -> dict:
    """JSON-ready summary of the growth vector of a normal form at a point."""
    from .krforms import as_word, build
    from .vfdsl import format_rational

    word = as_word(word)
    sys = build(word)
    point = _point(p, sys.dim)
    g = growth_vector(sys, point)
    return {
        "word": word.text(),
        "point": [format_rational(c) for c in point],
        "growth": list(g),
        "dual": list(dual(g)),
        "degree": len(g) - 1,
        "murray_regular": murray_regular(sys, point),
    }
