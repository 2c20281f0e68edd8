"""Characteristic distributions, abnormal cones, singular loci and rigid directions.

Everything here is read off a Kumpera-Ruiz chart: the derived flag is
D^(i) = (d/dx_n, ..., d/dx_{n-i}, kappa_2^{n-i}) and the characteristic
distribution C_i is spanned by its straight part.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import GoursatError
from .krforms import KRWord, as_word, build, lift
from .sigtype import SLocus, delta_at, delta_of_word, sji_locus, sji_membership
from .symcore import PolyVF, evaluate, nullspace, origin, qpoint


def characteristic_basis(word, i: int) -> list[int]:
    """Coordinate indices k with C_i = span(d/dx_k), from x_n down to x_{n-i}."""
    word = as_word(word)
    n = word.dim
    if not 0 <= i <= n - 4:
        raise GoursatError(f"C_i is defined for 0 <= i <= n-4 (n={n}, i={i})")
    return list(range(n, n - i - 1, -1))


def characteristic_fields(word, i: int) -> list[PolyVF]:
    n = as_word(word).dim
    return [PolyVF.partial(n, k) for k in characteristic_basis(word, i)]


def derived_generators(word, i: int) -> list[PolyVF]:
    """Generators of D^(i): d/dx_n, ..., d/dx_{n-i} and the lift of kappa_2^{n-i}."""
    word = as_word(word)
    n = word.dim
    if not 0 <= i <= n - 2:
        raise GoursatError(f"D^(i) needs 0 <= i <= n-2 (n={n}, i={i})")
    straight = [PolyVF.partial(n, k) for k in range(n, n - i - 1, -1)]
    if n - i == 2:
        # D^(n-2) is the whole tangent space
        return straight + [PolyVF.partial(n, 2), PolyVF.partial(n, 1)]
    low = build(KRWord(word.steps[: n - i - 3]))
    return straight + [lift(low.f2, n)]


@dataclass(frozen=True)
class CharacteristicReport:
    """Pointwise checks that C_i is a corank-one, involutive, characteristic part of D^(i)."""

    word: str
    level: int
    points: int
    passed: bool
    failure: str = ""


def characteristic_check(word, i: int, points) -> CharacteristicReport:
    """Check C_i inside D^(i) at each point, with D^(i) and D^(i+1) computed by brackets.

    At every point: C_i lies in D^(i) with corank one, [C_i, C_i] lies in C_i,
    [C_i, D^(i+1)] lies in D^(i+1), and the bracket-computed D^(i) has the
    same span as the straight-plus-kappa generators used elsewhere here.
    """
    from .flags import derived_flag_generators
    from .symcore import lie_bracket, rank_at

    word = as_word(word)
    n = word.dim
    char = characteristic_fields(word, i)
    flag = derived_flag_generators(build(word), i + 1)
    d_i, d_next = flag[i], flag[i + 1]
    closed_form = derived_generators(word, i)
    brackets_c = [lie_bracket(c, c2) for c in char for c2 in char]
    brackets_d = [lie_bracket(c, g) for c in char for g in d_next]
    count = 0
    for q in points:
        q = _point(word, q)
        count += 1
        r_i = rank_at(d_i, q)
        if r_i != i + 2:
            return CharacteristicReport(word.text(), i, count, False, f"dim D^({i}) = {r_i} at {q}")
        if rank_at(d_i + closed_form, q) != r_i or rank_at(closed_form, q) != r_i:
            return CharacteristicReport(word.text(), i, count, False, f"closed form of D^({i}) differs at {q}")
        if rank_at(d_i + char, q) != r_i:
            return CharacteristicReport(word.text(), i, count, False, f"C_{i} not inside D^({i}) at {q}")
        if rank_at(char, q) != r_i - 1:
            return CharacteristicReport(word.text(), i, count, False, f"C_{i} is not of corank one at {q}")
        if brackets_c and rank_at(char + brackets_c, q) != rank_at(char, q):
            return CharacteristicReport(word.text(), i, count, False, f"C_{i} not involutive at {q}")
        r_next = rank_at(d_next, q)
        for b in brackets_d:
            if rank_at(d_next + [b], q) != r_next:
                return CharacteristicReport(word.text(), i, count, False, f"[C_{i}, D^({i + 1})] leaves D^({i + 1}) at {q}")
    return CharacteristicReport(word.text(), i, count, True)


def _canonical_rows(vectors: list, n: int) -> list[tuple]:
    """Reduced echelon basis of a span, pivoting from the top coordinate down."""
    rows = [list(v)[::-1] for v in vectors]  # reverse so x_n comes first
    rows = [r for r in rows if any(r)]
    out = []
    col = 0
    rows = [list(map(Fraction, r)) for r in rows]
    r = 0
    while r < len(rows) and col < n:
        piv = next((k for k in range(r, len(rows)) if rows[k][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        rows[r] = [x / lead for x in rows[r]]
        for k in range(len(rows)):
            if k != r and rows[k][col] != 0:
                f = rows[k][col]
                rows[k] = [a - f * b for a, b in zip(rows[k], rows[r])]
        r += 1
        col += 1
    out = [tuple(row[::-1]) for row in rows[:r]]
    return out


def _vector_text(v: Sequence) -> str:
    from .vfdsl import format_rational

    terms = []
    for k in range(len(v), 0, -1):
        c = v[k - 1]
        if c == 0:
            continue
        if c == 1:
            terms.append(f"d/dx{k}")
        else:
            terms.append(f"{format_rational(c)}*d/dx{k}")
    return " + ".join(terms) if terms else "0"


def span_text(basis: list) -> str:
    return "(" + ", ".join(_vector_text(v) for v in basis) + ")"


@dataclass(frozen=True)
class AbnormalCone:
    """A^(i)(q): one subspace, or the union of C_i(q) and A_j^(i)(q).

    ``kind`` is one of "subspace", "union", "zero" (the trivial subspace) and
    "empty" (no abnormal directions at all, not even the zero vector).
    """

    level: int
    point: tuple
    kind: str
    bases: tuple = ()
    j: int | None = None

    def contains(self, v: Sequence) -> bool:
        if self.kind == "empty":
            return False
        v = tuple(Fraction(x) for x in v)
        if self.kind == "zero":
            return not any(v)
        return any(_in_span(v, b) for b in self.bases)

    def to_json(self) -> dict:
        from .vfdsl import format_rational

        return {
            "kind": self.kind,
            "bases": [[[format_rational(c) for c in vec] for vec in b] for b in self.bases],
            "text": [span_text(b) for b in self.bases],
            "j": self.j,
        }

    def text(self) -> str:
        if self.kind == "empty":
            return "empty"
        if self.kind == "zero":
            return "{0}"
        return " U ".join(span_text(b) for b in self.bases)


def _in_span(v: tuple, basis: list) -> bool:
    from .symcore import bareiss_rank

    if not any(v):
        return True
    return bareiss_rank(list(basis) + [v]) == bareiss_rank(list(basis))


def _point(word: KRWord, q) -> tuple:
    if q is None:
        return origin(word.dim)
    q = qpoint(q)
    if len(q) != word.dim:
        raise GoursatError(f"point has {len(q)} coordinates, the form lives on dimension {word.dim}")
    return q


def _a_branch(word: KRWord, i: int, j: int, q: tuple) -> list[tuple]:
    """A_j^(i)(q) = D^(i)(q) with the components n-i-j .. n-i set to zero."""
    n = word.dim
    gens = [evaluate(g, q) for g in derived_generators(word, i)]
    constrained = range(n - i - j, n - i + 1)
    rows = [[g[k - 1] for g in gens] for k in constrained]
    coeffs = nullspace(rows, len(gens))
    vectors = [tuple(sum(a * g[k] for a, g in zip(c, gens)) for k in range(n)) for c in coeffs]
    return _canonical_rows(vectors, n)


def locus_at(word, i: int, q=None) -> int | None:
    """The unique j with q in S_j^(i+j), read from the singularity type at q."""
    word = as_word(word)
    n = word.dim
    q = _point(word, q)
    if n < 5 or i > n - 5:
        return None
    w = delta_at(word, q)
    hits = [j for j in range(0, n - i - 4) if sji_membership(w, i + j, j)]
    if len(hits) > 1:
        raise GoursatError(f"S-loci overlap at {q}: {hits}")
    return hits[0] if hits else None


def abnormal_cone(word, i: int, q=None) -> AbnormalCone:
    """Velocities of locally abnormal integral curves of D^(i) at q."""
    word = as_word(word)
    n = word.dim
    q = _point(word, q)
    if not 0 <= i <= n - 2:
        raise GoursatError(f"abnormal cones are defined for 0 <= i <= n-2 (n={n}, i={i})")
    if i == n - 2:
        return AbnormalCone(i, q, "empty")
    if i == n - 3 and n == 3:
        return AbnormalCone(i, q, "zero")
    unit = lambda k: tuple(Fraction(int(m == k)) for m in range(1, n + 1))
    if i >= n - 4:
        basis = [unit(k) for k in characteristic_basis(word, n - 4)]
        return AbnormalCone(i, q, "subspace", (tuple(basis),))
    c_basis = tuple(unit(k) for k in characteristic_basis(word, i))
    j = locus_at(word, i, q)
    if j is None:
        return AbnormalCone(i, q, "subspace", (c_basis,))
    a_basis = tuple(_a_branch(word, i, j, q))
    if len(a_basis) != i + 1:
        raise GoursatError(f"A_{j}^({i}) has rank {len(a_basis)}, expected {i + 1}")
    return AbnormalCone(i, q, "union", (c_basis, a_basis), j)


@dataclass(frozen=True)
class LocusDescription:
    """Zero set of a product of KR coordinates, or of several coordinates at once."""

    kind: str  # "product": prod x_k = 0;  "subspace": x_k = 0 for every k
    indices: tuple

    def text(self) -> str:
        ks = sorted(self.indices, reverse=True)
        if self.kind == "product":
            return "{" + "".join(f"x{k}" for k in ks) + "=0}"
        return "{" + "=".join(f"x{k}" for k in ks) + "=0}"

    def contains(self, q: Sequence) -> bool:
        vals = [Fraction(q[k - 1]) for k in self.indices]
        if self.kind == "product":
            return any(v == 0 for v in vals)
        return all(v == 0 for v in vals)


def singular_locus(word, i: int) -> LocusDescription | None:
    """K_i near the center: product of the singular coordinates x_k with 5 <= k <= n-i."""
    word = as_word(word)
    n = word.dim
    if not 0 <= i <= n - 5:
        return None
    ks = tuple(k for k in sorted(word.singular_coordinates(), reverse=True) if 5 <= k <= n - i)
    if not ks:
        return None
    return LocusDescription("product", ks)


def l_locus(word, i: int) -> LocusDescription | None:
    """L_i near the center: the one S_j^(i+j) through 0, if any."""
    word = as_word(word)
    n = word.dim
    if not 0 <= i <= n - 5:
        return None
    for j in range(0, n - i - 4):
        loc = sji_locus(word, i + j, j)
        if loc is not None:
            return LocusDescription("subspace", loc.indices)
    return None


@dataclass(frozen=True)
class RigidVerdict:
    rigid: bool
    reason: str
    j: int | None = None

    def __bool__(self) -> bool:
        return self.rigid


def is_rigid_direction(word, q, v: Sequence) -> RigidVerdict:
    """Whether v in D(q) is the velocity of a rigid curve through q.

    Rigid directions are those of C_0, plus those of A_{k0-1}^(0) on the
    locus S_{k0-1}^(k0-1).
    """
    word = as_word(word)
    n = word.dim
    q = _point(word, q)
    v = tuple(Fraction(x) for x in v)
    if len(v) != n:
        raise GoursatError(f"direction has {len(v)} components, expected {n}")
    if not any(v):
        raise GoursatError("the zero vector is not a direction")
    gens = [evaluate(g, q) for g in derived_generators(word, 0)]
    if not _in_span(v, gens):
        raise GoursatError(f"{_vector_text(v)} is not in D(q)")
    if n == 3:
        return RigidVerdict(False, "contact structures have no rigid curves")
    cone = abnormal_cone(word, 0, q)
    if _in_span(v, list(cone.bases[0])):
        return RigidVerdict(True, "C0: tangent to the characteristic direction d/dx_n")
    if cone.kind == "union" and _in_span(v, list(cone.bases[1])):
        return RigidVerdict(True, f"A_{cone.j}^(0): q lies on S_{cone.j}^({cone.j})", cone.j)
    if cone.kind == "union":
        return RigidVerdict(False, f"not in C0 or A_{cone.j}^(0)")
    return RigidVerdict(False, "not in C0 and q lies on no S_j^(j)")


def trailer_rigid_classify(config):
    """Rigid motions of the trailer at a configuration (see trailer.rigid_generators)."""
    from .trailer import rigid_generators

    return rigid_generators(config)


def cone_report(word, i: int, q=None) -> dict:
    from .vfdsl import format_rational

    word = as_word(word)
    q = _point(word, q)
    cone = abnormal_cone(word, i, q)
    k = singular_locus(word, i)
    l = l_locus(word, i)
    return {
        "word": word.text(),
        "level": i,
        "point": [format_rational(c) for c in q],
        "cone": cone.to_json(),
        "K_equation": k.text() if k else None,
        "L_subspace": l.text() if l else None,
    }
