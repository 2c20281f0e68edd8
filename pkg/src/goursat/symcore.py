"""Exact rational polynomials, rational functions and vector fields.

Polynomials are sparse maps from exponent tuples to rational coefficients.
Coefficients are ``int`` or ``fractions.Fraction``; the two compare and hash
identically, so equal values always have equal representations.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from .errors import DenominatorVanishes, DimensionMismatch, GoursatError

Rational = Fraction
Number = Union[int, Fraction]
QPoint = tuple  # tuple of Fraction, one entry per coordinate


def as_rational(value) -> Fraction:
    """Convert ints, Fractions and ``"p/q"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot interpret {value!r} as a rational")


def qpoint(values: Iterable) -> QPoint:
    return tuple(as_rational(v) for v in values)


def origin(n: int) -> QPoint:
    return (Fraction(0),) * n


def _grlex_key(mono: tuple) -> tuple:
    return (sum(mono), mono)


class Poly:
    """Multivariate polynomial in x1..xn with rational coefficients."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: dict | None = None, _clean: bool = False):
        self.nvars = nvars
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {m: c for m, c in terms.items() if c}
            for m in terms:
                if len(m) != nvars:
                    raise DimensionMismatch(f"monomial {m} has wrong arity for {nvars} variables")
        self.terms = terms
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars, {}, True)

    @classmethod
    def const(cls, nvars: int, c: Number) -> "Poly":
        if not c:
            return cls(nvars, {}, True)
        return cls(nvars, {(0,) * nvars: c}, True)

    @classmethod
    def var(cls, nvars: int, k: int) -> "Poly":
        """The coordinate function x_k (1-based)."""
        if not 1 <= k <= nvars:
            raise DimensionMismatch(f"x{k} is not a variable of arity {nvars}")
        mono = [0] * nvars
        mono[k - 1] = 1
        return cls(nvars, {tuple(mono): 1}, True)

    # predicates and accessors
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Number:
        return self.terms.get((0,) * self.nvars, 0)

    def degree(self) -> int:
        return max((sum(m) for m in self.terms), default=-1)

    def variables(self) -> set[int]:
        """1-based indices of variables that occur."""
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(i + 1)
        return used

    def sorted_terms(self) -> list:
        """Terms in descending graded-lexicographic order."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_coefficient(self) -> Number:
        if not self.terms:
            return 0
        return max(self.terms.items(), key=lambda t: _grlex_key(t[0]))[1]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_term() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"Poly({self.nvars}, {self})"

    def __str__(self):
        from .vfdsl import format_poly
        return format_poly(self)

    # arithmetic
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"arity {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, (int, Fraction)):
            return Poly.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(self.nvars, out, True)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {m: -c for m, c in self.terms.items()}, True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "Poly":
        if not c:
            return Poly.zero(self.nvars)
        if c == 1:
            return self
        return Poly(self.nvars, {m: v * c for m, v in self.terms.items()}, True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        if len(other.terms) == 1:
            (mo, co), = other.terms.items()
            if not any(mo):
                return self.scale(co)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple([a + b for a, b in zip(m1, m2)])
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly(self.nvars, out, True)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def diff(self, k: int) -> "Poly":
        """Partial derivative with respect to x_k (1-based)."""
        i = k - 1
        out = {}
        for m, c in self.terms.items():
            e = m[i]
            if e:
                mm = list(m)
                mm[i] = e - 1
                out[tuple(mm)] = c * e
        return Poly(self.nvars, out, True)

    def evaluate(self, point: Sequence) -> Number:
        if len(point) != self.nvars:
            raise DimensionMismatch(f"point of length {len(point)} for arity {self.nvars}")
        total = 0
        for m, c in self.terms.items():
            v = c
            for x, e in zip(point, m):
                if e:
                    v = v * x ** e
            total = total + v
        return total

    def at_origin(self) -> Number:
        return self.constant_term()

    def lift(self, nvars: int) -> "Poly":
        """Same polynomial viewed in more variables (appended at the end)."""
        if nvars < self.nvars:
            raise DimensionMismatch("cannot lift to fewer variables")
        if nvars == self.nvars:
            return self
        pad = (0,) * (nvars - self.nvars)
        return Poly(nvars, {m + pad: c for m, c in self.terms.items()}, True)

    def content(self) -> Fraction:
        """Positive rational c with self/c having coprime integer coefficients."""
        if not self.terms:
            return Fraction(0)
        nums = 0
        dens = 1
        for c in self.terms.values():
            c = Fraction(c)
            nums = gcd(nums, c.numerator)
            dens = lcm(dens, c.denominator)
        return Fraction(nums, dens)


def _monomial_gcd(p: Poly) -> tuple:
    it = iter(p.terms)
    g = list(next(it))
    for m in it:
        for i, e in enumerate(m):
            if e < g[i]:
                g[i] = e
    return tuple(g)


def _divide_monomial(p: Poly, mono: tuple) -> Poly:
    return Poly(p.nvars, {tuple(a - b for a, b in zip(m, mono)): c for m, c in p.terms.items()}, True)


@lru_cache(maxsize=None)
def _sympy_ring(nvars: int):
    from sympy.polys.domains import QQ
    from sympy.polys.rings import ring

    names = ",".join(f"x{i + 1}" for i in range(nvars))
    R = ring(names, QQ)[0]
    return R, QQ


def _to_ring(p: Poly):
    R, QQ = _sympy_ring(p.nvars)
    return R.from_dict({m: QQ(Fraction(c).numerator, Fraction(c).denominator) for m, c in p.terms.items()})


def _from_ring(nvars: int, element) -> Poly:
    out = {}
    for m, c in element.items():
        out[tuple(m)] = _unwrap(Fraction(int(c.numerator), int(c.denominator)))
    return Poly(nvars, out, True)


def _unwrap(c: Fraction) -> Number:
    return c.numerator if c.denominator == 1 else c


def poly_cofactors(a: Poly, b: Poly) -> tuple[Poly, Poly, Poly]:
    """Return (g, a/g, b/g) with g a gcd of a and b over the rationals."""
    if a.nvars != b.nvars:
        raise DimensionMismatch("gcd of polynomials of different arity")
    h, ca, cb = _to_ring(a).cofactors(_to_ring(b))
    n = a.nvars
    return _from_ring(n, h), _from_ring(n, ca), _from_ring(n, cb)


class RatFn:
    """Reduced quotient of polynomials with a monic denominator (graded-lex leading term)."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, _reduced: bool = False):
        if den is None:
            den = Poly.const(num.nvars, 1)
        if num.nvars != den.nvars:
            raise DimensionMismatch("numerator and denominator arities differ")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not _reduced:
            num, den = _reduce(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def const(cls, nvars: int, c: Number) -> "RatFn":
        return cls(Poly.const(nvars, c), Poly.const(nvars, 1), True)

    @classmethod
    def var(cls, nvars: int, k: int) -> "RatFn":
        return cls(Poly.var(nvars, k), Poly.const(nvars, 1), True)

    @classmethod
    def of(cls, value, nvars: int | None = None) -> "RatFn":
        if isinstance(value, RatFn):
            return value
        if isinstance(value, Poly):
            return cls(value, Poly.const(value.nvars, 1), True)
        if isinstance(value, (int, Fraction)):
            if nvars is None:
                raise ValueError("arity needed to lift a constant")
            return cls.const(nvars, value)
        raise TypeError(f"cannot convert {type(value).__name__} to RatFn")

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def as_poly(self) -> Poly:
        if not self.is_polynomial():
            raise GoursatError("rational function is not a polynomial")
        return self.num

    def __eq__(self, other):
        if isinstance(other, RatFn):
            return self.num == other.num and self.den == other.den
        if isinstance(other, Poly):
            return self.den == 1 and self.num == other
        if isinstance(other, (int, Fraction)):
            return self.den == 1 and self.num == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self):
        return f"RatFn({self})"

    def __str__(self):
        from .vfdsl import format_ratfn
        return format_ratfn(self)

    def _coerce(self, other) -> "RatFn":
        if isinstance(other, RatFn):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"arity {self.nvars} vs {other.nvars}")
            return other
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionMismatch(f"arity {self.nvars} vs {other.nvars}")
            return RatFn(other, Poly.const(other.nvars, 1), True)
        if isinstance(other, (int, Fraction)):
            return RatFn.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            if self.den.is_constant():
                return RatFn(self.num + other.num, self.den, True)
            return RatFn(self.num + other.num, self.den)
        return RatFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(-self.num, self.den, True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return RatFn.const(self.nvars, 0)
            return RatFn(self.num.scale(other), self.den, True)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return RatFn.const(self.nvars, 0)
        if self.den.is_constant() and other.den.is_constant():
            return RatFn(self.num * other.num, self.den, True)
        return RatFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFn":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of the zero rational function")
        return RatFn(self.den, self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise ValueError("integer powers only")
        if k < 0:
            return self.inverse() ** (-k)
        return RatFn(self.num ** k, self.den ** k, True) if k else RatFn.const(self.nvars, 1)

    def diff(self, k: int) -> "RatFn":
        if self.den.is_constant():
            return RatFn(self.num.diff(k), self.den, True)
        dn = self.num.diff(k)
        dd = self.den.diff(k)
        return RatFn(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Sequence, index: int = 0) -> Fraction:
        d = self.den.evaluate(point)
        if d == 0:
            raise DenominatorVanishes(index)
        return Fraction(self.num.evaluate(point)) / d

    def at_origin(self, index: int = 0) -> Fraction:
        d = self.den.constant_term()
        if d == 0:
            raise DenominatorVanishes(index)
        return Fraction(self.num.constant_term()) / d

    def lift(self, nvars: int) -> "RatFn":
        return RatFn(self.num.lift(nvars), self.den.lift(nvars), True)

    def variables(self) -> set[int]:
        return self.num.variables() | self.den.variables()


def _reduce(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    n = num.nvars
    if num.is_zero():
        return num, Poly.const(n, 1)
    if den.is_constant():
        c = den.constant_term()
        return num.scale(_unwrap(Fraction(1) / c)), Poly.const(n, 1)
    if len(den.terms) == 1:
        mono = _monomial_gcd(num)
        (dm, dc), = den.terms.items()
        common = tuple(min(a, b) for a, b in zip(mono, dm))
        if any(common):
            num = _divide_monomial(num, common)
            den = _divide_monomial(den, common)
        inv = _unwrap(Fraction(1) / Fraction(dc))
        return num.scale(inv), den.scale(inv)
    if num.is_constant():
        g_num, g_den = num, den
    else:
        _, g_num, g_den = poly_cofactors(num, den)
    lc = Fraction(g_den.leading_coefficient())
    inv = _unwrap(1 / lc)
    return g_num.scale(inv), g_den.scale(inv)


Scalar = Union[Poly, RatFn]


class PolyVF:
    """Vector field with polynomial components; component i multiplies d/dx_{i+1}."""

    __slots__ = ("dim", "components", "_hash")

    def __init__(self, components: Sequence[Poly]):
        comps = tuple(components)
        if not comps:
            raise DimensionMismatch("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, Poly) or c.nvars != n:
                raise DimensionMismatch("every component must be a polynomial of arity dim")
        self.dim = n
        self.components = comps
        self._hash = None

    @classmethod
    def zero(cls, n: int) -> "PolyVF":
        z = Poly.zero(n)
        return cls([z] * n)

    @classmethod
    def partial(cls, n: int, k: int) -> "PolyVF":
        """The coordinate field d/dx_k (1-based)."""
        comps = [Poly.zero(n)] * n
        comps[k - 1] = Poly.const(n, 1)
        return cls(comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def __eq__(self, other):
        if isinstance(other, PolyVF):
            return self.components == other.components
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.components)
        return self._hash

    def __repr__(self):
        from .vfdsl import print_canonical
        return f"PolyVF({print_canonical(self)!r})"

    def __add__(self, other):
        if not isinstance(other, PolyVF):
            return NotImplemented
        _check_dims(self, other)
        return PolyVF([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        if not isinstance(other, PolyVF):
            return NotImplemented
        _check_dims(self, other)
        return PolyVF([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return PolyVF([-a for a in self.components])

    def __mul__(self, s):
        """Multiply by a scalar polynomial or constant (on the left or right)."""
        if isinstance(s, (int, Fraction)):
            return PolyVF([a.scale(s) for a in self.components])
        if isinstance(s, Poly):
            return PolyVF([a * s for a in self.components])
        return NotImplemented

    __rmul__ = __mul__

    def lift(self, new_dim: int) -> "PolyVF":
        if new_dim < self.dim:
            raise DimensionMismatch("cannot lift to a smaller dimension")
        comps = [c.lift(new_dim) for c in self.components]
        comps.extend([Poly.zero(new_dim)] * (new_dim - self.dim))
        return PolyVF(comps)

    def to_ratvf(self) -> "RatVF":
        return RatVF([RatFn.of(c) for c in self.components])


class RatVF:
    """Vector field with rational-function components."""

    __slots__ = ("dim", "components", "_hash")

    def __init__(self, components: Sequence[RatFn]):
        comps = tuple(RatFn.of(c) if isinstance(c, Poly) else c for c in components)
        if not comps:
            raise DimensionMismatch("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, RatFn) or c.nvars != n:
                raise DimensionMismatch("every component must be a rational function of arity dim")
        self.dim = n
        self.components = comps
        self._hash = None

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def is_polynomial(self) -> bool:
        return all(c.is_polynomial() for c in self.components)

    def to_polyvf(self) -> PolyVF:
        return PolyVF([c.as_poly() for c in self.components])

    def __eq__(self, other):
        if isinstance(other, RatVF):
            return self.components == other.components
        if isinstance(other, PolyVF):
            return self.is_polynomial() and self.to_polyvf() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.components)
        return self._hash

    def __repr__(self):
        from .vfdsl import print_canonical
        return f"RatVF({print_canonical(self)!r})"

    def __mul__(self, s):
        if isinstance(s, (int, Fraction, Poly, RatFn)):
            return RatVF([c * s for c in self.components])
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        other = _as_ratvf(other)
        _check_dims(self, other)
        return RatVF([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        other = _as_ratvf(other)
        _check_dims(self, other)
        return RatVF([a - b for a, b in zip(self.components, other.components)])


VectorField = Union[PolyVF, RatVF]


def _as_ratvf(f) -> RatVF:
    if isinstance(f, RatVF):
        return f
    if isinstance(f, PolyVF):
        return f.to_ratvf()
    raise TypeError(f"not a vector field: {type(f).__name__}")


def _check_dims(f, g):
    if f.dim != g.dim:
        raise DimensionMismatch(f"dimension {f.dim} vs {g.dim}")


def lie_bracket(f: VectorField, g: VectorField) -> VectorField:
    """[f, g]_i = sum_j f_j dg_i/dx_j - g_j df_i/dx_j."""
    _check_dims(f, g)
    if isinstance(f, PolyVF) and isinstance(g, PolyVF):
        n = f.dim
        fc, gc = f.components, g.components
        out = []
        f_active = [j for j in range(n) if fc[j].terms]
        g_active = [j for j in range(n) if gc[j].terms]
        for i in range(n):
            acc = Poly.zero(n)
            gi, fi = gc[i], fc[i]
            if gi.terms and not gi.is_constant():
                for j in f_active:
                    d = gi.diff(j + 1)
                    if d.terms:
                        acc = acc + fc[j] * d
            if fi.terms and not fi.is_constant():
                for j in g_active:
                    d = fi.diff(j + 1)
                    if d.terms:
                        acc = acc - gc[j] * d
            out.append(acc)
        return PolyVF(out)
    f, g = _as_ratvf(f), _as_ratvf(g)
    return RatVF([lie_derivative(f, gi) - lie_derivative(g, fi) for gi, fi in zip(g.components, f.components)])


def lie_derivative(f: VectorField, phi: Scalar) -> Scalar:
    """L_f phi = sum_j f_j dphi/dx_j; a Poly when both inputs are polynomial."""
    if phi.nvars != f.dim:
        raise DimensionMismatch(f"function arity {phi.nvars} vs field dimension {f.dim}")
    n = f.dim
    if isinstance(f, PolyVF) and isinstance(phi, Poly):
        acc = Poly.zero(n)
        for j, fj in enumerate(f.components):
            if fj.terms:
                d = phi.diff(j + 1)
                if d.terms:
                    acc = acc + fj * d
        return acc
    fr = _as_ratvf(f)
    ph = RatFn.of(phi)
    acc = RatFn.const(n, 0)
    for j, fj in enumerate(fr.components):
        if fj.is_zero():
            continue
        d = ph.diff(j + 1)
        if not d.is_zero():
            acc = acc + fj * d
    return acc


def iterated_lie_derivative(f: VectorField, phi: Scalar, k: int) -> Scalar:
    for _ in range(k):
        phi = lie_derivative(f, phi)
    return phi


def evaluate(f: VectorField, p: Sequence) -> tuple:
    """Exact value of a vector field at a rational point."""
    if len(p) != f.dim:
        raise DimensionMismatch(f"point of length {len(p)} for a field of dimension {f.dim}")
    p = qpoint(p)
    if isinstance(f, PolyVF):
        return tuple(Fraction(c.evaluate(p)) for c in f.components)
    return tuple(c.evaluate(p, i + 1) for i, c in enumerate(f.components))


def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Rank of a rational matrix by fraction-free elimination over the integers."""
    mat = []
    for row in rows:
        row = [Fraction(v) for v in row]
        if not any(row):
            continue
        scale = 1
        for v in row:
            scale = lcm(scale, v.denominator)
        mat.append([int(v * scale) for v in row])
    if not mat:
        return 0
    ncols = len(mat[0])
    rank = 0
    prev = 1
    for col in range(ncols):
        pivot = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if pivot is None:
            continue
        mat[rank], mat[pivot] = mat[pivot], mat[rank]
        pr = mat[rank]
        pv = pr[col]
        for r in range(rank + 1, len(mat)):
            row = mat[r]
            rv = row[col]
            for c in range(col + 1, ncols):
                row[c] = (pv * row[c] - rv * pr[c]) // prev
            row[col] = 0
        prev = pv
        rank += 1
        if rank == len(mat):
            break
    return rank


def rank_at(fields: Sequence[VectorField], p: Sequence) -> int:
    """Dimension of the span of the field values at p."""
    fields = list(fields)
    if not fields:
        return 0
    n = fields[0].dim
    for f in fields:
        if f.dim != n:
            raise DimensionMismatch("fields of different dimensions")
    return bareiss_rank([evaluate(f, p) for f in fields])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[tuple]:
    """Basis of {t : rows * t = 0} over the rationals (reduced echelon form)."""
    mat = [[Fraction(v) for v in row] for row in rows if any(row)]
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(tuple(vec))
    return basis


def pushforward_in_source(phi: Sequence[Scalar], f: VectorField) -> RatVF:
    """D(phi) applied to f, written in source coordinates (no inversion)."""
    phi = list(phi)
    if len(phi) != f.dim:
        raise DimensionMismatch(f"map has {len(phi)} components for a field of dimension {f.dim}")
    for c in phi:
        if c.nvars != f.dim:
            raise DimensionMismatch("map component arity differs from field dimension")
    return RatVF([RatFn.of(lie_derivative(f, c)) for c in phi])


def compose(phi: Scalar, Phi: Sequence[Scalar]) -> RatFn:
    """Substitute the components of Phi for the variables of phi."""
    Phi = [RatFn.of(c) for c in Phi]
    if phi.nvars != len(Phi):
        raise DimensionMismatch(f"function of arity {phi.nvars} composed with a map of {len(Phi)} components")
    if not Phi:
        raise DimensionMismatch("empty map")
    m = Phi[0].nvars
    if isinstance(phi, RatFn):
        num = compose(phi.num, Phi)
        den = compose(phi.den, Phi)
        if den.is_zero():
            raise GoursatError("denominator vanishes identically after substitution")
        return num / den
    if all(c.is_polynomial() for c in Phi):
        return RatFn.of(compose_poly(phi, [c.as_poly() for c in Phi]))
    powers: list[dict] = [dict() for _ in Phi]

    def power(i: int, e: int) -> RatFn:
        cache = powers[i]
        if e not in cache:
            cache[e] = Phi[i] ** e
        return cache[e]

    # accumulate over a common denominator per term to keep gcd calls down
    acc = RatFn.const(m, 0)
    for mono, c in phi.sorted_terms():
        term = RatFn.const(m, c)
        for i, e in enumerate(mono):
            if e:
                term = term * power(i, e)
        acc = acc + term
    return acc


def compose_poly(phi: Poly, Phi: Sequence[Poly]) -> Poly:
    m = Phi[0].nvars
    cache: dict = {}
    acc = Poly.zero(m)
    for mono, c in phi.terms.items():
        term = Poly.const(m, c)
        for i, e in enumerate(mono):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = Phi[i] ** e
                term = term * cache[key]
        acc = acc + term
    return acc


def jacobian_at(Phi: Sequence[Scalar], p: Sequence) -> list[list[Fraction]]:
    n = Phi[0].nvars
    return [[RatFn.of(c).diff(j + 1).evaluate(p) for j in range(n)] for c in Phi]


def determinant(mat: Sequence[Sequence]) -> Fraction:
    a = [[Fraction(v) for v in row] for row in mat]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        pivot = next((r for r in range(c, n) if a[r][c]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            a[c], a[pivot] = a[pivot], a[c]
            det = -det
        det *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return det


def x(k: int, n: int) -> Poly:
    """Shorthand for the coordinate polynomial x_k in n variables."""
    return Poly.var(n, k)
