"""The n-trailer system and its conversion to and from Kumpera-Ruiz normal forms."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import GoursatError
from .krforms import KRWord, Regular, Singular, as_word, build
from .sigtype import STWord

ANGLE_TOL = 1e-9
AMBIGUITY_BAND = 1e-6
MULTIPLIER_FLOOR = 1e-8


class AmbiguousAngle(GoursatError):
    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"angle difference {index} is too close to a singular value to classify")


class DegenerateMultiplier(GoursatError):
    def __init__(self, level: int, message: str | None = None):
        self.level = level
        super().__init__(message or f"a multiplier vanishes at level {level}")


# expression DAG


_TABLE: dict = {}
_COUNTER = itertools.count()


class TrigExpr:
    """Interned expression node over xi1, xi2, th0, ..., thN (variable indices 0, 1, 2, ...).

    Nodes are hash-consed, so structurally equal expressions are the same object.
    Partial derivatives are exact and memoized; evaluation is in floats.
    """

    __slots__ = ("op", "args", "val", "seq", "free", "_dcache", "__weakref__")

    def __init__(self, op, args, val):
        self.op = op
        self.args = args
        self.val = val
        self.seq = next(_COUNTER)
        if op == "v":
            self.free = frozenset((val,))
        elif op == "c":
            self.free = frozenset()
        else:
            self.free = frozenset().union(*(a.free for a in args))
        self._dcache = {}

    @staticmethod
    def _make(op, args=(), val=None) -> "TrigExpr":
        key = (op, val, tuple(a.seq for a in args))
        node = _TABLE.get(key)
        if node is None:
            node = TrigExpr(op, tuple(args), val)
            _TABLE[key] = node
        return node

    # constructors

    @classmethod
    def const(cls, c) -> "TrigExpr":
        return cls._make("c", (), Fraction(c))

    @classmethod
    def var(cls, index: int) -> "TrigExpr":
        return cls._make("v", (), int(index))

    @staticmethod
    def lift_value(x) -> "TrigExpr":
        return x if isinstance(x, TrigExpr) else TrigExpr.const(x)

    @staticmethod
    def sin(a) -> "TrigExpr":
        a = TrigExpr.lift_value(a)
        if a.is_const() and a.val == 0:
            return ZERO
        return TrigExpr._make("sin", (a,))

    @staticmethod
    def cos(a) -> "TrigExpr":
        a = TrigExpr.lift_value(a)
        if a.is_const() and a.val == 0:
            return ONE
        return TrigExpr._make("cos", (a,))

    @staticmethod
    def tan(a) -> "TrigExpr":
        a = TrigExpr.lift_value(a)
        if a.is_const() and a.val == 0:
            return ZERO
        return TrigExpr._make("tan", (a,))

    @staticmethod
    def atan(a) -> "TrigExpr":
        a = TrigExpr.lift_value(a)
        if a.is_const() and a.val == 0:
            return ZERO
        return TrigExpr._make("atan", (a,))

    # queries

    def is_const(self) -> bool:
        return self.op == "c"

    def is_zero(self) -> bool:
        return self.op == "c" and self.val == 0

    def is_one(self) -> bool:
        return self.op == "c" and self.val == 1

    def max_var(self) -> int:
        return max(self.free, default=-1)

    # arithmetic with light simplification

    def __add__(self, other) -> "TrigExpr":
        other = TrigExpr.lift_value(other)
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if self.is_const() and other.is_const():
            return TrigExpr.const(self.val + other.val)
        return TrigExpr._make("+", (self, other))

    __radd__ = __add__

    def __neg__(self) -> "TrigExpr":
        if self.is_const():
            return TrigExpr.const(-self.val)
        if self.op == "neg":
            return self.args[0]
        return TrigExpr._make("neg", (self,))

    def __sub__(self, other) -> "TrigExpr":
        return self + (-TrigExpr.lift_value(other))

    def __rsub__(self, other) -> "TrigExpr":
        return TrigExpr.lift_value(other) + (-self)

    def __mul__(self, other) -> "TrigExpr":
        other = TrigExpr.lift_value(other)
        if self.is_zero() or other.is_zero():
            return ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        if self.is_const() and other.is_const():
            return TrigExpr.const(self.val * other.val)
        if self.is_const() and self.val == -1:
            return -other
        if other.is_const() and other.val == -1:
            return -self
        return TrigExpr._make("*", (self, other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TrigExpr":
        other = TrigExpr.lift_value(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero expression")
        if self.is_zero():
            return ZERO
        if other.is_one():
            return self
        if self.is_const() and other.is_const():
            return TrigExpr.const(self.val / other.val)
        return TrigExpr._make("/", (self, other))

    def __rtruediv__(self, other) -> "TrigExpr":
        return TrigExpr.lift_value(other) / self

    def __pow__(self, k: int) -> "TrigExpr":
        k = int(k)
        if k == 0:
            return ONE
        if k < 0:
            return ONE / (self ** (-k))
        if k == 1:
            return self
        if self.is_const():
            return TrigExpr.const(self.val**k)
        return TrigExpr._make("^", (self,), k)

    # calculus

    def diff(self, index: int) -> "TrigExpr":
        """Exact partial derivative with respect to variable ``index``."""
        if index not in self.free:
            return ZERO
        d = self._dcache.get(index)
        if d is not None:
            return d
        op, a = self.op, self.args
        if op == "v":
            d = ONE
        elif op == "+":
            d = a[0].diff(index) + a[1].diff(index)
        elif op == "neg":
            d = -a[0].diff(index)
        elif op == "*":
            d = a[0].diff(index) * a[1] + a[0] * a[1].diff(index)
        elif op == "/":
            num, den = a
            dn, dd = num.diff(index), den.diff(index)
            if dd.is_zero():
                d = dn / den
            else:
                d = (dn * den - num * dd) / den**2
        elif op == "^":
            d = TrigExpr.const(self.val) * a[0] ** (self.val - 1) * a[0].diff(index)
        elif op == "sin":
            d = TrigExpr.cos(a[0]) * a[0].diff(index)
        elif op == "cos":
            d = -(TrigExpr.sin(a[0]) * a[0].diff(index))
        elif op == "tan":
            d = (ONE + self**2) * a[0].diff(index)
        elif op == "atan":
            d = a[0].diff(index) / (ONE + a[0] ** 2)
        else:
            raise AssertionError(op)
        self._dcache[index] = d
        return d

    def evaluate(self, point: Sequence[float], memo: dict | None = None) -> float:
        """Float value at a point given as (xi1, xi2, th0, ..., thN)."""
        if memo is None:
            memo = {}
        stack = [self]
        while stack:
            node = stack[-1]
            if node.seq in memo:
                stack.pop()
                continue
            pending = [c for c in node.args if c.seq not in memo]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            memo[node.seq] = node._apply([memo[c.seq] for c in node.args], point)
        return memo[self.seq]

    def _apply(self, vals, point) -> float:
        op = self.op
        if op == "c":
            return float(self.val)
        if op == "v":
            return float(point[self.val])
        if op == "+":
            return vals[0] + vals[1]
        if op == "neg":
            return -vals[0]
        if op == "*":
            return vals[0] * vals[1]
        if op == "/":
            return vals[0] / vals[1] if vals[1] != 0.0 else math.copysign(math.inf, vals[0])
        if op == "^":
            return vals[0] ** self.val
        if op == "sin":
            return math.sin(vals[0])
        if op == "cos":
            return math.cos(vals[0])
        if op == "tan":
            return math.tan(vals[0])
        if op == "atan":
            return math.atan(vals[0])
        raise AssertionError(op)

    def size(self) -> int:
        seen = set()
        stack = [self]
        while stack:
            node = stack.pop()
            if node.seq in seen:
                continue
            seen.add(node.seq)
            stack.extend(node.args)
        return len(seen)

    def __repr__(self) -> str:
        return f"TrigExpr({format_trig(self, _default_names(self.max_var() + 1))})"


ZERO = TrigExpr.const(0)
ONE = TrigExpr.const(1)


def _default_names(count: int) -> list[str]:
    return ["xi1", "xi2"] + [f"th{i}" for i in range(max(count - 2, 1))]


def format_trig(e: TrigExpr, names: Sequence[str]) -> str:
    """Text that the field grammar parses back into the same expression."""
    memo: dict = {}

    def paren(node) -> str:
        s = fmt(node)
        return s if node.op in ("v", "sin", "cos", "tan", "atan") or (node.op == "c" and node.val >= 0 and node.val.denominator == 1) else f"({s})"

    def fmt(node) -> str:
        if node.seq in memo:
            return memo[node.seq]
        op = node.op
        if op == "c":
            v = node.val
            s = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        elif op == "v":
            s = names[node.val]
        elif op == "+":
            s = f"{fmt(node.args[0])} + {paren(node.args[1])}"
        elif op == "neg":
            s = f"-{paren(node.args[0])}"
        elif op == "*":
            s = f"{paren(node.args[0])}*{paren(node.args[1])}"
        elif op == "/":
            s = f"{paren(node.args[0])}/{paren(node.args[1])}"
        elif op == "^":
            s = f"{paren(node.args[0])}^{node.val}"
        else:
            s = f"{op}({fmt(node.args[0])})"
        memo[node.seq] = s
        return s

    return fmt(e)


@dataclass(frozen=True)
class TrigVF:
    components: tuple

    def __init__(self, components):
        object.__setattr__(self, "components", tuple(TrigExpr.lift_value(c) for c in components))

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def partial(cls, dim: int, index: int) -> "TrigVF":
        """d/d(variable index), 0-based."""
        return cls([ONE if k == index else ZERO for k in range(dim)])

    def lift(self, dim: int) -> "TrigVF":
        if dim < self.dim:
            raise GoursatError("cannot lift to a smaller dimension")
        return TrigVF(self.components + (ZERO,) * (dim - self.dim))

    def __add__(self, other: "TrigVF") -> "TrigVF":
        if self.dim != other.dim:
            raise GoursatError("dimension mismatch")
        return TrigVF([a + b for a, b in zip(self.components, other.components)])

    def scale(self, e: TrigExpr) -> "TrigVF":
        return TrigVF([e * c for c in self.components])

    def lie_derivative(self, e: TrigExpr) -> TrigExpr:
        out = ZERO
        for k, c in enumerate(self.components):
            if c.is_zero() or k not in e.free:
                continue
            out = out + c * e.diff(k)
        return out

    def evaluate(self, point: Sequence[float]) -> np.ndarray:
        memo: dict = {}
        return np.array([c.evaluate(point, memo) for c in self.components])


def _theta(i: int) -> TrigExpr:
    return TrigExpr.var(i + 2)


def _diff_angle(i: int) -> TrigExpr:
    return _theta(i) - _theta(i - 1)


_TAU_CACHE: dict = {}


def tau(n: int) -> tuple[TrigVF, TrigVF]:
    """The n-trailer pair on R^2 x (S^1)^(n+1), built trailer by trailer."""
    if n < 0:
        raise GoursatError("number of trailers must be nonnegative")
    if n in _TAU_CACHE:
        return _TAU_CACHE[n]
    if n == 0:
        t0 = _theta(0)
        pair = (TrigVF.partial(3, 2), TrigVF([TrigExpr.cos(t0), TrigExpr.sin(t0), ZERO]))
    else:
        f1, f2 = tau(n - 1)
        dim = n + 3
        d = _diff_angle(n)
        f2n = f1.lift(dim).scale(TrigExpr.sin(d)) + f2.lift(dim).scale(TrigExpr.cos(d))
        pair = (TrigVF.partial(dim, n + 2), f2n)
    _TAU_CACHE[n] = pair
    return pair


def tau_explicit(n: int) -> tuple[TrigVF, TrigVF]:
    """The same pair from the closed product formula."""
    dim = n + 3

    def pi(i: int) -> TrigExpr:
        out = ONE
        for j in range(i + 1, n + 1):
            out = out * TrigExpr.cos(_diff_angle(j))
        return out

    comps = [ZERO] * dim
    t0 = _theta(0)
    comps[0] = pi(0) * TrigExpr.cos(t0)
    comps[1] = pi(0) * TrigExpr.sin(t0)
    for i in range(n):
        comps[i + 2] = pi(i + 1) * TrigExpr.sin(_diff_angle(i + 1))
    return TrigVF.partial(dim, n + 2), TrigVF(comps)


# configurations and singular angles


def reduce_angle(a: float) -> float:
    """Representative in (-pi, pi]."""
    r = math.fmod(a, 2 * math.pi)
    if r <= -math.pi:
        r += 2 * math.pi
    elif r > math.pi:
        r -= 2 * math.pi
    return r


def angle_distance(a: float, b: float) -> float:
    return abs(reduce_angle(a - b))


@dataclass(frozen=True)
class TrailerConfig:
    xi1: float
    xi2: float
    theta: tuple

    def __post_init__(self):
        object.__setattr__(self, "xi1", float(self.xi1))
        object.__setattr__(self, "xi2", float(self.xi2))
        object.__setattr__(self, "theta", tuple(reduce_angle(float(t)) for t in self.theta))
        if not self.theta:
            raise GoursatError("a configuration has at least the angle th0")

    @property
    def n(self) -> int:
        return len(self.theta) - 1

    @classmethod
    def parse(cls, text: str) -> "TrailerConfig":
        parts = text.replace(",", " ").split()
        if len(parts) < 3:
            raise GoursatError("expected 'xi1 xi2 th0 ... thN'")
        vals = [float(p) for p in parts]
        return cls(vals[0], vals[1], tuple(vals[2:]))

    def text(self) -> str:
        return " ".join(repr(v) for v in self.as_point())

    def as_point(self) -> list[float]:
        return [self.xi1, self.xi2, *self.theta]

    def angle_difference(self, i: int) -> float:
        """theta_i - theta_{i-1}, reduced."""
        return reduce_angle(self.theta[i] - self.theta[i - 1])

    def axle_centers(self) -> list[tuple[float, float]]:
        """Axle centers from the last trailer (xi1, xi2) forward, unit spacing."""
        pts = [(self.xi1, self.xi2)]
        for k in range(self.n):
            x, y = pts[-1]
            pts.append((x + math.cos(self.theta[k]), y + math.sin(self.theta[k])))
        return pts


@dataclass(frozen=True)
class AngleCondition:
    index: int  # the difference theta_index - theta_{index-1}
    level: int  # its value lies in alpha_level

    def text(self) -> str:
        return f"th{self.index}-th{self.index - 1} in alpha{self.level}"


_ALPHA_CACHE: dict = {1: (-math.pi / 2, math.pi / 2)}


def alpha_set(i: int) -> tuple:
    """Singular angle differences of level i, reduced to (-pi, pi] and sorted."""
    if i < 1:
        raise GoursatError("alpha sets start at level 1")
    if i not in _ALPHA_CACHE:
        prev = alpha_set(i - 1)
        vals: list[float] = []
        for a in prev:
            base = math.atan(math.sin(a))
            for v in (base, base + math.pi):
                v = reduce_angle(v)
                if all(angle_distance(v, u) > 1e-12 for u in vals):
                    vals.append(v)
        _ALPHA_CACHE[i] = tuple(sorted(vals))
    return _ALPHA_CACHE[i]


def _near(value: float, targets: Sequence[float], index: int, tol: float) -> bool:
    """Membership within tol; a value in the band (tol, AMBIGUITY_BAND) is refused."""
    dist = min(angle_distance(value, t) for t in targets)
    if dist <= tol:
        return True
    if dist < AMBIGUITY_BAND:
        raise AmbiguousAngle(index)
    return False


def _follows(config: TrailerConfig, i: int, tol: float) -> bool:
    """Whether th_i - th_{i-1} is the alpha-value paired with the previous difference.

    The level-(k+1) values arctan(sin a) and arctan(sin a) + pi belong to the
    previous difference a in alpha_k; the other members of alpha_{k+1} do not count.
    """
    base = math.atan(math.sin(config.angle_difference(i - 1)))
    return _near(config.angle_difference(i), (base, base + math.pi), i, tol)


def delta_trailer(config: TrailerConfig, tol: float = ANGLE_TOL) -> STWord:
    """Singularity type of the n-trailer at a configuration."""
    if config.n < 1:
        raise GoursatError("the singularity type needs at least one trailer")
    letters = [0]
    for i in range(2, config.n + 1):
        d = config.angle_difference(i)
        prev = letters[-1]
        if _near(d, alpha_set(1), i, tol):
            letters.append(1)
        elif prev >= 1 and _follows(config, i, tol):
            letters.append(prev + 1)
        else:
            letters.append(0)
    return STWord(tuple(letters))


def sji_trailer(n: int, i: int, j: int) -> list[AngleCondition]:
    """Angle conditions cutting out S_j^(i) in trailer coordinates."""
    if not 0 <= j <= i <= n - 2:
        raise GoursatError(f"need 0 <= j <= i <= n-2 (n={n}, i={i}, j={j})")
    return [AngleCondition(n - i + l, l + 1) for l in range(j + 1)]


def in_sji_trailer(config: TrailerConfig, i: int, j: int, tol: float = ANGLE_TOL) -> bool:
    conditions = sji_trailer(config.n, i, j)
    first = conditions[0].index
    if not _near(config.angle_difference(first), alpha_set(1), first, tol):
        return False
    return all(_follows(config, c.index, tol) for c in conditions[1:])


# conversion to Kumpera-Ruiz form


def _nice_constant(x: float) -> Fraction:
    """Exact rational for a chart value: a small fraction when it matches to 1e-12."""
    r = Fraction(x).limit_denominator(1000)
    if abs(float(r) - x) < 1e-12:
        return r
    return Fraction(x)


@dataclass
class Conversion:
    """Chart phi (n+3 expressions) turning the n-trailer into a Kumpera-Ruiz form."""

    config: TrailerConfig
    chart: list
    word: KRWord  # constants are the centered chart values at the configuration
    mu: list  # mu_0 .. mu_n
    nu: list
    eta: list
    singular_base: bool = False
    forced_regular: bool = False

    @property
    def plain_word(self) -> KRWord:
        """The word with every regular constant zero (the chart is not centered)."""
        return KRWord(tuple(Regular(0) if isinstance(s, Regular) else s for s in self.word.steps))

    def multipliers(self) -> tuple[TrigExpr, TrigExpr, TrigExpr]:
        return self.mu[-1], self.nu[-1], self.eta[-1]


class _ChartBuilder:
    def __init__(self, singular_base: bool):
        xi1, xi2, t0 = TrigExpr.var(0), TrigExpr.var(1), _theta(0)
        if singular_base:
            self.chart = [xi2, xi1, TrigExpr.cos(t0) / TrigExpr.sin(t0)]
            mu = TrigExpr.sin(t0)
        else:
            self.chart = [xi1, xi2, TrigExpr.tan(t0)]
            mu = TrigExpr.cos(t0)
        f1, f2 = tau(0)
        self.mu = [mu]
        self.nu = [f1.lie_derivative(self.chart[2])]
        self.eta = [f2.lie_derivative(self.chart[2])]

    def add_level(self, i: int, singular: bool) -> None:
        d = _diff_angle(i)
        s, c = TrigExpr.sin(d), TrigExpr.cos(d)
        mu, nu, eta = self.mu[-1], self.nu[-1], self.eta[-1]
        mixed = s * nu + c * eta
        if singular:
            phi = (c * mu) / mixed
            new_mu = mixed
        else:
            phi = mixed / (c * mu)
            new_mu = c * mu
        f1, f2 = tau(i)
        self.chart.append(phi)
        self.mu.append(new_mu)
        self.nu.append(f1.lie_derivative(phi))
        self.eta.append(f2.lie_derivative(phi))


def _values(exprs, point) -> list[float]:
    memo: dict = {}
    return [e.evaluate(point, memo) for e in exprs]


def trailer_to_kr(config: TrailerConfig, tol: float = ANGLE_TOL, force_regular: bool = False) -> Conversion:
    """Chart and normal form of the n-trailer around a configuration.

    ``force_regular`` takes the regular branch at every level, which is wrong at
    singular angles; it exists for negative controls.
    """
    p = config.as_point()
    singular_base = (not force_regular) and _near(config.theta[0], alpha_set(1), 0, tol)
    b = _ChartBuilder(singular_base)
    steps = []
    for i in range(1, config.n + 1):
        singular = (not force_regular) and _near(config.angle_difference(i), alpha_set(1), i, tol)
        b.add_level(i, singular)
        mu, nu = _values([b.mu[-1], b.nu[-1]], p)
        if not force_regular and (abs(mu) < MULTIPLIER_FLOOR or abs(nu) < MULTIPLIER_FLOOR):
            raise DegenerateMultiplier(i)
        if singular:
            steps.append(Singular())
        else:
            steps.append(Regular(_nice_constant(b.chart[-1].evaluate(p))))
    return Conversion(config, b.chart, KRWord(tuple(steps)), b.mu, b.nu, b.eta, singular_base, force_regular)


def kr_to_trailer(word, target: Sequence | None = None) -> TrailerConfig:
    """A configuration where the trailer chart realizes the normal form at the target point."""
    word = as_word(word)
    n = len(word)
    dim = word.dim
    target = [Fraction(0)] * dim if target is None else [Fraction(t) for t in target]
    if len(target) != dim:
        raise GoursatError(f"target point needs {dim} coordinates")
    y = [float(t) for t in target]
    for k, step in enumerate(word.steps):
        if isinstance(step, Regular):
            y[k + 3] += float(step.c)
    thetas = [math.atan(y[2])]
    b = _ChartBuilder(False)
    for i in range(1, n + 1):
        point = [y[0], y[1], *thetas] + [0.0] * (n + 1 - len(thetas))
        mu, nu, eta = _values([b.mu[-1], b.nu[-1], b.eta[-1]], point)
        yi = y[i + 2]
        step = word.steps[i - 1]
        if isinstance(step, Singular):
            if yi == 0:
                delta = math.pi / 2
            else:
                delta = math.atan2(mu - yi * eta, yi * nu)
            b.add_level(i, True)
        else:
            delta = math.atan((mu * yi - eta) / nu)
            b.add_level(i, False)
        thetas.append(thetas[-1] + delta)
    return TrailerConfig(y[0], y[1], tuple(thetas))


@dataclass
class ConversionReport:
    passed: bool
    residual_max: float
    multipliers_at_p: dict
    word: str
    reason: str = ""
    samples: int = 0

    def to_json(self) -> dict:
        return {
            "pass": self.passed,
            "residual_max": repr(self.residual_max),
            "multipliers_at_p": {k: repr(v) for k, v in self.multipliers_at_p.items()},
            "word": self.word,
            "reason": self.reason,
        }


def _poly_float(poly, x) -> float:
    total = 0.0
    for mono, coeff in poly.terms.items():
        t = float(coeff)
        for xi, e in zip(x, mono):
            if e:
                t *= xi**e
        total += t
    return total


def _field_float(f, x) -> np.ndarray:
    return np.array([_poly_float(c, x) for c in f.components])


def verify_conversion(
    conv: Conversion, samples: int = 10, tol: float = 1e-9, radius: float = 1e-3, seed: int = 0
) -> ConversionReport:
    """Check that the chart pushes the trailer pair onto the normal form near the configuration.

    At each sample s: D(phi)(s) tau_1 must be a multiple of kappa_1 and D(phi)(s) tau_2
    a combination of kappa_1 and kappa_2, with kappa taken from the uncentered
    normal form at phi(s). Multipliers are solved by least squares.
    """
    config = conv.config
    n = config.n
    dim = n + 3
    p = config.as_point()
    f1, f2 = tau(n)
    mu_p, nu_p, eta_p = _values(list(conv.multipliers()), p)
    mults = {"mu": mu_p, "nu": nu_p, "eta": eta_p}
    levels = [_values([m, v], p) for m, v in zip(conv.mu, conv.nu)]
    worst = min(min(abs(a), abs(b)) for a, b in levels)
    if worst < MULTIPLIER_FLOOR or not all(math.isfinite(v) for v in mults.values()):
        return ConversionReport(False, math.inf, mults, conv.word.text(), "DegenerateMultiplier", 0)
    kr = build(conv.plain_word)
    jac = [[phi.diff(k) for k in range(dim)] for phi in conv.chart]
    rng = random.Random(seed)
    residual = 0.0
    for _ in range(samples):
        s = [v + rng.uniform(-radius, radius) for v in p]
        memo: dict = {}
        x = [phi.evaluate(s, memo) for phi in conv.chart]
        J = np.array([[d.evaluate(s, memo) for d in row] for row in jac])
        v1 = J @ f1.evaluate(s)
        v2 = J @ f2.evaluate(s)
        k1 = _field_float(kr.f1, x)
        k2 = _field_float(kr.f2, x)
        a1 = np.column_stack([k1])
        a2 = np.column_stack([k1, k2])
        c1 = np.linalg.lstsq(a1, v1, rcond=None)[0]
        c2 = np.linalg.lstsq(a2, v2, rcond=None)[0]
        r = max(np.max(np.abs(a1 @ c1 - v1)), np.max(np.abs(a2 @ c2 - v2)))
        sym = _values(list(conv.multipliers()), s)
        r = max(r, abs(c1[0] - sym[1]), abs(c2[0] - sym[2]), abs(c2[1] - sym[0]))
        residual = max(residual, float(r))
    passed = residual < tol
    return ConversionReport(passed, residual, mults, conv.word.text(), "" if passed else "Residual", samples)


# rigid motions


@dataclass
class RigidReport:
    config: TrailerConfig
    generators: list  # each a tuple of angle indices k, meaning the sum of d/dth_k
    fixed_axles: list  # per generator, the indices of axle centers that stay put
    branch: str
    j: int | None = None

    def to_json(self) -> dict:
        return {
            "generators": [" + ".join(f"d/dth{k}" for k in g) for g in self.generators],
            "fixed_axles": self.fixed_axles,
            "branch": self.branch,
            "j": self.j,
        }


def rigid_generators(config: TrailerConfig, tol: float = ANGLE_TOL) -> RigidReport:
    """Rigid motion directions of the trailer at a configuration.

    d/dth_n is always rigid. When the configuration lies on S_j^(j), the sum
    d/dth_n + ... + d/dth_{n-j-1} is rigid as well.
    """
    n = config.n
    gens = [(n,)]
    fixed = [list(range(n + 1))]
    found = None
    for j in range(0, n - 1):
        if in_sji_trailer(config, j, j, tol):
            found = j
            break
    if found is None:
        return RigidReport(config, gens, fixed, "C0")
    gens.append(tuple(range(n, n - found - 2, -1)))
    fixed.append(list(range(n - found)))
    return RigidReport(config, gens, fixed, f"A_{found}^(0)", found)
