"""Prolongation of first-order contact maps along Kumpera-Ruiz words.

A contact map Phi on R^3 carries the contact pair (k1, k2) to the same pair in
the target coordinates up to multipliers:

    DPhi.k1 = nu  (k1~ o Phi) + lam (k2~ o Phi)
    DPhi.k2 = eta (k1~ o Phi) + mu  (k2~ o Phi)

Every prolongation step of the source word fixes the next component of the
prolonged map by requiring that DPhi carries the new k2 into the span of the
target pair. All identities are checked in source coordinates, so Phi is
never inverted.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

from .errors import DenominatorVanishes, GoursatError
from .krforms import KRWord, Regular, Singular, as_word, build, pfaff_darboux, r9_word, r11_word
from .symcore import Poly, RatFn, RatVF, compose, determinant, jacobian_at, lie_derivative

DEFAULT_DEGREE_CAP = 16


class NotContact(GoursatError):
    """The map does not preserve the contact distribution."""


class NotDiffeo(GoursatError):
    """The Jacobian of the map is singular at the origin."""


class VanishingMultiplier(GoursatError):
    """A multiplier vanishes at the origin, so the prolongation is undefined."""

    def __init__(self, name: str, level: int):
        super().__init__(f"{name}_{level}(0) = 0")
        self.name = name
        self.level = level


@dataclass(frozen=True)
class Infinite:
    """Degree not reached below the cap."""

    cap: int

    def __str__(self) -> str:
        return f">={self.cap}"


def _rat(f, n: int) -> RatFn:
    f = RatFn.of(f, n)
    if f.nvars < n:
        f = f.lift(n)
    return f


def _contact_fields(n: int) -> tuple[RatVF, RatVF]:
    """The contact pair on R^3, lifted to n variables."""
    base = pfaff_darboux()
    return base.f1.lift(n).to_ratvf(), base.f2.lift(n).to_ratvf()


def _kr_fields(word: KRWord, level: int, n: int) -> tuple[RatVF, RatVF]:
    """The pair of the prefix of the word ending at x_level, lifted to n variables."""
    s = build(KRWord(word.steps[: level - 3]))
    return s.f1.lift(n).to_ratvf(), s.f2.lift(n).to_ratvf()


@dataclass(frozen=True)
class ContactMap3:
    """A certified first-order contact map with Phi(0) = 0."""

    components: tuple
    nu: RatFn
    lam: RatFn
    eta: RatFn
    mu: RatFn
    name: str = ""

    def certificate(self) -> tuple:
        """(nu, lam, eta, mu) at the origin."""
        return tuple(f.at_origin() for f in (self.nu, self.lam, self.eta, self.mu))

    def to_json(self) -> dict:
        from .vfdsl import format_rational, format_ratfn

        return {
            "name": self.name,
            "components": [format_ratfn(c) for c in self.components],
            "certificate": {
                "nu": format_ratfn(self.nu),
                "lambda": format_ratfn(self.lam),
                "eta": format_ratfn(self.eta),
                "mu": format_ratfn(self.mu),
            },
            "certificate_at_0": [format_rational(v) for v in self.certificate()],
        }


def solve_first_order(phi: Sequence, name: str = "") -> ContactMap3:
    """Find the multipliers of a contact map on R^3, or raise NotContact.

    Since k1 = d/dx3 and k2 = d/dx1 + x3 d/dx2, the target pair composed with
    Phi is (d/dx3, d/dx1 + Phi3 d/dx2). Reading off the first and third
    components gives the multipliers; the second component is the contact
    condition that must then hold identically.
    """
    phi = [_rat(f, 3) for f in phi]
    if len(phi) != 3 or any(f.nvars != 3 for f in phi):
        raise GoursatError("a first-order contact map has three components in x1, x2, x3")
    for i, f in enumerate(phi, start=1):
        if f.at_origin(i) != 0:
            raise GoursatError(f"Phi(0) != 0: component {i} is {f.at_origin(i)} at the origin")
    if determinant(jacobian_at(phi, (0, 0, 0))) == 0:
        raise NotDiffeo("the Jacobian of Phi is singular at 0")
    k1, k2 = _contact_fields(3)
    d1 = [lie_derivative(k1, f) for f in phi]
    d2 = [lie_derivative(k2, f) for f in phi]
    lam, nu = d1[0], d1[2]
    mu, eta = d2[0], d2[2]
    if d1[1] != lam * phi[2]:
        raise NotContact("DPhi.k1 leaves the contact distribution")
    if d2[1] != mu * phi[2]:
        raise NotContact("DPhi.k2 leaves the contact distribution")
    if (nu * mu - lam * eta).at_origin() == 0:
        raise NotDiffeo("the multiplier determinant nu*mu - lam*eta vanishes at 0")
    return ContactMap3(tuple(phi), nu, lam, eta, mu, name)


# standard base maps


def identity_map() -> ContactMap3:
    return solve_first_order([RatFn.var(3, k) for k in (1, 2, 3)], "identity")


def scaling_map(a, b) -> ContactMap3:
    """(a x1, a b x2, b x3) for nonzero rationals a, b."""
    a, b = Fraction(a), Fraction(b)
    x1, x2, x3 = (RatFn.var(3, k) for k in (1, 2, 3))
    return solve_first_order([x1 * a, x2 * (a * b), x3 * b], f"scaling({a},{b})")


def shear_map(c) -> ContactMap3:
    """(x1, x2 + c x1^2/2, x3 + c x1)."""
    c = Fraction(c)
    x1, x2, x3 = (RatFn.var(3, k) for k in (1, 2, 3))
    return solve_first_order([x1, x2 + x1 * x1 * (c / 2), x3 + x1 * c], f"shear({c})")


def point_map() -> ContactMap3:
    """Prolongation of the plane map (x, y) -> (x + y, y); rational in x3."""
    x1, x2, x3 = (RatFn.var(3, k) for k in (1, 2, 3))
    one = RatFn.const(3, 1)
    return solve_first_order([x1 + x2, x2, x3 / (one + x3)], "point(x+y,y)")


def legendre_map() -> ContactMap3:
    """(x3, x1 x3 - x2, x1): exchanges the roles of x1 and x3."""
    x1, x2, x3 = (RatFn.var(3, k) for k in (1, 2, 3))
    return solve_first_order([x3, x1 * x3 - x2, x1], "legendre")


def base_family() -> list[ContactMap3]:
    """Identity, scalings, shears, a point map and the Legendre map."""
    maps = [identity_map()]
    values = [1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2)]
    for a in values:
        for b in values:
            maps.append(scaling_map(a, b))
    for c in (1, -1, 3):
        maps.append(shear_map(c))
    maps.append(point_map())
    maps.append(legendre_map())
    return maps


# prolongation


@dataclass(frozen=True)
class ProlongedContact:
    """Components Phi_1..Phi_n and multiplier chains of a prolonged contact map.

    Lists are indexed by level: ``components[i - 1]`` is Phi_i, and ``nu[i]``,
    ``lam[i]``, ``eta[i]``, ``mu[i]`` are the multipliers at level i (entries
    below 3 are None). ``ctilde`` maps each regular target coordinate to its
    constant.
    """

    base: ContactMap3
    source_word: KRWord
    target_word: KRWord
    components: tuple
    nu: tuple
    lam: tuple
    eta: tuple
    mu: tuple
    ctilde: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.source_word.dim

    def component(self, i: int) -> RatFn:
        return self.components[i - 1]

    def with_multiplier(self, name: str, level: int, value: RatFn) -> "ProlongedContact":
        """Copy with one multiplier replaced (used for negative controls)."""
        chain = list(getattr(self, name))
        chain[level] = _rat(value, self.dim)
        return replace(self, **{name: tuple(chain)})

    def to_json(self) -> dict:
        from .vfdsl import format_rational, format_ratfn

        n = self.dim
        return {
            "base": self.base.name,
            "source_word": self.source_word.text(),
            "target_word": self.target_word.text(),
            "components": [format_ratfn(c) for c in self.components],
            "multipliers_at_0": {
                str(i): {
                    "nu": format_rational(self.nu[i].at_origin()),
                    "eta": format_rational(self.eta[i].at_origin()),
                    "mu": format_rational(self.mu[i].at_origin()),
                }
                for i in range(3, n + 1)
            },
            "ctilde": {str(k): format_rational(v) for k, v in sorted(self.ctilde.items())},
        }


def prolong(base: ContactMap3, source_word) -> ProlongedContact:
    """Extend a certified contact map along the source word.

    At level i the new source field is k2^i = a k1^(i-1) + b k2^(i-1) with
    (a, b) = (x_i + c, 1) for R_c and (1, x_i) for S. Its image under the
    previous map is A (k1~ o Phi) + B (k2~ o Phi) with A = a nu + b eta and
    B = a lam + b mu. When B(0) != 0 the target step is regular with
    Phi_i = A/B - c~ and mu_i = B; otherwise it is singular with Phi_i = B/A
    and mu_i = A. In both cases nu_i = dPhi_i/dx_i and eta_i = L_{k2^i} Phi_i.
    """
    word = as_word(source_word)
    n = word.dim
    comps = [_rat(f, n) for f in base.components]
    zero = RatFn.const(n, 0)
    nu = [None, None, None, _rat(base.nu, n)]
    lam = [None, None, None, _rat(base.lam, n)]
    eta = [None, None, None, _rat(base.eta, n)]
    mu = [None, None, None, _rat(base.mu, n)]
    target_steps = []
    ctilde: dict = {}
    for i in range(4, n + 1):
        step = word.step_at(i)
        xi = RatFn.var(n, i)
        if isinstance(step, Regular):
            a, b = xi + step.c, RatFn.const(n, 1)
        else:
            a, b = RatFn.const(n, 1), xi
        big_a = a * nu[i - 1] + b * eta[i - 1]
        big_b = a * lam[i - 1] + b * mu[i - 1]
        if big_b.at_origin() != 0:
            c = (big_a / big_b).at_origin()
            phi_i = big_a / big_b - c
            mu_i = big_b
            target_steps.append(Regular(c))
            ctilde[i] = c
        else:
            if big_a.at_origin() == 0:
                raise VanishingMultiplier("mu", i)
            phi_i = big_b / big_a
            mu_i = big_a
            target_steps.append(Singular())
        stray = {k for k in phi_i.variables() if k > i}
        if stray:
            raise GoursatError(f"Phi_{i} depends on x{min(stray)}: triangularity fails")
        _, k2 = _kr_fields(word, i, n)
        nu_i = phi_i.diff(i)
        if nu_i.at_origin() == 0:
            raise VanishingMultiplier("nu", i)
        comps.append(phi_i)
        nu.append(nu_i)
        lam.append(zero)
        eta.append(lie_derivative(k2, phi_i))
        mu.append(mu_i)
    return ProlongedContact(
        base, word, KRWord(tuple(target_steps)), tuple(comps),
        tuple(nu), tuple(lam), tuple(eta), tuple(mu), ctilde,
    )


@dataclass(frozen=True)
class ProlongationReport:
    passed: bool
    first_failure: int | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        return {"pass": self.passed, "first_failing_level": self.first_failure, "detail": self.detail}


def _field_image(fld: RatVF, comps: Sequence[RatFn]) -> list[RatFn]:
    return [lie_derivative(fld, c) for c in comps]


def _composed(fld: RatVF, comps: Sequence[RatFn], level: int) -> list[RatFn]:
    """Components of a level-`level` target field, evaluated along the map."""
    head = list(comps[:level])
    out = []
    for c in fld.components[:level]:
        c3 = RatFn.of(c)
        # the target field lives on x~_1..x~_level; drop the unused trailing variables
        out.append(compose(_restrict(c3, level), head))
    return out


def _restrict(f: RatFn, m: int) -> RatFn:
    """The same function viewed in m variables (it must not use later ones)."""
    if any(k > m for k in f.variables()):
        raise GoursatError("function depends on a variable beyond the restriction")
    def cut(p: Poly) -> Poly:
        return Poly(m, {mono[:m]: c for mono, c in p.terms.items()})

    return RatFn(cut(f.num), cut(f.den), True)


def verify_prolongation(
    prolonged: ProlongedContact, source_word=None, target_word=None
) -> ProlongationReport:
    """Check DPhi.k1^i and DPhi.k2^i against the target pair at every level."""
    source = as_word(source_word) if source_word is not None else prolonged.source_word
    target = as_word(target_word) if target_word is not None else prolonged.target_word
    n = source.dim
    if target.dim != n or prolonged.dim != n:
        raise GoursatError("source word, target word and map live on different dimensions")
    comps = prolonged.components
    for i in range(3, n + 1):
        s1, s2 = _kr_fields(source, i, n)
        t1, t2 = _kr_fields(target, i, n)
        head = comps[:i]
        img1 = _field_image(s1, head)
        img2 = _field_image(s2, head)
        t1c = _composed(t1, comps, i)
        t2c = _composed(t2, comps, i)
        for name, img, left, right in (
            ("k1", img1, prolonged.nu[i], prolonged.lam[i]),
            ("k2", img2, prolonged.eta[i], prolonged.mu[i]),
        ):
            for j in range(i):
                if img[j] != left * t1c[j] + right * t2c[j]:
                    return ProlongationReport(False, i, f"DPhi.{name}^{i} differs in component {j + 1}")
    return ProlongationReport(True)


def check_closed_forms(prolonged: ProlongedContact) -> list[int]:
    """Levels i >= 5 where the closed-form multiplier rules fail.

    Regular source steps keep mu, divide nu by mu, and set the constant to
    (c nu + eta)/mu at 0; singular steps give Phi_i = x_i mu/(nu + x_i eta)
    with mu_i = nu + x_i eta.
    """
    word = prolonged.source_word
    n = word.dim
    bad = []
    for i in range(5, n + 1):
        step = word.step_at(i)
        nu_p, eta_p, mu_p = prolonged.nu[i - 1], prolonged.eta[i - 1], prolonged.mu[i - 1]
        xi = RatFn.var(n, i)
        if isinstance(step, Regular):
            c = (nu_p.at_origin() * step.c + eta_p.at_origin()) / mu_p.at_origin()
            ok = (
                prolonged.mu[i] == mu_p
                and prolonged.nu[i] == nu_p / mu_p
                and prolonged.ctilde.get(i) == c
            )
        else:
            ok = (
                prolonged.component(i) == xi * mu_p / (nu_p + xi * eta_p)
                and prolonged.mu[i] == nu_p + xi * eta_p
            )
        if not ok:
            bad.append(i)
    return bad


# degrees and the moduli checks


def _truncate(p: Poly, order: int) -> Poly:
    return Poly(p.nvars, {m: c for m, c in p.terms.items() if sum(m) <= order})


def taylor_jet(f, order: int, nvars: int | None = None) -> Poly:
    """Taylor polynomial of total degree <= order at the origin (denominator nonzero at 0)."""
    f = RatFn.of(f, nvars) if nvars is not None else RatFn.of(f)
    d0 = f.den.constant_term()
    if d0 == 0:
        raise DenominatorVanishes(0)
    n = f.nvars
    # 1/den = (1/d0) * sum_m u^m with u = 1 - den/d0, which vanishes at 0
    u = Poly.const(n, 1) - f.den.scale(Fraction(1) / Fraction(d0))
    inv = Poly.const(n, 1)
    power = Poly.const(n, 1)
    for _ in range(order):
        power = _truncate(power * u, order)
        if power.is_zero():
            break
        inv = inv + power
    return _truncate(_truncate(f.num, order) * inv, order).scale(Fraction(1) / Fraction(d0))


def lie_series_at_origin(gamma, g: RatVF, order: int) -> list[Fraction]:
    """[(L_g^k gamma)(0) for k = 0..order], computed on truncated Taylor jets.

    The value at 0 of L_g^k gamma only involves gamma up to degree k and g up
    to degree k - 1, so after j derivatives the jet is cut at degree order - j.
    """
    n = g.dim
    f = taylor_jet(_rat(gamma, n), order)
    comps = [taylor_jet(RatFn.of(c, n), max(order - 1, 0)) for c in g.components]
    out = [f.constant_term()]
    for j in range(1, order + 1):
        keep = order - j
        acc = Poly.zero(n)
        for idx, gc in enumerate(comps):
            if gc.is_zero():
                continue
            d = f.diff(idx + 1)
            if not d.is_zero():
                acc = acc + _truncate(_truncate(gc, keep) * d, keep)
        f = acc
        out.append(Fraction(f.constant_term()))
    return [Fraction(v) for v in out]


def degree_of(gamma, g: RatVF, cap: int = DEFAULT_DEGREE_CAP) -> int | Infinite:
    """Smallest k with (L_g^k gamma)(0) != 0, or Infinite(cap)."""
    for k, value in enumerate(lie_series_at_origin(gamma, g, cap)):
        if value != 0:
            return k
    return Infinite(cap)


def moduli_field(prolonged: ProlongedContact, level: int = 6) -> RatVF:
    """g = (1/mu_level) k2^n of the source form."""
    n = prolonged.dim
    k2 = build(prolonged.source_word).f2.lift(n).to_ratvf()
    return k2 * prolonged.mu[level].inverse()


@dataclass(frozen=True)
class ModuliReport:
    """Constants read off Phi_6 by iterated derivatives along g, with their cross-checks.

    ``ctilde`` holds (L_g^k Phi_6)(0) keyed by 6 + k; ``direct`` holds the
    constants produced by the full prolongation. ``expected`` is lead * alpha^k
    with lead = dPhi_6/dx6(0) = mu(0) alpha(0), and ``printed`` is the shorter
    form mu(0) alpha^k(0), which agrees with it exactly when alpha(0) = 1.
    """

    kind: str
    base: str
    c: Fraction
    ctilde: dict
    direct: dict
    expected: dict
    printed: dict
    degrees: dict
    mu0: Fraction
    nu0: Fraction
    alpha0: Fraction
    lead: Fraction
    passed: bool

    def __bool__(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        from .vfdsl import format_rational

        q = lambda d: {str(k): format_rational(v) for k, v in sorted(d.items())}
        return {
            "kind": self.kind,
            "base": self.base,
            "c": format_rational(self.c),
            "ctilde": q(self.ctilde),
            "direct": q(self.direct),
            "expected": q(self.expected),
            "printed": q(self.printed),
            "degrees": {k: (v if isinstance(v, int) else str(v)) for k, v in self.degrees.items()},
            "mu0": format_rational(self.mu0),
            "nu0": format_rational(self.nu0),
            "alpha0": format_rational(self.alpha0),
            "lead": format_rational(self.lead),
            "pass": self.passed,
        }


def _moduli(base: ContactMap3, word: KRWord, kind: str, c, degree_vars: Sequence[int]) -> ModuliReport:
    """Shared work of the R9 and R11 checks; both words are regular above x6."""
    prolonged = prolong(base, word)
    n = word.dim
    g = moduli_field(prolonged, 6)
    phi6 = prolonged.component(6)
    series = lie_series_at_origin(phi6, g, n - 6)
    ctilde = {6 + k: series[k] for k in range(1, n - 5)}
    mu0 = prolonged.mu[4].at_origin()
    nu0 = prolonged.nu[4].at_origin()
    alpha0 = prolonged.mu[6].inverse().at_origin()
    lead = phi6.diff(6).at_origin()
    # Phi_6 agrees with lead * x6 up to terms of higher degree along g
    expected = {}
    printed = {}
    for k in range(1, n - 5):
        value = _leading_value(word, k)
        expected[6 + k] = lead * alpha0**k * value
        printed[6 + k] = mu0 * alpha0**k * value
    degrees = {f"x{k}": degree_of(RatFn.var(n, k), g) for k in degree_vars}
    passed = (
        ctilde == expected
        and all(prolonged.ctilde.get(k) == v for k, v in ctilde.items())
        and lead == mu0 * alpha0
    )
    return ModuliReport(kind, base.name, Fraction(c), ctilde, dict(prolonged.ctilde), expected, printed,
                        degrees, mu0, nu0, alpha0, lead, passed)


def _leading_value(word: KRWord, k: int) -> Fraction:
    """(L_{k2}^k x6)(0) for the source form, the alpha = 1 value of the k-th constant."""
    n = word.dim
    k2 = build(word).f2.lift(n)
    f = RatFn.var(n, 6)
    g = k2.to_ratvf()
    return lie_series_at_origin(f, g, k)[k]


def r9_report(base: ContactMap3 | None = None, c9=0) -> ModuliReport:
    """The R9 check: c~9 = (L_g^3 Phi_6)(0), which vanishes for every base when c9 = 0."""
    base = base or identity_map()
    report = _moduli(base, r9_word(c9), "R9", c9, (5, 6, 1, 4))
    if Fraction(c9) == 0:
        report = replace(report, passed=report.passed and report.ctilde[9] == 0)
    return report


def check_r9(base: ContactMap3 | None = None, c9=0) -> Fraction:
    """(L_g^3 Phi_6)(0) for the R9 word, prolonging the base only through x6."""
    base = base or identity_map()
    word = r9_word(c9)
    prolonged = prolong(base, KRWord(word.steps[:3]))
    n = word.dim
    phi6 = prolonged.component(6).lift(n)
    k2 = build(word).f2.lift(n).to_ratvf()
    g = k2 * prolonged.mu[6].lift(n).inverse()
    return lie_series_at_origin(phi6, g, 3)[3]


def check_r11(base: ContactMap3 | None = None, c11=0) -> ModuliReport:
    """c~9, c~10, c~11 for the R11 word with constant c11.

    They equal lead * alpha(0)^k for k = 3, 4 and lead * alpha(0)^5 * c11;
    so c~9 = c~10 = 1 forces alpha(0) = lead = 1 and c~11 = c11.
    """
    base = base or identity_map()
    c11 = Fraction(c11)
    report = _moduli(base, r11_word(c11), "R11", c11, (6, 5, 4, 1))
    if report.ctilde[9] == 1 and report.ctilde[10] == 1:
        report = replace(report, passed=report.passed and report.ctilde[11] == c11)
    return report
