"""Verification suites run by ``goursat suite NAME``.

Each suite returns a list of checks; a check has a name, a pass flag and a
short detail string. Suites use only the public operations of the modules.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass
from fractions import Fraction

from .krforms import KRWord, all_words, build
from .sigtype import delta_of_word, growth_from_sigtype, sigtype_from_growth, jacquard_enum

# (fixture name, word, growth vector, singularity type) for the figure captions
CAPTIONS = [
    ("unicycle", "", (2, 3), ""),
    ("car", "R0", (2, 3, 4), "a0"),
    ("two-trailer-regular", "R0.R0", (2, 3, 4, 5), "a0.a0"),
    ("two-trailer-singular", "R0.S", (2, 3, 4, 4, 5), "a0.a1"),
    ("three-trailer-regular", "R0.R0.R0", (2, 3, 4, 5, 6), "a0.a0.a0"),
    ("three-trailer-a0a0a1", "R0.R0.S", (2, 3, 4, 4, 5, 5, 6), "a0.a0.a1"),
    ("three-trailer-a0a1a0", "R0.S.R1", (2, 3, 4, 5, 5, 6), "a0.a1.a0"),
    ("three-trailer-a0a1a2", "R0.S.R0", (2, 3, 4, 5, 5, 5, 6), "a0.a1.a2"),
    ("three-trailer-a0a1a1", "R0.S.S", (2, 3, 4, 4, 5, 5, 5, 6), "a0.a1.a1"),
]

SUITES = ("consistency", "trailer", "contact", "abnormal", "catalog")


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


def _timed(name: str, fn) -> Check:
    start = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash inside a check is a failure, not an abort
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - start
    return Check(name, bool(ok), detail or f"{elapsed:.2f}s")


def catalog_suite() -> list[Check]:
    from .flags import growth_vector

    checks = []
    for name, text, growth, sig in CAPTIONS:
        def run(text=text, growth=growth, sig=sig):
            word = KRWord.parse(text) if text else KRWord(())
            got = tuple(growth_vector(build(word)))
            got_sig = delta_of_word(word).text() if word.steps else ""
            return got == growth and got_sig == sig, f"growth {got}, type {got_sig or 'empty'}"

        checks.append(_timed(f"caption {name}", run))
    return checks


def consistency_suite(max_dim: int = 8) -> list[Check]:
    from .flags import growth_vector, undual
    from .sigtype import beta_sequence

    checks = []
    for length in range(1, max_dim - 2):
        def run(length=length):
            words = all_words(length)
            bad = []
            for w in words:
                expected = undual(beta_sequence(delta_of_word(w), w.dim), w.dim)
                if tuple(growth_vector(build(w))) != tuple(expected):
                    bad.append(w.text())
            return not bad, f"{len(words)} words, mismatches: {bad[:3]}"

        checks.append(_timed(f"growth = undual(beta(delta)) on words of length {length}", run))

    def inversion():
        total = 0
        for k in range(0, max(max_dim - 2, 1)):
            for w in jacquard_enum(k):
                if sigtype_from_growth(growth_from_sigtype(w, k + 3)) != w:
                    return False, f"round trip fails on {w.text()}"
                total += 1
        return True, f"{total} singularity types"

    checks.append(_timed("sigtype_from_growth inverts growth_from_sigtype", inversion))
    return checks


def trailer_suite(seed: int = 0, tol: float = 1e-9) -> list[Check]:
    import math

    from .trailer import TrailerConfig, delta_trailer, kr_to_trailer, trailer_to_kr, verify_conversion

    rng = random.Random(seed)
    checks = []
    for n in range(1, 6):
        # angle differences stay within 0.6 of zero, well away from the singular value pi/2
        regular_thetas = [rng.uniform(-1, 1)]
        for _ in range(n):
            regular_thetas.append(regular_thetas[-1] + rng.uniform(-0.6, 0.6))
        regular = TrailerConfig(rng.uniform(-1, 1), rng.uniform(-1, 1), tuple(regular_thetas))
        thetas = [0.3]
        for k in range(n):
            thetas.append(thetas[-1] + (math.pi / 2 if k == n - 1 else 0.2))
        singular = TrailerConfig(0.1, -0.2, tuple(thetas))
        for label, config in (("regular", regular), ("singular", singular)):
            def run(config=config):
                report = verify_conversion(trailer_to_kr(config), samples=10, tol=tol, seed=seed)
                return report.passed, f"residual {report.residual_max:.2e}, word {report.word}"

            checks.append(_timed(f"conversion n={n} {label}", run))

        def control(config=singular):
            report = verify_conversion(trailer_to_kr(config, force_regular=True), samples=10, tol=tol, seed=seed)
            return not report.passed, f"forced regular branch: {report.reason or 'passed'}"

        checks.append(_timed(f"wrong-branch control n={n}", control))

    def universal():
        bad = []
        count = 0
        for length in range(1, 6):
            for w in all_words(length):
                count += 1
                if delta_trailer(kr_to_trailer(w)) != delta_of_word(w):
                    bad.append(w.text())
        return not bad, f"{count} words, mismatches: {bad[:3]}"

    checks.append(_timed("universal model preserves the singularity type", universal))
    return checks


def contact_suite() -> list[Check]:
    from .contact import base_family, check_r9, check_r11, identity_map, moduli_field, degree_of, prolong
    from .krforms import r9_word, r11_word
    from .symcore import RatFn

    checks = []
    family = base_family()

    def r9():
        values = {m.name: check_r9(m) for m in family}
        bad = [k for k, v in values.items() if v != 0]
        return not bad, f"{len(values)} base maps, nonzero: {bad}"

    checks.append(_timed("R9: c~9 = 0 for every base map", r9))
    for c in (Fraction(0), Fraction(1), Fraction(3, 2), Fraction(-2)):
        def r11(c=c):
            report = check_r11(identity_map(), c)
            ok = report.passed and report.ctilde[11] == c and report.ctilde == report.printed
            return ok, f"c~ = {dict((k, str(v)) for k, v in report.ctilde.items())}"

        checks.append(_timed(f"R11: c~11 = c11 for c11 = {c}", r11))

    def degrees():
        g9 = moduli_field(prolong(identity_map(), r9_word(0)))
        got9 = {k: degree_of(RatFn.var(9, k), g9) for k in (5, 6, 1, 4)}
        g11 = moduli_field(prolong(identity_map(), r11_word(0)))
        got11 = {k: degree_of(RatFn.var(11, k), g11) for k in (6, 4, 1)}
        ok = got9 == {5: 1, 6: 2, 1: 3, 4: 4} and got11 == {6: 3, 4: 5, 1: 4}
        return ok, f"R9 {got9}, R11 {got11}"

    checks.append(_timed("degree tables", degrees))
    return checks


def abnormal_suite() -> list[Check]:
    from .abnormal import abnormal_cone, l_locus, singular_locus

    expected_cones = {
        0: {0: "(d/dx7) U (d/dx5)", 1: "(d/dx7)"},
        1: "(d/dx7, d/dx6) U (d/dx7, d/dx5)",
        2: "(d/dx7, d/dx6, d/dx5) U (d/dx7, d/dx6, d/dx4)",
    }
    checks = []
    for c7 in (0, 1):
        word = f"R0.S.S.R{c7}"

        def run(word=word, c7=c7):
            got = [abnormal_cone(word, i).text() for i in range(3)]
            want = [expected_cones[0][c7], expected_cones[1], expected_cones[2]]
            k = (singular_locus(word, 0).text(), singular_locus(word, 2).text())
            l0 = l_locus(word, 0)
            ok = got == want and k == ("{x6x5=0}", "{x5=0}") and (
                (l0 is not None and l0.text() == "{x7=x6=0}") if c7 == 0 else l0 is None
            )
            return ok, f"A = {got}, K0/K2 = {k}, L0 = {l0.text() if l0 else None}"

        checks.append(_timed(f"dim-7 example, c7 = {c7}", run))

    def weak():
        a, b = "R0.R0.R0", "R0.S.R1"
        same = abnormal_cone(a, 0).text() == abnormal_cone(b, 0).text()
        differ = delta_of_word(a) != delta_of_word(b)
        return same and differ, f"A^(0) = {abnormal_cone(a, 0).text()}; types {delta_of_word(a).text()}, {delta_of_word(b).text()}"

    checks.append(_timed("same abnormal cones, different singularity types", weak))
    return checks


def run_suite(name: str, max_dim: int = 8, seed: int = 0, tol: float = 1e-9) -> list[Check]:
    if name == "catalog":
        return catalog_suite()
    if name == "consistency":
        return consistency_suite(max_dim)
    if name == "trailer":
        return trailer_suite(seed, tol)
    if name == "contact":
        return contact_suite()
    if name == "abnormal":
        return abnormal_suite()
    raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
