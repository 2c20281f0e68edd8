"""Text grammar and canonical printer for fields, words, points and trig expressions.

Grammar (recursive descent, one token of lookahead)::

    doc     := "dim" INT ";" expr (";" expr)*
    expr    := term (("+" | "-") term)*
    term    := factor (("*" | "/") factor)*
    factor  := ("-" | "+") factor | atom ("^" INT)*
    atom    := INT | VAR | PARTIAL | "(" expr ")" | FUNC "(" expr ")"
    PARTIAL := "d/d" VAR
    KRWORD  := STEP ("." STEP)*        STEP := "S" | "R" RATIONAL
    STWORD  := LETTER ("." LETTER)*    LETTER := "a" INT

Rational literals ``p/q`` are read as an integer division, which gives the
same value.  Variables are ``x<k>`` on the normal-form side and ``xi1``,
``xi2``, ``th0``..``thN`` on the trailer side.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .errors import DslSyntaxError, GoursatError
from .symcore import Poly, PolyVF, RatFn, RatVF, as_rational

FUNCS = ("sin", "cos", "tan", "atan")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>\#[^\n]*)
  | (?P<partial>d/d(?:xi[12]|x\d+|th\d+))
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^();,.])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


# AST nodes are plain tuples: ("num", Fraction) ("var", name) ("partial", name)
# ("add"|"sub"|"mul"|"div", a, b) ("neg", a) ("pow", a, k) ("call", fname, a)


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: Token | None = None):
        tok = tok or self.tok
        raise DslSyntaxError(message, tok.line, tok.column)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str):
        if not self.accept(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")

    def header(self) -> int:
        tok = self.tok
        if not (tok.kind == "ident" and tok.text == "dim"):
            self.error("expected header 'dim N;'")
        self.i += 1
        if self.tok.kind != "int":
            self.error("expected an integer dimension")
        n = int(self.tok.text)
        if n < 1:
            self.error("dimension must be positive")
        self.i += 1
        self.expect(";")
        return n

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = "add" if self.tok.text == "+" else "sub"
            self.i += 1
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = "mul" if self.tok.text == "*" else "div"
            tok = self.tok
            self.i += 1
            rhs = self.factor()
            if op == "div" and rhs == ("num", Fraction(0)):
                self.error("zero denominator literal", tok)
            node = (op, node, rhs)
        return node

    def factor(self):
        if self.accept("-"):
            return ("neg", self.factor())
        if self.accept("+"):
            return self.factor()
        node = self.atom()
        while self.accept("^"):
            if self.tok.kind != "int":
                self.error("exponent must be a non-negative integer")
            node = ("pow", node, int(self.tok.text))
            self.i += 1
        return node

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return ("num", Fraction(int(tok.text)))
        if tok.kind == "partial":
            self.i += 1
            return ("partial", tok.text[3:], tok)
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", tok.text, arg)
            return ("var", tok.text, tok)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.error(f"unexpected token {tok.text or 'end of input'!r}")

    def at_end(self) -> bool:
        return self.tok.kind == "eof"


_XVAR = re.compile(r"x(\d+)$")
_THVAR = re.compile(r"th(\d+)$")


def _uses_trig(node) -> bool:
    kind = node[0]
    if kind == "call":
        return True
    if kind in ("var", "partial"):
        return not _XVAR.match(node[1])
    if kind == "num":
        return False
    return any(_uses_trig(c) for c in node[1:] if isinstance(c, tuple))


class _Vec(dict):
    """Vector-valued intermediate: coordinate index (1-based) to coefficient."""


class _Evaluator:
    """Folds an AST into scalars or vector fields over a chosen coefficient algebra."""

    def __init__(self, dim: int, trig: bool):
        self.dim = dim
        self.trig = trig
        if trig:
            from .trailer import TrigExpr

            self.T = TrigExpr

    def index_of(self, name: str, tok: Token) -> int:
        if self.trig:
            if name == "xi1":
                k = 1
            elif name == "xi2":
                k = 2
            else:
                m = _THVAR.match(name)
                if not m:
                    raise DslSyntaxError(f"undeclared variable {name!r}", tok.line, tok.column)
                k = int(m.group(1)) + 3
        else:
            m = _XVAR.match(name)
            if not m:
                raise DslSyntaxError(f"undeclared variable {name!r}", tok.line, tok.column)
            k = int(m.group(1))
        if not 1 <= k <= self.dim:
            raise DslSyntaxError(f"undeclared variable {name!r} for dim {self.dim}", tok.line, tok.column)
        return k

    def const(self, c: Fraction):
        if self.trig:
            return self.T.const(c)
        return RatFn.const(self.dim, c)

    def var(self, k: int):
        if self.trig:
            return self.T.var(k - 1)
        return RatFn.var(self.dim, k)

    def run(self, node):
        kind = node[0]
        if kind == "num":
            return self.const(node[1])
        if kind == "var":
            return self.var(self.index_of(node[1], node[2]))
        if kind == "partial":
            return _Vec({self.index_of(node[1], node[2]): self.const(Fraction(1))})
        if kind == "neg":
            v = self.run(node[1])
            if isinstance(v, _Vec):
                return _Vec({k: -c for k, c in v.items()})
            return -v
        if kind in ("add", "sub"):
            a, b = self.run(node[1]), self.run(node[2])
            if isinstance(b, _Vec) and kind == "sub":
                b = _Vec({k: -c for k, c in b.items()})
            elif kind == "sub":
                b = -b
            if isinstance(a, _Vec) != isinstance(b, _Vec):
                if _is_zero_scalar(a):
                    return b
                if _is_zero_scalar(b):
                    return a
                raise GoursatError("cannot add a scalar and a vector field")
            if isinstance(a, _Vec):
                out = _Vec(a)
                for k, c in b.items():
                    out[k] = out[k] + c if k in out else c
                return out
            return a + b
        if kind == "mul":
            a, b = self.run(node[1]), self.run(node[2])
            if isinstance(a, _Vec) and isinstance(b, _Vec):
                raise GoursatError("cannot multiply two vector fields")
            if isinstance(a, _Vec):
                a, b = b, a
            if isinstance(b, _Vec):
                return _Vec({k: a * c for k, c in b.items()})
            return a * b
        if kind == "div":
            a, b = self.run(node[1]), self.run(node[2])
            if isinstance(b, _Vec):
                raise GoursatError("cannot divide by a vector field")
            if not self.trig and b.is_zero():
                raise GoursatError("division by zero")
            if isinstance(a, _Vec):
                return _Vec({k: c / b for k, c in a.items()})
            return a / b
        if kind == "pow":
            a = self.run(node[1])
            if isinstance(a, _Vec):
                raise GoursatError("cannot raise a vector field to a power")
            return a ** node[2]
        if kind == "call":
            a = self.run(node[2])
            if isinstance(a, _Vec):
                raise GoursatError("functions take scalar arguments")
            return getattr(self.T, node[1])(a)
        raise AssertionError(kind)


def _is_zero_scalar(v) -> bool:
    if isinstance(v, _Vec):
        return False
    if isinstance(v, RatFn):
        return v.is_zero()
    return getattr(v, "is_zero", lambda: False)()


def _parse_doc(text: str):
    p = _Parser(text)
    dim = p.header()
    exprs = [p.expr()]
    while p.accept(";"):
        if p.at_end():
            break
        exprs.append(p.expr())
    if not p.at_end():
        p.error(f"unexpected token {p.tok.text!r}")
    return dim, exprs


def _finish_field(dim: int, vec, ev: _Evaluator):
    if not isinstance(vec, _Vec):
        if _is_zero_scalar(vec):
            vec = _Vec()
        else:
            raise GoursatError("expected a vector field, found a scalar expression")
    if ev.trig:
        from .trailer import TrigVF

        comps = [vec.get(k, ev.const(Fraction(0))) for k in range(1, dim + 1)]
        return TrigVF(comps)
    comps = [vec.get(k, RatFn.const(dim, 0)) for k in range(1, dim + 1)]
    if all(c.is_polynomial() for c in comps):
        return PolyVF([c.as_poly() for c in comps])
    return RatVF(comps)


def parse_vector_field(text: str):
    """Parse ``dim n; expr`` into a PolyVF, RatVF or (trailer variables) TrigVF."""
    dim, exprs = _parse_doc(text)
    if len(exprs) != 1:
        raise GoursatError("a vector field document holds exactly one expression")
    ev = _Evaluator(dim, _uses_trig(exprs[0]))
    return _finish_field(dim, ev.run(exprs[0]), ev)


def parse_vector_fields(text: str) -> list:
    """Parse a file holding several ``dim n; expr`` documents, one per line."""
    out = []
    chunk: list[str] = []
    for line in text.splitlines():
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("dim") and chunk:
            out.append(parse_vector_field("\n".join(chunk)))
            chunk = []
        chunk.append(stripped)
    if chunk:
        out.append(parse_vector_field("\n".join(chunk)))
    return out


def parse_scalar(text: str):
    """Parse ``dim n; expr`` into a RatFn (or TrigExpr for trailer variables)."""
    dim, exprs = _parse_doc(text)
    if len(exprs) != 1:
        raise GoursatError("a scalar document holds exactly one expression")
    ev = _Evaluator(dim, _uses_trig(exprs[0]))
    v = ev.run(exprs[0])
    if isinstance(v, _Vec):
        raise GoursatError("expected a scalar, found a vector field")
    return v


def parse_trig_expr(text: str):
    dim, exprs = _parse_doc(text)
    if len(exprs) != 1:
        raise GoursatError("a trig document holds exactly one expression")
    ev = _Evaluator(dim, True)
    v = ev.run(exprs[0])
    if isinstance(v, _Vec):
        raise GoursatError("expected a scalar, found a vector field")
    return v


def parse_contact_map(text: str) -> list[RatFn]:
    """Parse ``dim 3; e1; e2; e3`` into three rational functions."""
    dim, exprs = _parse_doc(text)
    if len(exprs) != dim:
        raise GoursatError(f"a map on dim {dim} needs {dim} component expressions, found {len(exprs)}")
    ev = _Evaluator(dim, False)
    out = []
    for e in exprs:
        if _uses_trig(e):
            raise GoursatError("contact maps must be rational")
        v = ev.run(e)
        if isinstance(v, _Vec):
            raise GoursatError("map components must be scalars")
        out.append(v)
    return out


_RATIONAL = r"-?\d+(?:/\d+)?"
_STEP_RE = re.compile(rf"S|R({_RATIONAL})$")
_LETTER_RE = re.compile(r"a(\d+)$")


def parse_kr_word(text: str):
    """Parse ``STEP(.STEP)*`` with ``STEP`` in ``S`` / ``R<rational>``; empty text is the empty word."""
    from .krforms import KRWord, Regular, Singular

    text = text.strip()
    if not text:
        return KRWord(())
    steps = []
    col = 1
    for part in text.split("."):
        m = _STEP_RE.match(part.strip())
        if not m:
            raise DslSyntaxError(f"malformed step {part!r}", 1, col)
        if part.strip() == "S":
            steps.append(Singular())
        else:
            try:
                c = Fraction(m.group(1))
            except ZeroDivisionError:
                raise DslSyntaxError(f"zero denominator in {part!r}", 1, col) from None
            steps.append(Regular(c))
        col += len(part) + 1
    return KRWord(tuple(steps))


def parse_st_word(text: str):
    from .sigtype import STWord

    text = text.strip()
    if not text or text in ("e", "eps", "epsilon"):
        return STWord(())
    letters = []
    col = 1
    for part in text.split("."):
        m = _LETTER_RE.match(part.strip())
        if not m:
            raise DslSyntaxError(f"malformed letter {part!r}", 1, col)
        letters.append(int(m.group(1)))
        col += len(part) + 1
    return STWord(tuple(letters))


def parse_point(text: str) -> tuple:
    """Parse ``[dim n;] (q1, q2, ...)`` or ``q1,q2,...`` into exact rationals."""
    text = text.strip()
    dim = None
    m = re.match(r"dim\s+(\d+)\s*;", text)
    if m:
        dim = int(m.group(1))
        text = text[m.end():].strip()
    if text.startswith("(") and text.endswith(")"):
        text = text[1:-1]
    parts = [t.strip() for t in text.replace(" ", ",").split(",") if t.strip()]
    try:
        pt = tuple(as_rational(t) for t in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise DslSyntaxError(f"malformed point coordinate ({exc})", 1, 1) from None
    if dim is not None and len(pt) != dim:
        raise GoursatError(f"point has {len(pt)} coordinates, header says {dim}")
    return pt


# printing


def format_rational(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(mono: tuple) -> str:
    parts = []
    for i, e in enumerate(mono):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts)


def _signed_terms(p: Poly) -> list[tuple[bool, str]]:
    out = []
    for mono, c in p.sorted_terms():
        c = Fraction(c)
        neg = c < 0
        a = -c if neg else c
        body = _format_monomial(mono)
        if not body:
            s = format_rational(a)
        elif a == 1:
            s = body
        else:
            s = f"{format_rational(a)}*{body}"
        out.append((neg, s))
    return out


def _join(terms: list[tuple[bool, str]]) -> str:
    if not terms:
        return "0"
    neg, s = terms[0]
    out = ("-" if neg else "") + s
    for neg, s in terms[1:]:
        out += (" - " if neg else " + ") + s
    return out


def format_poly(p: Poly) -> str:
    return _join(_signed_terms(p))


def format_ratfn(r: RatFn) -> str:
    if r.den == 1:
        return format_poly(r.num)
    num = format_poly(r.num)
    den = format_poly(r.den)
    if len(r.num.terms) > 1:
        num = f"({num})"
    if len(r.den.terms) > 1 or re.search(r"[*/]", den):
        den = f"({den})"
    return f"{num}/{den}"


def _coefficient_terms(coef, partial: str) -> tuple[bool, str]:
    """Sign and body for ``coef * partial``."""
    if isinstance(coef, RatFn) and coef.den == 1:
        coef = coef.num
    if isinstance(coef, Poly):
        terms = _signed_terms(coef)
        if len(terms) == 1:
            neg, s = terms[0]
            if s == "1":
                return neg, partial
            return neg, f"{s}*{partial}"
        return False, f"({format_poly(coef)})*{partial}"
    return False, f"({format_ratfn(coef)})*{partial}"


def format_field(f) -> str:
    if isinstance(f, (PolyVF, RatVF)):
        names = [f"x{k}" for k in range(1, f.dim + 1)]
    else:
        names = trailer_names(f.dim)
    terms = []
    for k in range(f.dim, 0, -1):
        c = f.components[k - 1]
        if c.is_zero():
            continue
        if isinstance(c, (Poly, RatFn)):
            terms.append(_coefficient_terms(c, f"d/d{names[k - 1]}"))
        else:
            from .trailer import format_trig

            terms.append((False, f"({format_trig(c, names)})*d/d{names[k - 1]}"))
    return f"dim {f.dim}; {_join(terms)}"


def trailer_names(dim: int) -> list[str]:
    return ["xi1", "xi2"] + [f"th{i}" for i in range(dim - 2)]


def print_canonical(value) -> str:
    """Deterministic canonical text for any value the grammar can read."""
    from .krforms import KRWord
    from .sigtype import STWord

    if isinstance(value, (PolyVF, RatVF)):
        return format_field(value)
    if isinstance(value, KRWord):
        return value.text()
    if isinstance(value, STWord):
        return value.text()
    if isinstance(value, Poly):
        return f"dim {value.nvars}; {format_poly(value)}"
    if isinstance(value, RatFn):
        return f"dim {value.nvars}; {format_ratfn(value)}"
    if isinstance(value, tuple) and all(isinstance(v, (int, Fraction)) for v in value):
        return "(" + ", ".join(format_rational(v) for v in value) + ")"
    from .trailer import TrigExpr, TrigVF, format_trig

    if isinstance(value, TrigVF):
        return format_field(value)
    if isinstance(value, TrigExpr):
        dim = value.max_var() + 1
        return f"dim {max(dim, 3)}; {format_trig(value, trailer_names(max(dim, 3)))}"
    raise TypeError(f"no canonical text for {type(value).__name__}")


@dataclass(frozen=True)
class DslDocument:
    kind: str  # vectorfield | krword | stword | point | trigexpr | contactmap
    payload: Any
    source_span: tuple = field(default=(0, 0))


def parse_document(text: str, kind: str | None = None) -> DslDocument:
    """Parse text, detecting its kind when not given."""
    span = (0, len(text))
    stripped = text.strip()
    if kind is None:
        if stripped.startswith("dim"):
            body = stripped.split(";", 1)[1] if ";" in stripped else ""
            if body.count(";") >= 1 and body.strip().rstrip(";").count(";") >= 1:
                kind = "contactmap"
            elif "d/d" in body:
                kind = "vectorfield"
            elif body.strip().startswith("("):
                kind = "point" if "," in body else "trigexpr"
            else:
                kind = "trigexpr"
        elif stripped == "" or re.fullmatch(r"(S|R-?\d+(/\d+)?)(\.(S|R-?\d+(/\d+)?))*", stripped):
            kind = "krword"
        elif re.fullmatch(r"a\d+(\.a\d+)*", stripped):
            kind = "stword"
        else:
            kind = "point"
    parsers = {
        "vectorfield": parse_vector_field,
        "krword": parse_kr_word,
        "stword": parse_st_word,
        "point": parse_point,
        "trigexpr": parse_scalar,
        "contactmap": parse_contact_map,
    }
    if kind not in parsers:
        raise GoursatError(f"unknown document kind {kind!r}")
    return DslDocument(kind, parsers[kind](text), span)


FIXTURES = ("engel", "kr5a", "kr5b", "kr6a", "kr6b", "kr6c", "kr6d", "kr6e", "manipulator")


def load_fixture(name: str) -> list:
    """The vector fields of a shipped fixture file, e.g. ``load_fixture("kr5b")``."""
    from importlib import resources

    if name not in FIXTURES:
        raise GoursatError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    text = resources.files("goursat").joinpath("fixtures", f"{name}.vf").read_text()
    return parse_vector_fields(text)
