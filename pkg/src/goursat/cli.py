"""Command-line front end: ``goursat <command> [options]``.

Exit status is 0 on success, 1 on a domain error or a failing suite, and 2 on
a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Sequence

from .errors import DslSyntaxError, GoursatError

GRAMMAR_HELP = """\
inputs:
  --word     Kumpera-Ruiz word, steps S or R<c> joined by dots, e.g. R0.S.R1 or R1/2.S
  --sigtype  singularity type, letters a<k> joined by dots, e.g. a0.a1.a2
  --point    rational coordinates, e.g. 0,0,1/2,0,0
  --angles   trailer configuration 'xi1 xi2 th0 ... thN' in radians
  --map      contact map on R^3, 'dim 3; e1; e2; e3' with expressions in x1, x2, x3
  --base     named contact map: identity, scaling:a,b, shear:c, point, legendre
"""


class UsageError(Exception):
    """Bad command-line input that argparse could not catch."""


def _emit(payload, as_json: bool, text: str | None = None) -> None:
    if as_json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text if text is not None else payload)


def _word(args):
    from .krforms import KRWord

    if args.word is None:
        raise UsageError("--word is required")
    if args.word.strip() in ("", "-", "empty"):
        return KRWord(())
    return KRWord.parse(args.word)


def _point(args, dim: int):
    from .vfdsl import parse_point

    if not getattr(args, "point", None):
        return None
    p = parse_point(args.point)
    if len(p) != dim:
        raise GoursatError(f"--point has {len(p)} coordinates, expected {dim}")
    return p


def _config(args):
    from .trailer import TrailerConfig

    if not args.angles:
        raise UsageError("--angles is required")
    return TrailerConfig.parse(args.angles)


def _base(args):
    from . import contact
    from .vfdsl import parse_contact_map

    if getattr(args, "map", None):
        return contact.solve_first_order(parse_contact_map(args.map), "custom")
    spec = getattr(args, "base", None) or "identity"
    name, _, params = spec.partition(":")
    values = [Fraction(v) for v in params.split(",") if v.strip()] if params else []
    try:
        if name == "identity" and not values:
            return contact.identity_map()
        if name == "scaling" and len(values) == 2:
            return contact.scaling_map(*values)
        if name == "shear" and len(values) == 1:
            return contact.shear_map(values[0])
        if name == "point" and not values:
            return contact.point_map()
        if name == "legendre" and not values:
            return contact.legendre_map()
    except ZeroDivisionError:
        pass
    raise UsageError(f"unknown base map {spec!r}")


def _q(c) -> str:
    from .vfdsl import format_rational

    return format_rational(c)


# kr


def cmd_kr(args) -> int:
    from .krforms import build, catalog, explicit_form
    from .vfdsl import format_field

    if args.action == "build":
        sys_ = build(_word(args))
        _emit(sys_.to_json(), args.json, f"{format_field(sys_.f1)}\n{format_field(sys_.f2)}")
    elif args.action == "explicit":
        form = explicit_form(_word(args))
        payload = {
            "word": form.word.text(),
            "normalized_from": form.normalized_from.text() if form.normalized_from else None,
            "n": form.n,
            "m": form.m,
            "k": list(form.k),
            "constants": {f"{i},{j}": _q(c) for (i, j), c in sorted(form.constants.items())},
            "f2": format_field(form.expand()),
        }
        lines = [f"k = {tuple(form.k)}", f"m = {form.m}"]
        if form.constants:
            lines.append("constants: " + ", ".join(f"c{i},{j} = {_q(c)}" for (i, j), c in sorted(form.constants.items())))
        if form.normalized_from:
            lines.append(f"normalized from {form.normalized_from.text()} to {form.word.text()}")
        lines.append(payload["f2"])
        _emit(payload, args.json, "\n".join(lines))
    elif args.action == "catalog":
        if args.dim is None:
            raise UsageError("--dim is required")
        entries = catalog(args.dim)
        payload = [{"name": name, "word": w.text()} for name, w in entries]
        _emit(payload, args.json, "\n".join(f"{name}\t{w.text() or '-'}" for name, w in entries))
    return 0


# growth, sigtype, jacquard


def cmd_growth(args) -> int:
    from .flags import dual, growth_report
    from .sigtype import growth_from_sigtype

    if args.sigtype is not None:
        if args.dim is None:
            raise UsageError("--sigtype needs --dim")
        g = growth_from_sigtype(args.sigtype, args.dim)
        payload = {"sigtype": args.sigtype, "growth": list(g), "dual": list(dual(g))}
        _emit(payload, args.json, g.text())
        return 0
    word = _word(args)
    report = growth_report(word, _point(args, word.dim))
    _emit(report, args.json, ",".join(str(d) for d in report["growth"]))
    return 0


def cmd_sigtype(args) -> int:
    from .sigtype import delta_at, sigtype_from_growth

    if args.growth is not None:
        w = sigtype_from_growth([int(v) for v in args.growth.split(",")])
    else:
        word = _word(args)
        w = delta_at(word, _point(args, word.dim))
    _emit({"sigtype": w.text()}, args.json, w.text() or "empty")
    return 0


def cmd_jacquard(args) -> int:
    from .sigtype import jacquard_count, jacquard_enum

    if args.count is not None:
        _emit({"n": args.count, "count": jacquard_count(args.count)}, args.json, str(jacquard_count(args.count)))
    elif args.list is not None:
        words = [w.text() for w in jacquard_enum(args.list)]
        _emit({"n": args.list, "words": words}, args.json, "\n".join(words))
    else:
        raise UsageError("give --count N or --list N")
    return 0


# abnormal and rigid


def cmd_abnormal(args) -> int:
    from .abnormal import abnormal_cone, cone_report

    word = _word(args)
    q = _point(args, word.dim)
    report = cone_report(word, args.level, q)
    lines = [f"A^({args.level}) = {abnormal_cone(word, args.level, q).text()}"]
    if report["K_equation"]:
        lines.append(f"K_{args.level} = {report['K_equation']}")
    if report["L_subspace"]:
        lines.append(f"L_{args.level} = {report['L_subspace']}")
    _emit(report, args.json, "\n".join(lines))
    return 0


def cmd_rigid(args) -> int:
    from .abnormal import is_rigid_direction, trailer_rigid_classify
    from .vfdsl import parse_point

    if args.angles:
        report = trailer_rigid_classify(_config(args))
        payload = report.to_json()
        _emit(payload, args.json, "\n".join(payload["generators"]))
        return 0
    if args.direction is None:
        raise UsageError("--direction is required with --word")
    word = _word(args)
    q = _point(args, word.dim)
    verdict = is_rigid_direction(word, q, parse_point(args.direction))
    payload = {"rigid": verdict.rigid, "reason": verdict.reason, "j": verdict.j}
    _emit(payload, args.json, f"{'rigid' if verdict.rigid else 'not rigid'}: {verdict.reason}")
    return 1 if args.expect_rigid and not verdict.rigid else 0


# trailer


def cmd_trailer(args) -> int:
    from .trailer import ANGLE_TOL, delta_trailer, kr_to_trailer, trailer_to_kr, verify_conversion

    tol = args.tol if args.tol is not None else ANGLE_TOL
    if args.action == "to-kr":
        conv = trailer_to_kr(_config(args), tol)
        payload = {
            "word": conv.word.text(),
            "singular_base": conv.singular_base,
            "chart": [str(e) for e in conv.chart],
        }
        _emit(payload, args.json, conv.word.text())
    elif args.action == "from-kr":
        word = _word(args)
        config = kr_to_trailer(word, _point(args, word.dim))
        _emit({"config": config.text()}, args.json, config.text())
    elif args.action == "sigtype":
        w = delta_trailer(_config(args), tol)
        _emit({"sigtype": w.text()}, args.json, w.text() or "empty")
    elif args.action == "verify":
        report = verify_conversion(trailer_to_kr(_config(args), tol), tol=tol if args.tol else 1e-9, seed=args.seed)
        text = f"{'PASS' if report.passed else 'FAIL'} residual {report.residual_max:.3e} word {report.word}"
        _emit(report.to_json(), args.json, text)
        return 0 if report.passed else 1
    return 0


# contact


def cmd_contact(args) -> int:
    from . import contact

    base = _base(args)
    if args.action == "certify":
        payload = base.to_json()
        nu, lam, eta, mu = base.certificate()
        _emit(payload, args.json, f"(nu, lambda, eta, mu)(0) = ({_q(nu)}, {_q(lam)}, {_q(eta)}, {_q(mu)})")
        return 0
    if args.action == "prolong":
        prolonged = contact.prolong(base, _word(args))
        report = contact.verify_prolongation(prolonged)
        payload = prolonged.to_json()
        payload["pass"] = report.passed
        payload["first_failing_level"] = report.first_failure
        lines = [f"target word: {prolonged.target_word.text()}"]
        lines += [f"Phi{i} = {c}" for i, c in enumerate(prolonged.components, start=1)]
        lines.append("PASS" if report.passed else f"FAIL at level {report.first_failure}")
        _emit(payload, args.json, "\n".join(lines))
        return 0 if report.passed else 1
    if args.action == "r9":
        report = contact.r9_report(base)
    else:
        report = contact.check_r11(base, Fraction(args.c11))
    payload = report.to_json()
    text = ", ".join(f"c~{k} = {_q(v)}" for k, v in sorted(report.ctilde.items()))
    _emit(payload, args.json, f"{text}\n{'PASS' if report.passed else 'FAIL'}")
    return 0 if report.passed else 1


# suites


def cmd_suite(args) -> int:
    from .suites import run_suite

    checks = run_suite(args.name, max_dim=args.max_dim, seed=args.seed, tol=args.tol if args.tol else 1e-9)
    ok = all(c.passed for c in checks)
    payload = {"suite": args.name, "pass": ok, "checks": [c.to_json() for c in checks]}
    lines = [f"{'PASS' if c.passed else 'FAIL'}  {c.name}  ({c.detail})" for c in checks]
    lines.append(f"{args.name}: {sum(c.passed for c in checks)}/{len(checks)} passed")
    _emit(payload, args.json, "\n".join(lines))
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="goursat",
        description="Exact computations with Goursat structures.",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, **kw):
        p = sub.add_parser(name, help=help_text, epilog=GRAMMAR_HELP,
                           formatter_class=argparse.RawDescriptionHelpFormatter, **kw)
        p.set_defaults(func=func)
        p.add_argument("--json", action="store_true", help="machine-readable output")
        return p

    p = add("kr", cmd_kr, "build, display and list Kumpera-Ruiz normal forms")
    p.add_argument("action", choices=["build", "explicit", "catalog"])
    p.add_argument("--word")
    p.add_argument("--dim", type=int)

    p = add("growth", cmd_growth, "growth vector of a normal form or of a singularity type")
    p.add_argument("--word")
    p.add_argument("--point")
    p.add_argument("--sigtype")
    p.add_argument("--dim", type=int)

    p = add("sigtype", cmd_sigtype, "singularity type of a normal form, or the one with a given growth vector")
    p.add_argument("--word")
    p.add_argument("--point")
    p.add_argument("--growth", help="comma-separated growth vector")

    p = add("jacquard", cmd_jacquard, "count or list the Jacquard words of a length")
    p.add_argument("--count", type=int)
    p.add_argument("--list", type=int)

    p = add("abnormal", cmd_abnormal, "abnormal cone and singular loci of a derived level")
    p.add_argument("--word")
    p.add_argument("--level", type=int, default=0)
    p.add_argument("--point")

    p = add("rigid", cmd_rigid, "classify a direction as rigid, or list trailer rigid motions")
    p.add_argument("--word")
    p.add_argument("--point")
    p.add_argument("--direction", help="tangent vector as rational coordinates")
    p.add_argument("--angles")
    p.add_argument("--expect-rigid", action="store_true", help="exit 1 when the direction is not rigid")

    p = add("trailer", cmd_trailer, "convert between trailer configurations and normal forms")
    p.add_argument("action", choices=["to-kr", "from-kr", "sigtype", "verify"])
    p.add_argument("--angles")
    p.add_argument("--word")
    p.add_argument("--point")
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int, default=0)

    p = add("contact", cmd_contact, "certify and prolong contact maps; the R9 and R11 checks")
    p.add_argument("action", choices=["certify", "prolong", "r9", "r11"])
    p.add_argument("--map")
    p.add_argument("--base")
    p.add_argument("--word")
    p.add_argument("--c11", default="0")

    p = add("suite", cmd_suite, "run a verification suite")
    p.add_argument("name", choices=["consistency", "trailer", "contact", "abnormal", "catalog"])
    p.add_argument("--max-dim", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DslSyntaxError) as exc:
        parser.print_usage(sys.stderr)
        print(f"goursat: error: {exc}", file=sys.stderr)
        print(GRAMMAR_HELP, file=sys.stderr)
        return 2
    except (GoursatError, ValueError, ZeroDivisionError) as exc:
        print(f"goursat: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
