"""Command line: ``cartanhom eval | basis | verify | solve-hom | algebra``.

Reports are JSON on standard output (or ``--out``); diagnostics go to
standard error. Exit status: 0 PASS, 1 FAIL, 2 INCONCLUSIVE or usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from typing import List, Optional

from . import __version__
from .families import DEFAULT_CONFIGS, ConfigError, FamilyConfig, TruncatedAlgebra, component_basis
from .parser import ParseError, parse, to_text
from .printing import format_field, odd_header
from .report import EXIT_CODES, CheckReport
from .vectorfield import FAMILIES

USAGE_ERROR = 2

_DESK = {c.family: c for c in DEFAULT_CONFIGS}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit with 2, as argparse does, but without the long usage
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _config_args(p: argparse.ArgumentParser, required: bool = True):
    p.add_argument("--family", choices=FAMILIES, required=required)
    p.add_argument("--m", type=int, help="even variables (default: the desk config of the family)")
    p.add_argument("--n", type=int, help="odd variables (default: the desk config of the family)")
    p.add_argument("--lambda", dest="lam", default="0", help="SKO parameter, an exact rational a/b")


def _config(ns) -> FamilyConfig:
    desk = _DESK[ns.family]
    m = desk.m if ns.m is None else ns.m
    n = desk.n if ns.n is None else ns.n
    try:
        lam = Fraction(ns.lam)
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"lambda must be a rational a/b, got {ns.lam!r}") from None
    return FamilyConfig(ns.family, m, n, lam)


def _emit(payload: dict, out: Optional[str]):
    text = json.dumps(payload, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _params(ns) -> dict:
    p = {}
    for item in ns.param or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            p[k] = json.loads(v)
        except json.JSONDecodeError:
            p[k] = v
    if ns.samples is not None:
        p["samples"] = ns.samples
    if ns.seed is not None:
        p["seed"] = ns.seed
    return p


# commands --------------------------------------------------------------------------------------------------
def cmd_eval(ns) -> int:
    cfg = _config(ns)
    try:
        v = parse(ns.expr, cfg)
    except ParseError as exc:
        print(f"error: {exc.message} (byte {exc.offset})", file=sys.stderr)
        print(exc.pointer(), file=sys.stderr)
        return USAGE_ERROR
    if ns.header:
        print(odd_header(cfg.sig))
    print(to_text(v))
    return 0


def cmd_basis(ns) -> int:
    cfg = _config(ns)
    if ns.degree < -cfg.depth:
        print(f"error: degree {ns.degree} is below -depth = {-cfg.depth} for {cfg.label()}", file=sys.stderr)
        return USAGE_ERROR
    comp = component_basis(cfg, ns.degree)
    if ns.json:
        _emit({"config": cfg.as_dict(), "degree": ns.degree, "dim": comp.dim,
               "certified": comp.certified, "basis": [format_field(b) for b in comp.basis]}, None)
        return 0
    print(odd_header(cfg.sig))
    print(f"# {cfg.label()}_[{ns.degree}]: dimension {comp.dim}")
    for b in comp.basis:
        print(format_field(b))
    return 0


def _report_exit(rep: CheckReport, out: Optional[str]) -> int:
    _emit(rep.as_dict(), out)
    print(rep.summary(), file=sys.stderr)
    return rep.exit_code


def cmd_verify(ns) -> int:
    from . import verify

    if ns.suite == "all":
        entries = verify.load_manifest(ns.manifest) if ns.manifest else verify.default_manifest()

        def progress(rep):
            cfg = rep.get("config") or {}
            lab = f"{cfg.get('family')}({cfg.get('m')},{cfg.get('n')}" + (
                f";{cfg['lambda']}" if "lambda" in cfg else "") + ")"
            print(f"{rep['status']:<12} {rep['suite']:<16} {lab:<14} {rep.get('seconds')}s", file=sys.stderr)

        result = verify.run_all(entries, jobs=ns.jobs, progress=progress)
        _emit(result, ns.out)
        print(f"{result['status']}: {result['counts']} in {result['seconds']}s", file=sys.stderr)
        return EXIT_CODES[result["status"]]
    if ns.family is None:
        print("error: --family is required unless the suite is 'all'", file=sys.stderr)
        return USAGE_ERROR
    cfg = _config(ns)
    rep = verify.run_suite(ns.suite, cfg, _params(ns))
    return _report_exit(rep, ns.out)


def cmd_solve_hom(ns) -> int:
    from .homsolver import hom_solve_report

    rep = hom_solve_report(_config(ns), ns.codomain_max, oracle=ns.oracle)
    return _report_exit(rep, ns.out)


def cmd_algebra(ns) -> int:
    alg = TruncatedAlgebra(_config(ns), ns.jmax)
    text = alg.to_json()
    if ns.out:
        with open(ns.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    from .verify import SUITE_NAMES

    p = _Parser(prog="cartanhom", description="Exact computations in Cartan-type Lie superalgebras.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to standard error")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", help="evaluate an expression and print its canonical form")
    _config_args(e)
    e.add_argument("expr")
    e.add_argument("--header", action="store_true", help="print the odd-variable header line first")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("basis", help="print the computed basis of X_[j]")
    _config_args(b)
    b.add_argument("--degree", type=int, required=True)
    b.add_argument("--json", action="store_true")
    b.set_defaults(func=cmd_basis)

    v = sub.add_parser("verify", help="run a verification suite, or 'all' for a manifest")
    v.add_argument("suite", choices=SUITE_NAMES + ("all",))
    _config_args(v, required=False)
    v.add_argument("--samples", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--param", action="append", metavar="KEY=VALUE", help="extra suite parameter (JSON value)")
    v.add_argument("--manifest", help="manifest file for 'verify all' (default: built-in acceptance manifest)")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for 'verify all'")
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve-hom", help="Hom-structure pipeline report")
    _config_args(s)
    s.add_argument("--codomain-max", type=int, default=2)
    s.add_argument("--oracle", action="store_true", help="also run the dense elimination oracle")
    s.add_argument("--out")
    s.set_defaults(func=cmd_solve_hom)

    a = sub.add_parser("algebra", help="write the truncated algebra (bases and structure constants) as JSON")
    _config_args(a)
    a.add_argument("--jmax", type=int, default=2)
    a.add_argument("--out")
    a.set_defaults(func=cmd_algebra)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return ns.func(ns)
    except (ConfigError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
