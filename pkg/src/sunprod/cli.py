"""Command-line front end.

Exit status: 0 success, 1 a verification failed, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, SessionConfig, build_star, load_config
from .diffop import diffop_to_exchange, series_to_exchange
from .parser import ParseError, parse_expression
from .poly import DimensionError, NuSeries, Polynomial, format_monomial, indices_up_to
from .star import StarProduct
from .sun import (
    ReconstructionError,
    SunProduct,
    check_in_EP,
    check_weak_trivializer,
    equivalence_to_EP,
    monomial_pairs,
    reconstruct_all,
    weak_trivializer,
)
from .verify import SUITES, SuiteError, run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _series_json(s: NuSeries) -> list[dict]:
    return [{"order": r, "poly": c.to_text()} for r, c in enumerate(s.coeffs) if c]


def _common_flags(parser: argparse.ArgumentParser, suppress: bool):
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", default=d, help="JSON config file, or - for stdin")
    parser.add_argument("--star", default=d, help="moyal | gutt | twist:<file>")
    parser.add_argument("--order", type=int, default=d, help="truncation order R")
    parser.add_argument("--degree", type=int, default=d, help="maximal monomial degree D")
    parser.add_argument("--format", choices=("human", "json"), default=argparse.SUPPRESS if suppress else "human")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS if suppress else 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sunprod", description="Exact star- and sun-product computations.")
    _common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _common_flags(common, suppress=True)
    for name in ("star-mul", "sun-mul"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("f")
        p.add_argument("g")
    for name in ("cochains", "in-ep", "equiv-to-ep", "weak-trivializer"):
        sub.add_parser(name, parents=[common])
    p = sub.add_parser("verify", parents=[common])
    p.add_argument("suite", choices=sorted(SUITES))
    return parser


def _session(args) -> SessionConfig:
    if not args.config:
        raise UsageError("--config is required")
    cfg = load_config(args.config)
    if args.order is not None:
        cfg.order = args.order
    if args.degree is not None:
        cfg.degree = args.degree
    if cfg.order < 1 or cfg.degree < 1:
        raise UsageError("order and degree must be at least 1")
    cfg.star = args.star or ""
    cfg.fmt = args.format
    cfg.seed = args.seed
    return cfg


class Output:
    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, payload: dict, lines: list[str]):
        if self.fmt == "json":
            self.stream.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        else:
            for line in lines:
                self.stream.write(line + "\n")
        self.stream.flush()


def _cmd_mul(cfg, star: StarProduct, args, out: Output, sun: bool) -> int:
    f = parse_expression(args.f, cfg.dim)
    g = parse_expression(args.g, cfg.dim)
    if sun:
        result = SunProduct(star, cfg.order).multiply(f, g)
    else:
        result = star.product(f, g, cfg.order)
    payload = {"command": args.command, "star": star.label, "order": cfg.order,
               "result": result.to_text(), "coefficients": _series_json(result)}
    out.emit(payload, [result.to_text()])
    return EXIT_OK


def _cochain_entries(cochains, r):
    entries = []
    for k in indices_up_to(cochains.dim, cochains.degree):
        v = cochains.entry(r, k)
        if v:
            entries.append({"monomial": format_monomial(k) or "1", "value": v.to_text()})
    return entries


def _cmd_cochains(cfg, star, args, out) -> int:
    try:
        cochains = reconstruct_all(star, cfg.order, cfg.degree)
    except ReconstructionError as exc:
        out.emit({"command": "cochains", "error": str(exc)}, [f"reconstruction failed: {exc}"])
        return EXIT_FAIL
    items, lines = [], []
    for r, op in enumerate(cochains.rho, start=1):
        entries = _cochain_entries(cochains, r)
        if op.is_zero() and not entries:
            items.append({"r": r, "zero": True, "operator": [], "table": []})
            lines.append(f"rho_{r}: zero")
            continue
        items.append({"r": r, "zero": False, "operator": diffop_to_exchange(op), "table": entries})
        lines.append(f"rho_{r}: {op.to_text()}")
        lines.extend(f"  rho_{r}({e['monomial']}) = {e['value']}" for e in entries)
    payload = {"command": "cochains", "star": star.label, "order": cfg.order,
               "degree": cfg.degree, "cochains": items}
    out.emit(payload, lines)
    return EXIT_OK


def _cmd_in_ep(cfg, star, args, out) -> int:
    rep = check_in_EP(star, cfg.order, cfg.degree)
    payload = {"command": "in-ep", "star": star.label, "order": cfg.order, "degree": cfg.degree,
               "in_ep": rep.passed, "report": rep.to_dict()}
    line = "in E(P): yes" if rep.passed else f"in E(P): no ({rep.summary()})"
    out.emit(payload, [line])
    return EXIT_OK


def _cmd_equiv(cfg, star, args, out) -> int:
    try:
        t, new = equivalence_to_EP(star, cfg.order, cfg.degree)
    except ReconstructionError as exc:
        out.emit({"command": "equiv-to-ep", "error": str(exc)}, [f"reconstruction failed: {exc}"])
        return EXIT_FAIL
    rep = check_in_EP(new, cfg.order, cfg.degree)
    payload = {"command": "equiv-to-ep", "star": star.label, "order": cfg.order,
               "degree": cfg.degree, "operators": series_to_exchange(t),
               "result": new.describe(), "in_ep": rep.passed}
    lines = [f"T = {_series_text(t)}", f"result: {new.label}",
             "result in E(P): " + ("yes" if rep.passed else "no")]
    out.emit(payload, lines)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _series_text(t) -> str:
    parts = ["I"]
    for r, op in enumerate(t.terms):
        if r and not op.is_zero():
            nu = "nu" if r == 1 else f"nu^{r}"
            parts.append(f"{nu}*({op.to_text()})")
    return " + ".join(parts)


def _cmd_weak(cfg, star, args, out) -> int:
    sun = SunProduct(star, cfg.order)
    try:
        s = weak_trivializer(sun, cfg.order, cfg.degree)
    except ReconstructionError as exc:
        out.emit({"command": "weak-trivializer", "error": str(exc)}, [f"reconstruction failed: {exc}"])
        return EXIT_FAIL
    pairs = [(Polynomial.monomial(a), Polynomial.monomial(b)) for a, b in monomial_pairs(cfg.dim, cfg.degree)]
    rep = check_weak_trivializer(sun, s, pairs)
    payload = {"command": "weak-trivializer", "star": star.label, "order": cfg.order,
               "degree": cfg.degree, "operators": series_to_exchange(s), "check": rep.to_dict()}
    out.emit(payload, [f"S = {_series_text(s)}", rep.summary()])
    return EXIT_OK if rep.passed else EXIT_FAIL


def _cmd_verify(cfg, star, args, out) -> int:
    reports = run_suite(args.suite, star, cfg.algebra, cfg.order, cfg.degree, cfg.seed)
    passed = all(reports)
    payload = {"command": "verify", "suite": args.suite, "star": star.label, "seed": cfg.seed,
               "passed": passed, "reports": [r.to_dict() for r in reports]}
    lines = [r.summary() for r in reports]
    lines.append(f"verify {args.suite}: {'PASS' if passed else 'FAIL'}")
    out.emit(payload, lines)
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "star-mul": lambda c, s, a, o: _cmd_mul(c, s, a, o, sun=False),
    "sun-mul": lambda c, s, a, o: _cmd_mul(c, s, a, o, sun=True),
    "cochains": _cmd_cochains,
    "in-ep": _cmd_in_ep,
    "equiv-to-ep": _cmd_equiv,
    "weak-trivializer": _cmd_weak,
    "verify": _cmd_verify,
}


def run_command(argv: list[str], stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    fmt = getattr(args, "format", "human")
    try:
        cfg = _session(args)
        star = build_star(cfg)
        return COMMANDS[args.command](cfg, star, args, Output(fmt, stdout))
    except (UsageError, ConfigError, ParseError, SuiteError, DimensionError) as exc:
        if fmt == "json":
            stdout.write(json.dumps({"command": args.command, "error": str(exc)}, sort_keys=True) + "\n")
        stderr.write(f"sunprod: error: {exc}\n")
        return EXIT_USAGE


def main(argv: list[str] | None = None) -> int:
    try:
        sys.stdout.reconfigure(encoding="utf-8", line_buffering=True)
    except AttributeError:
        pass
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
