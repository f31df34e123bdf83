"""Command-line front end.

Exit codes: 0 pass, 1 verdict failure, 2 parse or usage error, 3 numerically
ambiguous input, 4 precondition violation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional

import numpy as np

from . import jsonio
from .errors import (
    IllConditioned,
    InvalidArgument,
    NotARoot,
    NotContractive,
    NotInCone,
    NotNilpotent,
)
from .jsonio import SchemaError
from .majorization import extreme_points
from .nilpotency import nilpotency_order, synthesize
from .numerics import Tolerance
from .roots import RootCandidate, build_root, compress_to_nilpotent, diagnose_root, root_kraus
from .verify import FAIL, instance_report, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_ILL, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load(path: str, kind: str):
    got, obj = jsonio.loads(_read_text(path))
    if got != kind:
        raise SchemaError(f"expected an instance of kind {kind!r}, got {got!r}")
    return obj


def _emit(doc: dict, out: Optional[str] = None) -> None:
    text = json.dumps(doc, indent=1, ensure_ascii=False)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        sys.stdout.write(text + "\n")


def _tol(args) -> Tolerance:
    try:
        return Tolerance(rtol=args.rtol, atol=args.atol, gap_ratio=args.gap_ratio)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def cmd_analyze(args) -> int:
    alpha = _load(args.input, "kraus_map")
    tol = _tol(args)
    start = time.perf_counter()
    report = instance_report(alpha, tol, seed=args.seed)
    report.update(tolerance=tol.as_dict(), seed=args.seed,
                  wall_time_s=round(time.perf_counter() - start, 4))
    _emit(report, args.out)
    return EXIT_FAIL if FAIL in report["verdicts"].values() else EXIT_OK


def cmd_synthesize(args) -> int:
    alpha = synthesize(args.type, args.d)
    if args.out:
        jsonio.save(alpha, args.out)
    else:
        sys.stdout.write(jsonio.dumps(alpha) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.trials < 1 or args.n_max < 1 or args.d_max < 1:
        raise UsageError("--trials, --n-max and --d-max must be >= 1")
    out_dir = Path(args.out) if args.out else Path("counterexamples")
    report = run_verify(args.n_max, args.d_max, args.trials, args.seed, _tol(args), out_dir)
    _emit(report)
    if report["status"] == "fail":
        return EXIT_FAIL
    return EXIT_ILL if report["status"] == "ill_conditioned" else EXIT_OK


def cmd_extreme(args) -> int:
    if args.input:
        x = _load(args.input, "vector")
    elif args.x:
        x = np.array(args.x, dtype=float)
    else:
        raise UsageError("give the entries of x or --input FILE")
    pts = extreme_points(x)
    _emit({"x": [float(v) for v in x], "count": len(pts),
           "extreme_points": [[float(v) for v in p] for p in pts]}, args.out)
    return EXIT_OK


def cmd_root(args) -> int:
    tol = _tol(args)
    if args.action == "build":
        alpha = _load(args.input, "kraus_map")
        r = root_kraus(build_root(alpha, tol), tol)
        if args.out:
            jsonio.save(r, args.out)
        else:
            sys.stdout.write(jsonio.dumps(r) + "\n")
        return EXIT_OK
    r = _load(args.input, "root_candidate")
    if args.p is not None:
        r = RootCandidate(r.tau, r.u, args.p)
    verdict = diagnose_root(r, tol)
    doc = {"verdict": "pass" if verdict else "fail", "reason": verdict.reason,
           "residual": verdict.residual, "p": r.order_claim, "compression_order": None,
           "tolerance": tol.as_dict()}
    if verdict and len(r.u) > 1:
        doc["compression_order"] = nilpotency_order(compress_to_nilpotent(r, tol), tol)
    _emit(doc, args.out)
    return EXIT_OK if verdict else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--atol", type=float, default=1e-10)
    common.add_argument("--rtol", type=float, default=1e-8)
    common.add_argument("--gap-ratio", type=float, default=1e4)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output file (verify: counterexample directory)")

    parser = _Parser(prog="cpnilp", description="Nilpotent completely positive maps: analysis and checks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="report order, types and verdicts for a map")
    p.add_argument("input", help="kraus_map instance file, or - for stdin")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synthesize", parents=[common], help="build a map of a given CP nilpotent type")
    p.add_argument("--type", type=int, nargs="+", required=True)
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("verify", parents=[common], help="batch-check every property on random instances")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--d-max", type=int, default=2)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("extreme", parents=[common], help="extreme points of C(x)")
    p.add_argument("x", type=float, nargs="*")
    p.add_argument("--input", default=None, help="vector instance file, or - for stdin")
    p.set_defaults(func=cmd_extreme)

    p = sub.add_parser("root", parents=[common], help="build or check a root of a pure state")
    p.add_argument("action", choices=("build", "check"))
    p.add_argument("input", help="instance file, or - for stdin")
    p.add_argument("--p", type=int, default=None, help="override the claimed order when checking")
    p.set_defaults(func=cmd_root)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, UsageError) as exc:
        print(f"cpnilp: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IllConditioned as exc:
        print(f"cpnilp: numerically ambiguous: {exc}", file=sys.stderr)
        return EXIT_ILL
    except (InvalidArgument, NotContractive, NotNilpotent, NotARoot, NotInCone) as exc:
        print(f"cpnilp: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
