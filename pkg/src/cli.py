"""
Command-line front end.

Exit codes for solve: 0 Solutions, 1 NoSolution, 2 Undecided, 3 error.
Every other command exits 0 on success and 3 on error. Logs go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from src import config
from src.applications import SignPattern, commuting_bls, quaternion_bls
from src.bls_core import stack
from src.db import Store
from src.errors import DyadError, ParseError
from src.fields import FieldSpec, format_scalar, parse_field, parse_scalar
from src.fileformat import SystemFile, emit_system, load_system
from src.linalg import rank
from src.oracle import always_solvable_exhaustive, brute_force_solve, image_cardinality
from src.pencil import build_pencil, build_pencil_completion, symbolic_pencil
from src.rank_one import SolveMode, minor_system, solve
from src.reduction import reduce_system
from src.sampling import random_system
from src.structural import (LinearSpecialization, Verdict, WitnessKind, certify_always_solvable,
                            collective_support, has_three_corner_property)
from src.ui.render import outcome_dict, pair_dict, pencil_dict, render

_logger = logging.getLogger(__name__)

EXIT_ERROR = 3

CROSS_HELP = "cross product is right-handed: (v x w)_1 = v2 w3 - v3 w2, and cyclically"


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 3; exit 2 means Undecided."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


# ---------- Helpers ----------------------------------------------------------

def _field_arg(text: str) -> FieldSpec:
    try:
        return parse_field(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _load(args) -> SystemFile:
    return load_system(args.file, args.field)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
        _logger.info("wrote %s", out)
    else:
        sys.stdout.write(text)


def _print(kind: str, data: dict, fmt: str) -> None:
    print(render(kind, data, fmt))


def _witness_lines(spec: Optional[LinearSpecialization]) -> list[str]:
    if spec is None:
        return []
    fixed = ", ".join(f"{n}={format_scalar(v)}" for n, v in spec.assignment)
    return [f"fix {fixed}", f"unknowns: {', '.join(spec.unknowns) or '(none)'}"]


# ---------- Commands ---------------------------------------------------------

def cmd_solve(args) -> int:
    sf = _load(args)
    mode = SolveMode(args.mode) if args.mode else sf.mode
    budget = args.budget if args.budget is not None else config.default_budget()
    started = time.perf_counter()
    outcome = solve(sf.system, budget=budget, mode=mode, max_solutions=args.max_solutions)
    elapsed = int((time.perf_counter() - started) * 1000)
    _print("outcome", outcome_dict(outcome), args.format)
    if args.record:
        store = Store(args.db)
        try:
            detail = outcome.certificate.kind.value if outcome.certificate else (
                outcome.reason.value if outcome.reason else None)
            store.record_outcome(emit_system(sf.system, mode), "solve", sf.system, outcome.status.value,
                                 detail, elapsed, outcome.solutions)
        finally:
            store.close()
    return outcome.exit_code


def cmd_analyze(args) -> int:
    sf = _load(args)
    sys_ = sf.system
    report = reduce_system(sys_)
    pattern = collective_support(sys_)
    data = {
        "field": str(sys_.field), "p": sys_.p, "q": sys_.q, "m": sys_.m,
        "m_hat": report.m_hat, "dropped": report.dropped, "inconsistent": report.inconsistent,
        "r": None if report.inconsistent else sys_.p * sys_.q - report.m_hat,
        "support": str(pattern),
        "three_corner": has_three_corner_property(pattern),
        "within_bound": sys_.m <= sys_.p + sys_.q - 1,
        "witness": [],
    }
    if sys_.m and rank(stack(sys_)) < sys_.m:
        data["always_solvable"] = "always solvable: NO (matrices are linearly dependent)"
    else:
        cert = certify_always_solvable(sys_)
        data["always_solvable"] = cert.summary
        data["witness"] = _witness_lines(cert.specialization)
        if cert.verdict is Verdict.YES and cert.witness is WitnessKind.MLE2:
            data["witness"] = ["constructive m ≤ 2 solver"]
    _print("analysis", data, args.format)
    return 0


def cmd_pencil(args) -> int:
    sf = _load(args)
    report = reduce_system(sf.system)
    if report.inconsistent:
        raise DyadError("elimination leaves 0 = g with g nonzero; the pencil is empty")
    red = report.reduced
    if args.symbolic:
        pencil = symbolic_pencil(red)
    elif args.completion:
        pencil = build_pencil_completion(red)
    else:
        pencil = build_pencil(red)
    data = pencil_dict(pencil)
    if args.minors:
        data["minors"] = [str(p) for p in minor_system(pencil)]
    _print("pencil", data, args.format)
    return 0


def cmd_oracle(args) -> int:
    sf = _load(args)
    sys_ = sf.system
    mode = SolveMode(args.mode) if args.mode else sf.mode
    budget = args.budget if args.budget is not None else config.default_oracle_budget()
    started = time.perf_counter()
    data: dict = {"field": str(sys_.field), "mode": mode.value}
    sols = brute_force_solve(sys_, mode, budget)
    data["solutions"] = [pair_dict(s) for s in sols]
    if args.image and sys_.m:
        rep = image_cardinality(sys_.matrices, sys_.field, budget)
        data["image"] = {"attained": rep.attained, "total": rep.total, "bound": rep.bound,
                         "violations": list(rep.violations)}
    if args.exhaustive and sys_.m:
        ok, g = always_solvable_exhaustive(sys_.matrices, sys_.field, budget)
        data["always_solvable"] = ok
        data["witness"] = [format_scalar(v) for v in g] if g else []
    _print("oracle", data, args.format)
    if args.record:
        store = Store(args.db)
        try:
            store.record_outcome(emit_system(sys_, mode), "oracle", sys_, "Oracle",
                                 f"{len(sols)} class(es)", int((time.perf_counter() - started) * 1000), sols)
        finally:
            store.close()
    return 0


def cmd_gen_commuting(args) -> int:
    f = args.field or FieldSpec.rationals()
    P, Q = SignPattern.parse(args.P), SignPattern.parse(args.Q)
    cs = commuting_bls(P, Q, f)
    y_names = " ".join(f"y{k + 1}=P{i + 1}{j + 1}" for k, (i, j) in enumerate(cs.y_positions))
    x_names = " ".join(f"x{k + 1}=Q{i + 1}{j + 1}" for k, (i, j) in enumerate(cs.x_positions))
    note = f"commuting patterns P={P} Q={Q}\n{y_names}\n{x_names}"
    if cs.system.m == 0:
        note += "\nno equations: every realization commutes"
    _emit(emit_system(cs.system, SolveMode.TOTALLY_NONZERO, note), args.output)
    return 0


def cmd_gen_quaternion(args) -> int:
    f = args.field or FieldSpec.rationals()
    try:
        d0 = [parse_scalar(f, t) for t in args.d0]
    except ParseError as exc:
        raise ParseError(f"d0: {exc.message}") from None
    sys_ = quaternion_bls(d0, f)
    note = f"T(v, w) = d0 with v as y and w as x; {CROSS_HELP}"
    _emit(emit_system(sys_, SolveMode.ANY, note), args.output)
    return 0


def cmd_gen_random(args) -> int:
    f = args.field or FieldSpec.rationals()
    rng = np.random.default_rng(args.seed)
    p, q = args.size
    sys_ = random_system(f, p, q, args.m, rng, bound=args.bound, homogeneous=args.homogeneous)
    _emit(emit_system(sys_, SolveMode.ANY, f"random system, seed {args.seed}"), args.output)
    return 0


def cmd_history(args) -> int:
    store = Store(args.db)
    try:
        if args.system:
            sf = load_system(args.system, args.field)
            mode = SolveMode(args.mode) if args.mode else sf.mode
            runs = store.runs_for_system(emit_system(sf.system, mode))
            data = {"system": str(args.system), "runs": [
                dict(vars(r), solutions=[{"x": x, "y": y} for x, y in store.solutions_for(r.id)])
                for r in runs
            ]}
        else:
            data = {"summary": store.summary(), "runs": [vars(r) for r in store.recent_runs(args.limit)]}
    finally:
        store.close()
    _print("history", data, args.format)
    return 0


# ---------- Parser -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dyad", description="Exact solver for bilinear systems y^T A_i x = g_i.")
    parser.add_argument("--debug", action="store_true", help="log at DEBUG and show tracebacks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def system_command(name: str, help_: str, fn):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="system file")
        p.add_argument("--field", type=_field_arg, help="re-read the entries over this field")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.set_defaults(func=fn)
        return p

    p = system_command("solve", "decide solvability and list solutions", cmd_solve)
    p.add_argument("--budget", type=int, help="evaluation budget (default DYAD_BUDGET or 10^7)")
    p.add_argument("--mode", choices=[m.value for m in SolveMode], help="override the file's mode")
    p.add_argument("--max-solutions", type=int, default=config.MAX_SOLUTIONS)
    p.add_argument("--record", action="store_true", help="append the run to the ledger")
    p.add_argument("--db", type=Path, help="ledger path (default DYAD_DB)")

    system_command("analyze", "structural report and always-solvable certificate", cmd_analyze)

    p = system_command("pencil", "dump K0 and K1..Kr", cmd_pencil)
    p.add_argument("--completion", action="store_true", help="build through a completed basis")
    p.add_argument("--symbolic", action="store_true", help="symbolic right-hand side g1..gm (Q only)")
    p.add_argument("--minors", action="store_true", help="also print the 2x2 minor polynomials")

    p = system_command("oracle", "brute-force enumeration over GF(p)", cmd_oracle)
    p.add_argument("--budget", type=int, help="pair evaluations (default DYAD_ORACLE_BUDGET or 10^8)")
    p.add_argument("--mode", choices=[m.value for m in SolveMode])
    p.add_argument("--image", action="store_true", help="count the image of the bilinear map")
    p.add_argument("--exhaustive", action="store_true", help="test solvability for every g")
    p.add_argument("--record", action="store_true")
    p.add_argument("--db", type=Path)

    p = sub.add_parser("gen-commuting", help="system for PQ = QP with given patterns")
    p.add_argument("P", help="pattern such as '*0/0*'")
    p.add_argument("Q")
    p.add_argument("--field", type=_field_arg)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_commuting)

    p = sub.add_parser("gen-quaternion", help="system for T(v, w) = d0", epilog=CROSS_HELP)
    p.add_argument("d0", nargs=4)
    p.add_argument("--field", type=_field_arg)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_quaternion)

    p = sub.add_parser("gen-random", help="random system with independent matrices")
    p.add_argument("--field", type=_field_arg)
    p.add_argument("--size", type=int, nargs=2, metavar=("P", "Q"), required=True)
    p.add_argument("-m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bound", type=int, default=3, help="entry bound over Q and Q(i)")
    p.add_argument("--homogeneous", action="store_true")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("history", help="recent runs from the ledger")
    p.add_argument("--limit", type=int, default=20)
    p.add_argument("--system", help="only runs of this system file, with their solutions")
    p.add_argument("--field", type=_field_arg, help="field the runs were recorded with")
    p.add_argument("--mode", choices=[m.value for m in SolveMode], help="mode the runs were recorded with")
    p.add_argument("--db", type=Path)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_history)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.debug else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (DyadError, OSError) as exc:
        if args.debug:
            raise
        print(f"dyad: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
