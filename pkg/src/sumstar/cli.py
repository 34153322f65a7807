"""Command-line entry point.

Subcommands: ``solve``, ``verify``, ``oracle``, ``fuzz``, ``normalize``.
Verdict-producing commands exit 10 for satisfiable or accepted, 20 for
unsatisfiable or rejected, and 1 for usage, validation, or resource
errors.  ``normalize`` exits 0 after printing the rewriting stages;
``fuzz`` exits 0 when the differential run finds no disagreements.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .certificate import emit_certificate, verify_for_problem
from .errors import ParseError, ResourceLimit, SumstarError, ValidationError
from .frontend import (
    parse_certificate,
    parse_problem,
    print_certificate,
    print_model,
    print_stages,
    problem_digest,
)
from .oracle import OracleBounds, brute_force_sat, differential_run
from .pipeline import normalize_stages
from .semantics import validate_fragment
from .solver import DEFAULT_DNF_CAP, DEFAULT_SUPPORT_CAP, solve_problem

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_ERROR = 1


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sumstar",
        description="Satisfiability of array sum and cardinality constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="decide a problem file")
    solve.add_argument("file")
    solve.add_argument("--cert", metavar="PATH", help="write a certificate here when satisfiable")
    solve.add_argument("--dump-stages", action="store_true", help="print every rewriting stage")
    solve.add_argument("--max-dnf", type=int, default=DEFAULT_DNF_CAP, metavar="N")
    solve.add_argument("--max-support", type=int, default=DEFAULT_SUPPORT_CAP, metavar="N")

    verify = sub.add_parser("verify", help="check a certificate against a problem file")
    verify.add_argument("file")
    verify.add_argument("--cert", metavar="PATH", required=True)

    oracle = sub.add_parser("oracle", help="bounded brute-force reference verdict")
    oracle.add_argument("file")
    oracle.add_argument("--max-len", type=int, required=True, metavar="L")
    oracle.add_argument("--max-val", type=int, required=True, metavar="V")

    fuzz = sub.add_parser("fuzz", help="differential test of solver against oracle")
    fuzz.add_argument("--seed", type=int, required=True, metavar="S")
    fuzz.add_argument("--count", type=int, required=True, metavar="N")
    fuzz.add_argument("--max-len", type=int, default=3, metavar="L")
    fuzz.add_argument("--max-val", type=int, default=4, metavar="V")

    normalize = sub.add_parser("normalize", help="print the rewriting stages of a problem")
    normalize.add_argument("file")
    return parser


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _cmd_solve(args) -> int:
    p = parse_problem(_read(args.file))
    vp = validate_fragment(p)
    if args.dump_stages:
        print(print_stages(normalize_stages(vp)), end="")
    r = solve_problem(vp, max_dnf=args.max_dnf, max_support=args.max_support)
    if r.status != "sat":
        print("unsat")
        return EXIT_UNSAT
    print("sat")
    print(print_model(p, r.model), end="")
    if args.cert:
        cert = emit_certificate(
            r.stages.liacard, r.result, problem_digest(p), max_dnf=args.max_dnf
        )
        Path(args.cert).write_text(print_certificate(cert), encoding="utf-8")
    return EXIT_SAT


def _cmd_verify(args) -> int:
    p = parse_problem(_read(args.file))
    c = parse_certificate(_read(args.cert))
    out = verify_for_problem(p, c)
    if out.accepted:
        print("accepted")
        return EXIT_SAT
    print(f"rejected (check {out.check}): {out.reason}")
    return EXIT_UNSAT


def _cmd_oracle(args) -> int:
    vp = validate_fragment(parse_problem(_read(args.file)))
    bounds = OracleBounds(args.max_len, args.max_val)
    v = brute_force_sat(vp, bounds)
    if v.is_sat:
        print("sat")
        print(print_model(vp.problem, v.model), end="")
        return EXIT_SAT
    print(
        f"unsat at bounds (prefix length {args.max_len}, values up to "
        f"{args.max_val}); larger models may exist"
    )
    return EXIT_UNSAT


def _cmd_fuzz(args) -> int:
    report = differential_run(
        args.seed, args.count, OracleBounds(args.max_len, args.max_val)
    )
    print(report.render())
    return 0 if not report.disagreements else EXIT_ERROR


def _cmd_normalize(args) -> int:
    vp = validate_fragment(parse_problem(_read(args.file)))
    print(print_stages(normalize_stages(vp)), end="")
    return 0


_COMMANDS = {
    "solve": _cmd_solve,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
    "fuzz": _cmd_fuzz,
    "normalize": _cmd_normalize,
}


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ParseError as exc:
        where = f" at line {exc.line}, column {exc.col}" if exc.line else ""
        print(f"parse error{where}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except ValidationError as exc:
        for code, message in exc.violations:
            print(f"{code}: {message}", file=sys.stderr)
        return EXIT_ERROR
    except ResourceLimit as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except SumstarError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except OSError as exc:
        print(f"cannot read input: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
