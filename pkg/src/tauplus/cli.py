"""Command-line front end: ``tauplus <command> --q Q ...``.

Exit codes: 0 success, 1 verification failure, 2 usage or range error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adder import ResidueVector
from .forward import forward
from .moduli import make_tau_plus
from .perf import comparison_csv, comparison_table
from .reverse import STRUCTURAL_MIN_Q, build_bit_matrix, eval_bit_matrix, reverse_functional, x_prime_eq9
from .verify import default_workers, verify_exhaustive, verify_sample


class UsageError(Exception):
    pass


def _num(v: int, as_string: bool):
    return str(v) if as_string else v


def _emit_json(obj) -> None:
    print(json.dumps(obj, separators=(",", ":")))


def cmd_info(args) -> int:
    s = make_tau_plus(args.q)
    rec = {
        "q": s.q,
        "moduli": [s.m1, s.m2, s.m3],
        "mu1": s.mu1,
        "mu2": s.mu2,
        "pair_modulus": s.pair_modulus,
        "dr": s.dr,
    }
    if args.string_numbers:
        rec = {k: ([str(x) for x in v] if isinstance(v, list) else str(v)) for k, v in rec.items()}
        rec["q"] = s.q
    _emit_json(rec)
    return 0


def cmd_forward(args) -> int:
    s = make_tau_plus(args.q)
    rv = forward(_parse_int(args.x), s)
    rec = {k: _num(v, args.string_numbers) for k, v in rv.to_record().items()}
    rec["q"] = rv.q
    _emit_json(rec)
    return 0


def _parse_int(text) -> int:
    try:
        return int(text)
    except (TypeError, ValueError):
        raise UsageError(f"not an integer: {text!r}") from None


def _reverse_operands(args) -> ResidueVector:
    if args.residues == ["-"]:
        try:
            rec = json.loads(sys.stdin.read())
        except json.JSONDecodeError as e:
            raise UsageError(f"bad JSON record on stdin: {e}") from None
        rv = ResidueVector.from_record(rec)
        if rv.q != args.q:
            raise UsageError(f"record has q={rv.q}, expected {args.q}")
        return rv
    if len(args.residues) != 3:
        raise UsageError("reverse takes x1 x2 x3, or '-' to read a JSON record")
    return ResidueVector(args.q, *(_parse_int(t) for t in args.residues))


def cmd_reverse(args) -> int:
    s = make_tau_plus(args.q)
    rv = _reverse_operands(args)
    if args.path != "functional" and args.q < STRUCTURAL_MIN_Q:
        raise UsageError(f"--path {args.path} needs q >= {STRUCTURAL_MIN_Q}")
    if args.path == "functional":
        x = reverse_functional(rv, s)
    else:
        xp = x_prime_eq9(rv, s) if args.path == "eq9" else eval_bit_matrix(build_bit_matrix(s), rv)
        x = rv.x1 + (xp << (2 * s.q + 1))
    print(x)
    return 0


def cmd_verify(args) -> int:
    workers = args.workers or default_workers()
    if args.mode == "exhaustive":
        rep = verify_exhaustive(args.q, workers=workers)
    else:
        if args.n is None or args.n < 1:
            raise UsageError("sample mode needs -n N with N >= 1")
        rep = verify_sample(args.q, args.n, seed=args.seed, workers=workers, n_paths=args.paths_n)
    print(rep)
    return 0 if rep.ok else 1


def cmd_matrix(args) -> int:
    if args.q < STRUCTURAL_MIN_Q:
        raise UsageError(f"matrix needs q >= {STRUCTURAL_MIN_Q}")
    m = build_bit_matrix(make_tau_plus(args.q))
    print(m.dump())
    print(f"# folded constant: {m.folded_constant}")
    print(f"# column depths (col {2 * args.q} first): {list(reversed(m.column_depths()))}")
    return 0


def cmd_schedule(args) -> int:
    if args.q < STRUCTURAL_MIN_Q:
        raise UsageError(f"schedule needs q >= {STRUCTURAL_MIN_Q}")
    from .csa import PlanningError, fa_count_report, plan_reduction, plan_to_csv

    try:
        plan = plan_reduction(build_bit_matrix(make_tau_plus(args.q)))
    except PlanningError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(plan_to_csv(plan))
    print(fa_count_report(plan), file=sys.stderr)
    return 0


def _q_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_perf(args) -> int:
    sys.stdout.write(comparison_csv(comparison_table(args.q)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tauplus", description="Residue conversion for the tau-plus moduli set.")
    sub = p.add_subparsers(dest="command", required=True)

    def with_q(name, help_, **kw):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--q", type=int, required=True, **kw)
        return sp

    sp = with_q("info", "print moduli and derived constants")
    sp.add_argument("--string-numbers", action="store_true", help="serialize numbers as decimal strings")
    sp.set_defaults(func=cmd_info)

    sp = with_q("forward", "integer -> residue record (JSON)")
    sp.add_argument("x")
    sp.add_argument("--string-numbers", action="store_true", help="serialize numbers as decimal strings")
    sp.set_defaults(func=cmd_forward)

    sp = with_q("reverse", "residues -> integer")
    sp.add_argument("residues", nargs="+", help="x1 x2 x3, or '-' for a JSON record on stdin")
    sp.add_argument("--path", choices=("functional", "eq9", "matrix"), default="functional")
    sp.set_defaults(func=cmd_reverse)

    sp = with_q("verify", "round-trip / homomorphism / path-agreement sweep")
    sp.add_argument("--mode", choices=("exhaustive", "sample"), default="sample")
    sp.add_argument("-n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, help="default: $RNS_WORKERS or CPU count")
    sp.add_argument("--paths-n", type=int, default=10_000,
                    help="samples also checked for reverse-path agreement (q >= 9)")
    sp.set_defaults(func=cmd_verify)

    sp = with_q("matrix", "dump the 13-row reverse-converter bit matrix")
    sp.set_defaults(func=cmd_matrix)

    sp = with_q("schedule", "CSV reduction plan; adder report on stderr")
    sp.set_defaults(func=cmd_schedule)

    sp = sub.add_parser("perf", help="tau vs tau-plus delay comparison CSV")
    sp.add_argument("--q", type=_q_list, required=True, help="comma-separated, e.g. 4,8,16,32")
    sp.set_defaults(func=cmd_perf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
