"""Command-line surface for the calculator.

Subcommands: validate, invariants, surgery, cobordism, obstruct, lattice.
Exit codes: 0 on success, 2 for parse or validation failures, 3 when a
direct-mode computation is requested for a model without a flip map.
The environment variable CONECALC_TRUNC_T overrides the truncation bound
of the plain-F2 fallback solver used by --verify cross-checks.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import cfk, cobordism, f2u, lattice, surgery

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_FLIP = 3


def _load_complex(args) -> cfk.KnotComplex:
    if args.builtin:
        return cfk.builtin(args.builtin)
    if args.file:
        return cfk.parse_file(args.file)
    raise cfk.ComplexError(cfk.PARSE, "one of --builtin or --file is required")


def _frac_str(x) -> str:
    return str(x) if isinstance(x, (int, Fraction)) else repr(x)


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text)


def _parse_s_range(spec: str) -> tuple:
    lo, _, hi = spec.partition(":")
    return int(lo), int(hi)


def cmd_validate(args) -> int:
    try:
        if args.builtin:
            c = cfk.builtin(args.builtin)
            report = cfk.validate(c)
        else:
            with open(args.file) as fh:
                text = fh.read()
            try:
                c = cfk.parse(text)
                report = cfk.validate(c)
            except cfk.ComplexError as e:
                _emit(args, {"valid": False, "issues": [{"code": e.code, "message": str(e)}]},
                      f"INVALID [{e.code}] {e}")
                return EXIT_INVALID
    except (OSError, cfk.ComplexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    payload = {
        "valid": report.ok,
        "issues": [{"code": i.code, "message": i.message} for i in report.issues],
    }
    lines = [f"{c.name}: {'VALID' if report.ok else 'INVALID'}"]
    lines += [f"  [{i.code}] {i.message}" for i in report.issues]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_invariants(args) -> int:
    c = _load_complex(args)
    lo = hi = None
    if args.s_range:
        lo, hi = _parse_s_range(args.s_range)
    table = surgery.vh_table(c, lo, hi)
    lines = [f"knot {table.name}   genus {table.genus}   d(S^3_1) = {table.d1}"
             f"   (H via {table.h_mode} mode)"]
    lines.append("   s    V_s    H_s")
    for (s, v, h) in table.rows():
        lines.append(f"{s:>4}   {v:>4}   {h:>4}")
    _emit(args, table.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_surgery(args) -> int:
    c = _load_complex(args)
    hom = surgery.surgery_homology(c, args.n, extra=args.extra)
    lines = [f"HF^- of {args.n}-surgery on {hom.knot}:"]
    for (label, mod) in hom.modules:
        free = ", ".join(_frac_str(g) for g in mod.free) or "-"
        tors = ", ".join(f"(U^{k} at {_frac_str(g)})" for (g, k) in mod.torsion) or "-"
        lines.append(f"  class {label}: free gradings [{free}]  torsion [{tors}]")
    payload = hom.to_json()
    if args.verify:
        stable = all(surgery.truncation_stability(c, args.n, e) for e in (1, 2))
        consistent = _verify_f2_consistency(c, args.n)
        payload["verified"] = {"truncation_stable": stable, "f2_consistent": consistent}
        lines.append(f"verified: truncation stable = {stable}, "
                     f"plain-F2 cross-check = {consistent}")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _verify_f2_consistency(c: cfk.KnotComplex, n: int) -> bool:
    """Compare Smith-route homology dimensions with truncated plain-F2 ranks."""
    env = os.environ.get("CONECALC_TRUNC_T")
    cone = surgery.build_surgery_cone(c, n)
    for klass in cone.classes:
        d = klass.differential
        max_p = max((d.power(i, j) for (i, j) in d.entries), default=0)
        T = int(env) if env else f2u.default_truncation(max_p, cfk.genus(c), n)
        module, _ = f2u.homology(d)
        dims = f2u.f2_homology_dimensions(d, T)
        top = max((g for g in dims), default=0)
        safe = [deg for deg in dims if deg > top - T]
        for deg in safe:
            if module.f2_dimension(deg) != dims[deg]:
                return False
    return True


def cmd_cobordism(args) -> int:
    c = _load_complex(args)
    report = cobordism.vanishing_report(c, args.n)
    lines = [f"two-handle map classes for the {args.n}-trace of {report.knot} "
             f"(d1 = {report.d1}):"]
    for (s, verdict, mode) in report.verdicts:
        shift = cobordism.grading_shift(args.n, s)
        lines.append(f"  s = {s:>3}: {verdict:<12} [{mode} mode, degree {shift}]")
    lines.append(report.conclusion)
    _emit(args, cobordism.report_to_json(report), "\n".join(lines))
    return EXIT_OK


def cmd_obstruct(args) -> int:
    c = _load_complex(args)
    verdict = cobordism.obstruct_filling(c, args.n)
    lines = [f"{verdict.verdict}: {verdict.knot}, n = {verdict.n}, d1 = {verdict.d1}",
             verdict.conclusion]
    _emit(args, cobordism.verdict_to_json(verdict), "\n".join(lines))
    return EXIT_OK


def cmd_lattice(args) -> int:
    if args.file:
        with open(args.file) as fh:
            rows = json.load(fh)
        q = lattice.SymIntMatrix.from_rows(rows)
        report = lattice.handle_split_report(q)
        lines = [f"symmetric form of size {q.n}: nullity {report.nullity}, "
                 f"rank {report.rank}"]
        if report.congruent:
            lines.append("congruent to diag(identity, zero); transform verified by replay")
        else:
            lines.append(f"NOT congruent to diag(identity, zero): {report.witness}")
        _emit(args, report.to_json(), "\n".join(lines))
        return EXIT_OK
    # seeded self-test: scramble standard forms and recover them
    rng = random.Random(args.seed)
    trials = args.trials
    for _ in range(trials):
        n = rng.randrange(1, 7)
        k = rng.randrange(0, n + 1)
        base = [[1 if (i == j and i < n - k) else 0 for j in range(n)] for i in range(n)]
        p = lattice.random_unimodular(n, rng)
        scrambled = lattice.congruence(base, p)
        report = lattice.handle_split_report(lattice.SymIntMatrix.from_rows(scrambled))
        if not (report.congruent and report.nullity == k and report.verified):
            _emit(args, {"selftest": "failed", "seed": args.seed},
                  f"selftest FAILED at seed {args.seed}")
            return 1
    _emit(args, {"selftest": "ok", "seed": args.seed, "trials": trials},
          f"selftest ok: {trials} scrambled forms recovered (seed {args.seed})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conecalc",
        description="Knot Floer surgery calculator and lattice splitting tool.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_opts(p):
        p.add_argument("--builtin", choices=cfk.BUILTIN_NAMES)
        p.add_argument("--file")
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("validate", help="check a model file or builtin")
    add_model_opts(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("invariants", help="V/H table and the +1-surgery d-invariant")
    add_model_opts(p)
    p.add_argument("--s-range", help="inclusive window lo:hi")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("surgery", help="graded homology of n-surgery")
    add_model_opts(p)
    p.add_argument("-n", type=int, default=1)
    p.add_argument("--extra", type=int, default=0, help="widen the truncation window")
    p.add_argument("--verify", action="store_true",
                   help="cross-check truncation stability and plain-F2 ranks")
    p.set_defaults(func=cmd_surgery)

    p = sub.add_parser("cobordism", help="two-handle map classes through the cone")
    add_model_opts(p)
    p.add_argument("-n", type=int, default=1)
    p.set_defaults(func=cmd_cobordism)

    p = sub.add_parser("obstruct", help="symplectic filling obstruction for the trace")
    add_model_opts(p)
    p.add_argument("-n", type=int, default=1)
    p.set_defaults(func=cmd_obstruct)

    p = sub.add_parser("lattice", help="handle-splitting report for a linking form")
    p.add_argument("--file", help="JSON array-of-arrays of integers")
    p.add_argument("--json", action="store_true")
    p.add_argument("--seed", type=int, default=0,
                   help="run the scramble-and-recover self-test with this seed")
    p.add_argument("--trials", type=int, default=25)
    p.set_defaults(func=cmd_lattice)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except cfk.MissingFlipError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NO_FLIP
    except (cfk.ComplexError, lattice.LatticeError, OSError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
