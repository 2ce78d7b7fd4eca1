"""Command-line front end.

Exit codes: 0 success, 2 malformed input or unsupported request,
3 order n >= p in characteristic p, 4 precision exhausted, 5 a verify suite
failed.  Errors are reported as one line on stderr:
``error: <ExceptionName>: <reason>``.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from typing import List, Optional

from . import bruteforce, calculus, classify, verify
from .errors import FieldMismatch, ParseError, WaveletError
from .field import Backend, FieldParams, is_prime, parse_scalar
from .funcspace import CnCombo, CoeffStream, parse_function, serialize_function
from .reps import parse_rep

EXIT_OK, EXIT_INPUT, EXIT_CHAR, EXIT_PREC, EXIT_SUITE = 0, 2, 3, 4, 5


def format_abs(x: Fraction) -> str:
    return str(x)


def _common(ap: argparse.ArgumentParser, file: bool = True):
    if file:
        ap.add_argument("file", help="function file, or '-' for stdin")
    ap.add_argument("--field", choices=["zp", "fpt"], help="must match the file header if given")
    ap.add_argument("--p", type=int, help="must match the file header if given")
    ap.add_argument("--prec", type=int, help="working precision in digits (overrides the header)")
    ap.add_argument("--n", type=int, help="level / order")
    ap.add_argument("--depth", type=int, help="output depth")
    ap.add_argument("--probe", type=int, help="probe depth for brute-force searches")
    ap.add_argument("--tol", type=int, default=8, help="tolerance exponent k (|.| <= q^-k)")
    ap.add_argument("--budget", type=int, default=bruteforce.DEFAULT_BUDGET, help="max tuples before sampling")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="wavelet-cn", description="Wavelet calculus of C^n functions on local fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="print the level-n coefficient table b_r^{n,j}")
    _common(p)

    p = sub.add_parser("norm", help="print |f|_n, or the brute-force |f|_{C^n} with --bruteforce")
    _common(p)
    p.add_argument("--bruteforce", action="store_true")
    p.add_argument("--no-sampling", action="store_true", help="fail instead of sampling above the budget")

    p = sub.add_parser("lipschitz", help="print the Lipschitz constant of Phi_n f")
    _common(p)
    p.add_argument("--bruteforce", action="store_true")
    p.add_argument("--no-sampling", action="store_true")

    p = sub.add_parser("antiderive", help="print P_n f (or T_n f with --iterated)")
    _common(p)
    p.add_argument("--iterated", action="store_true", help="T_n = n! P_n ... P_1 of a level-0 function")

    p = sub.add_parser("classify", help="decide a property of f")
    _common(p)
    p.add_argument("--kind", required=True,
                   choices=["monotone", "increasing", "pseudocontraction", "isometry", "derivative-zero", "limit"])
    p.add_argument("--s", help="scalar s for --kind monotone")
    p.add_argument("--at", default="", help="point a (digits) for --kind limit")
    p.add_argument("--m0", type=int, help="first depth of the limit window")
    p.add_argument("--m1", type=int, help="last depth of the limit window")

    p = sub.add_parser("verify", help="run the randomized identity suites")
    _common(p, file=False)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--suite", action="append", choices=list(verify.SUITES), help="repeatable; default all")
    return ap


# ---------------------------------------------------------------------------

def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}")


def load_function(args) -> CnCombo:
    f = parse_function(_read(args.file), prec_override=args.prec)
    if args.field is not None and args.field != f.params.backend.value:
        raise FieldMismatch(f"--field {args.field} contradicts the file header ({f.params.backend.value})")
    if args.p is not None and args.p != f.params.p:
        raise FieldMismatch(f"--p {args.p} contradicts the file header (p={f.params.p})")
    return f


def _positive(args, *names):
    for name in names:
        val = getattr(args, name, None)
        if val is not None and val < 1:
            raise ParseError(f"--{name} must be positive")


def _order(args, f: CnCombo, default: Optional[int] = None) -> int:
    n = args.n if args.n is not None else (f.level if default is None else default)
    if n < 0:
        raise ParseError("--n must be >= 0")
    f.params.check_order(n, "order")
    return n


def _sup_lines(res: bruteforce.SupResult) -> List[str]:
    wit = "none" if res.witness is None else "".join(f"({','.join(map(str, r.digits))})" for r in res.witness)
    lines = [format_abs(res.value), f"order={res.order} witness={wit} tuples={res.count}"]
    if res.sampled:
        lines[-1] += f" sampled seed={res.seed}"
    return lines


def cmd_expand(args, out) -> int:
    f = load_function(args)
    n = _order(args, f)
    table = calculus.extract_bnj(f, n, depth=args.depth)
    out.write(calculus.serialize_table(table))
    return EXIT_OK


def _probe(args, f: CnCombo) -> int:
    return args.probe if args.probe is not None else f.depth + 2


def cmd_norm(args, out) -> int:
    f = load_function(args)
    n = _order(args, f)
    if args.bruteforce:
        res = bruteforce.norm_cn_bruteforce(f, n, _probe(args, f), budget=args.budget, seed=args.seed,
                                            sampling=not args.no_sampling, threads=args.threads)
        out.write("\n".join(_sup_lines(res)) + "\n")
    elif n == 0:
        out.write(format_abs(calculus.sup_norm(f)) + "\n")
    else:
        out.write(format_abs(calculus.norm_n(f, n)) + "\n")
    return EXIT_OK


def cmd_lipschitz(args, out) -> int:
    f = load_function(args)
    n = _order(args, f)
    if args.bruteforce:
        res = bruteforce.lipschitz_bruteforce(f, n, _probe(args, f), budget=args.budget, seed=args.seed,
                                              sampling=not args.no_sampling, threads=args.threads)
        out.write("\n".join(_sup_lines(res)) + "\n")
    else:
        out.write(format_abs(calculus.lipschitz_constant(f, n)) + "\n")
    return EXIT_OK


def cmd_antiderive(args, out) -> int:
    f = load_function(args)
    if args.iterated:
        n = _order(args, f, default=1)
        g = calculus.t_n(f, n)
    else:
        n = _order(args, f, default=f.level + 1)
        g = calculus.antiderive(f, n)
    if args.depth is not None:
        g = g.with_depth(args.depth)
    out.write(serialize_function(g))
    return EXIT_OK


def cmd_classify(args, out) -> int:
    f = load_function(args)
    kind = args.kind
    if kind == "monotone":
        if args.s is None:
            raise ParseError("--kind monotone needs --s")
        v = classify.monotone_type(f, parse_scalar(args.s, f.params))
    elif kind == "increasing":
        v = classify.is_increasing(f)
    elif kind == "pseudocontraction":
        v = classify.is_pseudocontraction(f)
    elif kind == "isometry":
        v = classify.is_isometry(f)
    elif kind == "derivative-zero":
        v = classify.is_derivative_zero(f, args.n if args.n is not None else 1)
    else:
        n = _order(args, f)
        a = parse_rep(args.at, f.params.p)
        m0 = args.m0 if args.m0 is not None else f.depth + 1
        m1 = args.m1 if args.m1 is not None else m0 + 2 * args.tol
        v = classify.cnplus1_limit_test(CoeffStream.from_combo(f, n), a, m0, m1, args.tol)
    out.write(classify.format_verdict(v) + "\n")
    if "limits" in v.detail:
        settled = ",".join(map(str, v.detail["settled_at"]))
        out.write(f"limits={';'.join(v.detail['limits'])} settled_at={settled} tol={v.detail['tolerance']}\n")
    elif "reason" in v.detail:
        out.write(f"reason={v.detail['reason']}\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    fields = verify.FIELDS
    if args.field is not None:
        fields = [fp for fp in fields if fp[0] == args.field]
    if args.p is not None:
        if not is_prime(args.p):
            raise ParseError(f"--p {args.p} is not prime")
        fields = [(b, q) for b, q in {(b, args.p) for b, _ in fields}]
        fields.sort()
    if args.n is not None:
        for b, q in fields:
            FieldParams(Backend(b), q, 8).check_order(args.n, "order")
    ctx = verify.Context(prec=args.prec or verify.DEFAULT_PREC, threads=args.threads, budget=args.budget,
                         seed=args.seed, fields=tuple(fields), level=args.n)
    if args.trials < 0:
        raise ParseError("--trials must be >= 0")
    results = verify.run(args.trials, ctx, args.suite)
    out.write(verify.report(results, ctx))
    return EXIT_OK if all(r.ok for r in results) else EXIT_SUITE


COMMANDS = {
    "expand": cmd_expand,
    "norm": cmd_norm,
    "lipschitz": cmd_lipschitz,
    "antiderive": cmd_antiderive,
    "classify": cmd_classify,
    "verify": cmd_verify,
}


def main(argv: Optional[List[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        _positive(args, "budget", "threads", "prec")
        return COMMANDS[args.command](args, out)
    except WaveletError as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return e.exit_code
    except (ValueError, KeyError) as e:
        err.write(f"error: {type(e).__name__}: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
