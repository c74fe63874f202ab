"""Command-line interface.

Exit codes: 0 for Feasible / GE / ConditionsHold, 1 for Infeasible / LT /
Violated, 2 for Marginal / Inconclusive, 3 for input or usage errors.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys

from . import io
from .errors import SubmajError
from .feasibility import (EXIT_CODES, TOL_FEAS, decide_exact_transform, decide_submajorization,
                          decide_submajorization_classical)
from .families import FamilyPair, is_classical
from .means import MeanProgram
from .spectrum import (DEFAULT_DEPTH, DEFAULT_GAMMA_RES, DEFAULT_MAX_PROGRAMS, GE, LT, TOL_SWEEP,
                       SpectralPoint, _fmt, _sigma_commutes, alpha_grid, classical_points, evaluate,
                       quantum_points, sweep_decide, sweep_decide_asymptotic_commuting,
                       sweep_decide_quantum)

EXIT_ERROR = 3
VERDICT_CODES = {GE: 0, LT: 1}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _emit(args, text: str):
    if args.out:
        io.write_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _grid_args(p):
    p.add_argument("--grid-alpha", default=None,
                   help="comma-separated alpha values, 'inf' for the tropical rows")
    p.add_argument("--grid-gamma-res", type=int, default=DEFAULT_GAMMA_RES,
                   help="simplex grid resolution for gamma (weights in multiples of 1/res)")


# ------------------------------------------------------------------- eval

def _points_from_spec(spec, P: FamilyPair) -> list:
    """Spectral points from a monotone spec file.

    The file holds ``{"points": [...]}`` where each point has ``alpha``
    (number or ``"inf"``), ``x`` and either ``gamma`` (label -> weight) or
    ``program`` (mean program steps).
    """
    if not isinstance(spec, dict) or not isinstance(spec.get("points"), list):
        raise io.ParseError("monotone spec: expected {\"points\": [...]}")
    out = []
    for k, item in enumerate(spec["points"]):
        try:
            alpha = math.inf if item.get("alpha", "inf") == "inf" else float(item["alpha"])
            x = str(item["x"])
            if "program" in item:
                out.append(SpectralPoint.mean(alpha, x, MeanProgram.from_json(item["program"])))
            else:
                out.append(SpectralPoint.classical(alpha, x, item["gamma"]))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SubmajError):
                raise
            raise io.ParseError(f"monotone spec: point {k}: {exc}") from exc
    return out


def cmd_eval(args) -> int:
    P = io.load_family(args.family)
    if args.monotones:
        points = _points_from_spec(io.load_json(args.monotones), P)
    else:
        alphas = alpha_grid(args.grid_alpha)
        if _sigma_commutes(P):
            points = classical_points(P.X, P.Y, alphas, args.grid_gamma_res)
        else:
            points = quantum_points(P.X, P.Y, alphas, args.depth, max_programs=args.max_programs)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kind", "alpha", "x", "gamma_or_program", "value"])
    for f in points:
        w.writerow([f.kind, _fmt(f.alpha), f.x, f.parameter(), _fmt(evaluate(f, P))])
    _emit(args, buf.getvalue())
    return 0


# --------------------------------------------------------------- feasible

def cmd_feasible(args) -> int:
    P = io.load_family(args.P)
    Q = io.load_family(args.Q)
    cons = io.group_constraints_from_json(io.load_json(args.equivariant), args.equivariant) \
        if args.equivariant else ()
    gibbs = io.gibbs_from_json(io.load_json(args.gibbs), args.gibbs) if args.gibbs else None
    if args.classical:
        if cons or gibbs is not None or args.trace_preserving or args.exact:
            raise SubmajError("--classical does not combine with other constraints")
        rep = decide_submajorization_classical(P, Q, tol_feas=args.tol_feas)
    elif args.exact or gibbs is not None:
        rep = decide_exact_transform(P, Q, trace_preserving=args.trace_preserving, gibbs_state=gibbs,
                                     equivariance=cons, tol_feas=args.tol_feas)
    else:
        rep = decide_submajorization(P, Q, trace_preserving=args.trace_preserving, equivariance=cons,
                                     tol_feas=args.tol_feas)
    data = rep.to_json()
    if not args.certificate:
        data.pop("certificate", None)
    _emit(args, io.dumps(data))
    msg = f"{rep.status} (t* = {rep.slack:.3e})"
    if rep.violated_monotone is not None:
        fp, fq = rep.witness_values
        msg += f"; violated monotone {rep.violated_monotone.describe()}: f(P)={fp:.6g} < f(Q)={fq:.6g}"
    print(msg, file=sys.stderr)
    return EXIT_CODES[rep.status]


# ------------------------------------------------------------- asymptotic

def cmd_asymptotic(args) -> int:
    P = io.load_family(args.P)
    Q = io.load_family(args.Q)
    alphas = alpha_grid(args.grid_alpha)
    if args.quantum:
        res = sweep_decide_quantum(P, Q, alphas, args.depth, max_programs=args.max_programs, tol=args.tol)
    elif args.commuting:
        res = sweep_decide_asymptotic_commuting(P, Q, alphas, args.grid_gamma_res, args.tol)
    else:
        res = sweep_decide(P, Q, alphas, args.grid_gamma_res, args.depth, args.max_programs, args.tol)
    _emit(args, res.to_csv(only_violations=args.violations_only))
    summary = res.summary()
    summary["classical"] = is_classical(P) and is_classical(Q)
    print(json.dumps(summary, indent=2), file=sys.stderr)
    return VERDICT_CODES.get(res.verdict, 2)


# ---------------------------------------------------------------- thermal

def cmd_thermal(args) -> int:
    from .applications import run_faist_example

    eps = [float(e) for e in args.epsilons.split(",")]
    rep = run_faist_example(args.beta, eps, feasibility=not args.no_feasibility, alpha=args.alpha,
                            gamma_weight=args.gamma, t=args.time)
    data = rep.to_json()
    _emit(args, io.dumps(data))
    ok = rep.target_exceeds_initial and rep.target_increasing
    if not args.no_feasibility:
        ok = ok and all(r.gibbs_preserving.status == "Feasible" and r.covariant.status == "Infeasible"
                        for r in rep.rows)
    print("thermal example " + ("reproduced" if ok else "NOT reproduced"), file=sys.stderr)
    return 0 if ok else 1


# --------------------------------------------------------------- exponent

def cmd_exponent(args) -> int:
    from .applications import EXPONENT_ALPHAS, exponent_details, unrestricted_exponent

    q = io.exponent_query_from_json(io.load_json(args.query), args.query)
    alphas = alpha_grid(args.grid_alpha) if args.grid_alpha else EXPONENT_ALPHAS
    det = exponent_details(q, alphas, args.grid_gamma_res)
    data = {"r": q.r, "kappa": q.kappa, "exponent": det.to_json(),
            "unrestricted": unrestricted_exponent(q.r, q.rho0, q.sigma0),
            "note": "grid supremum; a lower bound on the exact value"}
    _emit(args, io.dumps(data))
    return 0


# --------------------------------------------------------------- selftest

def cmd_selftest(args) -> int:
    from .linalg import BACKEND
    from .selftest import run_selftest

    print(f"eigensolver backend: {BACKEND}", flush=True)
    results = run_selftest(seed=args.seed, report=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    total = sum(r.seconds for r in results)
    print(f"{len(results) - len(failed)}/{len(results)} checks passed in {total:.1f}s")
    if args.out:
        io.write_atomic(args.out, io.dumps([{"name": r.name, "passed": r.passed, "detail": r.detail,
                                             "seconds": r.seconds} for r in results]))
    return 0 if not failed else 1


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="submaj", description="Relative submajorization toolkit.")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    parser.add_argument("--out", default=None, help="output file (written atomically); default stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        # accept the global options after the subcommand as well
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        p.add_argument("--out", default=argparse.SUPPRESS)

    p = sub.add_parser("eval", help="evaluate spectral points on a family pair")
    p.add_argument("family")
    p.add_argument("--monotones", help="JSON file listing spectral points")
    p.add_argument("--depth", type=int, default=1, help="mean program depth for noncommuting sigma")
    p.add_argument("--max-programs", type=int, default=DEFAULT_MAX_PROGRAMS)
    _grid_args(p)
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("feasible", help="decide P >= Q by conic feasibility")
    p.add_argument("P")
    p.add_argument("Q")
    p.add_argument("--equivariant", metavar="GROUP", help="group file with unitaries or hamiltonians")
    p.add_argument("--trace-preserving", action="store_true")
    p.add_argument("--gibbs", metavar="STATE", help="state file; adds T(tau) = tau")
    p.add_argument("--exact", action="store_true", help="require T(rho(x)) = rho'(x)")
    p.add_argument("--classical", action="store_true", help="use the linear program (classical pairs)")
    p.add_argument("--certificate", action="store_true", help="include the Choi operator in the report")
    p.add_argument("--tol-feas", type=float, default=TOL_FEAS)
    common(p)
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("asymptotic", help="compare P and Q on a grid of spectral points")
    p.add_argument("P")
    p.add_argument("Q")
    _grid_args(p)
    p.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    p.add_argument("--max-programs", type=int, default=DEFAULT_MAX_PROGRAMS)
    p.add_argument("--tol", type=float, default=TOL_SWEEP)
    p.add_argument("--violations-only", action="store_true")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--commuting", action="store_true", help="force the commuting-sigma sweep")
    mode.add_argument("--quantum", action="store_true", help="force the mean-program sweep")
    common(p)
    p.set_defaults(func=cmd_asymptotic)

    p = sub.add_parser("thermal", help="two-level Gibbs-preserving vs covariant example")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--epsilons", default="0.01,0.001,0.0001")
    p.add_argument("--alpha", type=float, default=2.0)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--time", type=float, default=math.pi)
    p.add_argument("--no-feasibility", action="store_true")
    common(p)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("exponent", help="strong converse exponent with reference frames")
    p.add_argument("query")
    p.add_argument("--grid-alpha", default=None)
    p.add_argument("--grid-gamma-res", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("selftest", help="run the built-in numerical checks")
    common(p)
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SubmajError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
