"""Command-line front end: ``sharpconst {constant,sweep,verify,symmetrize}``.

The document goes to stdout (or ``--out``), progress to stderr.  Exit codes:
0 success, 2 usage error, 3 solver failure, 4 verification failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from importlib import resources

import numpy as np

from .exceptions import InvalidExponent, SharpConstError, UnsupportedDimension
from .extremal import EvenPoly, ExtremalProblem, FullPoly, sharp_constant
from .operators import OperatorSpec
from .quadrature import WeightSpec

log = logging.getLogger("sharpconst")

SCHEMA_VERSION = "1"
SIG_DIGITS = 12
EXIT_USAGE, EXIT_SOLVER, EXIT_VERIFY = 2, 3, 4


class UsageError(Exception):
    pass


def load_schema() -> dict:
    return json.loads(resources.files("sharpconst").joinpath("schema/output-v1.json").read_text())


def _round(obj):
    """Round floats to 12 significant digits; non-finite floats become strings."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {str(k): _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_round(v) for v in obj]
    return obj


def _parse_p(text: str) -> float:
    try:
        p = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid p: {text!r}") from exc
    if not p > 0:
        raise argparse.ArgumentTypeError("p must be positive")
    return p


def _parse_ns(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid --ns: {text!r}") from exc


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get("SHARPCONST_THREADS")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise UsageError(f"SHARPCONST_THREADS must be an integer, got {env!r}")


def _resolve_nu(args, kind: str):
    """``nu`` from flags, or derived from ``m``; returns ``(nu, mapping text)``."""
    if args.nu is not None:
        return args.nu, None
    if getattr(args, "m", None) is None:
        return None, None
    m = args.m
    if kind in ("ball", "even", "bessel-origin"):
        return m / 2 - 1, f"nu = m/2 - 1 = {m / 2 - 1:g} (m = {m}, ball/radial)"
    return (m - 3) / 2, f"nu = (m-3)/2 = {(m - 3) / 2:g} (m = {m}, sphere/zonal)"


# ------------------------------------------------------------------ commands

def _cmd_constant(args):
    space = args.space
    if space in ("ball", "sphere"):
        from .multivar import DomainSpec, multivariate_sharp_constant

        if args.m is None:
            raise UsageError("--m is required for ball/sphere")
        domain = DomainSpec(space, args.m, args.p)
        _, mapping = _resolve_nu(args, space)
        res = multivariate_sharp_constant(args.m, args.n, args.N, domain)
        out = res.to_dict()
        out["basis"] = "multivariate_monomial"
        out["monomials"] = [list(a) for a in res.diagnostics.get("monomials", ())]
        return out, mapping

    nu, mapping = _resolve_nu(args, space)
    if space == "even":
        alpha = args.alpha if args.alpha is not None else (2 * nu + 1 if nu is not None else 0.0)
        beta = args.beta if args.beta is not None else 0.0
        vspace = EvenPoly(args.n // 2)
    else:
        alpha = args.alpha if args.alpha is not None else 0.0
        beta = args.beta if args.beta is not None else (nu if nu is not None else 0.0)
        vspace = FullPoly(args.n)
    functional = args.functional
    if functional is None:
        functional = "bessel" if space == "even" else "gegenbauer"
    if functional == "bessel":
        if nu is None:
            nu = (alpha - 1) / 2
        op = OperatorSpec.bessel_at_zero(nu, args.N)
    elif functional == "gegenbauer":
        lam = args.lam if args.lam is not None else (nu if nu is not None else beta) + 0.5
        op = OperatorSpec.gegenbauer_at_one(lam, args.N)
    elif functional == "identity":
        op = OperatorSpec.identity(args.point)
    else:
        op = OperatorSpec.derivative_at(args.point, args.k)
    prob = ExtremalProblem(vspace, WeightSpec(alpha, beta, (-1.0, 1.0), args.p), op)
    log.info("solving %s", prob.describe())
    res = sharp_constant(prob, tol=args.tol, seed=args.seed)
    out = res.to_dict()
    out["extremizer_orthonormal"] = out.pop("extremizer")
    out["extremizer"] = [float(c) for c in res.extremizer_poly().coeffs]
    out["basis"] = "monomial_even" if space == "even" else "monomial"
    return out, mapping


def _cmd_sweep(args, threads):
    from .limits import bessel_origin_sequence, extrapolate, gegenbauer_endpoint_sequence

    nu, mapping = _resolve_nu(args, args.family)
    if nu is None:
        raise UsageError("--nu or --m is required")
    fn = bessel_origin_sequence if args.family == "bessel-origin" else gegenbauer_endpoint_sequence
    seq = fn(nu, args.N, args.p, args.ns, tol=args.tol, seed=args.seed, threads=threads)
    out = seq.to_dict()
    try:
        out["limit"] = extrapolate(seq).to_dict()
    except SharpConstError as exc:
        log.warning("no limit estimate: %s", exc)
        out["limit"] = None
    return out, mapping


def _cmd_verify(args, threads):
    from .limits import verify_relation

    tolerances = {}
    if args.tol_limit is not None:
        tolerances["limit"] = args.tol_limit
    if args.tol_identity_p2 is not None:
        tolerances["identity_p2"] = args.tol_identity_p2
    if args.tol_identity_pinf is not None:
        tolerances["identity_pinf"] = args.tol_identity_pinf
    which = args.relation.upper()
    mapping = None
    nu = args.nu
    if which in ("C4_4", "C4_5"):
        if args.m is None:
            raise UsageError(f"--m is required for {args.relation}")
        _, mapping = _resolve_nu(argparse.Namespace(nu=None, m=args.m), "ball" if which == "C4_4" else "sphere")
    report = verify_relation(which, p=args.p, nu=nu, N=args.N, m=args.m, ns=args.ns,
                             tolerances=tolerances, threads=threads)
    passed = report["status"] in ("pass", "indicative")
    return {"passed": passed, "reports": [report]}, mapping


def _cmd_symmetrize(args):
    from .multivar import (MultiPolyCoeffs, ball_lp_norm, haar_symmetrize_full, radial_lp_norm,
                           sphere_lp_norm, zonal_lp_norm, zonal_symmetrize)

    rng = np.random.default_rng(args.seed)
    if args.domain == "interval":
        from .polybasis import PolyCoeffs1D, symmetrize_even
        from .quadrature import weighted_lp_norm

        P = PolyCoeffs1D(rng.standard_normal(args.degree + 1))
        Q = symmetrize_even(P)
        w = WeightSpec(args.alpha, args.beta, (-1.0, 1.0), args.p)
        def cuts(R, lo):
            r = np.polynomial.Polynomial(R.coeffs).roots()
            return tuple(np.unique(r[(np.abs(r.imag) < 1e-12) & (r.real > lo) & (r.real < 1)].real))

        kinks = {} if math.isinf(args.p) else {"breakpoint_exponent": args.p}
        before = weighted_lp_norm(P, w, tol=1e-10, breakpoints=cuts(P, -1.0), **kinks)
        Qt = np.zeros(2 * Q.coeffs.size - 1)
        Qt[::2] = Q.coeffs
        after = weighted_lp_norm(Q, w, tol=1e-10, even=True, breakpoints=cuts(PolyCoeffs1D(Qt), 0.0), **kinks)
        original = [float(c) for c in P.coeffs]
    else:
        if args.m is None:
            raise UsageError("--m is required for ball/sphere")
        P = MultiPolyCoeffs.random(args.m, args.degree, rng)
        if args.domain == "ball":
            Q = haar_symmetrize_full(P)
            before = ball_lp_norm(P, args.p)
            after = radial_lp_norm(Q, args.m, args.p)
        else:
            pole = np.zeros(args.m)
            pole[-1] = 1.0
            Q = zonal_symmetrize(P, pole)
            before = sphere_lp_norm(P, args.p)
            after = zonal_lp_norm(Q, args.m, args.p)
        original = {",".join(map(str, a)): float(c) for a, c in sorted(P.terms.items())}
    slack = 1e-6 * max(before, 1.0)
    return {
        "original": original,
        "symmetrized": [float(c) for c in Q.coeffs],
        "norm_original": before,
        "norm_symmetrized": after,
        "contraction_holds": bool(after <= before + slack),
    }, None


# ------------------------------------------------------------------ output

def _csv(command: str, result: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if command == "constant":
        w.writerow(["value", "lower_bound", "upper_bound", "converged", "certified"])
        w.writerow([result[k] for k in ("value", "lower_bound", "upper_bound", "converged", "certified")])
    elif command == "sweep":
        w.writerow(["n", "raw", "scaled", "converged"])
        for r in result["rows"]:
            w.writerow([r["n"], r["raw"], r["scaled"], r["converged"]])
    elif command == "verify":
        w.writerow(["relation", "status", "observed", "predicted", "tolerance"])
        for r in result["reports"]:
            w.writerow([r["relation"], r["status"], r.get("observed"), r.get("predicted"), r.get("tolerance")])
    else:
        w.writerow(["index", "coefficient"])
        for i, c in enumerate(result["symmetrized"]):
            w.writerow([i, c])
    return buf.getvalue()


def _inputs(args) -> dict:
    skip = {"func", "out", "threads", "verbose", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sharpconst", description="Sharp constants of weighted polynomial inequalities.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", help="write the document to this file instead of stdout")
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=None, help="worker count (default: $SHARPCONST_THREADS or 1)")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constant", parents=[common], help="one sharp constant")
    c.add_argument("--space", choices=("even", "full", "ball", "sphere"), default="full")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--N", type=int, default=0)
    c.add_argument("--p", type=_parse_p, default=2.0)
    c.add_argument("--nu", type=float)
    c.add_argument("--m", type=int)
    c.add_argument("--alpha", type=float)
    c.add_argument("--beta", type=float)
    c.add_argument("--functional", choices=("bessel", "gegenbauer", "identity", "derivative"))
    c.add_argument("--lam", type=float)
    c.add_argument("--point", type=float, default=0.0)
    c.add_argument("--k", type=int, default=1)

    s = sub.add_parser("sweep", parents=[common], help="scaled constant sequence and its limit")
    s.add_argument("--family", choices=("bessel-origin", "gegenbauer-endpoint"), required=True)
    s.add_argument("--nu", type=float)
    s.add_argument("--m", type=int)
    s.add_argument("--N", type=int, default=0)
    s.add_argument("--p", type=_parse_p, default=2.0)
    s.add_argument("--ns", type=_parse_ns)

    v = sub.add_parser("verify", parents=[common], help="check a limit relation")
    v.add_argument("--relation", type=str.lower, choices=("t4_1", "t4_3", "c4_4", "c4_5", "c4_6"), required=True)
    v.add_argument("--nu", type=float)
    v.add_argument("--m", type=int)
    v.add_argument("--N", type=int, default=0)
    v.add_argument("--p", type=_parse_p, default=2.0)
    v.add_argument("--ns", type=_parse_ns)
    v.add_argument("--tol-limit", type=float, help="relative tolerance for limit relations (default 0.02)")
    v.add_argument("--tol-identity-p2", type=float, help="reduction identity tolerance at p=2 (default 1e-6)")
    v.add_argument("--tol-identity-pinf", type=float, help="reduction identity tolerance at p=inf (default 1e-4)")

    y = sub.add_parser("symmetrize", parents=[common], help="symmetrize a random polynomial and compare norms")
    y.add_argument("--domain", choices=("interval", "ball", "sphere"), default="ball")
    y.add_argument("--m", type=int)
    y.add_argument("--degree", type=int, default=4)
    y.add_argument("--p", type=_parse_p, default=2.0)
    y.add_argument("--alpha", type=float, default=0.0)
    y.add_argument("--beta", type=float, default=0.0)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        threads = _threads(args)
        if args.command == "constant":
            result, mapping = _cmd_constant(args)
        elif args.command == "sweep":
            result, mapping = _cmd_sweep(args, threads)
        elif args.command == "verify":
            result, mapping = _cmd_verify(args, threads)
        else:
            result, mapping = _cmd_symmetrize(args)
    except (UsageError, InvalidExponent, UnsupportedDimension, ValueError) as exc:
        parser.print_usage(sys.stderr)
        print(f"sharpconst: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SharpConstError as exc:
        print(f"sharpconst: solver failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    doc = _round({
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "inputs": _inputs(args),
        "header": {"nu_mapping": mapping},
        "result": result,
    })
    if args.format == "csv":
        text = (f"# {mapping}\n" if mapping else "") + _csv(args.command, doc["result"])
    else:
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)

    if args.command == "verify":
        reports = result["reports"]
        if any(r["status"] == "solver_failure" for r in reports):
            return EXIT_SOLVER
        if not result["passed"]:
            return EXIT_VERIFY
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
