"""Command-line front end.

Every command prints one JSON document carrying ``schema``, ``tool``,
``version``, the command name and an echo of every parameter.  Output is a
function of the arguments alone (no timings, no unseeded randomness).

Exit codes: 0 success, 1 verification negative (margin >= 0), 2 usage or
input error, 3 internal inconsistency (engines or methods disagree).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .bounds import DEFAULT_DELTA, DEFAULT_EPS_PRIME, DOMAIN_MODES, VARIABLES, BoundParams, sample_floor, verify_minor_arcs
from .errors import ArcboundError, EngineDisagreementError, ParseError
from .minmax import ENGINES
from .rational import format_rational, parse_rational

__all__ = ["run", "main", "build_parser", "SCHEMA"]

SCHEMA = "1"
EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class _Inconsistent(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _rational_pair(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected P/Q,P/Q, got {text!r}")
    return tuple(_rational(p) for p in parts)


def _rational_list(text: str) -> tuple:
    return tuple(_rational(p) for p in text.split(","))


def _complex(z: complex) -> dict:
    return {"re": repr(z.real), "im": repr(z.imag)}


def _load(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _field(data, key):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"input JSON needs a {key!r} field")
    return data[key]


def _polys(data):
    from .numlab.polys import poly_from_json
    F, G = poly_from_json(_field(data, "F")), poly_from_json(_field(data, "G"))
    if F.n != G.n:
        raise ParseError("F and G must have the same number of variables")
    return F, G


def _matrix(data):
    M = data.get("matrix") if isinstance(data, dict) else data
    if not isinstance(M, list) or not all(isinstance(r, list) for r in M):
        raise ParseError("expected a matrix as a list of integer rows")
    try:
        return [[int(v) for v in row] for row in M]
    except (TypeError, ValueError):
        raise ParseError("matrix entries must be integers") from None


def _int_vector(data, key, n, default=None):
    if isinstance(data, dict) and key in data:
        v = data[key]
    elif default is not None:
        return default
    else:
        raise ParseError(f"input JSON needs a {key!r} field")
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(f"{key!r} must be a list of {n} integers")
    return [int(x) for x in v]


# commands ------------------------------------------------------------------

def _cmd_verify(args) -> tuple:
    n_max = args.n if args.n_max is None else args.n_max
    if n_max < args.n:
        raise ParseError("--n-max must be at least --n")
    reports, code = [], EXIT_OK
    for n in range(args.n, n_max + 1):
        params = BoundParams(n, args.delta, args.eps_prime, args.domain_mode)
        rep = verify_minor_arcs(params, args.engine)
        body = rep.to_json()
        if args.samples:
            floor = sample_floor(params, seed=args.seed, count=args.samples)
            body["sampling"] = {"count": args.samples, "seed": args.seed,
                                "floor": format_rational(floor),
                                "within_optimum": floor <= rep.value}
            if floor > rep.value:
                raise _Inconsistent(f"n={n}: sampled value {floor} exceeds optimum {rep.value}")
        if not rep.passed:
            code = EXIT_NEGATIVE
        reports.append(body)
    worst = max(Fraction(r["margin"]) for r in reports)
    return {"reports": reports, "worst_margin": format_rational(worst),
            "all_passed": code == EXIT_OK, "variables": list(VARIABLES)}, code


def _cmd_expsum(args) -> tuple:
    from .numlab.expsums import exp_sum_averaged, exp_sum_pointwise
    data = _load(args.input)
    F, G = _polys(data)
    q = int(args.q if args.q is not None else _field(data, "q"))
    m = _int_vector(data, "m", F.n, default=[0] * F.n)
    if args.kind == "pointwise":
        a = _int_vector(data, "a", 2)
        S = exp_sum_pointwise(F, G, a, q, m)
        extra = {"a": a}
    else:
        S = exp_sum_averaged(F, G, q, m)
        extra = {}
    return {"kind": args.kind, "q": q, "m": m, **extra, "sum": S.to_json(),
            "abs": repr(abs(S))}, EXIT_OK


def _cmd_snf(args) -> tuple:
    from .numlab.smith import smith_normal_form
    M = _matrix(_load(args.input))
    S, D, T = smith_normal_form(M)
    return {"matrix": M, "S": S, "D": D, "T": T,
            "invariants": [D[i][i] for i in range(len(D))]}, EXIT_OK


def _cmd_nullcount(args) -> tuple:
    from .numlab.smith import null_count
    M = _matrix(_load(args.input))
    methods = ("smith", "brute") if args.method == "both" else (args.method,)
    counts = {m: null_count(M, args.q, m) for m in methods}
    if len(set(counts.values())) > 1:
        raise _Inconsistent(f"null counts disagree: {counts}")
    return {"q": args.q, "counts": counts, "null_count": next(iter(counts.values())),
            "agree": True}, EXIT_OK


def _cmd_poisson(args) -> tuple:
    from .numlab.poisson import poisson_check
    data = _load(args.input)
    F, G = _polys(data)
    x0 = [Fraction(0)] * F.n if args.x0 is None else list(args.x0)
    if len(x0) != F.n:
        raise ParseError(f"--x0 needs {F.n} coordinates")
    res = poisson_check(F, G, args.q, args.z, args.big_p, args.m_cut, rho=args.rho, x0=x0)
    return {"lhs": _complex(res["lhs"]), "rhs": _complex(res["rhs"]),
            "abs_diff": repr(res["abs_diff"]),
            "refinement_change": repr(res["refinement_change"])}, EXIT_OK


def _cmd_series(args) -> tuple:
    from .numlab.series import singular_series_partial
    F, G = _polys(_load(args.input))
    res = singular_series_partial(F, G, args.r_max)
    return {"value": repr(res["value"]), "exact": format_rational(res["exact"]),
            "terms": [{"q": q, "A": format_rational(a)} for q, a in res["terms"]]}, EXIT_OK


def _cmd_integral(args) -> tuple:
    from .numlab.poisson import singular_integral
    F, G = _polys(_load(args.input))
    x0 = [Fraction(0)] * F.n if args.x0 is None else list(args.x0)
    if len(x0) != F.n:
        raise ParseError(f"--x0 needs {F.n} coordinates")
    value = singular_integral(F, G, args.r, args.rho, x0, args.grid)
    return {"value": repr(value)}, EXIT_OK


# parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="arcbound", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"arcbound {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-minor-arcs", help="exact max-min of the five bounds")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--n-max", type=int)
    v.add_argument("--delta", type=_rational, default=DEFAULT_DELTA)
    v.add_argument("--eps-prime", type=_rational, default=DEFAULT_EPS_PRIME)
    v.add_argument("--engine", choices=ENGINES, default="branch")
    v.add_argument("--samples", type=int, default=0, help="seeded random points checked against the optimum")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--domain-mode", choices=DOMAIN_MODES, default="fixed")
    v.set_defaults(func=_cmd_verify)

    e = sub.add_parser("expsum", help="complete exponential sum modulo q")
    e.add_argument("kind", choices=("pointwise", "averaged"))
    e.add_argument("--input", required=True)
    e.add_argument("--q", type=int, help="overrides 'q' in the input file")
    e.set_defaults(func=_cmd_expsum)

    s = sub.add_parser("snf", help="Smith normal form of an integer matrix")
    s.add_argument("--input", required=True)
    s.set_defaults(func=_cmd_snf)

    nc = sub.add_parser("nullcount", help="#{x mod q : Mx = 0}")
    nc.add_argument("--input", required=True)
    nc.add_argument("--q", type=int, required=True)
    nc.add_argument("--method", choices=("smith", "brute", "both"), default="smith")
    nc.set_defaults(func=_cmd_nullcount)

    pc = sub.add_parser("poisson-check", help="direct sum against its Poisson dual")
    pc.add_argument("--input", required=True)
    pc.add_argument("--q", type=int, required=True)
    pc.add_argument("--z", type=_rational_pair, default=(Fraction(0), Fraction(0)))
    pc.add_argument("--big-p", type=int, required=True)
    pc.add_argument("--m-cut", type=int, default=40)
    pc.add_argument("--rho", type=_rational, default=Fraction(1, 2))
    pc.add_argument("--x0", type=_rational_list)
    pc.set_defaults(func=_cmd_poisson)

    ss = sub.add_parser("singular-series", help="partial sums of the singular series")
    ss.add_argument("--input", required=True)
    ss.add_argument("--r-max", type=int, required=True)
    ss.set_defaults(func=_cmd_series)

    si = sub.add_parser("singular-integral", help="truncated singular integral")
    si.add_argument("--input", required=True)
    si.add_argument("--r", type=_rational, required=True)
    si.add_argument("--rho", type=_rational, default=Fraction(1, 2))
    si.add_argument("--x0", type=_rational_list)
    si.add_argument("--grid", type=int, default=100)
    si.set_defaults(func=_cmd_integral)
    return p


def _echo(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("func", "command"):
            continue
        if isinstance(v, Fraction):
            v = format_rational(v)
        elif isinstance(v, tuple):
            v = [format_rational(x) if isinstance(x, Fraction) else x for x in v]
        out[k] = v
    return out


def run(argv=None, out=None) -> int:
    """Run one command; returns the exit code instead of raising."""
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        body, code = args.func(args)
    except _Inconsistent as exc:
        print(f"arcbound: internal inconsistency: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except EngineDisagreementError as exc:
        print(f"arcbound: engines disagree: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ArcboundError, ValueError, TypeError) as exc:
        # GuardError and ParseError land here too; both are input problems
        print(f"arcbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {"schema": SCHEMA, "tool": "arcbound", "version": __version__,
           "command": args.command, "params": _echo(args), **body}
    out.write(json.dumps(doc, indent=2) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
