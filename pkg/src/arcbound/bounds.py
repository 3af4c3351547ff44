"""The five minor-arc bound expressions, their domains, and the verification driver.

Variables are ``phi``, ``tau``, ``phi3`` and ``phi4``.  Each bound is an
exponent (log base P) as a function of the arc parameters; the minor arcs are
under control when the minimum of the five is below ``n - 6`` everywhere on
D1 and D2.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .minmax import MinMaxResult, max_min_union
from .polytope import Constraint, Polytope, feasible_point, vertices
from .pwl import AffineForm, PwlExpr, compile_expr, const, evaluate, pmax, pmin, var
from .rational import as_rational, format_rational

__all__ = [
    "VARIABLES", "BOUND_NAMES", "DOMAIN_MODES", "DEFAULT_DELTA", "DEFAULT_EPS_PRIME",
    "BoundParams", "BoundFamily", "VerificationReport",
    "build_bound_family", "domains", "verify_minor_arcs", "sample_floor",
    "direct_bounds", "sub_expressions", "sample_points", "min_of_bounds",
]

VARIABLES = ("phi", "tau", "phi3", "phi4")
BOUND_NAMES = ("b_avp", "b_pvp", "b_avw", "b_pvw", "b_weyl")
DEFAULT_DELTA = Fraction(993, 7000)
DEFAULT_EPS_PRIME = Fraction(1, 10000)
# "fixed": D1, D2 in (phi, tau, phi3) with phi4 held at 0.
# "coupled": phi4 >= 0 free, with phi3 + phi4 <= phi.
DOMAIN_MODES = ("fixed", "coupled")


@dataclass(frozen=True)
class BoundParams:
    n: int
    delta: Fraction = DEFAULT_DELTA
    eps_prime: Fraction = DEFAULT_EPS_PRIME
    domain_mode: str = "fixed"

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int):
            raise TypeError("n must be an integer")
        if self.n <= 2:
            raise ValueError(f"n must be at least 3, got {self.n}")
        object.__setattr__(self, "delta", as_rational(self.delta))
        object.__setattr__(self, "eps_prime", as_rational(self.eps_prime))
        if not 0 < self.delta < Fraction(1, 7):
            raise ValueError(f"delta must lie in (0, 1/7), got {self.delta}")
        if self.eps_prime <= 0:
            raise ValueError("eps_prime must be positive")
        if self.domain_mode not in DOMAIN_MODES:
            raise ValueError(f"domain_mode must be one of {DOMAIN_MODES}")

    def to_json(self) -> dict:
        return {"n": self.n, "delta": format_rational(self.delta),
                "eps_prime": format_rational(self.eps_prime),
                "domain_mode": self.domain_mode}


@dataclass(frozen=True)
class BoundFamily:
    b_avp: PwlExpr
    b_pvp: PwlExpr
    b_avw: PwlExpr
    b_pvw: PwlExpr
    b_weyl: PwlExpr
    params: BoundParams

    def as_list(self) -> list:
        return [getattr(self, name) for name in BOUND_NAMES]


def sub_expressions(params: BoundParams) -> dict:
    """The shared building blocks, keyed by name."""
    n = params.n
    eps = params.eps_prime
    phi, tau, phi3, phi4 = (var(v) for v in VARIABLES)
    F = Fraction

    h = pmax(const(F(10, n - 2) + eps), F(2, n + 2) + eps + phi * F(6, n + 2))
    v = pmax(const(0), phi - 1, phi + (tau + h) * F(1, 2))
    tau_brac = pmax(-2 - h, tau)
    x_brac = pmax(
        phi,
        phi * F(1 - n, 2) + h * n + v * (n - 1),
        phi * F(1 - n, 2) + phi3 * (F(n, 3) - F(1, 2)) + phi4 * F(n - 1, 2) + h * n,
    )
    h_weyl = pmax(phi * F(1, 6), (2 + phi + tau) * F(1, 5))
    weyl_brac = pmax(phi * 2 + tau * 2, -phi + pmin(const(0), -3 - tau))
    return {"h": h, "v": v, "tau_brac": tau_brac, "x_brac": x_brac,
            "h_weyl": h_weyl, "weyl_brac": weyl_brac}


def build_bound_family(params: BoundParams) -> BoundFamily:
    n = params.n
    F = Fraction
    s = sub_expressions(params)
    phi, tau, phi3, phi4 = (var(v) for v in VARIABLES)
    h, tau_brac, x_brac = s["h"], s["tau_brac"], s["x_brac"]
    h_w = s["h_weyl"]
    weyl_tail = phi * 3 - phi3 * F(2, 3) - phi4 * F(3, 4)

    b_avp = (n - 1) + phi * F(5, 2) + h * F(2 - n, 2) + tau_brac * 2 + x_brac * F(1, 2)
    b_pvp = n + phi * F(5, 2) + tau * 2 - h * F(n, 2) + x_brac * F(1, 2)
    b_avw = (n - 1) + weyl_tail + h_w * F(3 - n, 2) + pmax(-2 - h_w, tau) * 2
    b_pvw = n + weyl_tail + tau * 2 + h_w * F(1 - n, 2)
    b_weyl = n + weyl_tail + tau * 2 + s["weyl_brac"] * F(n - 1, 16)
    return BoundFamily(b_avp, b_pvp, b_avw, b_pvw, b_weyl, params)


def direct_bounds(params: BoundParams, phi, tau, phi3, phi4) -> tuple:
    """Second, tree-free transcription of the five bounds, for cross-checks."""
    n, eps = params.n, params.eps_prime
    F = Fraction
    H = max(F(10, n - 2) + eps, F(2, n + 2) + eps + 6 * phi / (n + 2))
    V = max(F(0), phi - 1, phi + (tau + H) / 2)
    tb = max(-2 - H, tau)
    X = max(phi,
            (1 - n) * phi / 2 + n * H + (n - 1) * V,
            (1 - n) * phi / 2 + (F(n, 3) - F(1, 2)) * phi3 + F(n - 1, 2) * phi4 + n * H)
    HW = max(phi / 6, (2 + phi + tau) / 5)
    WB = max(2 * phi + 2 * tau, -phi + min(F(0), -3 - tau))
    tail = 3 * phi - F(2, 3) * phi3 - F(3, 4) * phi4
    return (
        n - 1 + F(5, 2) * phi + F(2 - n, 2) * H + 2 * tb + X / 2,
        n + F(5, 2) * phi + 2 * tau - F(n, 2) * H + X / 2,
        n - 1 + tail + F(3 - n, 2) * HW + 2 * max(-2 - HW, tau),
        n + tail + 2 * tau + F(1 - n, 2) * HW,
        n + tail + 2 * tau + F(n - 1, 16) * WB,
    )


def domains(delta=DEFAULT_DELTA, mode: str = "fixed") -> tuple:
    """``(D1, D2)`` over ``VARIABLES``; see ``DOMAIN_MODES`` for ``mode``."""
    delta = as_rational(delta)
    if not 0 < delta < Fraction(1, 7):
        raise ValueError(f"delta must lie in (0, 1/7), got {delta}")
    if mode not in DOMAIN_MODES:
        raise ValueError(f"mode must be one of {DOMAIN_MODES}")
    phi, tau, phi3, phi4 = (AffineForm.variable(v) for v in VARIABLES)
    common = (
        Constraint(phi3, ">=", 0),
        Constraint(phi4, "=", 0) if mode == "fixed" else Constraint(phi4, ">=", 0),
        Constraint(phi3 + phi4 - phi, "<=", 0),
        Constraint(tau + phi, "<=", Fraction(-3, 4)),
    )
    d1 = Polytope(VARIABLES, (
        Constraint(phi, ">=", delta),
        Constraint(phi, "<=", Fraction(3, 2)),
        Constraint(tau, ">=", -5),
    ) + common)
    d2 = Polytope(VARIABLES, (
        Constraint(phi, ">=", 0),
        Constraint(phi, "<=", delta),
        Constraint(tau, ">=", -3 + delta),
    ) + common)
    return d1, d2


@dataclass
class VerificationReport:
    params: BoundParams
    per_domain: list
    result: MinMaxResult
    domain_index: int
    bound_values: dict
    minimizer: str
    wall_time: float = field(default=0.0, compare=False)

    @property
    def value(self) -> Fraction:
        return self.result.value

    @property
    def margin(self) -> Fraction:
        return self.result.value - (self.params.n - 6)

    @property
    def argmax(self) -> dict:
        return self.result.argmax

    @property
    def passed(self) -> bool:
        return self.margin < 0

    def to_json(self, include_time: bool = False) -> dict:
        out = {
            "n": self.params.n,
            "value": format_rational(self.value),
            "margin": format_rational(self.margin),
            "passed": self.passed,
            "argmax": {v: format_rational(x) for v, x in self.argmax.items()},
            "domain": f"D{self.domain_index + 1}",
            "minimizer": self.minimizer,
            "bounds_at_argmax": {k: format_rational(v) for k, v in self.bound_values.items()},
            "per_domain": [
                {"domain": f"D{i + 1}", "value": format_rational(r.value),
                 "argmax": {v: format_rational(x) for v, x in r.argmax.items()},
                 "n_cells": r.n_cells}
                for i, r in enumerate(self.per_domain)
            ],
            "certificate": self.result.to_json(),
        }
        if include_time:
            out["wall_time_s"] = round(self.wall_time, 3)
        return out


def verify_minor_arcs(params: BoundParams, engine: str = "branch",
                      family: Sequence[PwlExpr] | None = None) -> VerificationReport:
    """Maximize the minimum of the five bounds over D1 and D2 exactly."""
    start = time.perf_counter()
    exprs = list(family) if family is not None else build_bound_family(params).as_list()
    res, idx, per = max_min_union(exprs, domains(params.delta, params.domain_mode), engine)
    vals = {name: evaluate(e, res.argmax) for name, e in zip(BOUND_NAMES, exprs)}
    names = list(BOUND_NAMES) + [f"extra_{i}" for i in range(len(exprs) - len(BOUND_NAMES))]
    minimizer = names[res.min_index]
    return VerificationReport(params, per, res, idx, vals, minimizer, time.perf_counter() - start)


def _random_point(rng: random.Random, verts: list, denom: int) -> tuple:
    """A random rational point of D1 or D2 as a convex combination of vertices
    with integer weights in ``[0, denom]``."""
    vs = verts[rng.randrange(len(verts))]
    weights = [rng.randint(0, denom) for _ in vs]
    if not any(weights):
        weights[0] = 1
    total = mpq(sum(weights))
    return tuple(sum(w * p[i] for w, p in zip(weights, vs)) / total for i in range(len(VARIABLES)))


def sample_points(params: BoundParams, seed: int = 0, count: int = 1000,
                  near: dict | None = None, radius=Fraction(1, 100)):
    """Yield ``count`` pseudorandom domain points as tuples in ``VARIABLES`` order
    (values are ``gmpy2.mpq``).  ``near`` restricts the draw to a box of
    half-width ``radius`` around that point."""
    d1, d2 = domains(params.delta, params.domain_mode)
    if near is not None:
        radius = as_rational(radius)
        box = []
        for v in VARIABLES:
            c = as_rational(near[v])
            f = AffineForm.variable(v)
            box += [Constraint(f, ">=", c - radius), Constraint(f, "<=", c + radius)]
        d1, d2 = d1.with_constraints(box), d2.with_constraints(box)
    verts = []
    for d in (d1, d2):
        if feasible_point(d) is not None:
            verts.append([tuple(mpq(p[v].numerator, p[v].denominator) for v in VARIABLES)
                          for p in vertices(d)])
    if not verts:
        raise ValueError("no domain points to sample")
    rng = random.Random(seed)
    for _ in range(count):
        yield _random_point(rng, verts, 1000)


def min_of_bounds(params: BoundParams):
    """Compiled ``min`` of the five bounds taking an mpq tuple."""
    return compile_expr(pmin(*build_bound_family(params).as_list()), VARIABLES, number=mpq)


def sample_floor(params: BoundParams, seed: int = 0, count: int = 1000,
                 points: Iterable[dict] | None = None, near: dict | None = None,
                 radius=Fraction(1, 100)) -> Fraction:
    """Lower bound for the optimum from domain points.

    ``points`` are evaluated first; ``count`` further pseudorandom points are
    then drawn (see :func:`sample_points`).
    """
    if count < 0:
        raise ValueError("count must be non-negative")
    fn = min_of_bounds(params)
    best = None
    for p in points or []:
        val = fn(tuple(mpq(as_rational(p[v]).numerator, as_rational(p[v]).denominator)
                       for v in VARIABLES))
        best = val if best is None or val > best else best
    if count:
        for pt in sample_points(params, seed, count, near, radius):
            val = fn(pt)
            if best is None or val > best:
                best = val
    if best is None:
        raise ValueError("no points to evaluate")
    return as_rational(best)
