"""Shared generators for the test suite."""
import random
from fractions import Fraction

from arcbound.polytope import Constraint, Polytope
from arcbound.pwl import AffineForm, Affine, pmax, pmin

NAMES = ("x", "y", "z", "w")


def random_form(rng: random.Random, names, lo=-4, hi=4) -> AffineForm:
    coeffs = {v: Fraction(rng.randint(lo, hi), rng.randint(1, 3)) for v in names}
    return AffineForm.of(coeffs, Fraction(rng.randint(-6, 6), rng.randint(1, 3)))


def random_expr(rng: random.Random, names, depth=2):
    if depth == 0 or rng.random() < 0.3:
        return Affine(random_form(rng, names))
    kids = [random_expr(rng, names, depth - 1) for _ in range(rng.randint(2, 3))]
    roll = rng.random()
    if roll < 0.45:
        return pmax(*kids)
    if roll < 0.75:
        return pmin(*kids)
    if roll < 0.9:
        return kids[0] + kids[1]
    return kids[0] * Fraction(rng.randint(1, 5), rng.randint(1, 3))


def random_family(rng: random.Random, n_vars: int, size: int = 3, depth: int = 2):
    names = NAMES[:n_vars]
    return names, [random_expr(rng, names, depth) for _ in range(size)]


def box(names, lo=-2, hi=2, extra=()) -> Polytope:
    cons = []
    for v in names:
        f = AffineForm.variable(v)
        cons += [Constraint(f, ">=", lo), Constraint(f, "<=", hi)]
    return Polytope(tuple(names), tuple(cons) + tuple(extra))


# -- an independent one-variable oracle ------------------------------------------
# A function on [lo, hi] is kept as sorted breakpoints with exact values; it is
# linear between consecutive breakpoints.

def _at(pts, x):
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if x0 <= x <= x1:
            return y0 + (y1 - y0) * (x - x0) / (x1 - x0) if x1 != x0 else y0
    raise ValueError("outside interval")


def _combine(a, b, op):
    xs = sorted({x for x, _ in a} | {x for x, _ in b})
    out = []
    for x0, x1 in zip(xs, xs[1:]):
        d0 = _at(a, x0) - _at(b, x0)
        d1 = _at(a, x1) - _at(b, x1)
        out.append(x0)
        if d0 * d1 < 0:
            out.append(x0 + (x1 - x0) * d0 / (d0 - d1))
    out.append(xs[-1])
    return [(x, op(_at(a, x), _at(b, x))) for x in out]


def pwl_1d(expr, name, lo, hi):
    """Exact breakpoint table of a one-variable expression on ``[lo, hi]``."""
    from arcbound.pwl import Affine, Max, Min, Scale, Sum

    lo, hi = Fraction(lo), Fraction(hi)
    if isinstance(expr, Affine):
        return [(x, expr.form.evaluate({name: x})) for x in (lo, hi)]
    if isinstance(expr, Scale):
        return [(x, expr.factor * y) for x, y in pwl_1d(expr.child, name, lo, hi)]
    op = {Max: max, Min: min, Sum: lambda u, v: u + v}[type(expr)]
    acc = pwl_1d(expr.children[0], name, lo, hi)
    for c in expr.children[1:]:
        acc = _combine(acc, pwl_1d(c, name, lo, hi), op)
    return acc


def max_min_1d(exprs, name, lo, hi):
    acc = pwl_1d(exprs[0], name, lo, hi)
    for e in exprs[1:]:
        acc = _combine(acc, pwl_1d(e, name, lo, hi), min)
    return max(y for _, y in acc)


def random_quad(rng: random.Random, n: int, lo=-6, hi=6):
    from arcbound.numlab.polys import QuadPoly

    M = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            M[i][j] = M[j][i] = rng.randint(lo, hi)
    return QuadPoly(tuple(map(tuple, M)), tuple(rng.randint(lo, hi) for _ in range(n)),
                    rng.randint(lo, hi))


def random_cubic(rng: random.Random, n: int, terms: int = 4):
    from arcbound.numlab.polys import CubicPoly

    mono = {}
    for _ in range(terms):
        e = [0] * n
        for _ in range(rng.randint(1, 3)):
            e[rng.randrange(n)] += 1
        mono[tuple(e)] = rng.randint(-5, 5)
    return CubicPoly.of(n, mono)
