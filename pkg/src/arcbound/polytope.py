"""H-representation polytopes with an exact two-phase simplex.

Pivoting runs on ``gmpy2.mpq`` for speed; everything crossing the public
boundary is a :class:`fractions.Fraction`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from gmpy2 import mpq

from .errors import ParseError, UnboundedDomainError
from .pwl import AffineForm
from .rational import as_rational, format_rational

__all__ = [
    "Constraint", "Polytope", "LPResult", "is_feasible", "feasible_point", "maximize_affine",
    "minimize_affine", "lex_min_point", "vertices", "remove_redundant",
    "MAX_VERTEX_DIM", "le", "ge",
]

MAX_VERTEX_DIM = 12
RELATIONS = ("<=", ">=", "=")
_ZERO = mpq(0)


@dataclass(frozen=True)
class Constraint:
    lhs: AffineForm
    rel: str
    rhs: Fraction

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"relation must be one of {RELATIONS}, got {self.rel!r}")
        # fold any constant of the lhs into the rhs
        if self.lhs.constant:
            object.__setattr__(self, "rhs", as_rational(self.rhs) - self.lhs.constant)
            object.__setattr__(self, "lhs", AffineForm(self.lhs.terms, Fraction(0)))
        else:
            object.__setattr__(self, "rhs", as_rational(self.rhs))

    def satisfied(self, point: Mapping[str, object]) -> bool:
        v = self.lhs.evaluate(point)
        if self.rel == "<=":
            return v <= self.rhs
        if self.rel == ">=":
            return v >= self.rhs
        return v == self.rhs

    def as_le(self) -> list:
        """The constraint as a list of ``(coeffs, rhs)`` meaning ``coeffs.x <= rhs``."""
        if self.rel == "<=":
            return [(self.lhs, self.rhs)]
        if self.rel == ">=":
            return [(-self.lhs, -self.rhs)]
        return [(self.lhs, self.rhs), (-self.lhs, -self.rhs)]


def le(lhs: AffineForm, rhs) -> Constraint:
    return Constraint(lhs, "<=", as_rational(rhs))


def ge(lhs: AffineForm, rhs) -> Constraint:
    return Constraint(lhs, ">=", as_rational(rhs))


@dataclass(frozen=True)
class Polytope:
    variables: tuple
    constraints: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        known = set(self.variables)
        for c in self.constraints:
            extra = c.lhs.variables() - known
            if extra:
                raise ValueError(f"constraint uses undeclared variable(s) {sorted(extra)}")

    def with_constraints(self, extra: Iterable[Constraint]) -> "Polytope":
        return Polytope(self.variables, self.constraints + tuple(extra))

    def contains(self, point: Mapping[str, object]) -> bool:
        return all(c.satisfied(point) for c in self.constraints)

    def to_json(self) -> dict:
        return {
            "variables": list(self.variables),
            "constraints": [
                {"lhs": {v: format_rational(a) for v, a in c.lhs.terms},
                 "rel": c.rel, "rhs": format_rational(c.rhs)}
                for c in self.constraints
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polytope":
        try:
            variables = list(data["variables"])
            cons = []
            for item in data["constraints"]:
                lhs = AffineForm.of({v: as_rational(a) for v, a in item["lhs"].items()})
                cons.append(Constraint(lhs, item["rel"], as_rational(item["rhs"])))
        except (KeyError, TypeError) as exc:
            raise ParseError(f"bad polytope JSON: {exc}") from None
        return cls(tuple(variables), tuple(cons))


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    point: dict | None = None


# -- simplex core ----------------------------------------------------------------

def _q(x) -> mpq:
    return mpq(x.numerator, x.denominator)


def _rows(P: Polytope):
    """Dense ``A x <= b`` rows over ``P.variables`` as mpq."""
    idx = {v: i for i, v in enumerate(P.variables)}
    d = len(P.variables)
    A, b = [], []
    for c in P.constraints:
        for form, rhs in c.as_le():
            row = [_ZERO] * d
            for v, a in form.terms:
                row[idx[v]] = _q(a)
            A.append(row)
            b.append(_q(rhs))
    return A, b


def _pivot(T, r, c):
    row = T[r]
    p = row[c]
    if p != 1:
        inv = 1 / p
        row = T[r] = [x * inv for x in row]
    nz = [j for j, x in enumerate(row) if x]
    for i, other in enumerate(T):
        if i == r:
            continue
        f = other[c]
        if f:
            for j in nz:
                other[j] -= f * row[j]


def _run(T, basis, allowed):
    """Bland's-rule simplex on tableau ``T`` (last row is the objective row
    holding ``-c`` reduced costs, last column the rhs).  Returns False when
    unbounded."""
    m = len(T) - 1
    obj = T[m]
    while True:
        enter = next((j for j in allowed if obj[j] < 0), None)
        if enter is None:
            return True
        best = None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return False
        _pivot(T, best[1], enter)
        basis[best[1]] = enter


def _solve(A, b, c):
    """Maximize ``c.x`` subject to ``A x <= b`` with ``x`` free.

    Returns ``(status, value, x)`` in mpq."""
    m = len(A)
    d = len(c)
    # columns: x+ (d), x- (d), slacks (m), artificials (one per negative-rhs row)
    neg = [i for i in range(m) if b[i] < 0]
    n_art = len(neg)
    ncols = 2 * d + m + n_art
    T = []
    basis = []
    art_of = {}
    for i in range(m):
        row = [_ZERO] * (ncols + 1)
        sgn = -1 if b[i] < 0 else 1
        for j in range(d):
            if A[i][j]:
                row[j] = sgn * A[i][j]
                row[d + j] = -sgn * A[i][j]
        row[2 * d + i] = mpq(sgn)
        row[-1] = sgn * b[i]
        if sgn < 0:
            k = 2 * d + m + len(art_of)
            art_of[i] = k
            row[k] = mpq(1)
            basis.append(k)
        else:
            basis.append(2 * d + i)
        T.append(row)
    real_cols = list(range(2 * d + m))

    if n_art:
        obj = [_ZERO] * (ncols + 1)
        for k in art_of.values():
            obj[k] = mpq(1)
        for i in art_of:
            obj = [o - t for o, t in zip(obj, T[i])]
        T.append(obj)
        _run(T, basis, real_cols)
        if T[-1][-1] != 0:
            return "infeasible", None, None
        T.pop()
        # drive zero-level artificials out of the basis
        art_cols = set(art_of.values())
        i = 0
        while i < len(T):
            if basis[i] in art_cols:
                j = next((j for j in real_cols if T[i][j]), None)
                if j is None:
                    del T[i]
                    del basis[i]
                    continue
                _pivot(T, i, j)
                basis[i] = j
            i += 1

    obj = [_ZERO] * (ncols + 1)
    for j in range(d):
        if c[j]:
            obj[j] = -c[j]
            obj[d + j] = c[j]
    for i, bj in enumerate(basis):
        f = obj[bj]
        if f:
            obj = [o - f * t for o, t in zip(obj, T[i])]
    T.append(obj)
    if not _run(T, basis, real_cols):
        return "unbounded", None, None
    z = [_ZERO] * ncols
    for i, bj in enumerate(basis):
        z[bj] = T[i][-1]
    x = [z[j] - z[d + j] for j in range(d)]
    return "optimal", T[-1][-1], x


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _objective_vec(P: Polytope, objective: AffineForm):
    idx = {v: i for i, v in enumerate(P.variables)}
    c = [_ZERO] * len(P.variables)
    for v, a in objective.terms:
        if v not in idx:
            raise ValueError(f"objective uses undeclared variable {v!r}")
        c[idx[v]] = _q(a)
    return c


def maximize_affine(P: Polytope, objective: AffineForm) -> LPResult:
    A, b = _rows(P)
    status, val, x = _solve(A, b, _objective_vec(P, objective))
    if status != "optimal":
        return LPResult(status)
    point = {v: _frac(xi) for v, xi in zip(P.variables, x)}
    return LPResult("optimal", _frac(val) + objective.constant, point)


def minimize_affine(P: Polytope, objective: AffineForm) -> LPResult:
    r = maximize_affine(P, -objective)
    if r.status != "optimal":
        return r
    return LPResult("optimal", -r.value, r.point)


def feasible_point(P: Polytope) -> dict | None:
    """Some feasible point of ``P`` (a phase-one basic solution), or ``None``."""
    A, b = _rows(P)
    if not A:
        return {v: Fraction(0) for v in P.variables}
    status, _, x = _solve(A, b, [_ZERO] * len(P.variables))
    if status != "optimal":
        return None
    return {v: _frac(xi) for v, xi in zip(P.variables, x)}


def is_feasible(P: Polytope) -> bool:
    return feasible_point(P) is not None


def lex_min_point(P: Polytope) -> dict | None:
    """Lexicographically smallest feasible point in declared variable order,
    or ``None`` if infeasible.  Raises when some coordinate is unbounded below."""
    cur = P
    point = None
    for v in P.variables:
        r = minimize_affine(cur, AffineForm.variable(v))
        if r.status == "infeasible":
            return None
        if r.status == "unbounded":
            raise UnboundedDomainError(f"variable {v!r} unbounded below")
        cur = cur.with_constraints([Constraint(AffineForm.variable(v), "=", r.value)])
        point = r.point
    if point is None:
        return {}
    return point


# -- vertex enumeration --------------------------------------------------------

def _check_bounded(P: Polytope):
    for v in P.variables:
        for sign in (1, -1):
            r = maximize_affine(P, AffineForm.variable(v).scale(sign))
            if r.status == "unbounded":
                raise UnboundedDomainError(f"polytope unbounded in {v!r}")
            if r.status == "infeasible":
                return False
    return True


def remove_redundant(P: Polytope) -> Polytope:
    """Drop duplicate and LP-redundant inequalities (equalities are kept)."""
    seen = set()
    kept = []
    for c in P.constraints:
        key = (c.lhs, c.rel, c.rhs)
        if key not in seen:
            seen.add(key)
            kept.append(c)
    i = 0
    while i < len(kept):
        c = kept[i]
        if c.rel == "=":
            i += 1
            continue
        rest = Polytope(P.variables, kept[:i] + kept[i + 1:])
        form = c.lhs if c.rel == "<=" else -c.lhs
        bound = c.rhs if c.rel == "<=" else -c.rhs
        r = maximize_affine(rest, form)
        if r.status == "optimal" and r.value <= bound:
            del kept[i]
        else:
            i += 1
    return Polytope(P.variables, tuple(kept))


def _solve_square(M, rhs):
    """Exact Gaussian elimination; ``None`` if singular."""
    n = len(M)
    A = [row[:] + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col]), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        for i in range(n):
            if i != col and A[i][col]:
                f = A[i][col]
                A[i] = [a - f * p for a, p in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def vertices(P: Polytope, prune: bool = True) -> list:
    """All vertices of a bounded polytope as dicts, sorted lexicographically."""
    d = len(P.variables)
    if d > MAX_VERTEX_DIM:
        raise ValueError(f"vertex enumeration limited to {MAX_VERTEX_DIM} variables, got {d}")
    if not _check_bounded(P):
        return []
    Q = remove_redundant(P) if prune else P
    if d == 0:
        return [{}]
    A, b = _rows(Q)
    eq_rows = []
    ineq_rows = []
    k = 0
    for c in Q.constraints:
        n_rows = 2 if c.rel == "=" else 1
        (eq_rows if c.rel == "=" else ineq_rows).append(k)
        k += n_rows
    found = set()
    out = []
    eqs = [(A[i], b[i]) for i in eq_rows]
    ineqs = [(A[i], b[i]) for i in ineq_rows]
    # choose d linearly independent tight rows; equalities are always tight
    for r in range(max(0, d - len(eqs)), d + 1):
        for eq_sub in itertools.combinations(range(len(eqs)), d - r):
            for sub in itertools.combinations(range(len(ineqs)), r):
                rows = [eqs[i] for i in eq_sub] + [ineqs[i] for i in sub]
                x = _solve_square([row for row, _ in rows], [rhs for _, rhs in rows])
                if x is None:
                    continue
                if any(sum(a * xi for a, xi in zip(row, x)) > rhs for row, rhs in zip(A, b)):
                    continue
                key = tuple(x)
                if key not in found:
                    found.add(key)
                    out.append(key)
    out.sort()
    return [{v: _frac(xi) for v, xi in zip(P.variables, pt)} for pt in out]
