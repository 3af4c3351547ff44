"""Exact ``max over a polytope of min_i expr_i`` for piecewise-linear expressions.

The domain is cut into cells on which every expression is affine by choosing,
for each Max/Min node, which child is extremal.  A node that occurs several
times (the bound family shares sub-expressions) is decided once per branch
path, so the cell count stays close to the number of genuinely distinct
linear pieces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .errors import EngineDisagreementError, InfeasibleDomainError, UnboundedDomainError
from .polytope import (
    Constraint, Polytope, feasible_point, lex_min_point, maximize_affine, vertices,
)
from .pwl import Affine, AffineForm, Max, Min, PwlExpr, Scale, Sum, compile_expr, evaluate
from .rational import format_rational

__all__ = ["Cell", "MinMaxResult", "linear_cells", "cells", "max_min", "max_min_union", "ENGINES"]

ENGINES = ("branch", "vertex", "both")
_T = "__t"


@dataclass(frozen=True)
class Cell:
    region: Polytope
    active: tuple  # one AffineForm per expression

    def to_json(self) -> dict:
        return {"region": self.region.to_json(), "active": [_form_json(f) for f in self.active]}


def _form_json(f: AffineForm) -> dict:
    return {"coeffs": {v: format_rational(c) for v, c in f.terms}, "const": format_rational(f.constant)}


@dataclass(frozen=True)
class MinMaxResult:
    value: Fraction
    argmax: dict
    cell: Cell
    min_index: int
    engine: str
    n_cells: int = field(default=0, compare=False)

    def to_json(self) -> dict:
        return {
            "value": format_rational(self.value),
            "argmax": {v: format_rational(x) for v, x in self.argmax.items()},
            "cell": self.cell.to_json(),
            "min_index": self.min_index,
            "engine": self.engine,
        }


# -- cell enumeration ----------------------------------------------------------

@dataclass(frozen=True)
class _State:
    constraints: tuple
    decided: dict
    witness: dict


def _extend(st: _State, new: list, variables) -> _State | None:
    """Add constraints, pruning if infeasible.  The cached witness point
    avoids an LP whenever it already satisfies the new constraints."""
    kept = []
    for c in new:
        if not c.lhs.terms:
            if not c.satisfied({}):
                return None
            continue
        kept.append(c)
    if all(c.satisfied(st.witness) for c in kept):
        return _State(st.constraints + tuple(kept), st.decided, st.witness)
    cons = st.constraints + tuple(kept)
    pt = feasible_point(Polytope(variables, cons))
    if pt is None:
        return None
    return _State(cons, st.decided, pt)


def _expand(e: PwlExpr, st: _State, variables) -> Iterator:
    if isinstance(e, Affine):
        yield st, e.form
    elif isinstance(e, Scale):
        for st2, f in _expand(e.child, st, variables):
            yield st2, f.scale(e.factor)
    elif isinstance(e, Sum):
        for st2, forms in _expand_all(e.children, st, variables):
            total = AffineForm()
            for f in forms:
                total = total + f
            yield st2, total
    else:
        if e in st.decided:
            yield st, st.decided[e]
            return
        is_max = isinstance(e, Max)
        for st2, forms in _expand_all(e.children, st, variables):
            for j, fj in enumerate(forms):
                if fj in forms[:j]:
                    continue
                new = []
                for i, fi in enumerate(forms):
                    if i == j or fi == fj:
                        continue
                    diff = fj - fi if is_max else fi - fj
                    new.append(Constraint(diff, ">=", 0))
                st3 = _extend(st2, new, variables)
                if st3 is None:
                    continue
                decided = dict(st3.decided)
                decided[e] = fj
                yield _State(st3.constraints, decided, st3.witness), fj


def _expand_all(exprs: Sequence[PwlExpr], st: _State, variables) -> Iterator:
    if not exprs:
        yield st, []
        return
    head, rest = exprs[0], exprs[1:]
    for st2, f in _expand(head, st, variables):
        for st3, fs in _expand_all(rest, st2, variables):
            yield st3, [f] + fs


def _start(domain: Polytope) -> _State | None:
    pt = feasible_point(domain)
    if pt is None:
        return None
    return _State(domain.constraints, {}, pt)


def cells(exprs: Sequence[PwlExpr], domain: Polytope) -> list:
    """Joint decomposition: every returned cell is feasible and each expression
    is affine on it."""
    st = _start(domain)
    if st is None:
        return []
    v = domain.variables
    return [Cell(Polytope(v, s.constraints), tuple(forms)) for s, forms in _expand_all(list(exprs), st, v)]


def linear_cells(expr: PwlExpr, domain: Polytope) -> list:
    return [(c.region, c.active[0]) for c in cells([expr], domain)]


# -- optimization ----------------------------------------------------------------

def _check_domain(domain: Polytope):
    if feasible_point(domain) is None:
        raise InfeasibleDomainError("domain is empty")
    for v in domain.variables:
        for sign in (1, -1):
            if maximize_affine(domain, AffineForm.variable(v).scale(sign)).status == "unbounded":
                raise UnboundedDomainError(f"domain unbounded in {v!r}")


def _lex_key(point: dict, variables) -> tuple:
    return tuple(point[v] for v in variables)


def _min_index(exprs, point) -> tuple:
    vals = [evaluate(e, point) for e in exprs]
    m = min(vals)
    return m, vals.index(m)


def _branch(exprs, domain, cell_list) -> MinMaxResult:
    variables = domain.variables
    tvars = variables + (_T,)
    t = AffineForm.variable(_T)
    scored = []
    for cell in cell_list:
        cons = cell.region.constraints + tuple(Constraint(t - f, "<=", 0) for f in cell.active)
        r = maximize_affine(Polytope(tvars, cons), t)
        if r.status == "optimal":
            scored.append((r.value, cell))
    best = max(v for v, _ in scored)
    winner = None
    for v, cell in scored:
        if v != best:
            continue
        face = cell.region.with_constraints(Constraint(f, ">=", best) for f in cell.active)
        pt = lex_min_point(face)
        if pt is None:
            continue
        if winner is None or _lex_key(pt, variables) < _lex_key(winner[0], variables):
            winner = (pt, cell)
    pt, cell = winner
    value, idx = _min_index(exprs, pt)
    if value != best:
        raise EngineDisagreementError(f"branch certificate check failed: {value} != {best}")
    return MinMaxResult(best, pt, cell, idx, "branch", len(cell_list))


def _vertex(exprs, domain, cell_list) -> MinMaxResult:
    variables = domain.variables
    fn = compile_expr(Min(tuple(exprs)), variables)
    best = None
    for cell in cell_list:
        forms = cell.active
        distinct = list(dict.fromkeys(forms))
        for k, fk in enumerate(distinct):
            # the minimum of affine forms is not affine; split by the minimizer
            extra = [Constraint(f - fk, ">=", 0) for f in distinct if f != fk]
            sub = cell.region.with_constraints(extra)
            if feasible_point(sub) is None:
                continue
            for pt in vertices(sub):
                val = fn(_lex_key(pt, variables))
                key = (-val, _lex_key(pt, variables))
                if best is None or key < best[0]:
                    best = (key, pt, Cell(sub, forms))
    _, pt, cell = best
    value, idx = _min_index(exprs, pt)
    return MinMaxResult(value, pt, cell, idx, "vertex", len(cell_list))


def max_min(exprs: Sequence[PwlExpr], domain: Polytope, engine: str = "branch") -> MinMaxResult:
    """Exact maximum over ``domain`` of the pointwise minimum of ``exprs``.

    ``engine="both"`` runs the LP-per-cell and vertex-enumeration engines and
    raises :class:`EngineDisagreementError` unless the values agree exactly.
    """
    if engine not in ENGINES:
        raise ValueError(f"engine must be one of {ENGINES}")
    exprs = list(exprs)
    if not exprs:
        raise ValueError("need at least one expression")
    _check_domain(domain)
    cell_list = cells(exprs, domain)
    if engine == "branch":
        return _branch(exprs, domain, cell_list)
    if engine == "vertex":
        return _vertex(exprs, domain, cell_list)
    rb = _branch(exprs, domain, cell_list)
    rv = _vertex(exprs, domain, cell_list)
    if rb.value != rv.value:
        raise EngineDisagreementError(
            f"branch engine gives {rb.value}, vertex engine gives {rv.value}")
    return MinMaxResult(rb.value, rb.argmax, rb.cell, rb.min_index, "both", rb.n_cells)


def max_min_union(exprs: Sequence[PwlExpr], domains: Sequence[Polytope], engine: str = "branch"):
    """Maximum over a union of domains.  Returns ``(result, index, per_domain)``;
    ties go to the earliest domain."""
    per = [max_min(exprs, d, engine) for d in domains]
    best = 0
    for i, r in enumerate(per):
        if r.value > per[best].value:
            best = i
    return per[best], best, per
