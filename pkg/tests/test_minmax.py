import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arcbound import minmax
from arcbound.errors import EngineDisagreementError, InfeasibleDomainError, UnboundedDomainError
from arcbound.minmax import MinMaxResult, cells, linear_cells, max_min, max_min_union
from arcbound.polytope import Polytope, ge, le
from arcbound.pwl import AffineForm, evaluate, pmax, pmin, var
from helpers import box, max_min_1d, random_family

X = AffineForm.variable("x")


def test_tent():
    e = pmin(var("x") + 1, 3 - var("x"))
    r = max_min([e], box(("x",), -5, 5))
    assert r.value == 2 and r.argmax == {"x": 1}


def test_min_of_two_expressions():
    f = pmax(var("x"), -var("x"))
    g = 2 - var("x") * 2
    for engine in ("branch", "vertex", "both"):
        r = max_min([f, g], box(("x",), -1, 1), engine)
        assert r.value == 1
        assert r.argmax == {"x": -1}  # lex-min among maximizers


def test_lex_min_tie_break_on_a_plateau():
    e = pmin(var("x"), 1 + 0 * var("y"))
    r = max_min([e], box(("x", "y"), 0, 3), "both")
    assert r.value == 1 and r.argmax == {"x": 1, "y": 0}


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_one_variable_against_breakpoint_oracle(seed):
    rng = random.Random(seed)
    _, exprs = random_family(rng, 1, size=rng.randint(1, 3), depth=3)
    lo, hi = rng.randint(-4, 0), rng.randint(1, 4)
    expected = max_min_1d(exprs, "x", lo, hi)
    for engine in ("branch", "vertex"):
        assert max_min(exprs, box(("x",), lo, hi), engine).value == expected


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10 ** 6), n_vars=st.integers(2, 3))
def test_engines_agree_and_certify(seed, n_vars):
    rng = random.Random(seed)
    names, exprs = random_family(rng, n_vars, size=3, depth=2)
    dom = box(names, -2, 2, (le(AffineForm.of({v: 1 for v in names}), 3),))
    r = max_min(exprs, dom, "both")
    assert dom.contains(r.argmax)
    assert min(evaluate(e, r.argmax) for e in exprs) == r.value
    assert r.cell.region.contains(r.argmax)
    # the active forms of the certificate cell reproduce the expressions there
    for e, f in zip(exprs, r.cell.active):
        assert f.evaluate(r.argmax) == evaluate(e, r.argmax)
    for _ in range(50):
        p = {v: Fraction(rng.randint(-20, 20), 10) for v in names}
        if dom.contains(p):
            assert min(evaluate(e, p) for e in exprs) <= r.value


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10 ** 6))
def test_cells_cover_and_linearize(seed):
    rng = random.Random(seed)
    names, exprs = random_family(rng, 2, size=2, depth=2)
    dom = box(names, -2, 2)
    cl = cells(exprs, dom)
    pieces = linear_cells(exprs[0], dom)
    for _ in range(30):
        p = {v: Fraction(rng.randint(-8, 8), 4) for v in names}
        hits = [c for c in cl if c.region.contains(p)]
        assert hits
        for c in hits:
            assert [f.evaluate(p) for f in c.active] == [evaluate(e, p) for e in exprs]
        assert any(P.contains(p) and f.evaluate(p) == evaluate(exprs[0], p) for P, f in pieces)


def test_domain_errors():
    with pytest.raises(InfeasibleDomainError):
        max_min([var("x")], Polytope(("x",), (ge(X, 1), le(X, 0))))
    with pytest.raises(UnboundedDomainError):
        max_min([var("x")], Polytope(("x",), (ge(X, 0),)))
    with pytest.raises(ValueError):
        max_min([var("x")], box(("x",)), "simplex")


def test_both_refuses_disagreement(monkeypatch):
    real = minmax._vertex

    def skewed(*args):
        r = real(*args)
        return MinMaxResult(r.value + 1, r.argmax, r.cell, r.min_index, "vertex", r.n_cells)

    monkeypatch.setattr(minmax, "_vertex", skewed)
    with pytest.raises(EngineDisagreementError):
        max_min([var("x")], box(("x",)), "both")


def test_union_prefers_best_then_earliest():
    d1, d2 = box(("x",), 0, 1), box(("x",), 2, 3)
    best, idx, per = max_min_union([var("x")], [d1, d2])
    assert idx == 1 and best.value == 3 and len(per) == 2
    best, idx, _ = max_min_union([0 * var("x")], [d1, d2])
    assert idx == 0
