"""Piecewise-linear expressions over named variables, evaluated exactly.

An expression is an immutable tree whose leaves are affine forms and whose
inner nodes are ``Max``, ``Min``, ``Sum`` and ``Scale``.  Structurally equal
subtrees compare and hash equal, which the cell decomposition relies on to
branch a shared sub-expression only once.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import ParseError, UnboundVariableError
from .rational import as_rational, format_rational

__all__ = [
    "AffineForm", "PwlExpr", "Affine", "Max", "Min", "Sum", "Scale",
    "var", "const", "pmax", "pmin", "evaluate", "substitute", "variables_of",
    "dumps", "loads", "compile_expr",
]


@dataclass(frozen=True)
class AffineForm:
    """``sum(coeff[v] * v) + constant`` with zero coefficients dropped."""

    terms: tuple = ()
    constant: Fraction = Fraction(0)

    @classmethod
    def of(cls, coeffs: Mapping[str, object] | None = None, constant=0) -> "AffineForm":
        clean = {}
        for name, c in (coeffs or {}).items():
            c = as_rational(c)
            if c:
                clean[name] = c
        return cls(tuple(sorted(clean.items())), as_rational(constant))

    @classmethod
    def variable(cls, name: str) -> "AffineForm":
        return cls(((name, Fraction(1)),), Fraction(0))

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    def coeff(self, name: str) -> Fraction:
        for v, c in self.terms:
            if v == name:
                return c
        return Fraction(0)

    def variables(self) -> frozenset:
        return frozenset(v for v, _ in self.terms)

    def is_constant(self) -> bool:
        return not self.terms

    def evaluate(self, point: Mapping[str, object]) -> Fraction:
        total = self.constant
        for v, c in self.terms:
            try:
                x = point[v]
            except KeyError:
                raise UnboundVariableError(v) from None
            total += c * x
        return total

    def substitute(self, bindings: Mapping[str, object]) -> "AffineForm":
        coeffs = {}
        k = self.constant
        for v, c in self.terms:
            if v in bindings:
                k += c * as_rational(bindings[v])
            else:
                coeffs[v] = c
        return AffineForm.of(coeffs, k)

    def __add__(self, other):
        if not isinstance(other, AffineForm):
            other = AffineForm.of({}, other)
        coeffs = dict(self.terms)
        for v, c in other.terms:
            coeffs[v] = coeffs.get(v, 0) + c
        return AffineForm.of(coeffs, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self):
        return AffineForm(tuple((v, -c) for v, c in self.terms), -self.constant)

    def __sub__(self, other):
        if not isinstance(other, AffineForm):
            other = AffineForm.of({}, other)
        return self + (-other)

    def scale(self, c) -> "AffineForm":
        c = as_rational(c)
        if not c:
            return AffineForm((), Fraction(0))
        return AffineForm(tuple((v, c * a) for v, a in self.terms), c * self.constant)

    def __str__(self):
        parts = [f"{format_rational(c)}*{v}" for v, c in self.terms]
        parts.append(format_rational(self.constant))
        return " + ".join(parts)


class PwlExpr:
    """Base class of expression nodes; supports ``+``, ``-`` and scalar ``*``."""

    __slots__ = ()

    def __add__(self, other):
        return Sum((self, _lift(other)))

    def __radd__(self, other):
        return Sum((_lift(other), self))

    def __sub__(self, other):
        return Sum((self, Scale(Fraction(-1), _lift(other))))

    def __rsub__(self, other):
        return Sum((_lift(other), Scale(Fraction(-1), self)))

    def __neg__(self):
        return Scale(Fraction(-1), self)

    def __mul__(self, c):
        return Scale(as_rational(c), self)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return Scale(1 / as_rational(c), self)


def _hash_init(obj, *parts):
    object.__setattr__(obj, "_hash", hash(parts))


@dataclass(frozen=True, eq=True)
class Affine(PwlExpr):
    form: AffineForm
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        _hash_init(self, "affine", self.form)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Max(PwlExpr):
    children: tuple
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("Max of an empty list")
        _hash_init(self, "max", self.children)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Min(PwlExpr):
    children: tuple
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("Min of an empty list")
        _hash_init(self, "min", self.children)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Sum(PwlExpr):
    children: tuple
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        _hash_init(self, "sum", self.children)

    def __hash__(self):
        return self._hash


@dataclass(frozen=True, eq=True)
class Scale(PwlExpr):
    factor: Fraction
    child: PwlExpr
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "factor", as_rational(self.factor))
        _hash_init(self, "scale", self.factor, self.child)

    def __hash__(self):
        return self._hash


def _lift(x) -> PwlExpr:
    if isinstance(x, PwlExpr):
        return x
    if isinstance(x, AffineForm):
        return Affine(x)
    return Affine(AffineForm.of({}, x))


def var(name: str) -> Affine:
    return Affine(AffineForm.variable(name))


def const(c) -> Affine:
    return Affine(AffineForm.of({}, c))


def pmax(*children) -> Max:
    return Max(tuple(_lift(c) for c in children))


def pmin(*children) -> Min:
    return Min(tuple(_lift(c) for c in children))


def evaluate(expr: PwlExpr, point: Mapping[str, object]) -> Fraction:
    """Exact value of ``expr`` at ``point`` by structural recursion."""
    if isinstance(expr, Affine):
        return expr.form.evaluate(point)
    if isinstance(expr, Max):
        return max(evaluate(c, point) for c in expr.children)
    if isinstance(expr, Min):
        return min(evaluate(c, point) for c in expr.children)
    if isinstance(expr, Sum):
        return sum((evaluate(c, point) for c in expr.children), Fraction(0))
    if isinstance(expr, Scale):
        return expr.factor * evaluate(expr.child, point)
    raise TypeError(f"not a PwlExpr: {expr!r}")


def substitute(expr: PwlExpr, bindings: Mapping[str, object]) -> PwlExpr:
    if isinstance(expr, Affine):
        return Affine(expr.form.substitute(bindings))
    if isinstance(expr, Max):
        return Max(tuple(substitute(c, bindings) for c in expr.children))
    if isinstance(expr, Min):
        return Min(tuple(substitute(c, bindings) for c in expr.children))
    if isinstance(expr, Sum):
        return Sum(tuple(substitute(c, bindings) for c in expr.children))
    if isinstance(expr, Scale):
        return Scale(expr.factor, substitute(expr.child, bindings))
    raise TypeError(f"not a PwlExpr: {expr!r}")


def variables_of(expr: PwlExpr) -> frozenset:
    if isinstance(expr, Affine):
        return expr.form.variables()
    if isinstance(expr, Scale):
        return variables_of(expr.child)
    out = frozenset()
    for c in expr.children:
        out |= variables_of(c)
    return out


# -- text form ---------------------------------------------------------------

def dumps(expr: PwlExpr) -> str:
    """Serialize to the s-expression grammar understood by :func:`loads`."""
    if isinstance(expr, Affine):
        f = expr.form
        inner = "".join(f" ({v} {format_rational(c)})" for v, c in f.terms)
        return f"(affine{inner} {format_rational(f.constant)})"
    if isinstance(expr, Scale):
        return f"(* {format_rational(expr.factor)} {dumps(expr.child)})"
    head = {Max: "max", Min: "min", Sum: "+"}[type(expr)]
    return "(" + " ".join([head] + [dumps(c) for c in expr.children]) + ")"


def _tokenize(text: str) -> list:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def loads(text: str) -> PwlExpr:
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty expression")
    expr, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise ParseError(f"trailing tokens after expression: {tokens[pos:]}")
    return expr


def _expect(tokens, pos, tok):
    if pos >= len(tokens) or tokens[pos] != tok:
        got = tokens[pos] if pos < len(tokens) else "end of input"
        raise ParseError(f"expected {tok!r}, got {got!r}")
    return pos + 1


def _parse(tokens, pos):
    pos = _expect(tokens, pos, "(")
    if pos >= len(tokens):
        raise ParseError("unexpected end of input")
    head = tokens[pos]
    pos += 1
    if head == "affine":
        coeffs = {}
        while pos < len(tokens) and tokens[pos] == "(":
            if pos + 3 >= len(tokens):
                raise ParseError("truncated affine term")
            name, c = tokens[pos + 1], tokens[pos + 2]
            if name in coeffs:
                raise ParseError(f"duplicate variable {name!r} in affine form")
            coeffs[name] = as_rational(c)
            pos = _expect(tokens, pos + 3, ")")
        if pos >= len(tokens):
            raise ParseError("affine form missing constant")
        k = as_rational(tokens[pos])
        pos = _expect(tokens, pos + 1, ")")
        return Affine(AffineForm.of(coeffs, k)), pos
    if head == "*":
        if pos >= len(tokens):
            raise ParseError("scale missing factor")
        c = as_rational(tokens[pos])
        child, pos = _parse(tokens, pos + 1)
        return Scale(c, child), _expect(tokens, pos, ")")
    if head in ("max", "min", "+"):
        children = []
        while pos < len(tokens) and tokens[pos] == "(":
            child, pos = _parse(tokens, pos)
            children.append(child)
        pos = _expect(tokens, pos, ")")
        if head != "+" and not children:
            raise ParseError(f"({head}) needs at least one argument")
        node = {"max": Max, "min": Min, "+": Sum}[head]
        return node(tuple(children)), pos
    raise ParseError(f"unknown head {head!r}")


# -- fast repeated evaluation --------------------------------------------------

def compile_expr(expr: PwlExpr, variables: Iterable[str], number=Fraction):
    """Return ``f(values)`` evaluating ``expr`` on a tuple ordered like
    ``variables``.  ``number`` converts the constants (e.g. ``gmpy2.mpq``)."""
    index = {v: i for i, v in enumerate(variables)}
    consts: list = []

    def k(c):
        consts.append(number(c.numerator) / number(c.denominator) if number is not Fraction else c)
        return f"C[{len(consts) - 1}]"

    def gen(e):
        if isinstance(e, Affine):
            parts = [k(e.form.constant)]
            for v, c in e.form.terms:
                if v not in index:
                    raise UnboundVariableError(v)
                parts.append(f"{k(c)}*p[{index[v]}]")
            return "(" + "+".join(parts) + ")"
        if isinstance(e, Scale):
            return f"({k(e.factor)}*{gen(e.child)})"
        if isinstance(e, Sum):
            return "(" + "+".join(gen(c) for c in e.children) + ")" if e.children else k(Fraction(0))
        fn = "max" if isinstance(e, Max) else "min"
        if len(e.children) == 1:
            return gen(e.children[0])
        return f"{fn}(" + ",".join(gen(c) for c in e.children) + ")"

    src = gen(expr)
    return eval(f"lambda p: {src}", {"C": consts, "max": max, "min": min})
