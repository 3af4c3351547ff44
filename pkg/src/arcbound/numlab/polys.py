"""Integer polynomials of degree at most three, and quadratic forms with an
integer symmetric matrix.

A :class:`QuadPoly` stores ``x^t M x + b.x + c``.  Because the matrix must be
integral, a quadratic with an odd cross coefficient can only be represented
after doubling; :func:`difference_cubic` does that and sets ``doubled``.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, gcd, prod
from typing import Mapping, Sequence

import numpy as np

from ..errors import GuardError, ParseError

__all__ = [
    "Poly", "CubicPoly", "QuadPoly", "difference_poly", "difference_cubic",
    "poly_from_json", "MAX_VARS",
]

MAX_VARS = 6


def _clean(terms: Mapping) -> dict:
    return {tuple(int(e) for e in k): int(v) for k, v in terms.items() if v}


@dataclass(frozen=True)
class Poly:
    """Sparse integer polynomial: exponent tuple -> coefficient."""

    n: int
    terms: tuple  # sorted ((exps, coeff), ...)

    @classmethod
    def of(cls, n: int, terms: Mapping) -> "Poly":
        t = _clean(terms)
        for e in t:
            if len(e) != n or min(e, default=0) < 0:
                raise ValueError(f"bad exponent vector {e} for n={n}")
        return cls(n, tuple(sorted(t.items())))

    @property
    def as_dict(self) -> dict:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((sum(e) for e, _ in self.terms), default=-1)

    def __add__(self, other: "Poly") -> "Poly":
        d = self.as_dict
        for e, c in other.terms:
            d[e] = d.get(e, 0) + c
        return Poly.of(self.n, d)

    def __neg__(self) -> "Poly":
        return Poly(self.n, tuple((e, -c) for e, c in self.terms))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def scale(self, k: int) -> "Poly":
        return Poly.of(self.n, {e: k * c for e, c in self.terms})

    def shift(self, h: Sequence[int]) -> "Poly":
        """``y -> P(y + h)``, expanded binomially."""
        out: dict = {}
        for e, c in self.terms:
            parts = [[(k, comb(ei, k) * hi ** (ei - k)) for k in range(ei + 1)]
                     for ei, hi in zip(e, h)]
            for choice in _product(parts):
                exps = tuple(k for k, _ in choice)
                out[exps] = out.get(exps, 0) + c * prod(w for _, w in choice)
        return Poly.of(self.n, out)

    def evaluate(self, x: Sequence[int]) -> int:
        return sum(c * prod(xi ** ei for xi, ei in zip(x, e)) for e, c in self.terms)

    def values(self, X: np.ndarray, q: int | None = None) -> np.ndarray:
        """Evaluate on the columns of an integer ``(n, N)`` array, optionally mod q."""
        out = np.zeros(X.shape[1], dtype=np.int64)
        for e, c in self.terms:
            term = np.full(X.shape[1], c if q is None else c % q, dtype=np.int64)
            for xi, ei in zip(X, e):
                for _ in range(ei):
                    term = term * xi
                    if q is not None:
                        term %= q
            out += term
            if q is not None:
                out %= q
        return out

    def content(self) -> int:
        g = 0
        for _, c in self.terms:
            g = gcd(g, c)
        return g

    def homogeneous_part(self, d: int) -> "Poly":
        return Poly.of(self.n, {e: c for e, c in self.terms if sum(e) == d})

    def to_json(self) -> dict:
        return {"n": self.n, "monomials": [{"exps": list(e), "coeff": c} for e, c in self.terms]}


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


class CubicPoly(Poly):
    """A :class:`Poly` of degree at most 3 in at most ``MAX_VARS`` variables."""

    @classmethod
    def of(cls, n: int, terms: Mapping) -> "CubicPoly":
        if n > MAX_VARS:
            raise GuardError(f"at most {MAX_VARS} variables")
        p = Poly.of(n, terms)
        if p.degree > 3:
            raise ValueError("degree exceeds 3")
        return cls(p.n, p.terms)


@dataclass(frozen=True)
class QuadPoly:
    """``x^t M x + b.x + c`` with ``M`` integer symmetric."""

    matrix: tuple
    linear: tuple
    constant: int = 0
    doubled: bool = False

    def __post_init__(self):
        M = tuple(tuple(int(v) for v in row) for row in self.matrix)
        n = len(M)
        if any(len(r) != n for r in M):
            raise ValueError("quadratic matrix must be square")
        if any(M[i][j] != M[j][i] for i in range(n) for j in range(n)):
            raise ValueError("quadratic matrix must be symmetric")
        lin = tuple(int(v) for v in self.linear) if self.linear else (0,) * n
        if len(lin) != n:
            raise ValueError("linear part has wrong length")
        object.__setattr__(self, "matrix", M)
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "constant", int(self.constant))

    @property
    def n(self) -> int:
        return len(self.matrix)

    @classmethod
    def zero(cls, n: int) -> "QuadPoly":
        return cls(tuple((0,) * n for _ in range(n)), (0,) * n, 0)

    @classmethod
    def from_poly(cls, p: Poly, allow_doubling: bool = False) -> "QuadPoly":
        if p.degree > 2:
            raise ValueError("degree exceeds 2")
        odd = any(sum(e) == 2 and max(e) == 1 and c % 2 for e, c in p.terms)
        if odd:
            if not allow_doubling:
                raise ValueError("odd cross coefficient: form has no integer symmetric matrix")
            return cls.from_poly(p.scale(2))._replace_doubled(True)
        n = p.n
        M = [[0] * n for _ in range(n)]
        b = [0] * n
        c0 = 0
        for e, c in p.terms:
            idx = [i for i, k in enumerate(e) for _ in range(k)]
            if len(idx) == 2:
                i, j = idx
                if i == j:
                    M[i][i] += c
                else:
                    M[i][j] += c // 2
                    M[j][i] += c // 2
            elif len(idx) == 1:
                b[idx[0]] += c
            else:
                c0 += c
        return cls(tuple(map(tuple, M)), tuple(b), c0)

    def _replace_doubled(self, flag: bool) -> "QuadPoly":
        return QuadPoly(self.matrix, self.linear, self.constant, flag)

    def to_poly(self) -> Poly:
        n = self.n
        d: dict = {}
        for i in range(n):
            for j in range(n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                d[tuple(e)] = d.get(tuple(e), 0) + self.matrix[i][j]
            if self.linear[i]:
                e = [0] * n
                e[i] = 1
                d[tuple(e)] = d.get(tuple(e), 0) + self.linear[i]
        d[(0,) * n] = self.constant
        return Poly.of(n, d)

    def combine(self, a1: int, other: "QuadPoly", a2: int) -> "QuadPoly":
        """``a1 * self + a2 * other``."""
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        M = tuple(tuple(a1 * x + a2 * y for x, y in zip(r, s)) for r, s in zip(self.matrix, other.matrix))
        b = tuple(a1 * x + a2 * y for x, y in zip(self.linear, other.linear))
        return QuadPoly(M, b, a1 * self.constant + a2 * other.constant)

    def evaluate(self, x: Sequence[int]) -> int:
        n = self.n
        return (sum(self.matrix[i][j] * x[i] * x[j] for i in range(n) for j in range(n))
                + sum(bi * xi for bi, xi in zip(self.linear, x)) + self.constant)

    def values(self, X: np.ndarray, q: int | None = None) -> np.ndarray:
        M = np.array(self.matrix, dtype=np.int64)
        b = np.array(self.linear, dtype=np.int64)
        if q is not None:
            M, b, X = M % q, b % q, X % q
            MX = M @ X % q
            return ((X * MX).sum(axis=0) + b @ X + self.constant) % q
        return (X * (M @ X)).sum(axis=0) + b @ X + self.constant

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "linear": list(self.linear),
                "constant": self.constant, "doubled": self.doubled}


def difference_poly(F: Poly, h: Sequence[int]) -> Poly:
    """``F(y + h) - F(y)``."""
    return F.shift(h) - F


def difference_cubic(F: Poly, h: Sequence[int]) -> QuadPoly:
    """The differenced polynomial of a cubic as a :class:`QuadPoly`.

    If a cross coefficient comes out odd the result is doubled (``doubled``
    set), so that the quadratic part has an integer symmetric matrix.
    """
    if F.degree > 3:
        raise ValueError("degree exceeds 3")
    if len(h) != F.n:
        raise ValueError("shift vector has wrong length")
    return QuadPoly.from_poly(difference_poly(F, h), allow_doubling=True)


def poly_from_json(data) -> Poly | QuadPoly:
    """Monomial form ``{"n", "monomials"}`` or matrix form ``{"matrix", "linear", "constant"}``."""
    try:
        if "monomials" in data:
            n = int(data["n"])
            terms: dict = {}
            for mono in data["monomials"]:
                e = tuple(int(x) for x in mono["exps"])
                terms[e] = terms.get(e, 0) + int(mono["coeff"])
            p = Poly.of(n, terms)
            return CubicPoly.of(n, terms) if p.degree == 3 else p
        if "matrix" in data:
            n = len(data["matrix"])
            return QuadPoly(tuple(map(tuple, data["matrix"])), tuple(data.get("linear") or (0,) * n),
                            int(data.get("constant", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"bad polynomial JSON: {exc}") from None
    raise ParseError("polynomial JSON needs 'monomials' or 'matrix'")
