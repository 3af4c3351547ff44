"""Partial sums of the singular series.

``A(q) = q^-n * sum over primitive a mod q of S_{a,q}``, where
``S_{a,q} = sum_{x mod q} e_q(a1 F(x) + a2 G(x))``.  Summing over ``a`` first
turns the inner sum into the integer ``c_q(F(x), G(x))``, so every ``A(q)``
is an exact rational.
"""
from __future__ import annotations

from fractions import Fraction

from ..errors import GuardError
from .expsums import primitive_kernel
from .smith import _grid

__all__ = ["singular_series_term", "singular_series_partial", "SERIES_LIMIT"]

SERIES_LIMIT = 10 ** 9
MAX_SERIES_VARS = 3


def singular_series_term(F, G, q: int) -> Fraction:
    if q < 1:
        raise ValueError("q must be positive")
    n = F.n
    X = _grid(q, n)
    total = int(primitive_kernel(q)[F.values(X, q), G.values(X, q)].sum())
    return Fraction(total, q ** n)


def singular_series_partial(F, G, R: int) -> dict:
    """``A(1), ..., A(R)`` and their sum.

    ``terms`` is a list of ``(q, A(q))`` with exact rationals; ``value`` is
    the float of the exact partial sum ``exact``.
    """
    n = F.n
    if G.n != n:
        raise ValueError("F and G must have the same number of variables")
    if n > MAX_SERIES_VARS:
        raise GuardError(f"singular series limited to n <= {MAX_SERIES_VARS}")
    if R < 1:
        raise ValueError("R must be positive")
    if sum(q ** (n + 2) for q in range(1, R + 1)) > SERIES_LIMIT:
        raise GuardError(f"needs sum of q^(n+2) <= {SERIES_LIMIT}")
    terms = [(q, singular_series_term(F, G, q)) for q in range(1, R + 1)]
    exact = sum((a for _, a in terms), Fraction(0))
    return {"value": float(exact), "exact": exact, "terms": terms}
