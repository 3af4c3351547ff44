"""Complete exponential sums modulo q.

Every sum here is first reduced to an exact integer histogram
``count[k] = weight of residues x with phase(x) = k mod q``; only the last
step ``sum count[k] e(k/q)`` is floating point, and it carries an explicit
error budget.

The sum over primitive pairs ``a mod q`` is never enumerated: for fixed
residues ``f, g`` it equals the integer

    c_q(f, g) = sum_{d | q} mu(d) (q/d)^2 [q/d divides f and g],

by Moebius inversion over ``gcd(a1, a2, q)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from ..errors import GuardError
from .polys import QuadPoly
from .smith import _grid, delta_q, null_count

__all__ = [
    "ComplexVal", "primitive_kernel", "exp_sum_pointwise", "exp_sum_averaged",
    "exp_sum_averaged_naive", "check_prop_t600", "check_prop_n1",
    "check_multiplicativity", "POINTWISE_LIMIT", "AVERAGED_LIMIT",
]

POINTWISE_LIMIT = 10 ** 7
AVERAGED_LIMIT = 10 ** 8
_EPS = 2.0 ** -52


@dataclass(frozen=True)
class ComplexVal:
    """A complex value with an upper bound ``err`` on its absolute rounding error."""

    re: float
    im: float
    err: float = 0.0

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)

    def __abs__(self) -> float:
        return math.hypot(self.re, self.im)

    def __mul__(self, other: "ComplexVal") -> "ComplexVal":
        z = self.value * other.value
        a, b = abs(self), abs(other)
        err = a * other.err + b * self.err + self.err * other.err + 4 * _EPS * a * b
        return ComplexVal(z.real, z.imag, err)

    def to_json(self) -> dict:
        return {"re": repr(self.re), "im": repr(self.im), "err": repr(self.err)}


def _from_counts(counts: np.ndarray, q: int) -> ComplexVal:
    """``sum_k counts[k] e(k/q)`` with a rounding budget.

    Each ``e(k/q)`` is within a few ulps; naive accumulation of ``q`` terms
    adds at most ``q`` ulps of the running magnitude.
    """
    counts = np.asarray(counts, dtype=np.float64)
    k = np.arange(q, dtype=np.float64)
    ang = 2 * np.pi * k / q
    re = float(np.dot(counts, np.cos(ang)))
    im = float(np.dot(counts, np.sin(ang)))
    total = float(np.abs(counts).sum())
    return ComplexVal(re, im, total * (q + 8) * _EPS)


def _mobius(n: int) -> int:
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


@lru_cache(maxsize=256)
def _kernel(q: int) -> np.ndarray:
    f = np.arange(q)
    K = np.zeros((q, q), dtype=np.int64)
    for d in range(1, q + 1):
        if q % d:
            continue
        mu = _mobius(d)
        if mu:
            e = q // d
            hit = (f % e == 0)
            K += mu * e * e * np.outer(hit, hit)
    K.setflags(write=False)
    return K


def primitive_kernel(q: int) -> np.ndarray:
    """``K[f, g] = sum over a mod q with gcd(a1, a2, q) = 1 of e_q(a1 f + a2 g)`` (an integer)."""
    if q < 1:
        raise ValueError("q must be positive")
    return _kernel(q)


def _linear_values(m, X: np.ndarray, q: int) -> np.ndarray:
    m = np.array([int(v) % q for v in m], dtype=np.int64)
    if len(m) != X.shape[0]:
        raise ValueError("m has wrong length")
    return m @ X % q


def exp_sum_pointwise(F, G, a, q: int, m) -> ComplexVal:
    """``S(a, q; m) = sum_{x mod q} e_q(a1 F(x) + a2 G(x) + m.x)``."""
    a1, a2 = (int(v) for v in a)
    if q < 1:
        raise ValueError("q must be positive")
    if gcd(gcd(a1, a2), q) != 1:
        raise ValueError(f"need gcd(a1, a2, q) = 1, got a={a}, q={q}")
    n = F.n
    if q ** n > POINTWISE_LIMIT:
        raise GuardError(f"pointwise sum needs q^n <= {POINTWISE_LIMIT}")
    X = _grid(q, n)
    phase = (a1 % q * F.values(X, q) + a2 % q * G.values(X, q) + _linear_values(m, X, q)) % q
    return _from_counts(np.bincount(phase, minlength=q), q)


def _averaged_counts(F, G, q: int, m) -> np.ndarray:
    n = F.n
    if q * q * q ** n > AVERAGED_LIMIT:
        raise GuardError(f"averaged sum needs q^2 * q^n <= {AVERAGED_LIMIT}")
    X = _grid(q, n)
    w = _kernel(q)[F.values(X, q), G.values(X, q)]
    counts = np.bincount(_linear_values(m, X, q), weights=w.astype(np.float64), minlength=q)
    if float(np.abs(w).sum()) >= 2.0 ** 53:
        raise GuardError("histogram weights exceed exact float range")
    return counts


def exp_sum_averaged(F, G, q: int, m) -> ComplexVal:
    """``S(q; m) = sum over primitive a mod q, sum_{u mod q} e_q(a1 F(u) + a2 G(u) + m.u)``."""
    if q < 1:
        raise ValueError("q must be positive")
    return _from_counts(_averaged_counts(F, G, q, m), q)


def exp_sum_averaged_naive(F, G, q: int, m) -> ComplexVal:
    """Reference version enumerating every primitive ``a``; for cross-checks only."""
    n = F.n
    if q * q * q ** n > AVERAGED_LIMIT:
        raise GuardError(f"averaged sum needs q^2 * q^n <= {AVERAGED_LIMIT}")
    X = _grid(q, n)
    Fv, Gv, L = F.values(X, q), G.values(X, q), _linear_values(m, X, q)
    counts = np.zeros(q, dtype=np.int64)
    for a1 in range(q):
        for a2 in range(q):
            if gcd(gcd(a1, a2), q) == 1:
                counts += np.bincount((a1 * Fv + a2 * Gv + L) % q, minlength=q)
    return _from_counts(counts, q)


def check_prop_t600(F: QuadPoly, G: QuadPoly, a, q: int, m) -> dict:
    """Compare ``|S(a, q; m)|`` with ``2^(n/2) q^(n/2) Null_q(M)^(1/2) Delta_q(m + b)``."""
    a1, a2 = (int(v) for v in a)
    S = exp_sum_pointwise(F, G, (a1, a2), q, m)
    H = F.combine(a1, G, a2)
    n = H.n
    shifted = [int(mi) + bi for mi, bi in zip(m, H.linear)]
    nulls = null_count(H.matrix, q)
    delta = delta_q(H.matrix, q, shifted)
    rhs = 2 ** (n / 2) * q ** (n / 2) * math.sqrt(nulls) * delta
    lhs = abs(S)
    return {"lhs": lhs, "rhs": rhs, "null": nulls, "delta": delta, "err": S.err,
            "holds": lhs <= rhs + S.err, "sum": S}


def check_prop_n1(F: QuadPoly, G: QuadPoly, a, q: int, m) -> dict:
    """One-variable form: ``|S| <= sqrt(2 q gcd(q, M)) Delta'(m + b)``."""
    if F.n != 1:
        raise ValueError("one-variable check")
    a1, a2 = (int(v) for v in a)
    S = exp_sum_pointwise(F, G, (a1, a2), q, m)
    H = F.combine(a1, G, a2)
    g = gcd(q, H.matrix[0][0])
    delta = int((int(m[0]) + H.linear[0]) % g == 0)
    rhs = math.sqrt(2 * q * g) * delta
    return {"lhs": abs(S), "rhs": rhs, "delta": delta, "err": S.err,
            "holds": abs(S) <= rhs + S.err, "sum": S}


def check_multiplicativity(F, G, r: int, s: int, m) -> dict:
    """``S(rs; m)`` against ``S(r; s' m) S(s; r' m)`` where ``r r' + s s' = 1``."""
    if gcd(r, s) != 1:
        raise ValueError("r and s must be coprime")
    r_bar = pow(r, -1, s) if s > 1 else 0
    s_bar = pow(s, -1, r) if r > 1 else 0
    if s > 1 and r > 1:
        # r r' + s s' = 1 as integers
        s_bar = (1 - r * r_bar) // s
    elif r == 1:
        r_bar, s_bar = 1, 0
    else:
        r_bar, s_bar = 0, 1
    lhs = exp_sum_averaged(F, G, r * s, m)
    rhs = exp_sum_averaged(F, G, r, [s_bar * v for v in m]) * exp_sum_averaged(F, G, s, [r_bar * v for v in m])
    diff = abs(lhs.value - rhs.value)
    budget = lhs.err + rhs.err
    scale = max(abs(lhs), 1.0)
    return {"lhs": lhs, "rhs": rhs, "abs_diff": diff, "budget": budget,
            "rel_diff": diff / scale, "holds": diff <= budget}
