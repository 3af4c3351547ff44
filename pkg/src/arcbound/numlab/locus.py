"""Singular loci of pairs of quadratic forms over small prime fields.

The dimension is estimated from the number of F_p-rational points of the
affine cone, so it is a statement about rational points at one prime.  When
the count does not fall in exactly one dimension window the answer is
refused rather than guessed.
"""
from __future__ import annotations

from math import gcd

import numpy as np

from ..errors import GuardError, IndeterminateError
from .polys import Poly
from .smith import _check_matrix, int_det

__all__ = [
    "rank_mod_p", "singular_points", "singular_locus_dim", "dimension_window",
    "is_prime", "prime_factors", "d_of_q", "e22_report", "LOCUS_LIMIT",
    "pencil_determinant", "pencil_is_separable",
]

LOCUS_LIMIT = 10 ** 7
MAX_LOCUS_VARS = 4


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    f = 2
    while f * f <= p:
        if p % f == 0:
            return False
        f += 1
    return True


def prime_factors(q: int) -> list:
    out, f = [], 2
    while f * f <= q:
        if q % f == 0:
            out.append(f)
            while q % f == 0:
                q //= f
        f += 1
    if q > 1:
        out.append(q)
    return out


def rank_mod_p(M, p: int) -> int:
    A = [[int(x) % p for x in row] for row in M]
    rows, cols = len(A), len(A[0]) if A else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c]:
                f = A[r][c]
                A[r] = [(x - f * y) % p for x, y in zip(A[r], A[rank])]
        rank += 1
    return rank


def _check_pair(M1, M2, p: int):
    A1, A2 = _check_matrix(M1), _check_matrix(M2)
    n = len(A1)
    if len(A2) != n or any(len(r) != n for r in A1 + A2):
        raise ValueError("need two square matrices of the same size")
    if n > MAX_LOCUS_VARS:
        raise GuardError(f"at most {MAX_LOCUS_VARS} variables")
    if not is_prime(p) or p == 2:
        raise ValueError("p must be an odd prime")
    if p ** n > LOCUS_LIMIT:
        raise GuardError(f"needs p^n <= {LOCUS_LIMIT}")
    return np.array(A1, dtype=np.int64) % p, np.array(A2, dtype=np.int64) % p, n


def singular_points(M1, M2, p: int) -> int:
    """Nonzero ``x in F_p^n`` with ``Q1(x) = Q2(x) = 0`` and ``rank(M1 x, M2 x) < 2``.

    For odd ``p`` the gradients ``2 M_i x`` have the same rank as ``M_i x``.
    """
    A1, A2, n = _check_pair(M1, M2, p)
    count = 0
    # chunk over the first coordinate to bound memory
    rest = np.indices((p,) * (n - 1), dtype=np.int64).reshape(n - 1, -1) if n > 1 else np.zeros((0, 1), dtype=np.int64)
    for x1 in range(p):
        X = np.vstack([np.full((1, rest.shape[1]), x1, dtype=np.int64), rest])
        U = A1 @ X % p
        V = A2 @ X % p
        q1 = (X * U).sum(axis=0) % p
        q2 = (X * V).sum(axis=0) % p
        ok = (q1 == 0) & (q2 == 0)
        for i in range(n):
            for j in range(i + 1, n):
                ok &= (U[i] * V[j] - U[j] * V[i]) % p == 0
        ok &= X.any(axis=0)
        count += int(np.count_nonzero(ok))
    return count


def dimension_window(projective_count: float, p: int, n: int) -> int:
    """The ``d`` with ``p^d / 2 <= count <= 4 p^d``; ``-1`` for an empty locus."""
    if projective_count == 0:
        return -1
    hits = [d for d in range(n) if p ** d / 2 <= projective_count <= 4 * p ** d]
    if len(hits) != 1:
        raise IndeterminateError(
            f"indeterminate at this p: {projective_count} projective points fit windows {hits}")
    return hits[0]


def singular_locus_dim(M1, M2, p: int) -> int:
    """Dimension of the singular locus of ``{Q1 = Q2 = 0}`` in ``P^(n-1)``, judged
    from F_p-rational points; ``-1`` when no such point exists."""
    cone = singular_points(M1, M2, p)
    return dimension_window(cone // (p - 1), p, len(M1))


def d_of_q(F0: Poly, G0: Poly, q: int, M1=None, M2=None) -> int:
    """``D(q)``: for ``n >= 2`` the product of ``p^(s_p + 1)`` over primes ``p | q``
    (``M1``, ``M2`` are the integer matrices of the quadratic parts); for
    ``n = 1`` the gcd of ``q`` with the contents of ``F0`` and ``G0``."""
    if F0.n == 1:
        return gcd(gcd(q, F0.content()), G0.content())
    if M1 is None or M2 is None:
        raise ValueError("matrices of the quadratic parts are required when n >= 2")
    out = 1
    for p in prime_factors(q):
        out *= p ** (singular_locus_dim(M1, M2, p) + 1)
    return out


def _poly_trim(f):
    while f and f[-1] == 0:
        f.pop()
    return f


def _poly_mod(a, b, p):
    a = a[:]
    inv = pow(b[-1], -1, p)
    while len(_poly_trim(a)) >= len(b):
        k = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[shift + i] = (a[shift + i] - k * c) % p
    return a


def _poly_gcd_degree(a, b, p) -> int:
    a, b = _poly_trim(a[:]), _poly_trim(b[:])
    while b:
        a, b = b, _poly_mod(a, b, p)
    return len(a) - 1


def pencil_determinant(M1, M2, p: int) -> list:
    """Coefficients (low to high) of ``det(t M1 + M2)`` mod p, by interpolation."""
    A1, A2 = _check_matrix(M1), _check_matrix(M2)
    n = len(A1)
    if p <= n:
        raise ValueError("need p > n for interpolation")
    xs = list(range(n + 1))
    ys = [int_det([[t * x + y for x, y in zip(r1, r2)] for r1, r2 in zip(A1, A2)]) % p for t in xs]
    coeffs = [0] * (n + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [1]
        denom = 1
        for j, xj in enumerate(xs):
            if j != i:
                basis = [((basis[k - 1] if k else 0) - xj * (basis[k] if k < len(basis) else 0)) % p
                         for k in range(len(basis) + 1)]
                denom = denom * (xi - xj) % p
        f = yi * pow(denom, -1, p) % p
        coeffs = [(c + f * b) % p for c, b in zip(coeffs, basis)]
    return coeffs


def pencil_is_separable(M1, M2, p: int) -> bool:
    """True when the binary form ``det(a1 M1 + a2 M2)`` has ``n`` distinct roots
    in ``P^1`` over the algebraic closure of F_p, the classical criterion for
    a nonsingular intersection of two quadrics in odd characteristic."""
    n = len(M1)
    g = _poly_trim(pencil_determinant(M1, M2, p))
    deg = len(g) - 1
    if deg < n - 1:
        return False  # identically zero, or a multiple root at infinity
    dg = _poly_trim([(k * g[k]) % p for k in range(1, len(g))])
    return _poly_gcd_degree(g, dg, p) == 0


def e22_report(M1, M2, p: int) -> dict:
    """Ranks of ``a1 M1 + a2 M2`` over the ``p + 1`` projective classes of ``a``."""
    A1, A2 = _check_matrix(M1), _check_matrix(M2)
    n = len(A1)
    classes = [(1, t) for t in range(p)] + [(0, 1)]
    ranks = {}
    for a1, a2 in classes:
        M = [[a1 * x + a2 * y for x, y in zip(r1, r2)] for r1, r2 in zip(A1, A2)]
        ranks[(a1, a2)] = rank_mod_p(M, p)
    deficient = [a for a, r in ranks.items() if r < n]
    return {"n": n, "min_rank": min(ranks.values()), "deficient_classes": deficient,
            "ranks": ranks}
