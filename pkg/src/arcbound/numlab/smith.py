"""Smith normal form over the integers and null-space counts modulo q."""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import gcd, prod

import numpy as np

from ..errors import GuardError

__all__ = [
    "smith_normal_form", "int_det", "null_count", "delta_q", "lambda_q",
    "null_average", "n_b_count", "MAX_DIM", "BRUTE_LIMIT",
]

MAX_DIM = 8
BRUTE_LIMIT = 10 ** 7


def _check_matrix(M) -> list:
    M = [list(map(int, row)) for row in M]
    if not M or any(len(r) != len(M[0]) for r in M):
        raise ValueError("matrix must be a non-empty rectangular array")
    if len(M) > MAX_DIM or len(M[0]) > MAX_DIM:
        raise GuardError(f"matrix dimensions limited to {MAX_DIM}")
    return M


def _identity(n: int) -> list:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(M):
    """Return ``(S, D, T)`` with ``S @ M @ T == D`` exactly.

    ``D`` is diagonal with non-negative entries ``l1 | l2 | ...`` (zeros last)
    and ``S``, ``T`` are unimodular.  Entries are Python ints.

    >>> smith_normal_form([[2, 1], [1, 2]])[1]
    [[1, 0], [0, 3]]
    """
    A = _check_matrix(M)
    m, n = len(A), len(A[0])
    if m != n:
        raise ValueError("smith_normal_form expects a square matrix")
    S, T = _identity(m), _identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        S[i], S[j] = S[j], S[i]

    def swap_cols(i, j):
        for R in (A, T):
            for row in R:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        for R in (A, S):
            R[dst] = [a + k * b for a, b in zip(R[dst], R[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for R in (A, T):
            for row in R:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
            if not nz:
                return S, A, T
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            p = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    clean &= A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    clean &= A[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if A[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if A[t][t] < 0:
            S[t] = [-x for x in S[t]]
            A[t] = [-x for x in A[t]]
    return S, A, T


def int_det(M) -> int:
    """Exact determinant (fraction-free elimination)."""
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    det = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = -det
        det *= A[c][c]
        for r in range(c + 1, n):
            f = A[r][c] / A[c][c]
            if f:
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return int(det)


def lambda_q(M, q: int) -> list:
    """``gcd(q, l_i)`` for the Smith invariants ``l_i`` (``gcd(q, 0) = q``)."""
    _, D, _ = smith_normal_form(M)
    return [gcd(q, D[i][i]) for i in range(len(D))]


def _grid(q: int, n: int) -> np.ndarray:
    """All of ``(Z/q)^n`` as an ``(n, q**n)`` int64 array, first coordinate slowest."""
    return np.indices((q,) * n, dtype=np.int64).reshape(n, -1)


def null_count(M, q: int, method: str = "smith") -> int:
    """Number of ``x mod q`` with ``M x = 0 mod q``."""
    if q < 1:
        raise ValueError("q must be positive")
    A = _check_matrix(M)
    if method == "smith":
        return prod(lambda_q(A, q))
    if method == "brute":
        n = len(A[0])
        if q ** n > BRUTE_LIMIT:
            raise GuardError(f"brute force needs q^n <= {BRUTE_LIMIT}, got {q}^{n}")
        X = _grid(q, n)
        Y = (np.array(A, dtype=np.int64) % q) @ X % q
        return int(np.count_nonzero(~Y.any(axis=0)))
    raise ValueError(f"unknown method {method!r}")


def delta_q(M, q: int, v) -> int:
    """1 if ``gcd(q, l_i)`` divides ``(T^t v)_i`` for every ``i``, else 0."""
    _, D, T = smith_normal_form(M)
    v = [int(x) for x in v]
    if len(v) != len(T):
        raise ValueError("vector length must match matrix size")
    for i in range(len(D)):
        lam = gcd(q, D[i][i])
        w = sum(T[k][i] * v[k] for k in range(len(v)))
        if w % lam:
            return 0
    return 1


def _primitive_pairs(d: int):
    for b1, b2 in itertools.product(range(d), repeat=2):
        if gcd(gcd(b1, b2), d) == 1:
            yield b1, b2


def null_average(M1, M2, d: int, q: int | None = None) -> int:
    """``sum over primitive a mod q of #Null_d(a1 M1 + a2 M2)``; ``q`` defaults to ``d``."""
    q = d if q is None else q
    A1, A2 = _check_matrix(M1), _check_matrix(M2)
    total = 0
    for a1, a2 in _primitive_pairs(q):
        M = [[a1 * x + a2 * y for x, y in zip(r1, r2)] for r1, r2 in zip(A1, A2)]
        total += null_count(M, d)
    return total


def n_b_count(M, q: int, b) -> int:
    """``#{x mod q : M x = (q/2) b mod q}`` for even ``q``, by enumeration."""
    if q % 2:
        raise ValueError("q must be even")
    A = _check_matrix(M)
    n = len(A[0])
    if q ** n > BRUTE_LIMIT:
        raise GuardError(f"enumeration needs q^n <= {BRUTE_LIMIT}")
    target = (np.array(b, dtype=np.int64) * (q // 2) % q)[:, None]
    Y = (np.array(A, dtype=np.int64) % q) @ _grid(q, n) % q
    return int(np.count_nonzero((Y == target).all(axis=0)))
