"""The smooth weight, the Poisson-summation identity for quadratic sums, and
the singular integral.

The weight is ``omega(x) = gamma((x - x0) / rho)`` with
``gamma(u) = prod_j exp(-1 / (1 - u_j^2))`` on the open cube ``|u_j| < 1``.
It is a product of one-dimensional bumps, which the quadratures exploit.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..errors import GuardError, QuadratureError
from ..rational import as_rational
from .expsums import primitive_kernel
from .smith import _grid

__all__ = [
    "bump1d", "bump", "omega", "poly_float", "t_direct", "exp_integral_table",
    "poisson_check", "singular_integral", "singular_integral_tensor",
    "MAX_DIRECT_POINTS",
]

MAX_DIRECT_POINTS = 200


def bump1d(t) -> np.ndarray:
    t = np.asarray(t, dtype=np.float64)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


def bump(u) -> np.ndarray:
    """``gamma`` on an ``(..., n)`` array of points."""
    u = np.asarray(u, dtype=np.float64)
    return np.prod(bump1d(u), axis=-1)


def omega(x, x0: Sequence, rho) -> np.ndarray:
    x0 = np.array([float(as_rational(v)) for v in x0])
    return bump((np.asarray(x, dtype=np.float64) - x0) / float(as_rational(rho)))


def poly_float(p, X: np.ndarray) -> np.ndarray:
    """Evaluate a polynomial (``Poly`` or ``QuadPoly``) on a float ``(n, N)`` array."""
    if hasattr(p, "matrix"):
        M = np.array(p.matrix, dtype=np.float64)
        b = np.array(p.linear, dtype=np.float64)
        return (X * (M @ X)).sum(axis=0) + b @ X + p.constant
    out = np.zeros(X.shape[1])
    for e, c in p.terms:
        term = np.full(X.shape[1], float(c))
        for xi, ei in zip(X, e):
            if ei:
                term = term * xi ** ei
        out += term
    return out


def _box(x0, rho, scale) -> list:
    """Per-axis closed intervals ``scale * (x0_j -/+ rho)``."""
    rho = as_rational(rho)
    return [(scale * (as_rational(c) - rho), scale * (as_rational(c) + rho)) for c in x0]


def _exact_phase(z: Fraction, vals: np.ndarray) -> np.ndarray:
    """``z * vals mod 1`` computed in integers, returned as floats in [0, 1)."""
    num = np.array([int(v) for v in vals], dtype=object) * z.numerator % z.denominator
    return np.array(num, dtype=np.float64) / z.denominator


def t_direct(F, G, q: int, z, P: int, rho, x0) -> complex:
    """``T(q, z) = sum over primitive a, sum over integer y of omega(y/P) e((a1/q + z1) F(y) + (a2/q + z2) G(y))``."""
    z1, z2 = (as_rational(v) for v in z)
    n = F.n
    axes = []
    for lo, hi in _box(x0, rho, P):
        ys = np.arange(math.ceil(lo), math.floor(hi) + 1, dtype=np.int64)
        if len(ys) > MAX_DIRECT_POINTS:
            raise GuardError(f"direct sum limited to {MAX_DIRECT_POINTS} points per axis")
        axes.append(ys)
    Y = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)
    w = omega((Y / P).T, x0, rho)
    keep = w > 0
    Y, w = Y[:, keep], w[keep]
    Fv, Gv = F.values(Y), G.values(Y)
    K = primitive_kernel(q)[Fv % q, Gv % q]
    ph = _exact_phase(z1, Fv) + _exact_phase(z2, Gv)
    return complex(np.sum(w * K * np.exp(2j * np.pi * ph)))


def _residue_sums(F, G, q: int) -> np.ndarray:
    """``S(q; r)`` for every residue vector ``r``, as an array of shape ``(q,)*n``."""
    n = F.n
    X = _grid(q, n)
    C = primitive_kernel(q)[F.values(X, q), G.values(X, q)].astype(np.float64).reshape((q,) * n)
    E = np.exp(2j * np.pi * np.outer(np.arange(q), np.arange(q)) / q)
    out = C.astype(np.complex128)
    for axis in range(n):
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [axis])), 0, axis)
    return out


def exp_integral_table(F, G, z, P: int, rho, x0, freqs: np.ndarray, per_unit: int) -> np.ndarray:
    """``I(z; k)`` for every ``k`` in the tensor grid ``freqs x ... x freqs``.

    Trapezoid rule with ``per_unit`` nodes per unit length; the integrand and
    all its derivatives vanish on the boundary of the support.  The Fourier
    kernel is separable, so the table is a chain of matrix products.
    """
    n = F.n
    z1, z2 = (float(as_rational(v)) for v in z)
    axes = []
    for lo, hi in _box(x0, rho, P):
        lo, hi = float(lo), float(hi)
        k = int(math.ceil((hi - lo) * per_unit))
        axes.append(lo + np.arange(k + 1) * (hi - lo) / k)
    hs = [ax[1] - ax[0] for ax in axes]
    mesh = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)
    g = omega((mesh / P).T, x0, rho) * np.exp(2j * np.pi * (z1 * poly_float(F, mesh) + z2 * poly_float(G, mesh)))
    g = g.reshape([len(a) for a in axes])
    out = g
    for axis, ax in enumerate(axes):
        E = np.exp(-2j * np.pi * np.outer(freqs, ax)) * hs[axis]
        out = np.moveaxis(np.tensordot(E, out, axes=([1], [axis])), 0, axis)
    return out


def poisson_check(F, G, q: int, z, P: int, m_cut: int, rho=Fraction(1, 2), x0=None,
                  per_unit: int | None = None, tol: float = 1e-9) -> dict:
    """Both sides of ``T(q, z) = q^-n sum_m S(q; m) I(z; m/q)`` with ``|m| <= m_cut``.

    The frequency sum is truncated; the decay of ``I`` in ``m`` is what makes
    the truncation harmless, and that tail estimate is not checked here.
    Raises :class:`QuadratureError` if doubling the node density moves the
    right-hand side by more than ``tol``.
    """
    n = F.n
    if n > 2:
        raise GuardError("poisson_check supports n <= 2")
    x0 = [Fraction(0)] * n if x0 is None else list(x0)
    lhs = t_direct(F, G, q, z, P, rho, x0)
    S = _residue_sums(F, G, q)
    ms = np.arange(-m_cut, m_cut + 1)
    freqs = ms / q
    S_full = S[np.ix_(*([ms % q] * n))]
    if per_unit is None:
        per_unit = int(math.ceil(m_cut / q)) + 24

    def rhs_at(k):
        I = exp_integral_table(F, G, z, P, rho, x0, freqs, k)
        return complex(np.sum(S_full * I)) / q ** n

    coarse = rhs_at(per_unit)
    rhs = rhs_at(2 * per_unit)
    if abs(rhs - coarse) > tol * max(1.0, abs(rhs)):
        raise QuadratureError(f"quadrature not converged: change {abs(rhs - coarse):.3e}")
    return {"lhs": lhs, "rhs": rhs, "abs_diff": abs(lhs - rhs), "refinement_change": abs(rhs - coarse)}


def _midpoints(x0, rho, grid: int) -> list:
    out = []
    for lo, hi in _box(x0, rho, 1):
        lo, hi = float(lo), float(hi)
        step = (hi - lo) / grid
        out.append(lo + step * (np.arange(grid) + 0.5))
    return out


def singular_integral(F, G, R, rho, x0, grid: int) -> float:
    """``J(R) = int_{|z| < R} int omega(x) e(z1 F(x) + z2 G(x)) dx dz``.

    The ``z`` integral over the square is done in closed form,
    ``int_{-R}^{R} e(z u) dz = 2R sinc(2R u)``, leaving a real integrand in
    ``x`` that is summed with the tensor midpoint rule (``grid`` nodes per axis).
    """
    n = F.n
    if n > 3:
        raise GuardError("singular_integral supports n <= 3")
    if grid > 200 or grid < 1:
        raise GuardError("grid must be in 1..200")
    R = float(as_rational(R))
    axes = _midpoints(x0, rho, grid)
    mesh = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)
    w = omega(mesh.T, x0, rho)
    vol = np.prod([ax[1] - ax[0] if len(ax) > 1 else 2 * float(as_rational(rho)) for ax in axes])
    f = 2 * R * np.sinc(2 * R * poly_float(F, mesh)) * 2 * R * np.sinc(2 * R * poly_float(G, mesh))
    return float(np.sum(w * f) * vol)


def singular_integral_tensor(F, G, R, rho, x0, grid: int, zgrid: int) -> complex:
    """Same integral with the ``z`` square also discretized (midpoint rule); a
    cross-check for :func:`singular_integral`."""
    n = F.n
    R = float(as_rational(R))
    axes = _midpoints(x0, rho, grid)
    mesh = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n, -1)
    w = omega(mesh.T, x0, rho)
    vol = np.prod([ax[1] - ax[0] if len(ax) > 1 else 2 * float(as_rational(rho)) for ax in axes])
    zs = -R + (2 * R / zgrid) * (np.arange(zgrid) + 0.5)
    dz = 2 * R / zgrid
    Fv, Gv = poly_float(F, mesh), poly_float(G, mesh)
    A = np.exp(2j * np.pi * np.outer(zs, Fv)).sum(axis=0) * dz
    B = np.exp(2j * np.pi * np.outer(zs, Gv)).sum(axis=0) * dz
    return complex(np.sum(w * A * B) * vol)
