"""Exact verification of piecewise-linear minor-arc exponent bounds, with a
small numerical lab for the exponential sums behind them.

The exact side (``pwl``, ``polytope``, ``minmax``, ``bounds``) uses rational
arithmetic throughout.  ``arcbound.numlab`` holds the floating-point and
brute-force experiments and is imported on demand.
"""
from .bounds import (
    BoundParams, VerificationReport, build_bound_family, domains, sample_floor,
    verify_minor_arcs,
)
from .errors import (
    ArcboundError, EngineDisagreementError, GuardError, IndeterminateError,
    InfeasibleDomainError, ParseError, QuadratureError, UnboundedDomainError,
    UnboundVariableError,
)
from .minmax import max_min, max_min_union
from .polytope import Constraint, Polytope
from .pwl import AffineForm, pmax, pmin, var, const
from .rational import format_rational, parse_rational

__version__ = "0.1.0"

__all__ = [
    "AffineForm", "ArcboundError", "BoundParams", "Constraint",
    "EngineDisagreementError", "GuardError", "IndeterminateError",
    "InfeasibleDomainError", "ParseError", "Polytope", "QuadratureError",
    "UnboundVariableError", "UnboundedDomainError", "VerificationReport",
    "build_bound_family", "const", "domains", "format_rational", "max_min",
    "max_min_union", "parse_rational", "pmax", "pmin", "sample_floor", "var",
    "verify_minor_arcs", "__version__",
]
