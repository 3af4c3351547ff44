"""Brute-force laboratory for the exponential-sum side: Smith forms and null
counts, complete sums modulo q, singular loci, the Poisson identity, and the
singular series and integral."""
from .expsums import (
    ComplexVal, check_multiplicativity, check_prop_n1, check_prop_t600,
    exp_sum_averaged, exp_sum_pointwise, primitive_kernel,
)
from .locus import d_of_q, e22_report, pencil_is_separable, singular_locus_dim, singular_points
from .poisson import omega, poisson_check, singular_integral, t_direct
from .polys import CubicPoly, Poly, QuadPoly, difference_cubic, poly_from_json
from .series import singular_series_partial, singular_series_term
from .smith import delta_q, lambda_q, n_b_count, null_average, null_count, smith_normal_form

__all__ = [
    "ComplexVal", "CubicPoly", "Poly", "QuadPoly", "check_multiplicativity",
    "check_prop_n1", "check_prop_t600", "d_of_q", "delta_q", "difference_cubic",
    "e22_report", "exp_sum_averaged", "exp_sum_pointwise", "lambda_q",
    "n_b_count", "null_average", "null_count", "omega", "pencil_is_separable",
    "poisson_check", "poly_from_json", "primitive_kernel", "singular_integral",
    "singular_locus_dim", "singular_points", "singular_series_partial",
    "singular_series_term", "smith_normal_form", "t_direct",
]
