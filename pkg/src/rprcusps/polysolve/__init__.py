"""Multiprecision polynomial engine: dense arithmetic, resultants, real roots."""

from .poly import BiPoly, UniPoly
from .precision import (
    DEFAULT_DIGITS,
    bits_for_digits,
    current_digits,
    digits_for_bits,
    to_mpf,
    working_precision,
)
from .resultant import determinant, sylvester_matrix, sylvester_resultant_in_t
from .roots import RealRoot, real_roots, solve_for_second_var

__all__ = [
    "BiPoly",
    "DEFAULT_DIGITS",
    "RealRoot",
    "UniPoly",
    "bits_for_digits",
    "current_digits",
    "determinant",
    "digits_for_bits",
    "real_roots",
    "solve_for_second_var",
    "sylvester_matrix",
    "sylvester_resultant_in_t",
    "to_mpf",
    "working_precision",
]
