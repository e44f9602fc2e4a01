"""Exact polynomial Weyl calculus with hbar as a formal parameter."""
from .algebra import (
    bidifferential,
    derivative_word,
    moyal_bracket,
    normal_form,
    odot_bracket,
    odot_product,
    poisson_bracket,
    star_product,
    subscript_derivative,
    weyl_quantize,
    weyl_symbol,
)
from .coefficients import ComplexRational, HbarCoefficient
from .polynomials import OperatorPolynomial, PhasePolynomial
from .series import MAX_SERIES_ORDER, odot_bracket_series_term, theta_over_sin_coefficient
from .text import PolynomialSyntaxError, parse_operator, parse_phase, render

__all__ = [
    "ComplexRational",
    "HbarCoefficient",
    "PhasePolynomial",
    "OperatorPolynomial",
    "normal_form",
    "poisson_bracket",
    "bidifferential",
    "star_product",
    "moyal_bracket",
    "weyl_quantize",
    "weyl_symbol",
    "odot_product",
    "subscript_derivative",
    "derivative_word",
    "odot_bracket",
    "odot_bracket_series_term",
    "theta_over_sin_coefficient",
    "MAX_SERIES_ORDER",
    "render",
    "parse_phase",
    "parse_operator",
    "PolynomialSyntaxError",
]
