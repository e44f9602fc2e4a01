"""Expansion of the odot bracket around the ordinary commutator.

With G = (2/hbar) sin(hbar J / 2) and theta = hbar J / 2,

    J = G * (theta / sin theta) = G * sum_k c_k theta^(2k),

so the odot bracket splits into terms of order hbar^(2k), each a sum of
commutators of subscript derivatives. See docs/odot_series.md.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .algebra import derivative_word
from .polynomials import OperatorPolynomial

__all__ = ["MAX_SERIES_ORDER", "theta_over_sin_coefficient", "odot_bracket_series_term"]

# Highest k accepted by odot_bracket_series_term.
MAX_SERIES_ORDER = 4


@lru_cache(maxsize=None)
def _bernoulli(m: int) -> Fraction:
    # Akiyama-Tanigawa; returns B_m with B_1 = +1/2 (irrelevant here, only even m used)
    a = [Fraction(0)] * (m + 1)
    for i in range(m + 1):
        a[i] = Fraction(1, i + 1)
        for j in range(i, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0]


@lru_cache(maxsize=None)
def theta_over_sin_coefficient(k: int) -> Fraction:
    """Taylor coefficient of theta^(2k) in theta / sin(theta).

    c_k = (-1)^(k+1) (2^(2k) - 2) B_(2k) / (2k)!, giving 1, 1/6, 7/360, 31/15120, ...
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return Fraction(1)
    return (-1) ** (k + 1) * (2 ** (2 * k) - 2) * _bernoulli(2 * k) / factorial(2 * k)


def odot_bracket_series_term(a: OperatorPolynomial, b: OperatorPolynomial, k: int) -> OperatorPolynomial:
    """Order hbar^(2k) contribution to the odot bracket of a and b.

    term_k = c_k (hbar/2)^(2k) sum_j C(2k, j) (-1)^j [A_{q^(2k-j) p^j}, B_{p^(2k-j) q^j}]

    k = 0 is the plain commutator [A, B]; summing all nonvanishing k
    reproduces :func:`odot_bracket` exactly for polynomials.

    Raises:
        ValueError: if ``k`` is negative or above ``MAX_SERIES_ORDER``.
    """
    if not 0 <= k <= MAX_SERIES_ORDER:
        raise ValueError(f"series order k={k} outside implemented range 0..{MAX_SERIES_ORDER}")
    n = 2 * k
    total = OperatorPolynomial.zero()
    for j in range(n + 1):
        left = derivative_word(a, n - j, j)
        if not left:
            continue
        right = derivative_word(b, j, n - j)
        if not right:
            continue
        total = total + left.commutator(right).scale(comb(n, j) * (-1) ** j)
    if not total:
        return total
    weight = theta_over_sin_coefficient(k) / Fraction(2**n)
    return total.scale(weight).times_hbar(n)


def series_order_bound(a: OperatorPolynomial, b: OperatorPolynomial) -> int:
    """Largest k whose term can be nonzero: 2k+1 derivatives must survive on both sides."""
    d = min(a.degree(), b.degree())
    return max((d - 1) // 2, 0)
