"""Exact Weyl calculus on polynomial observables.

Everything here is rational arithmetic with hbar kept as a formal variable, so
identities between the products and brackets can be checked by equality.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial

from .coefficients import ComplexRational, HbarCoefficient
from .polynomials import OperatorPolynomial, PhasePolynomial

__all__ = [
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
]

_I = ComplexRational(0, 1)
_MINUS_I = ComplexRational(0, -1)


def normal_form(word_product) -> OperatorPolynomial:
    """Reduce a product of canonical-operator powers to normal form.

    Args:
        word_product: sequence of ``(letter, power)`` pairs with letter ``'q'``
            or ``'p'``, read left to right; a bare string such as ``"ppq"`` is
            also accepted (one letter per factor).

    Returns:
        The product as an OperatorPolynomial with every word ``q^r p^s``.
    """
    if isinstance(word_product, str):
        word_product = [(ch, 1) for ch in word_product]
    out = OperatorPolynomial.one()
    for letter, power in word_product:
        if power < 0:
            raise ValueError("powers must be nonnegative")
        if letter == "q":
            factor = OperatorPolynomial.monomial(power, 0)
        elif letter == "p":
            factor = OperatorPolynomial.monomial(0, power)
        else:
            raise ValueError(f"unknown generator {letter!r}")
        out = out * factor
    return out


def poisson_bracket(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    """A J B = A_q B_p - A_p B_q."""
    return a.derivative("q") * b.derivative("p") - a.derivative("p") * b.derivative("q")


def bidifferential(a: PhasePolynomial, b: PhasePolynomial, n: int) -> PhasePolynomial:
    """A J^n B, with J = dq(left) dp(right) - dp(left) dq(right)."""
    out = PhasePolynomial.zero()
    for j in range(n + 1):
        left = a.partial(n - j, j)
        if not left:
            continue
        right = b.partial(j, n - j)
        if not right:
            continue
        c = comb(n, j) * (-1) ** j
        out = out + (left * right).scale(c)
    return out


def _max_order(a: PhasePolynomial, b: PhasePolynomial) -> int:
    # A J^n B vanishes once n exceeds the smaller total degree
    return min(a.degree(), b.degree())


def star_product(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    """Groenewold-Moyal product, summed to termination.

    A * B = sum_n (i hbar / 2)^n / n! A J^n B.
    """
    if not a or not b:
        return PhasePolynomial.zero()
    out = PhasePolynomial.zero()
    for n in range(_max_order(a, b) + 1):
        term = bidifferential(a, b, n)
        if not term:
            continue
        weight = _I_POWERS[n % 4] * Fraction(1, factorial(n) * 2**n)
        out = out + term.scale(HbarCoefficient.hbar_power(n, weight))
    return out


_I_POWERS = (
    ComplexRational(1),
    ComplexRational(0, 1),
    ComplexRational(-1),
    ComplexRational(0, -1),
)


def moyal_bracket(a: PhasePolynomial, b: PhasePolynomial) -> PhasePolynomial:
    """(A * B - B * A) / (i hbar), exact."""
    diff = star_product(a, b) - star_product(b, a)
    return diff.scale(_MINUS_I).times_hbar(-1)


@lru_cache(maxsize=None)
def _quantized_monomial(r: int, s: int) -> OperatorPolynomial:
    # 2^-r sum_k C(r,k) q^k p^s q^(r-k)
    total = OperatorPolynomial.zero()
    ps = OperatorPolynomial.monomial(0, s)
    for k in range(r + 1):
        word = OperatorPolynomial.monomial(k, 0) * ps * OperatorPolynomial.monomial(r - k, 0)
        total = total + word.scale(comb(r, k))
    return total.scale(Fraction(1, 2**r))


def weyl_quantize(a: PhasePolynomial) -> OperatorPolynomial:
    """Weyl map: each monomial q^r p^s becomes its symmetrized operator {q^r p^s}."""
    out: dict = {}
    for (r, s), c in a.items():
        for key, w in _quantized_monomial(r, s).items():
            prev = out.get(key)
            term = c * w
            out[key] = term if prev is None else prev + term
    return OperatorPolynomial._trusted(out)


def weyl_symbol(op: OperatorPolynomial) -> PhasePolynomial:
    """Inverse of :func:`weyl_quantize`.

    {q^r p^s} equals q^r p^s plus strictly lower words, so the normal-form
    basis is peeled off from the top total degree downwards.
    """
    remaining = dict(op.items())
    symbol: dict = {}
    while remaining:
        key = max(remaining, key=lambda k: (k[0] + k[1], k))
        c = remaining.pop(key)
        symbol[key] = c
        for k2, w in _quantized_monomial(*key).items():
            if k2 == key:
                continue
            prev = remaining.get(k2)
            val = -(c * w) if prev is None else prev - c * w
            if val:
                remaining[k2] = val
            else:
                remaining.pop(k2, None)
    return PhasePolynomial._trusted(symbol)


def odot_product(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    """Commutative product: quantized pointwise product of the two symbols."""
    return weyl_quantize(weyl_symbol(a) * weyl_symbol(b))


def _over_i_hbar(op: OperatorPolynomial) -> OperatorPolynomial:
    return op.scale(_MINUS_I).times_hbar(-1)


def subscript_derivative(op: OperatorPolynomial, axis: str) -> OperatorPolynomial:
    """Operator image of a phase-space partial derivative.

    axis 'q': (1/i hbar)[A, p];  axis 'p': (1/i hbar)[q, A].
    """
    if axis == "q":
        return _over_i_hbar(op.commutator(OperatorPolynomial.p()))
    if axis == "p":
        return _over_i_hbar(OperatorPolynomial.q().commutator(op))
    raise ValueError(f"axis must be 'q' or 'p', got {axis!r}")


def derivative_word(op: OperatorPolynomial, nq: int, np_: int) -> OperatorPolynomial:
    """Apply the q-derivative nq times and the p-derivative np_ times."""
    out = op
    for _ in range(nq):
        if not out:
            break
        out = subscript_derivative(out, "q")
    for _ in range(np_):
        if not out:
            break
        out = subscript_derivative(out, "p")
    return out


def odot_bracket(a: OperatorPolynomial, b: OperatorPolynomial) -> OperatorPolynomial:
    """i hbar (A_q (.) B_p - A_p (.) B_q)."""
    aq, ap = subscript_derivative(a, "q"), subscript_derivative(a, "p")
    bq, bp = subscript_derivative(b, "q"), subscript_derivative(b, "p")
    inner = odot_product(aq, bp) - odot_product(ap, bq)
    return inner.scale(_I).times_hbar(1)
