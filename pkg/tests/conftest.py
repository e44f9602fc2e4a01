import itertools
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import strategies as st

from semiquantum.symbolic import ComplexRational, HbarCoefficient, OperatorPolynomial, PhasePolynomial

HBAR = sp.Symbol("hbar", real=True)
Q, P = sp.symbols("q p", real=True)


def coeff_to_sympy(c: HbarCoefficient):
    return sum(
        (sp.Rational(x.re.numerator, x.re.denominator) + sp.I * sp.Rational(x.im.numerator, x.im.denominator))
        * HBAR**k
        for k, x in enumerate(c.coeffs)
    )


def phase_to_sympy(poly: PhasePolynomial):
    return sp.expand(sum((coeff_to_sympy(c) * Q**a * P**b for (a, b), c in poly.items()), sp.Integer(0)))


def operator_to_dict(op: OperatorPolynomial) -> dict:
    """Normal-form words (r, s) -> sympy coefficient in hbar."""
    return {k: sp.expand(coeff_to_sympy(c)) for k, c in op.items()}


def rewrite_normal_order(word: str, coeff=sp.Integer(1)) -> dict:
    """Brute-force normal ordering by repeatedly replacing 'pq' with 'qp' - i hbar."""
    pending = {word: coeff}
    done: dict = {}
    while pending:
        w, c = pending.popitem()
        idx = w.find("pq")
        if idx < 0:
            key = (w.count("q"), w.count("p"))
            done[key] = sp.expand(done.get(key, 0) + c)
            continue
        swapped = w[:idx] + "qp" + w[idx + 2:]
        dropped = w[:idx] + w[idx + 2:]
        pending[swapped] = sp.expand(pending.get(swapped, 0) + c)
        pending[dropped] = sp.expand(pending.get(dropped, 0) - sp.I * HBAR * c)
    return {k: v for k, v in done.items() if v != 0}


def full_symmetrization(r: int, s: int) -> dict:
    """Average of all distinct orderings of r q's and s p's, normal ordered."""
    words = {"".join(w) for w in itertools.permutations("q" * r + "p" * s)}
    total: dict = {}
    for w in words:
        for k, v in rewrite_normal_order(w, sp.Rational(1, len(words))).items():
            total[k] = sp.expand(total.get(k, 0) + v)
    return {k: v for k, v in total.items() if v != 0}


def sympy_star(a, b, max_order=12):
    """Bidifferential series evaluated independently with sympy derivatives."""
    total = 0
    for n in range(max_order + 1):
        jn = 0
        for j in range(n + 1):
            left = sp.diff(a, Q, n - j, P, j) if n else a
            right = sp.diff(b, P, n - j, Q, j) if n else b
            jn += sp.binomial(n, j) * (-1) ** j * left * right
        total += (sp.I * HBAR / 2) ** n / sp.factorial(n) * jn
    return sp.expand(total)


small_rationals = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def phase_polynomials(draw, max_degree=4, real=False, max_terms=4):
    n_terms = draw(st.integers(1, max_terms))
    terms = {}
    for _ in range(n_terms):
        d = draw(st.integers(0, max_degree))
        a = draw(st.integers(0, d))
        n_hbar = draw(st.integers(1, 2))
        coeffs = []
        for _k in range(n_hbar):
            re = draw(small_rationals)
            im = Fraction(0) if real else draw(small_rationals)
            coeffs.append(ComplexRational(re, im))
        terms[(a, d - a)] = HbarCoefficient(coeffs)
    return PhasePolynomial(terms)


@pytest.fixture
def hbar_symbol():
    return HBAR
