"""Randomized identity audit of the exact Weyl calculus.

Every check is an exact equality, so a single failure is a bug, not noise.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import (
    moyal_bracket,
    odot_bracket,
    odot_product,
    poisson_bracket,
    star_product,
    weyl_quantize,
    weyl_symbol,
)
from .coefficients import ComplexRational, HbarCoefficient
from .polynomials import OperatorPolynomial, PhasePolynomial
from .series import odot_bracket_series_term, series_order_bound
from .text import parse_operator, parse_phase, render

__all__ = [
    "random_phase_polynomial",
    "IdentityResult",
    "AuditReport",
    "star_discrepancy_record",
    "worked_example_checks",
    "run_symbolic_audit",
]

# Reference value of q^2 star p^3 that disagrees with the exact product; kept only for the discrepancy record.
PRINTED_Q2_STAR_P3 = "q^2*p^3 + 3*i*hbar*q*p^2 - 3*hbar^2*p"


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-6, 6), rng.choice((1, 1, 2, 3, 4)))


def random_phase_polynomial(
    rng: random.Random,
    max_degree: int = 4,
    max_terms: int = 4,
    real: bool = False,
    hbar_terms: bool = True,
) -> PhasePolynomial:
    """Draw a nonzero sparse polynomial of total degree <= max_degree."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            d = rng.randint(0, max_degree)
            a = rng.randint(0, d)
            coeffs = []
            for _k in range(rng.randint(1, 2) if hbar_terms else 1):
                im = Fraction(0) if real else _random_rational(rng)
                coeffs.append(ComplexRational(_random_rational(rng), im))
            terms[(a, d - a)] = HbarCoefficient(coeffs)
        poly = PhasePolynomial(terms)
        if poly:
            return poly


def _random_operator(rng, max_degree, **kw) -> OperatorPolynomial:
    return weyl_quantize(random_phase_polynomial(rng, max_degree, **kw))


# -- identities ---------------------------------------------------------------

def _roundtrip(rng, deg):
    a = random_phase_polynomial(rng, max(deg, 6))
    return weyl_symbol(weyl_quantize(a)) == a


def _hermiticity(rng, deg):
    a = random_phase_polynomial(rng, deg, real=True)
    return weyl_quantize(a).is_hermitian()


def _star_associativity(rng, deg):
    a, b, c = (random_phase_polynomial(rng, deg) for _ in range(3))
    return star_product(star_product(a, b), c) == star_product(a, star_product(b, c))


def _star_unit(rng, deg):
    a = random_phase_polynomial(rng, deg)
    one = PhasePolynomial.one()
    return star_product(one, a) == a and star_product(a, one) == a


def _star_operator_route(rng, deg):
    a, b = random_phase_polynomial(rng, deg), random_phase_polynomial(rng, deg)
    return star_product(a, b) == weyl_symbol(weyl_quantize(a) * weyl_quantize(b))


def _moyal_poisson(rng, deg):
    a, b = random_phase_polynomial(rng, deg), random_phase_polynomial(rng, deg)
    return moyal_bracket(a, b).hbar_to_zero() == poisson_bracket(a, b).hbar_to_zero()


def _odot_commutative(rng, deg):
    a, b = _random_operator(rng, deg), _random_operator(rng, deg)
    return odot_product(a, b) == odot_product(b, a)


def _odot_associative(rng, deg):
    a, b, c = (_random_operator(rng, deg) for _ in range(3))
    return odot_product(odot_product(a, b), c) == odot_product(a, odot_product(b, c))


def _bracket_correspondence(rng, deg):
    a, b = _random_operator(rng, deg), _random_operator(rng, deg)
    expected = weyl_quantize(poisson_bracket(weyl_symbol(a), weyl_symbol(b))).times_hbar(1)
    expected = expected.scale(ComplexRational(0, 1))
    return odot_bracket(a, b) == expected


def _odot_antisymmetry(rng, deg):
    a, b = _random_operator(rng, deg), _random_operator(rng, deg)
    return odot_bracket(a, b) == -odot_bracket(b, a)


def _jacobi(rng, deg):
    a, b, c = (_random_operator(rng, deg) for _ in range(3))
    total = (
        odot_bracket(odot_bracket(a, b), c)
        + odot_bracket(odot_bracket(b, c), a)
        + odot_bracket(odot_bracket(c, a), b)
    )
    return not total


def _derivation(rng, deg):
    a, b, c = (_random_operator(rng, deg) for _ in range(3))
    lhs = odot_bracket(a, odot_product(b, c))
    rhs = odot_product(c, odot_bracket(a, b)) + odot_product(b, odot_bracket(a, c))
    return lhs == rhs


def _series_reconstruction(rng, deg):
    a, b = _random_operator(rng, deg), _random_operator(rng, deg)
    total = OperatorPolynomial.zero()
    for k in range(series_order_bound(a, b) + 1):
        total = total + odot_bracket_series_term(a, b, k)
    return total == odot_bracket(a, b)


def _quadratic_degeneracy(rng, deg):
    a = random_phase_polynomial(rng, 2)
    b = random_phase_polynomial(rng, 2)
    if moyal_bracket(a, b) != poisson_bracket(a, b):
        return False
    qa, qb = weyl_quantize(a), weyl_quantize(b)
    return all(not odot_bracket_series_term(qa, qb, k) for k in (1, 2))


def monomial_product_law(max_power: int = 4) -> bool:
    """{q^k p^l} (.) {q^m p^n} == {q^(k+m) p^(l+n)} for all powers <= max_power."""
    rng = range(max_power + 1)
    for k in rng:
        for l in rng:
            w1 = weyl_quantize(PhasePolynomial.monomial(k, l))
            for m in rng:
                for n in rng:
                    w2 = weyl_quantize(PhasePolynomial.monomial(m, n))
                    if odot_product(w1, w2) != weyl_quantize(PhasePolynomial.monomial(k + m, l + n)):
                        return False
    return True


IDENTITIES = {
    "weyl_roundtrip": _roundtrip,
    "hermiticity": _hermiticity,
    "star_associativity": _star_associativity,
    "star_unit": _star_unit,
    "star_operator_route": _star_operator_route,
    "moyal_poisson_degeneration": _moyal_poisson,
    "odot_commutativity": _odot_commutative,
    "odot_associativity": _odot_associative,
    "bracket_correspondence": _bracket_correspondence,
    "odot_antisymmetry": _odot_antisymmetry,
    "odot_jacobi": _jacobi,
    "odot_derivation": _derivation,
    "series_reconstruction": _series_reconstruction,
    "quadratic_degeneracy": _quadratic_degeneracy,
}


@dataclass
class IdentityResult:
    name: str
    passed: int
    total: int
    seconds: float

    @property
    def ok(self) -> bool:
        return self.passed == self.total


@dataclass
class AuditReport:
    identities: list = field(default_factory=list)
    worked_examples: dict = field(default_factory=dict)
    star_discrepancy: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.identities) and all(self.worked_examples.values())


def star_discrepancy_record() -> dict:
    """Both the printed and the independently computed value of q^2 star p^3."""
    computed = star_product(parse_phase("q^2"), parse_phase("p^3"))
    printed = parse_phase(PRINTED_Q2_STAR_P3)
    return {
        "expression": "q^2 star p^3",
        "printed_value": render(printed),
        "computed_value": render(computed),
        "difference_computed_minus_printed": render(computed - printed),
        "agree": computed == printed,
    }


def worked_example_checks() -> dict:
    """Exact checks of the small worked examples quoted with the construction."""
    O, P = parse_operator, parse_phase
    return {
        "q_star_p": star_product(P("q"), P("p")) == P("q*p + i*hbar/2"),
        "p_star_q": star_product(P("p"), P("q")) == P("q*p - i*hbar/2"),
        "q_odot_p": odot_product(O("q"), O("p")) == O("(q*p + p*q)/2"),
        "p_odot_q": odot_product(O("p"), O("q")) == O("(q*p + p*q)/2"),
        "q2_odot_p3": odot_product(O("q^2"), O("p^3")) == O("(q^2*p^3 + 2*q*p^3*q + p^3*q^2)/4"),
        "p3_odot_q2": odot_product(O("p^3"), O("q^2")) == O("(q^2*p^3 + 2*q*p^3*q + p^3*q^2)/4"),
        "monomial_product_law": monomial_product_law(4),
    }


def run_symbolic_audit(instances: int = 200, max_degree: int = 4, seed: int = 0) -> AuditReport:
    """Run every identity on ``instances`` random draws each."""
    rng = random.Random(seed)
    report = AuditReport()
    for name, check in IDENTITIES.items():
        start = time.perf_counter()
        passed = sum(bool(check(rng, max_degree)) for _ in range(instances))
        report.identities.append(IdentityResult(name, passed, instances, time.perf_counter() - start))
    report.worked_examples = worked_example_checks()
    report.star_discrepancy = star_discrepancy_record()
    return report
