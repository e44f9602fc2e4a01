"""Plain-text form of polynomials.

Grammar (whitespace is ignored)::

    expr    := ['+' | '-'] term (('+' | '-') term)*
    term    := factor (('*' | '/') factor)*
    factor  := atom ['^' INTEGER]
    atom    := INTEGER | 'i' | 'hbar' | 'q' | 'p' | '(' expr ')'

Division is only allowed by a nonzero rational constant. For operator
polynomials ``*`` is the noncommutative product, so ``p*q`` parses to
``q*p - i*hbar``.

Rendering emits one additive term per (q-power, p-power, hbar-power) triple,
monomials in descending lexicographic order and hbar powers ascending within
a monomial, complex rational coefficient first, e.g.
``q^2*p^3 + 3*i*hbar*q*p^2 - 3/2*hbar^2*p``. Operator words print in normal
order, so ``parse(render(x)) == x`` for both kinds.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .coefficients import ComplexRational, HbarCoefficient
from .polynomials import OperatorPolynomial, PhasePolynomial, _SparsePolynomial

__all__ = ["render", "parse_phase", "parse_operator", "PolynomialSyntaxError"]


class PolynomialSyntaxError(ValueError):
    pass


def _render_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _render_term(c: ComplexRational, factors: list[str]) -> tuple[str, str]:
    """Return (sign, body) for coefficient c times the factor list."""
    re_, im = c.re, c.im
    if re_ and im:
        sign = "+"
        coeff = f"({_render_rational(re_)} {'+' if im > 0 else '-'} {_render_rational(abs(im))}*i)"
        parts = [coeff] + factors
        return sign, "*".join(parts)
    if re_:
        sign, mag, unit = ("-" if re_ < 0 else "+"), abs(re_), None
    else:
        sign, mag, unit = ("-" if im < 0 else "+"), abs(im), "i"
    parts = []
    if mag != 1 or (unit is None and not factors):
        parts.append(_render_rational(mag))
    if unit:
        parts.append(unit)
    parts.extend(factors)
    return sign, "*".join(parts)


def _power(name: str, k: int) -> list[str]:
    if k == 0:
        return []
    return [name] if k == 1 else [f"{name}^{k}"]


def render(poly: _SparsePolynomial) -> str:
    """Canonical text for a PhasePolynomial or OperatorPolynomial."""
    pieces = []
    for (a, b), coeff in reversed(list(poly.items())):
        for k, c in enumerate(coeff.coeffs):
            if not c:
                continue
            factors = _power("hbar", k) + _power("q", a) + _power("p", b)
            pieces.append(_render_term(c, factors))
    if not pieces:
        return "0"
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


_TOKEN = re.compile(r"\s*(?:(\d+)|(hbar|i|q|p)|(\^|\*|/|\+|-|\(|\)))")


def _tokenize(text: str) -> list[tuple[str, str]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolynomialSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        if m.group(1):
            tokens.append(("int", m.group(1)))
        elif m.group(2):
            tokens.append(("name", m.group(2)))
        else:
            tokens.append(("op", m.group(3)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str, cls):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.cls = cls

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise PolynomialSyntaxError(f"expected {want} at token {self.pos}, got {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        if not self.tokens:
            raise PolynomialSyntaxError("empty expression")
        out = self.expr()
        if self.pos != len(self.tokens):
            raise PolynomialSyntaxError(f"trailing input at token {self.pos}: {self.peek()[1]!r}")
        return out

    def expr(self):
        sign = 1
        if self.peek() in (("op", "+"), ("op", "-")):
            sign = -1 if self.take()[1] == "-" else 1
        out = self.term()
        if sign < 0:
            out = -out
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self):
        out = self.factor()
        while self.peek() in (("op", "*"), ("op", "/")):
            op = self.take()[1]
            rhs = self.factor()
            if op == "*":
                out = out * rhs
            else:
                den = _as_rational_constant(rhs)
                if not den:
                    raise PolynomialSyntaxError("division by zero")
                out = out.scale(1 / den)
        return out

    def factor(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            k = int(self.take("int")[1])
            base = base**k
        return base

    def atom(self):
        kind, value = self.peek()
        cls = self.cls
        if kind == "int":
            self.take()
            return cls.constant(int(value))
        if kind == "name":
            self.take()
            if value == "q":
                return cls.monomial(1, 0)
            if value == "p":
                return cls.monomial(0, 1)
            if value == "hbar":
                return cls.hbar()
            return cls.constant(ComplexRational(0, 1))
        if (kind, value) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise PolynomialSyntaxError(f"unexpected token {value!r} at position {self.pos}")


def _as_rational_constant(poly: _SparsePolynomial) -> Fraction:
    terms = poly.terms
    if set(terms) != {(0, 0)}:
        raise PolynomialSyntaxError("division is only defined by a nonzero rational constant")
    coeff: HbarCoefficient = terms[(0, 0)]
    if len(coeff.coeffs) != 1 or coeff.coeffs[0].im:
        raise PolynomialSyntaxError("division is only defined by a nonzero rational constant")
    return coeff.coeffs[0].re


def parse_phase(text: str) -> PhasePolynomial:
    """Parse text into a commutative PhasePolynomial."""
    return _Parser(text, PhasePolynomial).parse()


def parse_operator(text: str) -> OperatorPolynomial:
    """Parse text into an OperatorPolynomial; products are taken in the written order."""
    return _Parser(text, OperatorPolynomial).parse()
