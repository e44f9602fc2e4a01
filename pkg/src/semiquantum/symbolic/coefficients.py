"""Exact coefficient ring: complex rationals and polynomials in a formal hbar.

Rationals are gmpy2 ``mpq`` values; they compare and hash equal to the
matching ``fractions.Fraction`` and are several times faster to multiply.
"""
from __future__ import annotations

from numbers import Rational

from gmpy2 import mpq, mpz

__all__ = ["ComplexRational", "HbarCoefficient", "as_coefficient"]

_ZERO = mpq(0)
_EXACT = (int, mpz, mpq, Rational)


def _rational(value):
    if isinstance(value, bool) or not isinstance(value, _EXACT):
        if isinstance(value, str):
            return mpq(value)
        raise TypeError(f"cannot use {type(value).__name__} as an exact rational")
    return mpq(value)


class ComplexRational:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, ComplexRational):
            re, im = re.re, re.im + _rational(im)
        self.re = _rational(re)
        self.im = _rational(im)

    @classmethod
    def _raw(cls, re, im) -> "ComplexRational":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    @classmethod
    def coerce(cls, value) -> "ComplexRational":
        if isinstance(value, ComplexRational):
            return value
        if isinstance(value, _EXACT) and not isinstance(value, bool):
            return cls._raw(mpq(value), _ZERO)
        if isinstance(value, complex):
            raise TypeError("floating point complex values are not exact; pass ComplexRational")
        raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")

    def __add__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational._raw(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ComplexRational.coerce(other)
        return ComplexRational._raw(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return ComplexRational.coerce(other) - self

    def __mul__(self, other):
        other = ComplexRational.coerce(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return ComplexRational._raw(a * c, _ZERO)
        return ComplexRational._raw(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ComplexRational.coerce(other)
        den = other.re * other.re + other.im * other.im
        if not den:
            raise ZeroDivisionError("division by zero complex rational")
        num = self * other.conjugate()
        return ComplexRational._raw(num.re / den, num.im / den)

    def __neg__(self):
        return ComplexRational._raw(-self.re, -self.im)

    def conjugate(self) -> "ComplexRational":
        return ComplexRational._raw(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = ComplexRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"ComplexRational({self.re}, {self.im})"


I = ComplexRational(0, 1)
ONE = ComplexRational(1)
ZERO = ComplexRational(0)


class HbarCoefficient:
    """Polynomial in the formal parameter hbar with ComplexRational coefficients.

    ``coeffs[k]`` is the coefficient of ``hbar**k``; trailing zeros are trimmed
    so the zero polynomial is the empty tuple.
    """

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs=()):
        cs = [ComplexRational.coerce(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)
        self._hash = None

    @classmethod
    def _trusted(cls, cs: list) -> "HbarCoefficient":
        while cs and not cs[-1]:
            cs.pop()
        obj = object.__new__(cls)
        obj.coeffs = tuple(cs)
        obj._hash = None
        return obj

    @classmethod
    def constant(cls, value) -> "HbarCoefficient":
        return cls._trusted([ComplexRational.coerce(value)])

    @classmethod
    def hbar_power(cls, k: int, value=1) -> "HbarCoefficient":
        return cls._trusted([ZERO] * k + [ComplexRational.coerce(value)])

    # -- ring operations --------------------------------------------------
    def __add__(self, other):
        other = as_coefficient(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for k, c in enumerate(b):
            cs[k] = cs[k] + c
        return HbarCoefficient._trusted(cs)

    __radd__ = __add__

    def __neg__(self):
        return HbarCoefficient._trusted([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-as_coefficient(other))

    def __rsub__(self, other):
        return as_coefficient(other) - self

    def __mul__(self, other):
        other = as_coefficient(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return _ZERO_COEFF
        if len(b) == 1:
            c = b[0]
            return HbarCoefficient._trusted([x * c for x in a])
        if len(a) == 1:
            c = a[0]
            return HbarCoefficient._trusted([c * x for x in b])
        cs = [ZERO] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                cs[i + j] = cs[i + j] + x * y
        return HbarCoefficient._trusted(cs)

    __rmul__ = __mul__

    def shift(self, k: int) -> "HbarCoefficient":
        """Multiply by ``hbar**k``; negative ``k`` divides and requires exactness."""
        if k >= 0:
            return HbarCoefficient._trusted([ZERO] * k + list(self.coeffs)) if self.coeffs else self
        k = -k
        if any(self.coeffs[:k]):
            raise ArithmeticError(f"coefficient is not divisible by hbar^{k}")
        return HbarCoefficient._trusted(list(self.coeffs[k:]))

    def conjugate(self) -> "HbarCoefficient":
        """Complex conjugation with hbar treated as real."""
        return HbarCoefficient._trusted([c.conjugate() for c in self.coeffs])

    def at_zero(self) -> "HbarCoefficient":
        """Set every appearance of hbar to the formal value 0."""
        return HbarCoefficient._trusted(list(self.coeffs[:1]))

    def evaluate(self, hbar: float) -> complex:
        total = 0j
        for c in reversed(self.coeffs):
            total = total * hbar + complex(c)
        return total

    def is_real(self) -> bool:
        return all(not c.im for c in self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        try:
            other = as_coefficient(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.coeffs)
        return self._hash

    def __repr__(self):
        return f"HbarCoefficient({list(self.coeffs)!r})"


_ZERO_COEFF = HbarCoefficient._trusted([])


def as_coefficient(value) -> HbarCoefficient:
    """Coerce ints, Fractions, ComplexRationals to a constant HbarCoefficient."""
    if isinstance(value, HbarCoefficient):
        return value
    c = ComplexRational.coerce(value)
    return HbarCoefficient._trusted([c]) if c else _ZERO_COEFF
