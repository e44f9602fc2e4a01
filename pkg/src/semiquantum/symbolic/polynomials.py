"""Sparse polynomial observables (commuting) and Weyl-algebra elements (normal form)."""
from __future__ import annotations

from functools import lru_cache
from math import comb, factorial

from .coefficients import ComplexRational, HbarCoefficient, as_coefficient

__all__ = ["PhasePolynomial", "OperatorPolynomial", "falling"]

# (-i)**k for k mod 4
_MINUS_I_POWERS = (
    ComplexRational(1),
    ComplexRational(0, -1),
    ComplexRational(-1),
    ComplexRational(0, 1),
)


def falling(n: int, k: int) -> int:
    """Falling factorial n (n-1) ... (n-k+1); zero when k > n."""
    if k > n:
        return 0
    out = 1
    for j in range(k):
        out *= n - j
    return out


def _scalar(value):
    """Scalars accepted by polynomial scaling: exact numbers or HbarCoefficients."""
    return as_coefficient(value)


class _SparsePolynomial:
    """Immutable map from exponent pairs to nonzero HbarCoefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for key, c in terms.items():
                a, b = key
                if a < 0 or b < 0:
                    raise ValueError(f"negative exponent in {key}")
                c = as_coefficient(c)
                if c:
                    clean[(int(a), int(b))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, terms: dict):
        obj = object.__new__(cls)
        obj._terms = {k: c for k, c in terms.items() if c}
        obj._hash = None
        return obj

    @classmethod
    def zero(cls):
        return cls._trusted({})

    @classmethod
    def one(cls):
        return cls._trusted({(0, 0): as_coefficient(1)})

    @classmethod
    def constant(cls, value):
        return cls._trusted({(0, 0): _scalar(value)})

    @classmethod
    def monomial(cls, a: int, b: int, coeff=1):
        return cls({(a, b): coeff})

    @classmethod
    def hbar(cls, power: int = 1):
        return cls._trusted({(0, 0): HbarCoefficient.hbar_power(power)})

    @property
    def terms(self) -> dict:
        """Copy of the term map, ordered lexicographically by exponent pair."""
        return {k: self._terms[k] for k in sorted(self._terms)}

    def items(self):
        for k in sorted(self._terms):
            yield k, self._terms[k]

    def coefficient(self, a: int, b: int) -> HbarCoefficient:
        return self._terms.get((a, b), as_coefficient(0))

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree in the two generators; -1 for the zero polynomial."""
        return max((a + b for a, b in self._terms), default=-1)

    def hbar_degree(self) -> int:
        return max((len(c.coeffs) - 1 for c in self._terms.values()), default=-1)

    def _combine(self, other, sign: int):
        if not isinstance(other, type(self)):
            other = type(self).constant(other)
        out = dict(self._terms)
        for k, c in other._terms.items():
            prev = out.get(k)
            if sign > 0:
                out[k] = c if prev is None else prev + c
            else:
                out[k] = -c if prev is None else prev - c
        return type(self)._trusted(out)

    def __add__(self, other):
        return self._combine(other, +1)

    def __radd__(self, other):
        return self._combine(other, +1)

    def __sub__(self, other):
        return self._combine(other, -1)

    def __rsub__(self, other):
        return (-self)._combine(other, +1)

    def __neg__(self):
        return type(self)._trusted({k: -c for k, c in self._terms.items()})

    def scale(self, value):
        c = _scalar(value)
        return type(self)._trusted({k: v * c for k, v in self._terms.items()})

    def times_hbar(self, power: int = 1):
        """Multiply by hbar**power; negative powers divide exactly or raise."""
        return type(self)._trusted({k: v.shift(power) for k, v in self._terms.items()})

    def conjugate_coefficients(self):
        return type(self)._trusted({k: v.conjugate() for k, v in self._terms.items()})

    def hbar_to_zero(self):
        """Substitute the formal value hbar = 0 in every coefficient."""
        return type(self)._trusted({k: v.at_zero() for k, v in self._terms.items()})

    def is_real(self) -> bool:
        return all(c.is_real() for c in self._terms.values())

    def __eq__(self, other):
        if isinstance(other, type(self)):
            return self._terms == other._terms
        if isinstance(other, _SparsePolynomial):
            return NotImplemented
        try:
            return self._terms == type(self).constant(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self.items()))
        return self._hash

    def __repr__(self):
        from .text import render

        return f"{type(self).__name__}({render(self)!r})"

    def __str__(self):
        from .text import render

        return render(self)


class PhasePolynomial(_SparsePolynomial):
    """Commutative polynomial A(q, p) whose coefficients are polynomials in hbar."""

    __slots__ = ()

    @classmethod
    def q(cls):
        return cls.monomial(1, 0)

    @classmethod
    def p(cls):
        return cls.monomial(0, 1)

    def __mul__(self, other):
        if not isinstance(other, PhasePolynomial):
            if isinstance(other, _SparsePolynomial):
                return NotImplemented
            return self.scale(other)
        out: dict = {}
        for (a, b), c in self._terms.items():
            for (e, f), d in other._terms.items():
                key = (a + e, b + f)
                prod = c * d
                prev = out.get(key)
                out[key] = prod if prev is None else prev + prod
        return PhasePolynomial._trusted(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = PhasePolynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def derivative(self, axis: str, order: int = 1) -> "PhasePolynomial":
        """Partial derivative of the given order with respect to 'q' or 'p'."""
        if axis not in ("q", "p"):
            raise ValueError(f"axis must be 'q' or 'p', got {axis!r}")
        out = {}
        for (a, b), c in self._terms.items():
            if axis == "q":
                f = falling(a, order)
                if f:
                    out[(a - order, b)] = c * f
            else:
                f = falling(b, order)
                if f:
                    out[(a, b - order)] = c * f
        return PhasePolynomial._trusted(out)

    def partial(self, nq: int, np_: int) -> "PhasePolynomial":
        """Mixed partial derivative d^nq/dq^nq d^np/dp^np."""
        out = {}
        for (a, b), c in self._terms.items():
            f = falling(a, nq) * falling(b, np_)
            if f:
                out[(a - nq, b - np_)] = c * f
        return PhasePolynomial._trusted(out)

    def evaluate(self, q, p, hbar: float):
        """Numerically evaluate on (broadcastable) arrays q, p at a numeric hbar."""
        total = 0j
        for (a, b), c in self.items():
            total = total + c.evaluate(hbar) * (q**a) * (p**b)
        return total


@lru_cache(maxsize=None)
def _reorder(b: int, c: int) -> tuple:
    """Normal-order p^b q^c: tuple of (j, HbarCoefficient) for the term q^(c-j) p^(b-j).

    Uses p^b q^c = sum_j j! C(b,j) C(c,j) (-i hbar)^j q^(c-j) p^(b-j).
    """
    out = []
    for j in range(min(b, c) + 1):
        num = factorial(j) * comb(b, j) * comb(c, j)
        out.append((j, HbarCoefficient.hbar_power(j, _MINUS_I_POWERS[j % 4] * num)))
    return tuple(out)


class OperatorPolynomial(_SparsePolynomial):
    """Element of the Weyl algebra stored in normal form: key (r, s) is q^r p^s.

    Multiplication applies [q, p] = i hbar exactly, so every product is
    immediately returned in normal form.
    """

    __slots__ = ()

    @classmethod
    def q(cls):
        return cls.monomial(1, 0)

    @classmethod
    def p(cls):
        return cls.monomial(0, 1)

    @classmethod
    def identity(cls):
        return cls.one()

    def __mul__(self, other):
        if not isinstance(other, OperatorPolynomial):
            if isinstance(other, _SparsePolynomial):
                return NotImplemented
            return self.scale(other)
        out: dict = {}
        for (a, b), x in self._terms.items():
            for (c, d), y in other._terms.items():
                xy = x * y
                if b == 0 or c == 0:
                    key = (a + c, b + d)
                    prev = out.get(key)
                    out[key] = xy if prev is None else prev + xy
                    continue
                for j, w in _reorder(b, c):
                    key = (a + c - j, b + d - j)
                    term = xy * w
                    prev = out.get(key)
                    out[key] = term if prev is None else prev + term
        return OperatorPolynomial._trusted(out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = OperatorPolynomial.one()
        for _ in range(k):
            out = out * self
        return out

    def commutator(self, other: "OperatorPolynomial") -> "OperatorPolynomial":
        return self * other - other * self

    def adjoint(self) -> "OperatorPolynomial":
        """Formal adjoint: q, p self-adjoint, hbar real, words reversed."""
        out = OperatorPolynomial.zero()
        for (r, s), c in self._terms.items():
            # (c q^r p^s)^dagger = conj(c) p^s q^r
            word = OperatorPolynomial._trusted({(0, s): c.conjugate()}) * OperatorPolynomial._trusted(
                {(r, 0): as_coefficient(1)}
            )
            out = out + word
        return out

    def is_hermitian(self) -> bool:
        return self == self.adjoint()
