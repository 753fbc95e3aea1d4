"""Rational functions of g with integer coefficients (the ring behind Q_g)."""
from __future__ import annotations

from fractions import Fraction
from numbers import Integral, Rational

from . import poly
from .laurent import HalfLaurent, format_terms


def _split(p: HalfLaurent):
    shift, dense = p.q_dense()
    return shift, dense


class RationalFn:
    """num/den with num, den HalfLaurent, kept in a unique reduced form.

    Canonical form: den is an ordinary polynomial in q with nonzero constant
    term and positive leading coefficient, gcd(num, den) = 1, and the integer
    contents of num and den are coprime.  Any power of q lives in num.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1, *, _canonical: bool = False):
        num = _as_laurent(num)
        den = _as_laurent(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _canonical:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den
        self._hash = None

    @classmethod
    def _make(cls, num, den):
        obj = cls.__new__(cls)
        obj.num, obj.den, obj._hash = num, den, None
        return obj

    # predicates -------------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_laurent(self) -> bool:
        """True when the function lies in Z[q, 1/q] (denominator 1)."""
        return self.den == 1

    def is_integral(self) -> bool:
        return self.num.is_integral() and self.den.is_integral()

    def as_laurent(self) -> HalfLaurent:
        if not self.is_laurent():
            raise ValueError(f"{self} is not a Laurent polynomial")
        return self.num

    def as_fraction(self) -> Fraction:
        if self.den.max_q != 0 or (self.num and (self.num.min_q != 0 or self.num.max_q != 0)):
            raise ValueError(f"{self} is not a constant")
        return Fraction(self.num.constant(), self.den.constant())

    def is_constant(self) -> bool:
        return self.den.max_q == 0 and (self.num.is_zero() or self.num.max_q == self.num.min_q == 0)

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == 1 and other.den == 1:
            return RationalFn._make(self.num + other.num, self.den)
        if self.den == other.den:
            return RationalFn(self.num + other.num, self.den)
        return RationalFn(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn._make(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO_FN
        if self.den == 1 and other.den == 1:
            return RationalFn._make(self.num * other.num, self.den)
        return RationalFn(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RationalFn(self.den, self.num)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, Integral):
            return NotImplemented
        base = self if n >= 0 else self.inverse()
        n = abs(n)
        out = ONE_FN
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def substitute_power(self, k: int) -> "RationalFn":
        """f(g) -> f(g**k); k may be negative."""
        return RationalFn(self.num.substitute_power(k), self.den.substitute_power(k))

    # evaluation -------------------------------------------------------------
    def at_q(self, q):
        return self.num.at_q(q) / self.den.at_q(q)

    def at_g1(self) -> Fraction:
        d = self.den.at_g1()
        if d == 0:
            raise ZeroDivisionError(f"{self} has a pole at g=1")
        return Fraction(self.num.at_g1(), d)

    # comparison / display ---------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def equals_cross(self, other) -> bool:
        """Cross-multiplication equality, independent of normal forms."""
        other = _coerce(other)
        return (self.num * other.den - other.num * self.den).is_zero()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("RationalFn", self.num, self.den))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def __repr__(self):
        return f"RationalFn({str(self)!r})"

    def __str__(self):
        num, den = self.num, self.den
        # display with positive lowest coefficient in the denominator
        if den.terms[den.min_q] < 0:
            num, den = -num, -den
        if den == 1:
            return str(num)
        n = str(num)
        if len(num.terms) > 1:
            n = f"({n})"
        d = format_terms(tuple(sorted(den.terms.items())))
        if len(den.terms) > 1:
            d = f"({d})"
        return f"{n}/{d}"


def _as_laurent(x) -> HalfLaurent:
    if isinstance(x, HalfLaurent):
        return x
    if isinstance(x, Integral):
        return HalfLaurent(int(x))
    raise TypeError(f"cannot use {x!r} as a Laurent polynomial")


def _coerce(other):
    if isinstance(other, RationalFn):
        return other
    if isinstance(other, HalfLaurent):
        return RationalFn._make(other, ONE_L)
    if isinstance(other, Integral):
        return RationalFn._make(HalfLaurent(int(other)), ONE_L)
    if isinstance(other, Rational):
        f = Fraction(other)
        return RationalFn._make(HalfLaurent(f.numerator), HalfLaurent(f.denominator))
    return NotImplemented


def _normalize(num: HalfLaurent, den: HalfLaurent):
    if num.is_zero():
        return ZERO_L, ONE_L
    a, n_dense = _split(num)
    b, d_dense = _split(den)
    shift = a - b
    if len(d_dense) > 1 and len(n_dense) > 1:
        g = poly.poly_gcd(n_dense, d_dense)
        if len(g) > 1:
            n_dense = poly.exact_div(n_dense, g)
            d_dense = poly.exact_div(d_dense, g)
    cn = poly.content(n_dense)
    cd = poly.content(d_dense)
    if d_dense[-1] < 0:
        cd = -cd
    s = Fraction(cn, cd)
    n_dense = [c // cn * s.numerator for c in n_dense]
    d_dense = [c // cd * s.denominator for c in d_dense]
    return HalfLaurent.from_q_dense(n_dense, shift), HalfLaurent.from_q_dense(d_dense)


def rational_normalize(f: RationalFn) -> RationalFn:
    """Reduced canonical representative; idempotent."""
    return RationalFn(f.num, f.den)


def to_rational_fn(x) -> RationalFn:
    out = _coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot convert {x!r} to RationalFn")
    return out


ZERO_L = HalfLaurent()
ONE_L = HalfLaurent(1)
ZERO_FN = RationalFn._make(ZERO_L, ONE_L)
ONE_FN = RationalFn._make(ONE_L, ONE_L)
G_FN = RationalFn._make(HalfLaurent.g(1), ONE_L)


def g_power(e) -> RationalFn:
    return RationalFn._make(HalfLaurent.g(e), ONE_L)


def g_minus_one_power(v: int, e: int) -> RationalFn:
    """(g**v - 1)**e for any integer e."""
    base = HalfLaurent.g(v) - 1
    if e >= 0:
        return RationalFn(base**e)
    return RationalFn(1, base ** (-e))


__all__ = [
    "RationalFn",
    "rational_normalize",
    "to_rational_fn",
    "g_power",
    "g_minus_one_power",
    "ZERO_FN",
    "ONE_FN",
    "G_FN",
]
