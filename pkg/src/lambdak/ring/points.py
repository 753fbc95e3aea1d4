"""Points of the circle, exact cyclotomic values and vanishing tests."""
from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Union

from . import poly
from .laurent import HalfLaurent
from .rational import RationalFn, to_rational_fn


@dataclass(frozen=True)
class RootOfUnity:
    """g = exp(2 pi i k / n), with gcd(k, n) = 1 and 0 <= k < n.

    Half powers use q = exp(pi i k / n), i.e. g**(1/2) = exp(pi i t) with t = k/n.
    """

    n: int
    k: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("root of unity order must be positive")
        k = self.k % self.n
        if gcd(k, self.n) != 1:
            raise ValueError(f"gcd({self.k}, {self.n}) != 1")
        object.__setattr__(self, "k", k)

    @classmethod
    def from_t(cls, t) -> "RootOfUnity":
        """The point g = exp(2 pi i t) for rational t."""
        t = Fraction(t) % 1
        return cls(t.denominator, t.numerator)

    @property
    def t(self) -> Fraction:
        return Fraction(self.k, self.n)

    def to_complex(self) -> complex:
        return cmath.exp(2j * cmath.pi * self.k / self.n)

    def q_complex(self) -> complex:
        return cmath.exp(1j * cmath.pi * self.k / self.n)

    def power_is_one(self, v: int) -> bool:
        """Whether g**v = 1."""
        return v % self.n == 0

    def __str__(self):
        return f"{self.k}/{self.n}"


@dataclass(frozen=True)
class Generic:
    """A point g = exp(2 pi i t) with t irrational and g transcendental."""

    def power_is_one(self, v: int) -> bool:
        return v == 0

    def __str__(self):
        return "generic"


GENERIC = Generic()
CirclePoint = Union[RootOfUnity, Generic]


def roots_of_unity(n: int) -> list[RootOfUnity]:
    """All g with g**n = 1."""
    return [RootOfUnity(n // gcd(j, n), j // gcd(j, n)) for j in range(n)]


def exclusion_for_weights(weights) -> frozenset:
    """Every root of unity of order dividing some weight."""
    out = set()
    for v in weights:
        if v:
            out.update(roots_of_unity(abs(v)))
    return frozenset(out)


# ---------------------------------------------------------------------------
# exact arithmetic in Q(zeta_m)


class CyclotomicNumber:
    """Element of Q(zeta_m), zeta_m = exp(2 pi i / m), in the power basis.

    Stored as integer coefficients over one positive common denominator.
    """

    __slots__ = ("m", "_num", "_den")

    def __init__(self, m: int, coeffs):
        c = [Fraction(x) for x in coeffs]
        common = lcm(1, *(x.denominator for x in c))
        self._set(m, poly.strip([int(x * common) for x in c]), common)

    def _set(self, m, nums, den):
        phi = poly.cyclotomic(m)
        if len(nums) >= len(phi):
            _, nums = poly.divmod_monic(nums, phi)
        nums = list(nums) + [0] * (len(phi) - 1 - len(nums))
        g = gcd(den, *nums)
        if g > 1:
            nums = [x // g for x in nums]
            den //= g
        self.m = m
        self._num = tuple(nums)
        self._den = den

    @classmethod
    def _raw(cls, m: int, nums, den: int) -> "CyclotomicNumber":
        obj = cls.__new__(cls)
        obj._set(m, poly.strip(nums), den)
        return obj

    @property
    def coeffs(self) -> tuple:
        return tuple(Fraction(x, self._den) for x in self._num)

    @classmethod
    def zeta_power(cls, m: int, e: int) -> "CyclotomicNumber":
        e %= m
        return cls._raw(m, [0] * e + [1], 1)

    @classmethod
    def rational(cls, m: int, x) -> "CyclotomicNumber":
        x = Fraction(x)
        return cls._raw(m, [x.numerator], x.denominator)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber.rational(self.m, other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        if other.m != self.m:
            raise ValueError("cyclotomic numbers live in different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self._den, other._den
        nums = [x * b + y * a for x, y in zip(self._num, other._num)]
        return CyclotomicNumber._raw(self.m, nums, a * b)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber._raw(self.m, [-a for a in self._num], self._den)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return CyclotomicNumber._raw(self.m, poly.mul(poly.strip(self._num), poly.strip(other._num)), self._den * other._den)

    __rmul__ = __mul__

    def times_zeta_power(self, e: int) -> "CyclotomicNumber":
        """self * zeta_m**e by a cyclic shift."""
        e %= self.m
        rotated = [0] * self.m
        for i, c in enumerate(self._num):
            rotated[(i + e) % self.m] = c
        return CyclotomicNumber._raw(self.m, poly.strip(rotated), self._den)

    def inverse(self) -> "CyclotomicNumber":
        a = poly.strip(list(self.coeffs))
        if not a:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        # extended Euclid over Q: find s with s*a = 1 mod Phi_m
        r0, r1 = [Fraction(c) for c in poly.cyclotomic(self.m)], a
        s0, s1 = [], [Fraction(1)]
        while len(r1) > 1:
            quot, rem = poly.divmod_field(r0, r1)
            r0, r1 = r1, rem
            s0, s1 = s1, poly.sub(s0, poly.mul(quot, s1))
        c = r1[0]
        return CyclotomicNumber(self.m, [x / c for x in s1])

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def lift(self, m: int) -> "CyclotomicNumber":
        """The same number viewed in Q(zeta_m), m a multiple of self.m."""
        if m % self.m:
            raise ValueError(f"Q(zeta_{self.m}) is not a subfield of Q(zeta_{m})")
        step = m // self.m
        out = [0] * (step * len(self._num))
        for i, c in enumerate(self._num):
            out[i * step] = c
        return CyclotomicNumber._raw(m, poly.strip(out), self._den)

    def is_zero(self) -> bool:
        return not any(self._num)

    def is_rational(self) -> bool:
        return not any(self._num[1:])

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber.rational(self.m, other)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        return self.m == other.m and self._num == other._num and self._den == other._den

    def __hash__(self):
        return hash((self.m, self._num, self._den))

    def to_complex(self) -> complex:
        z = cmath.exp(2j * cmath.pi / self.m)
        return complex(sum(c * z**i for i, c in enumerate(self._num)) / self._den)

    def __repr__(self):
        return f"CyclotomicNumber({self.m}, {[str(c) for c in self.coeffs]})"


def _field_order(pt: RootOfUnity, half: bool) -> int:
    return 2 * pt.n if half else pt.n


def laurent_exact_value(p: HalfLaurent, pt: RootOfUnity, m: int | None = None) -> CyclotomicNumber:
    """p at pt in Q(zeta_m); m defaults to n (integral p) or 2n."""
    if m is None:
        m = _field_order(pt, not p.is_integral())
    # q = zeta_{2n}^k = zeta_m^(k m / 2n)
    out = [0] * m
    for e, c in p.terms.items():
        num = pt.k * m * e
        if num % (2 * pt.n):
            raise ValueError("field too small for this element")
        out[(num // (2 * pt.n)) % m] += c
    return CyclotomicNumber._raw(m, poly.strip(out), 1)


def exact_value(f, pt: RootOfUnity, m: int | None = None) -> CyclotomicNumber:
    """Exact value of a RationalFn (or HalfLaurent) at a root of unity."""
    f = to_rational_fn(f)
    if m is None:
        m = _field_order(pt, not f.is_integral())
    den = laurent_exact_value(f.den, pt, m)
    if den.is_zero():
        raise ZeroDivisionError(f"{f} has a pole at g = exp(2 pi i {pt.t})")
    return laurent_exact_value(f.num, pt, m) / den


def vanishes_at(p: HalfLaurent, pt: CirclePoint) -> bool:
    """Exact test of p(g) = 0 at a circle point."""
    if p.is_zero():
        return True
    if isinstance(pt, Generic):
        return False
    if p.is_integral():
        _, dense = p.g_dense()
        return poly.divisible_by_cyclotomic(dense, pt.n)
    # q = exp(2 pi i k / 2n) has order 2n / gcd(k, 2n)
    _, dense = p.q_dense()
    order = (2 * pt.n) // gcd(pt.k, 2 * pt.n)
    return poly.divisible_by_cyclotomic(dense, order)


def numeric_value(f, pt: CirclePoint) -> complex:
    if isinstance(pt, Generic):
        raise ValueError("a generic point has no numeric value")
    return complex(to_rational_fn(f).at_q(pt.q_complex()))


@dataclass(frozen=True)
class LocalizedFraction:
    """u / chi with chi(g) != 0 at the working point."""

    numerator: object
    chi: HalfLaurent
    point: CirclePoint

    def __post_init__(self):
        if not self.chi.is_integral():
            raise ValueError("localizing character must be integral in g")
        if vanishes_at(self.chi, self.point):
            raise ValueError(f"character {self.chi} vanishes at {self.point}")

    def same_class(self, other: "LocalizedFraction") -> bool:
        """u/chi ~ u'/chi' iff u chi' = u' chi."""
        if self.point != other.point:
            return False
        return self.numerator * other.chi == other.numerator * self.chi

    def value(self) -> RationalFn:
        """For scalar numerators: the element of Q_g as a rational function."""
        return to_rational_fn(self.numerator) / to_rational_fn(self.chi)
