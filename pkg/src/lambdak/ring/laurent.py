"""Laurent polynomials in g with half-integer exponents.

A HalfLaurent is stored as a Laurent polynomial in q with g = q**2, so the
exponent ``e`` of q stands for g**(e/2).  Coefficients are Python ints.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Integral



class HalfLaurent:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        if terms is None:
            items = ()
        elif isinstance(terms, HalfLaurent):
            items = terms._terms
        elif isinstance(terms, Integral):
            items = ((0, int(terms)),) if terms else ()
        else:
            acc: dict[int, int] = {}
            pairs = terms.items() if isinstance(terms, dict) else terms
            for e, c in pairs:
                if not isinstance(c, Integral):
                    raise TypeError(f"HalfLaurent coefficients must be integers, got {c!r}")
                acc[int(e)] = acc.get(int(e), 0) + int(c)
            items = tuple(sorted((e, c) for e, c in acc.items() if c))
        self._terms = items
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def g(cls, exponent=1, coeff: int = 1) -> "HalfLaurent":
        """coeff * g**exponent, exponent an integer or half-integer."""
        e2 = Fraction(exponent) * 2
        if e2.denominator != 1:
            raise ValueError(f"exponent {exponent} is not a half-integer")
        return cls({int(e2): coeff})

    @classmethod
    def from_g_coeffs(cls, coeffs, shift: int = 0) -> "HalfLaurent":
        """sum_i coeffs[i] g**(i + shift)."""
        return cls({2 * (i + shift): c for i, c in enumerate(coeffs) if c})

    @classmethod
    def from_q_dense(cls, coeffs, shift: int = 0) -> "HalfLaurent":
        return cls({i + shift: c for i, c in enumerate(coeffs) if c})

    # views ------------------------------------------------------------------
    @property
    def terms(self) -> dict[int, int]:
        """q-exponent -> coefficient."""
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_integral(self) -> bool:
        return all(e % 2 == 0 for e, _ in self._terms)

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    @property
    def min_q(self) -> int:
        return self._terms[0][0]

    @property
    def max_q(self) -> int:
        return self._terms[-1][0]

    def q_dense(self):
        """(shift, dense coefficients) with p = q**shift * sum c_i q**i."""
        if not self._terms:
            return 0, []
        lo = self._terms[0][0]
        out = [0] * (self._terms[-1][0] - lo + 1)
        for e, c in self._terms:
            out[e - lo] = c
        return lo, out

    def g_dense(self):
        """(shift, dense coefficients in g); only for integral elements."""
        if not self.is_integral():
            raise ValueError("element has half-integer powers of g")
        if not self._terms:
            return 0, []
        lo = self._terms[0][0] // 2
        out = [0] * (self._terms[-1][0] // 2 - lo + 1)
        for e, c in self._terms:
            out[e // 2 - lo] = c
        return lo, out

    def g_coefficients(self) -> dict[Fraction, int]:
        return {Fraction(e, 2): c for e, c in self._terms}

    def constant(self) -> int:
        return dict(self._terms).get(0, 0)

    # arithmetic -------------------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, HalfLaurent):
            return other
        if isinstance(other, Integral):
            return HalfLaurent(int(other))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc = dict(self._terms)
        for e, c in other._terms:
            acc[e] = acc.get(e, 0) + c
        return HalfLaurent(acc)

    __radd__ = __add__

    def __neg__(self):
        return HalfLaurent({e: -c for e, c in self._terms})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return HalfLaurent(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, Integral):
            return NotImplemented
        if n < 0:
            if self.is_monomial() and abs(self._terms[0][1]) == 1:
                e, c = self._terms[0]
                return HalfLaurent({-e * -n: c ** (-n)})
            raise ValueError("not invertible in Laurent ring")
        out = HalfLaurent(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift_q(self, s: int) -> "HalfLaurent":
        return HalfLaurent({e + s: c for e, c in self._terms})

    def substitute_power(self, k: int) -> "HalfLaurent":
        """p(g) -> p(g**k)."""
        return HalfLaurent({e * k: c for e, c in self._terms})

    def conjugate(self) -> "HalfLaurent":
        """p(g) -> p(1/g), complex conjugation on the unit circle."""
        return self.substitute_power(-1)

    # evaluation -------------------------------------------------------------
    def at_q(self, q):
        return sum(c * q**e for e, c in self._terms)

    def at_g1(self) -> int:
        return sum(c for _, c in self._terms)

    # comparison / display ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, HalfLaurent):
            return self._terms == other._terms
        if isinstance(other, Integral):
            return self._terms == HalfLaurent(int(other))._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("HalfLaurent", self._terms))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"HalfLaurent({str(self)!r})"

    def __str__(self):
        return format_terms(self._terms)


def _format_exponent(e: int) -> str:
    if e % 2 == 0:
        k = e // 2
        if k == 1:
            return "g"
        return f"g^{k}" if k > 0 else f"g^({k})"
    return f"g^({e}/2)"


def format_terms(terms) -> str:
    """Ascending powers of g, integer coefficients, ASCII."""
    if not terms:
        return "0"
    parts = []
    for i, (e, c) in enumerate(terms):
        sign = "-" if c < 0 else ("+" if i else "")
        a = abs(c)
        if e == 0:
            body = str(a)
        else:
            mono = _format_exponent(e)
            body = mono if a == 1 else f"{a}*{mono}"
        parts.append(sign + body)
    return "".join(parts)


ZERO = HalfLaurent()
ONE = HalfLaurent(1)
G = HalfLaurent.g(1)
Q = HalfLaurent({1: 1})


def laurent_arith(a: HalfLaurent, b, op: str) -> HalfLaurent:
    """Dispatch ``add``, ``mul`` or ``pow`` (b an int exponent for pow)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "pow":
        return a**b
    raise ValueError(f"unknown op {op!r}")


__all__ = ["HalfLaurent", "laurent_arith", "format_terms", "ZERO", "ONE", "G", "Q"]
