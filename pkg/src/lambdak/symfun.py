"""Truncated symmetric power series in formal Chern roots.

A :class:`SymSeries` is a polynomial in the power sums ``p_k(A) = sum_j u_j**k``
of one or more named root alphabets ``A`` (one per bundle), truncated above a
total degree ``D`` with ``deg u_j = 1``.  For an alphabet of rank ``r`` only
``p_1 .. p_r`` are stored; higher power sums are rewritten through Newton's
identities, so the representation is unique.  Coefficients are Fractions or,
for equivariant series, :class:`~lambdak.ring.RationalFn` values in ``g``.

The Chern-class basis (``c_i`` = elementary symmetric functions) is used at the
API boundary: :meth:`SymSeries.to_chern` and :func:`from_chern`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .errors import PreconditionError
from .ring import HalfLaurent, RationalFn, RootOfUnity, to_rational_fn

# a monomial is a sorted tuple of ((alphabet, k), exponent); k >= 1
Monomial = tuple


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for var, e in b:
        acc[var] = acc.get(var, 0) + e
    return tuple(sorted(acc.items()))


def _mono_weight(m: Monomial) -> int:
    return sum(k * e for (_, k), e in m)


def _is_zero(c) -> bool:
    return not c


class SymSeries:
    """Truncated polynomial in power sums of named root alphabets."""

    __slots__ = ("ranks", "D", "terms")

    def __init__(self, ranks: Mapping[str, int], D: int, terms: Mapping[Monomial, object] | None = None):
        if D < 0:
            raise ValueError("cutoff must be nonnegative")
        for name, r in ranks.items():
            if r < 0:
                raise ValueError(f"alphabet {name} has negative rank")
        self.ranks = dict(ranks)
        self.D = D
        self.terms = {}
        for m, c in (terms or {}).items():
            if not _is_zero(c) and _mono_weight(m) <= D:
                self.terms[m] = c

    # constructors -----------------------------------------------------------
    @classmethod
    def constant(cls, c, ranks: Mapping[str, int], D: int) -> "SymSeries":
        return cls(ranks, D, {(): c})

    @classmethod
    def power_sum(cls, alphabet: str, k: int, ranks: Mapping[str, int], D: int) -> "SymSeries":
        """p_k of an alphabet, reduced through Newton's identities when k > rank."""
        r = ranks[alphabet]
        if k == 0:
            return cls.constant(Fraction(r), ranks, D)
        if k > D:
            return cls(ranks, D)
        return cls(ranks, D, {_rename(m, alphabet): c for m, c in _power_sum_in_low(r, k).items()})

    @classmethod
    def elementary(cls, alphabet: str, i: int, ranks: Mapping[str, int], D: int) -> "SymSeries":
        """e_i (= c_i) of an alphabet in the power-sum basis."""
        r = ranks[alphabet]
        if i > r or i > D:
            return cls(ranks, D) if i else cls.constant(Fraction(1), ranks, D)
        return cls(ranks, D, {_rename(m, alphabet): c for m, c in _elementary_in_power(i).items()})

    def _like(self, terms) -> "SymSeries":
        return SymSeries(self.ranks, self.D, terms)

    def zero(self) -> "SymSeries":
        return self._like({})

    def one(self) -> "SymSeries":
        return self._like({(): Fraction(1)})

    # arithmetic -------------------------------------------------------------
    def _align(self, other) -> "SymSeries":
        if isinstance(other, SymSeries):
            return other
        return self._like({(): other})

    def _merged_ranks(self, other: "SymSeries") -> dict:
        merged = dict(self.ranks)
        for k, v in other.ranks.items():
            if merged.setdefault(k, v) != v:
                raise ValueError(f"alphabet {k} has conflicting ranks")
        return merged

    def __add__(self, other):
        other = self._align(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return SymSeries(self._merged_ranks(other), min(self.D, other.D), out)

    __radd__ = __add__

    def __neg__(self):
        return self._like({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, SymSeries):
            return self._like({m: c * other for m, c in self.terms.items()})
        D = min(self.D, other.D)
        out: dict = {}
        for m1, c1 in self.terms.items():
            w1 = _mono_weight(m1)
            for m2, c2 in other.terms.items():
                if w1 + _mono_weight(m2) > D:
                    continue
                m = _mono_mul(m1, m2)
                prod = c1 * c2
                out[m] = out[m] + prod if m in out else prod
        return SymSeries(self._merged_ranks(other), D, out)

    def __rmul__(self, other):
        return self._like({m: other * c for m, c in self.terms.items()})

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = self.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def constant_term(self):
        return self.terms.get((), 0)

    def inverse(self) -> "SymSeries":
        """1/s for s with invertible constant term."""
        c0 = self.constant_term()
        if _is_zero(c0):
            raise ZeroDivisionError("series with zero constant term is not invertible")
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        nil = (self - c0) * inv0
        out = self.one()
        term = self.one()
        for _ in range(self.D):
            term = -(term * nil)
            out = out + term
        return out * inv0

    def __truediv__(self, other):
        if isinstance(other, SymSeries):
            return self * other.inverse()
        return self * (1 / other if not isinstance(other, int) else Fraction(1, other))

    def exp(self) -> "SymSeries":
        """exp of a series without constant term."""
        if not _is_zero(self.constant_term()):
            raise ValueError("exp needs a series without constant term")
        out = self.one()
        term = self.one()
        for n in range(1, self.D + 1):
            term = term * self * Fraction(1, n)
            out = out + term
        return out

    def log(self) -> "SymSeries":
        """log of a series with constant term 1."""
        if self.constant_term() != 1:
            raise ValueError("log needs constant term 1")
        nil = self - 1
        out = self.zero()
        term = self.one()
        for n in range(1, self.D + 1):
            term = term * nil
            out = out + term * Fraction((-1) ** (n - 1), n)
        return out

    def truncate(self, D: int) -> "SymSeries":
        return SymSeries(self.ranks, min(D, self.D), self.terms)

    def degree_part(self, n: int) -> "SymSeries":
        return self._like({m: c for m, c in self.terms.items() if _mono_weight(m) == n})

    def min_degree(self) -> int | None:
        return min((_mono_weight(m) for m in self.terms), default=None)

    def map_coefficients(self, f) -> "SymSeries":
        return self._like({m: f(c) for m, c in self.terms.items()})

    def at_g1(self) -> "SymSeries":
        """Set g = 1 in rational-function coefficients."""
        return self.map_coefficients(lambda c: c.at_g1() if isinstance(c, (RationalFn, HalfLaurent)) else c)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, RationalFn)):
            other = self._like({(): other})
        if not isinstance(other, SymSeries):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # views ------------------------------------------------------------------
    def to_chern(self) -> dict:
        """Coefficients in the Chern basis: {((alphabet, i), e)... : coeff}."""
        out: dict = {}
        for m, c in self.terms.items():
            poly = {(): Fraction(1)}
            for (alpha, k), e in m:
                pk = {_rename(cm, alpha): cc for cm, cc in _power_in_elementary(self.ranks[alpha], k).items()}
                for _ in range(e):
                    poly = _poly_mul(poly, pk)
            for cm, cc in poly.items():
                val = c * cc
                out[cm] = out[cm] + val if cm in out else val
        return {m: c for m, c in out.items() if not _is_zero(c)}

    def evaluate_roots(self, roots: Mapping[str, Iterable]):
        """Value at explicit numeric roots (u_j given per alphabet)."""
        roots = {a: list(v) for a, v in roots.items()}
        total = 0
        for m, c in self.terms.items():
            val = c
            for (alpha, k), e in m:
                val = val * sum(u**k for u in roots[alpha]) ** e
            total = total + val
        return total

    def adams(self, k: int) -> "SymSeries":
        """u_j -> k u_j for every root."""
        return self._like({m: c * k ** _mono_weight(m) for m, c in self.terms.items()})

    def __repr__(self):
        return f"SymSeries({self})"

    def __str__(self):
        return format_chern(self.to_chern())


def _rename(m: Monomial, alphabet: str) -> Monomial:
    return tuple(sorted(((alphabet, k), e) for (_, k), e in m))


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            out[m] = out.get(m, 0) + c1 * c2
    return {m: c for m, c in out.items() if c}


# Newton's identities on a placeholder alphabet "" -------------------------------


@lru_cache(maxsize=None)
def _elementary_in_power_cached(i: int):
    # i e_i = sum_{j=1}^{i} (-1)^{j-1} e_{i-j} p_j
    if i == 0:
        return (((), Fraction(1)),)
    acc: dict = {}
    for j in range(1, i + 1):
        prev = dict(_elementary_in_power_cached(i - j))
        pj = {((("", j), 1),): Fraction(1)}
        for m, c in _poly_mul(prev, pj).items():
            acc[m] = acc.get(m, 0) + c * (-1) ** (j - 1) / i
    return tuple((m, c) for m, c in acc.items() if c)


def _elementary_in_power(i: int) -> dict:
    return dict(_elementary_in_power_cached(i))


@lru_cache(maxsize=None)
def _power_in_elementary_cached(r: int, k: int):
    # p_k = sum_{i=1}^{k-1} (-1)^{i-1} e_i p_{k-i} + (-1)^{k-1} k e_k, with e_i = 0 for i > r
    acc: dict = {}
    if k <= r:
        acc[((("", k), 1),)] = Fraction((-1) ** (k - 1) * k)
    for i in range(1, min(k - 1, r) + 1):
        ei = {((("", i), 1),): Fraction((-1) ** (i - 1))}
        for m, c in _poly_mul(ei, dict(_power_in_elementary_cached(r, k - i))).items():
            acc[m] = acc.get(m, 0) + c
    return tuple((m, c) for m, c in acc.items() if c)


def _power_in_elementary(r: int, k: int) -> dict:
    return dict(_power_in_elementary_cached(r, k))


@lru_cache(maxsize=None)
def _power_sum_in_low_cached(r: int, k: int):
    if k <= r:
        return (((("", k), 1),), Fraction(1)),
    out: dict = {}
    for m, c in _power_in_elementary(r, k).items():
        poly = {(): c}
        for (_, i), e in m:
            for _ in range(e):
                poly = _poly_mul(poly, _elementary_in_power(i))
        for pm, pc in poly.items():
            out[pm] = out.get(pm, 0) + pc
    return tuple((m, c) for m, c in out.items() if c)


def _power_sum_in_low(r: int, k: int) -> dict:
    """p_k for an alphabet of rank r as a polynomial in p_1..p_r."""
    return dict(_power_sum_in_low_cached(r, k))


def from_chern(chern: Mapping, ranks: Mapping[str, int], D: int) -> SymSeries:
    """Inverse of :meth:`SymSeries.to_chern`."""
    out = SymSeries(ranks, D)
    for m, c in chern.items():
        term = SymSeries.constant(c, ranks, D)
        for (alpha, i), e in m:
            term = term * SymSeries.elementary(alpha, i, ranks, D) ** e
        out = out + term
    return out


def chern_monomial_name(m) -> str:
    if not m:
        return "1"
    parts = []
    for (alpha, i), e in m:
        name = f"c{i}({alpha})"
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


_FACTOR = re.compile(r"c(\d+)\(([^)]+)\)(?:\^(\d+))?$")


def parse_chern_monomial(text: str):
    """Inverse of :func:`chern_monomial_name`; factor order is irrelevant."""
    text = text.replace(" ", "")
    if text in ("", "1"):
        return ()
    acc: dict = {}
    for factor in text.split("*"):
        m = _FACTOR.match(factor)
        if not m:
            raise ValueError(f"bad Chern monomial factor {factor!r}")
        key = (m.group(2), int(m.group(1)))
        acc[key] = acc.get(key, 0) + int(m.group(3) or 1)
    return tuple(sorted(acc.items()))


def format_chern(chern: Mapping) -> str:
    if not chern:
        return "0"
    items = sorted(chern.items(), key=lambda kv: (sum(i * e for (_, i), e in kv[0]), kv[0]))
    parts = []
    for m, c in items:
        name = chern_monomial_name(m)
        cs = str(c)
        if isinstance(c, RationalFn) and any(ch in cs[1:] for ch in "+-/"):
            cs = f"({cs})"
        if name == "1":
            parts.append(cs)
        elif c == 1:
            parts.append(name)
        elif c == -1:
            parts.append(f"-{name}")
        else:
            parts.append(f"{cs}*{name}")
    return " + ".join(parts).replace("+ -", "- ")


def integrate(series: SymSeries, chern_numbers: Mapping[str, object], degree: int):
    """Pair the degree-``degree`` part with Chern numbers keyed by monomial name."""
    numbers = {parse_chern_monomial(k): v for k, v in chern_numbers.items()}
    total = 0
    for m, c in series.degree_part(degree).to_chern().items():
        if m not in numbers:
            raise KeyError(f"missing Chern number {chern_monomial_name(m)}")
        total = total + c * numbers[m]
    return total


# ---------------------------------------------------------------------------
# univariate helpers for multiplicative sequences


def _series_mul(a, b, D):
    out = [0] * (D + 1)
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j in range(D + 1 - i):
            out[i + j] = out[i + j] + x * b[j]
    return out


def _series_inv(a, D):
    inv0 = 1 / a[0] if not isinstance(a[0], int) else Fraction(1, a[0])
    out = [inv0] + [0] * D
    for n in range(1, D + 1):
        acc = 0
        for i in range(1, n + 1):
            acc = acc + a[i] * out[n - i]
        out[n] = -acc * inv0
    return out


def _series_log(a, D):
    """log of a univariate series with a[0] == 1: b' = a'/a."""
    inv = _series_inv(a, D)
    deriv = [a[i + 1] * (i + 1) for i in range(D)] + [0]
    q = _series_mul(deriv, inv, D)
    return [0] + [q[n - 1] * Fraction(1, n) for n in range(1, D + 1)]


def multiplicative(alphabet: str, ranks: Mapping[str, int], D: int, taylor) -> SymSeries:
    """prod_j f(u_j) for f = sum taylor[n] u**n; the constant term may be any unit."""
    a = list(taylor[: D + 1]) + [0] * max(0, D + 1 - len(taylor))
    c0 = a[0]
    inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
    logs = _series_log([x * inv0 for x in a], D)
    r = ranks[alphabet]
    expo = SymSeries(ranks, D)
    for n in range(1, D + 1):
        if not _is_zero(logs[n]):
            expo = expo + SymSeries.power_sum(alphabet, n, ranks, D) * logs[n]
    scale = c0**r if r else 1
    return expo.exp() * scale


def _exp_taylor(scale, D):
    """Taylor coefficients of exp(scale * u)."""
    return [Fraction(scale) ** n / factorial(n) for n in range(D + 1)]


# ---------------------------------------------------------------------------
# characteristic series


def chern_character(r: int, D: int, alphabet: str = "E", ranks: Mapping[str, int] | None = None) -> SymSeries:
    """ch = sum_j exp(u_j) = r + sum_k p_k / k!."""
    ranks = dict(ranks or {}) | {alphabet: r}
    out = SymSeries.constant(Fraction(r), ranks, D)
    for k in range(1, D + 1):
        out = out + SymSeries.power_sum(alphabet, k, ranks, D) * Fraction(1, factorial(k))
    return out


def adams_ch(k: int, s: SymSeries) -> SymSeries:
    """Psi^k: u_j -> k u_j."""
    return s.adams(k)


def _newton_elementary(power_sums, D, one):
    """e_0..e_n from power sums P_1..P_n (list index m -> P_m)."""
    e = [one]
    for n in range(1, len(power_sums)):
        acc = one.zero()
        for i in range(1, n + 1):
            term = power_sums[i] * e[n - i]
            acc = acc + term if i % 2 else acc - term
        e.append(acc * Fraction(1, n))
    return e


def lambda_ch(k: int, r: int, D: int, alphabet: str = "E") -> SymSeries:
    """sigma_k(e^{u_1}, ..., e^{u_r}) = ch(Lambda^k E), via Newton with P_m = Psi^m ch."""
    ranks = {alphabet: r}
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k > r:
        return SymSeries(ranks, D)
    ch = chern_character(r, D, alphabet)
    sums = [None] + [ch.adams(m) for m in range(1, k + 1)]
    return _newton_elementary(sums, D, SymSeries.constant(Fraction(1), ranks, D))[k]


def lambda_ch_dual(k: int, r: int, D: int, alphabet: str = "E") -> SymSeries:
    """sigma_k(e^{-u_1}, ..., e^{-u_r}) = ch(Lambda^k E*)."""
    return lambda_ch(k, r, D, alphabet).adams(-1)


def gamma_ch_reduced(i: int, r: int, D: int, alphabet: str = "E") -> SymSeries:
    """sigma_i(e^{u_1} - 1, ..., e^{u_r} - 1), the character of gamma^i(E - r)."""
    ranks = {alphabet: r}
    if i < 0:
        raise ValueError("i must be nonnegative")
    if i > r:
        return SymSeries(ranks, D)
    ch = chern_character(r, D, alphabet)
    # sum_j (e^{u_j} - 1)^m = sum_s C(m, s) (-1)^(m-s) Psi^s(ch), Psi^0(ch) = r
    sums = [None]
    for m in range(1, i + 1):
        acc = SymSeries(ranks, D)
        for s in range(m + 1):
            term = ch.adams(s) if s else SymSeries.constant(Fraction(r), ranks, D)
            acc = acc + term * (comb(m, s) * (-1) ** (m - s))
        sums.append(acc)
    return _newton_elementary(sums, D, SymSeries.constant(Fraction(1), ranks, D))[i]


def verify_gamma_generating_identity(r: int, D: int, alphabet: str = "E") -> bool:
    """sum_i sigma_i(e^u) t^i (1-t)^(r-i) == sum_i sigma_i(e^u - 1) t^i, coefficientwise in t."""
    ranks = {alphabet: r}
    zero = SymSeries(ranks, D)
    lhs = [zero] * (r + 1)
    for i in range(r + 1):
        lam = lambda_ch(i, r, D, alphabet)
        for j in range(r - i + 1):
            lhs[i + j] = lhs[i + j] + lam * (comb(r - i, j) * (-1) ** j)
    rhs = [gamma_ch_reduced(i, r, D, alphabet) for i in range(r + 1)]
    return all(a == b for a, b in zip(lhs, rhs))


def _a_hat_taylor(D):
    # (u/2) / sinh(u/2) = 1 / sum_n (u/2)^(2n) / (2n+1)!
    s = [Fraction(0)] * (D + 1)
    for n in range(0, D // 2 + 1):
        s[2 * n] = Fraction(1, 4**n * factorial(2 * n + 1))
    return _series_inv(s, D)


def a_hat(r: int, D: int, alphabet: str = "T", ranks: Mapping[str, int] | None = None) -> SymSeries:
    """prod_j (u_j/2) / sinh(u_j/2)."""
    ranks = dict(ranks or {}) | {alphabet: r}
    return multiplicative(alphabet, ranks, D, _a_hat_taylor(D))


def normal_alphabet(v: int) -> str:
    return f"N{v}"


def _check_point(weights, point):
    if point is None:
        return
    for v, _ in weights:
        if isinstance(point, RootOfUnity) and point.power_is_one(v):
            raise PreconditionError(f"point in exclusion set A (g^{v} = 1)")


def _a_hat_g_line_taylor(v: int, D: int):
    """Taylor coefficients of g^{v/2} e^{u/2} / (g^v e^u - 1) in u."""
    gv = to_rational_fn(HalfLaurent.g(v))
    num = [to_rational_fn(HalfLaurent.g(Fraction(v, 2))) * c for c in _exp_taylor(Fraction(1, 2), D)]
    den = [gv * c for c in _exp_taylor(1, D)]
    den[0] = den[0] - 1
    return _series_mul(num, _series_inv(den, D), D)


def a_hat_g_normal(weights, D: int, point=None, ranks: Mapping[str, int] | None = None) -> SymSeries:
    """Equivariant A-hat of the normal bundle: prod over weight-v lines of
    g^{v/2} e^{u/2} / (g^v e^u - 1); alphabets are named N<v>."""
    weights = _normalize_weights(weights)
    _check_point(weights, point)
    ranks = dict(ranks or {}) | {normal_alphabet(v): r for v, r in weights}
    out = SymSeries.constant(to_rational_fn(1), ranks, D)
    for v, r in weights:
        out = out * multiplicative(normal_alphabet(v), ranks, D, _a_hat_g_line_taylor(v, D))
    return out


def _normalize_weights(weights):
    merged: dict[int, int] = {}
    for v, r in weights:
        if v < 1:
            raise ValueError("normal weights must be positive")
        if r < 0:
            raise ValueError("normal ranks must be nonnegative")
        merged[v] = merged.get(v, 0) + r
    return sorted((v, r) for v, r in merged.items() if r)


def ch_g_bundle(v: int, r: int, D: int, alphabet: str = "E", ranks: Mapping[str, int] | None = None) -> SymSeries:
    """ch_g of a bundle on which g acts by g**v: g**v ch."""
    return chern_character(r, D, alphabet, ranks) * to_rational_fn(HalfLaurent.g(v))


def ch_g_sqrt_line(l: int, D: int, alphabet: str = "L", ranks: Mapping[str, int] | None = None) -> SymSeries:
    """ch_g(L^{1/2}) = g^{l/2} exp(c_1(L)/2)."""
    ranks = dict(ranks or {}) | {alphabet: 1}
    half = SymSeries.power_sum(alphabet, 1, ranks, D) * Fraction(1, 2)
    return half.exp() * to_rational_fn(HalfLaurent.g(Fraction(l, 2)))


def lambda_minus_one_dual(weights, D: int, ranks: Mapping[str, int] | None = None) -> SymSeries:
    """ch_g(lambda_{-1}(N*)) = prod_v prod_roots (1 - g^{-v} e^{-u}), expanded as
    sum_k (-1)^k g^{-vk} sigma_k(e^{-u}) per weight."""
    weights = _normalize_weights(weights)
    ranks = dict(ranks or {}) | {normal_alphabet(v): r for v, r in weights}
    out = SymSeries.constant(to_rational_fn(1), ranks, D)
    for v, r in weights:
        alpha = normal_alphabet(v)
        factor = SymSeries(ranks, D)
        for k in range(r + 1):
            sigma = lambda_ch_dual(k, r, D, alpha)
            factor = factor + SymSeries(ranks, D, sigma.terms) * to_rational_fn(HalfLaurent.g(-v * k, (-1) ** k))
        out = out * factor
    return out


def verify_twisting_identities(weights, l_global: int, D: int, tangent_rank: int = 2, point=None) -> bool:
    """Check, at cutoff D,

        ch_g(lambda_{-1} N*) = A_g(N)^{-1} ch_g((det N)^{-1/2})
        td_g(T, L) ch_g(lambda_{-1} N*) = A(T) ch_g(L_alpha^{1/2})

    with L_alpha = L (det N)^{-1}: weight l - sum v r_v, c_1 = c_1(L) - sum c_1(N_v).
    """
    weights = _normalize_weights(weights)
    _check_point(weights, point)
    ranks = {normal_alphabet(v): r for v, r in weights} | {"T": tangent_rank, "L": 1}
    lam = lambda_minus_one_dual(weights, D, ranks)
    ahat_n = a_hat_g_normal(weights, D, ranks=ranks)
    det_weight = sum(v * r for v, r in weights)
    c1_det = SymSeries(ranks, D)
    for v, _ in weights:
        c1_det = c1_det + SymSeries.power_sum(normal_alphabet(v), 1, ranks, D)
    det_inv_half = (c1_det * Fraction(-1, 2)).exp() * to_rational_fn(HalfLaurent.g(Fraction(-det_weight, 2)))
    first = lam == ahat_n.inverse() * det_inv_half

    ahat_t = a_hat(tangent_rank, D, "T", ranks)
    td_g = ahat_t * ahat_n * ch_g_sqrt_line(l_global, D, "L", ranks)
    c1_alpha = SymSeries.power_sum("L", 1, ranks, D) - c1_det
    l_alpha_half = (c1_alpha * Fraction(1, 2)).exp() * to_rational_fn(HalfLaurent.g(Fraction(l_global - det_weight, 2)))
    second = td_g * lam == ahat_t * l_alpha_half
    return first and second
