"""Virtual equivariant bundles, gamma operations and the truncated inverse
of lambda_{-1}(N*).

A :class:`VirtualBundle` is a formal combination of products of exterior
powers ``Lambda^j(E)`` of bundle atoms.  Two ring morphisms evaluate it:

* the character view sends ``Lambda^j(E)`` to ``C(r, j) g^{j w}``;
* the Chern view sends it to ``g^{j w} sigma_j(e^{+-u})`` as a truncated
  :class:`~lambdak.symfun.SymSeries` in the atom's root alphabet.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Iterable, Mapping

from .errors import PreconditionError
from .ring import HalfLaurent, RationalFn, RootOfUnity, to_rational_fn
from .symfun import SymSeries, lambda_ch


@dataclass(frozen=True)
class BundleAtom:
    """A bundle of rank ``rank`` on which g acts by ``g**weight``.

    ``alphabet`` names its formal Chern roots; with ``conjugate`` the roots
    are negated (the dual of the bundle owning the alphabet).
    """

    id: str
    rank: int
    weight: int = 0
    alphabet: str | None = None
    conjugate: bool = False

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"atom {self.id} must have rank >= 1")
        if self.alphabet is None:
            object.__setattr__(self, "alphabet", self.id)

    def dual(self, id: str | None = None) -> "BundleAtom":
        return BundleAtom(id or f"{self.id}*", self.rank, -self.weight, self.alphabet, not self.conjugate)


def _mono_mul(a, b):
    acc = dict(a)
    for key, e in b:
        acc[key] = acc.get(key, 0) + e
    return tuple(sorted(acc.items()))


class VirtualBundle:
    """Formal combination of products of exterior powers of atoms.

    ``terms`` maps a monomial (sorted tuple of ((atom id, j), exponent)) to an
    integer or HalfLaurent coefficient.
    """

    __slots__ = ("atoms", "terms")

    def __init__(self, atoms: Mapping[str, BundleAtom] | Iterable[BundleAtom] = (), terms=None):
        if isinstance(atoms, Mapping):
            self.atoms = dict(atoms)
        else:
            self.atoms = {a.id: a for a in atoms}
        self.terms = {}
        for m, c in (terms or {}).items():
            if c and all(j <= self.atoms[i].rank for (i, j), _ in m):
                self.terms[m] = c

    @classmethod
    def scalar(cls, c, atoms=()) -> "VirtualBundle":
        return cls(atoms, {(): c})

    @classmethod
    def of(cls, atom: BundleAtom) -> "VirtualBundle":
        return cls.exterior(atom, 1)

    @classmethod
    def exterior(cls, atom: BundleAtom, j: int) -> "VirtualBundle":
        """Lambda^j of an atom (1 for j = 0, 0 for j > rank)."""
        if j < 0:
            raise ValueError("exterior power index must be nonnegative")
        if j == 0:
            return cls([atom], {(): 1})
        return cls([atom], {(((atom.id, j), 1),): 1})

    # arithmetic -------------------------------------------------------------
    def _merge_atoms(self, other: "VirtualBundle") -> dict:
        out = dict(self.atoms)
        for k, a in other.atoms.items():
            if out.setdefault(k, a) != a:
                raise ValueError(f"atom id {k} used for different bundles")
        return out

    def _coerce(self, other) -> "VirtualBundle":
        if isinstance(other, VirtualBundle):
            return other
        return VirtualBundle(self.atoms, {(): other})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return VirtualBundle(self._merge_atoms(other), out)

    __radd__ = __add__

    def __neg__(self):
        return VirtualBundle(self.atoms, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, VirtualBundle):
            return VirtualBundle(self.atoms, {m: c * other for m, c in self.terms.items()})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                p = c1 * c2
                out[m] = out[m] + p if m in out else p
        return VirtualBundle(self._merge_atoms(other), out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not formal bundles")
        out = VirtualBundle.scalar(1, self.atoms)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, VirtualBundle):
            other = VirtualBundle.scalar(other)
        return (self - other).is_zero()

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def positive_part(self) -> "VirtualBundle":
        return VirtualBundle(self.atoms, {m: c for m, c in self.terms.items() if c > 0})

    def negative_part(self) -> "VirtualBundle":
        """Minus the negatively weighted monomials, so x = pos - neg."""
        return VirtualBundle(self.atoms, {m: -c for m, c in self.terms.items() if c < 0})

    def rank(self) -> int:
        """Virtual rank (the character at g = 1)."""
        return self.character().at_g1()

    # views ------------------------------------------------------------------
    def character(self) -> HalfLaurent:
        total = HalfLaurent()
        for m, c in self.terms.items():
            val = HalfLaurent(1)
            for (i, j), e in m:
                atom = self.atoms[i]
                val = val * HalfLaurent.g(j * atom.weight, comb(atom.rank, j)) ** e
            total = total + val * c
        return total

    def chern(self, D: int, ranks: Mapping[str, int] | None = None) -> SymSeries:
        """ch_g as a series in the atoms' root alphabets, cut off at degree D."""
        ranks = dict(ranks or {})
        for atom in self.atoms.values():
            if ranks.setdefault(atom.alphabet, atom.rank) != atom.rank:
                raise ValueError(f"alphabet {atom.alphabet} has conflicting ranks")
        total = SymSeries(ranks, D)
        for m, c in self.terms.items():
            val = SymSeries.constant(to_rational_fn(c), ranks, D)
            for (i, j), e in m:
                piece = SymSeries(ranks, D, _exterior_chern(self.atoms[i], j, D).terms)
                val = val * piece**e
            total = total + val
        return total

    # lambda structure -----------------------------------------------------------
    def _linear_parts(self):
        n = 0
        parts: list[tuple[BundleAtom, int]] = []
        for m, c in self.terms.items():
            if not m:
                n = c
            elif len(m) == 1 and m[0][1] == 1 and m[0][0][1] == 1:
                parts.append((self.atoms[m[0][0][0]], c))
            else:
                raise PreconditionError("lambda operations are modeled on sums of atoms only")
        if not isinstance(n, int) or any(not isinstance(c, int) for _, c in parts):
            raise PreconditionError("lambda operations need integer coefficients")
        return n, parts

    def lambda_series(self, order: int) -> list["VirtualBundle"]:
        """[lambda^0, ..., lambda^order] from lambda_t(n + sum c_a E_a)
        = (1+t)^n prod_a lambda_t(E_a)^{c_a}."""
        n, parts = self._linear_parts()
        one = VirtualBundle.scalar(1, self.atoms)
        series = [one * _binomial(n, j) for j in range(order + 1)]
        for atom, c in parts:
            base = [VirtualBundle.exterior(atom, j) for j in range(order + 1)]
            if c < 0:
                base = _series_inverse(base, order)
            for _ in range(abs(c)):
                series = _series_mul(series, base, order)
        return [VirtualBundle(self.atoms, s.terms) for s in series]

    def lambda_k(self, k: int) -> "VirtualBundle":
        return self.lambda_series(k)[k]

    def gamma_series(self, order: int) -> list["VirtualBundle"]:
        """gamma_t(x) = lambda_{t/(1-t)}(x): gamma^k = sum_i C(k-1, i-1) lambda^i."""
        lam = self.lambda_series(order)
        out = [lam[0]]
        for k in range(1, order + 1):
            acc = VirtualBundle(self.atoms)
            for i in range(1, k + 1):
                acc = acc + lam[i] * comb(k - 1, i - 1)
            out.append(acc)
        return out

    def __repr__(self):
        return f"VirtualBundle({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (sum(j * e for (_, j), e in m), m)):
            c = self.terms[m]
            factors = []
            for (i, j), e in m:
                name = i if j == 1 else f"Lambda^{j}({i})"
                factors.append(name if e == 1 else f"{name}^{e}")
            body = "*".join(factors)
            cs = str(c)
            if body and isinstance(c, HalfLaurent) and len(c.terms) > 1:
                cs = f"({cs})"
            if not body:
                parts.append(cs)
            elif c == 1:
                parts.append(body)
            elif c == -1:
                parts.append(f"-{body}")
            else:
                parts.append(f"{cs}*{body}")
        return " + ".join(parts).replace("+ -", "- ")


def _binomial(n: int, j: int) -> int:
    if n >= 0:
        return comb(n, j)
    return (-1) ** j * comb(-n + j - 1, j)


def _series_mul(a, b, order):
    out = [VirtualBundle() for _ in range(order + 1)]
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j in range(order + 1 - i):
            out[i + j] = out[i + j] + x * b[j]
    return out


def _series_inverse(a, order):
    """Inverse of a t-series with constant term 1."""
    out = [VirtualBundle.scalar(1)]
    for n in range(1, order + 1):
        acc = VirtualBundle()
        for i in range(1, n + 1):
            acc = acc + a[i] * out[n - i]
        out.append(-acc)
    return out


@lru_cache(maxsize=None)
def _exterior_chern(atom: BundleAtom, j: int, D: int) -> SymSeries:
    sigma = lambda_ch(j, atom.rank, D, atom.alphabet)
    if atom.conjugate:
        sigma = sigma.adams(-1)
    return sigma * to_rational_fn(HalfLaurent.g(j * atom.weight))


# ---------------------------------------------------------------------------
# gamma operations and P_{k, +-}


def gamma_k_closed(k: int, atom: BundleAtom) -> VirtualBundle:
    """gamma^k(E - r) = sum_i (-1)^(k-i) C(r-i, k-i) Lambda^i(E); 0 for k > r."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    r = atom.rank
    out = VirtualBundle([atom])
    if k > r:
        return out
    for i in range(k + 1):
        out = out + VirtualBundle.exterior(atom, i) * ((-1) ** (k - i) * comb(r - i, k - i))
    return out


def _compositions(k: int, r: int):
    """Tuples (n_1..n_r) of nonnegative integers with sum i n_i = k."""
    def rec(i, remaining):
        if i > r:
            if remaining == 0:
                yield ()
            return
        for n in range(remaining // i + 1):
            for rest in rec(i + 1, remaining - i * n):
                yield (n,) + rest

    yield from rec(1, k)


def p_k_net(k: int, atom: BundleAtom) -> VirtualBundle:
    """P_{k,+} - P_{k,-}: sum over (n_i) with sum i n_i = k of
    (-1)^{sum n} (sum n)!/prod n_i! prod gamma^i(E - r)^{n_i}."""
    if k < 0:
        return VirtualBundle([atom])
    if k == 0:
        return VirtualBundle.scalar(1, [atom])
    gammas = [None] + [gamma_k_closed(i, atom) for i in range(1, atom.rank + 1)]
    out = VirtualBundle([atom])
    for ns in _compositions(k, atom.rank):
        total = sum(ns)
        coeff = (-1) ** total * factorial(total)
        term = VirtualBundle.scalar(1, [atom])
        for i, n in enumerate(ns, start=1):
            coeff //= factorial(n)
            if n:
                term = term * gammas[i] ** n
        out = out + term * coeff
    return out


def p_k_pm(k: int, atom: BundleAtom) -> tuple[VirtualBundle, VirtualBundle]:
    """(P_{k,+}, P_{k,-}) by sign separation in the exterior-power monomial basis."""
    net = p_k_net(k, atom)
    return net.positive_part(), net.negative_part()


def n_rm_bound(r: int, m: int) -> int:
    """Nilpotency level 2 r^4 ((m+1)(2m+1) r^2 - 1)."""
    if r < 1 or m < 0:
        raise ValueError("need r >= 1 and m >= 0")
    return 2 * r**4 * ((m + 1) * (2 * m + 1) * r**2 - 1)


def gamma_nilpotency_check(atom: BundleAtom, exponents: Iterable[int], D: int) -> bool:
    """Whether ch(prod_i gamma^i(E - r)^{n_i}) vanishes at cutoff D."""
    exponents = list(exponents)
    if len(exponents) > atom.rank:
        raise ValueError("more exponents than the rank")
    plain = BundleAtom(atom.id, atom.rank, 0, atom.alphabet, atom.conjugate)
    prod = VirtualBundle.scalar(1, [plain])
    for i, n in enumerate(exponents, start=1):
        prod = prod * gamma_k_closed(i, plain) ** n
    return prod.chern(D).is_zero()


# ---------------------------------------------------------------------------
# truncated inverse


def _weights(weights) -> list[tuple[int, int]]:
    merged: dict[int, int] = {}
    for v, r in weights:
        if v < 1:
            raise ValueError("normal weights must be positive")
        if r < 0:
            raise ValueError("normal ranks must be nonnegative")
        merged[v] = merged.get(v, 0) + r
    return sorted((v, r) for v, r in merged.items() if r)


def _check_point(weights, pt):
    if isinstance(pt, RootOfUnity):
        for v, _ in weights:
            if pt.power_is_one(v):
                raise PreconditionError(f"point in exclusion set A (g^{v} = 1)")


def normal_dual_atom(v: int, r: int) -> BundleAtom:
    """N_v^* as an equivariant bundle (weight -v)."""
    return BundleAtom(f"N{v}*", r, -v, f"N{v}", True)


def trivialized_dual_atom(v: int, r: int) -> BundleAtom:
    """N_v^* with the trivial circle action; its Chern roots are those of N_v^*."""
    return BundleAtom(f"'N{v}*", r, 0, f"N{v}", True)


def lambda_minus_one(atom: BundleAtom) -> VirtualBundle:
    """sum_k (-1)^k Lambda^k(E)."""
    out = VirtualBundle([atom])
    for k in range(atom.rank + 1):
        out = out + VirtualBundle.exterior(atom, k) * (-1) ** k
    return out


def lambda_minus_one_normal(weights) -> VirtualBundle:
    """lambda_{-1}(N*) = prod_v lambda_{-1}(N_v^*)."""
    out = VirtualBundle.scalar(1)
    for v, r in _weights(weights):
        out = out * lambda_minus_one(normal_dual_atom(v, r))
    return out


@dataclass(frozen=True)
class TruncatedInverse:
    """prod_v g^{v r_v} numerator_v / (g^v - 1)^{r_v + N}.

    ``factors`` holds (v, r_v, numerator_v) with
    numerator_v = (g^v-1)^N + sum_{k=1}^N (-1)^k (g^v-1)^{N-k} (P_{k,+} - P_{k,-})('N_v^*).
    """

    level: int
    factors: tuple

    def denominator_exponents(self) -> dict[int, int]:
        return {v: r + self.level for v, r, _ in self.factors}

    def denominator(self) -> HalfLaurent:
        out = HalfLaurent(1)
        for v, e in self.denominator_exponents().items():
            out = out * (HalfLaurent.g(v) - 1) ** e
        return out

    def prefactor(self) -> HalfLaurent:
        return HalfLaurent.g(sum(v * r for v, r, _ in self.factors))

    def numerator(self) -> VirtualBundle:
        out = VirtualBundle.scalar(1)
        for _, _, num in self.factors:
            out = out * num
        return out

    def character(self) -> RationalFn:
        num = self.prefactor()
        for _, _, factor in self.factors:
            num = num * factor.character()
        return RationalFn(num, self.denominator())

    def chern(self, D: int, ranks: Mapping[str, int] | None = None) -> SymSeries:
        out = None
        for v, r, num in self.factors:
            piece = num.chern(D, ranks) * RationalFn(HalfLaurent.g(v * r), (HalfLaurent.g(v) - 1) ** (r + self.level))
            out = piece if out is None else out * piece
        if out is None:
            return SymSeries.constant(to_rational_fn(1), dict(ranks or {}), D)
        return out

    def denominator_str(self) -> str:
        parts = []
        for v, e in sorted(self.denominator_exponents().items()):
            base = "(g-1)" if v == 1 else f"(g^{v}-1)"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "".join(parts) or "1"

    def __str__(self):
        return f"[{self.prefactor()}] * ({self.numerator()}) / {self.denominator_str()}"


def truncated_inverse(weights, N: int, pt=None) -> TruncatedInverse:
    """The level-N truncated inverse of lambda_{-1}(N*) as a product over weights of
    (g^{v r}/(g^v-1)^r) (1 + sum_{k<=N} (-1)^k (g^v-1)^{-k} (P_{k,+} - P_{k,-})('N_v^*))."""
    if N < 1:
        raise ValueError("truncation level N must be >= 1")
    weights = _weights(weights)
    _check_point(weights, pt)
    factors = []
    for v, r in weights:
        atom = trivialized_dual_atom(v, r)
        gv1 = HalfLaurent.g(v) - 1
        num = VirtualBundle.scalar(gv1**N, [atom])
        for k in range(1, N + 1):
            num = num + p_k_net(k, atom) * ((-1) ** k * gv1 ** (N - k))
        factors.append((v, r, num))
    return TruncatedInverse(N, tuple(factors))


def verify_unit_identity(weights, N: int, D: int, pt=None) -> bool:
    """ch_g(lambda_{-1} N*) ch_g(inverse_N) = 1 at cutoff D, and the same for characters."""
    weights = _weights(weights)
    _check_point(weights, pt)
    if N < D:
        raise PreconditionError(f"the unit identity at cutoff {D} needs N >= {D}")
    inv = truncated_inverse(weights, N, pt)
    lam = lambda_minus_one_normal(weights)
    ranks = {f"N{v}": r for v, r in weights}
    chern_ok = lam.chern(D, ranks) * inv.chern(D, ranks) == SymSeries.constant(to_rational_fn(1), ranks, D)
    char_ok = to_rational_fn(lam.character()) * inv.character() == 1
    return chern_ok and char_ok
