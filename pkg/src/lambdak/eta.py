"""Reduced eta invariants: the rotating circle, component data and the
rationality of the localization defect Q_N.

For the unit circle rotated with speed k the reduced eta invariant is
1/(1 - g^k) away from g^k = 1 and 1/2 on it.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import PreconditionError, SchemaError
from .lambda_engine import n_rm_bound
from .localization import FixedComponent, component_contribution
from .ring import (
    GENERIC,
    CyclotomicNumber,
    Generic,
    HalfLaurent,
    RationalFn,
    ReconstructionError,
    RootOfUnity,
    exact_value,
    exclusion_for_weights,
    rational_reconstruct,
    to_rational_fn,
)
from .ring import poly


class RationalityError(ValueError):
    """A reconstructed function fails the integrality or pole test."""


# ---------------------------------------------------------------------------
# the circle


def circle_eta_function(k: int) -> RationalFn:
    if k < 1:
        raise ValueError("rotation speed k must be >= 1")
    return RationalFn(1, 1 - HalfLaurent.g(k))


def circle_exclusion(k: int) -> frozenset:
    return exclusion_for_weights([k])


def circle_eta_closed(k: int, pt=GENERIC):
    """1/(1 - g^k) as a RationalFn at a generic point, its exact value at a
    root of unity with g^k != 1, and 1/2 when g^k = 1."""
    f = circle_eta_function(k)
    if pt is None or isinstance(pt, Generic):
        return f
    if pt.power_is_one(k):
        return Fraction(1, 2)
    return exact_value(f, pt)


def _as_fraction_t(t):
    if isinstance(t, str):
        return Fraction(t)
    return t


def circle_eta_abel_oracle(k: int, t, eps0: float | None = None, levels: int = 8) -> tuple[complex, float]:
    """Reduced eta at g = exp(2 pi i t) from the Abel-smoothed character series.

    eta(r) = sum_{n>=1} (g^{nk} - g^{-nk}) r^n is summed directly at
    r = 1 - eps for eps = eps0 / 2^j, extrapolated to eps = 0 (Neville), and
    reduced as (eta + 1) / 2 (the kernel is the constants, on which g acts
    trivially).  Returns (value, |value - closed form|).
    """
    if k < 1:
        raise ValueError("rotation speed k must be >= 1")
    t = _as_fraction_t(t)
    kt = k * t
    if isinstance(kt, Fraction):
        on_a = kt.denominator == 1
    else:
        on_a = abs(kt - round(kt)) < 1e-12
    if on_a:
        raise PreconditionError("point in A (g^k = 1); use the value 1/2 there")
    theta = 2 * np.pi * float(kt)
    z = np.exp(1j * theta)
    dist = abs(1 - z)
    if eps0 is None:
        eps0 = min(0.1, dist / 4)
    xs, ys = [], []
    for j in range(levels + 1):
        eps = eps0 / 2**j
        r = 1.0 - eps
        n_max = int(np.ceil(42.0 / eps))  # r^n_max < 1e-18
        total = 0j
        for start in range(1, n_max + 1, 1 << 20):
            n = np.arange(start, min(start + (1 << 20), n_max + 1), dtype=np.float64)
            rn = np.exp(n * np.log(r))
            total += np.sum((np.exp(1j * theta * n) - np.exp(-1j * theta * n)) * rn)
        xs.append(eps)
        ys.append(total)
    eta = _neville_at_zero(xs, ys)
    value = (eta + 1) / 2
    closed = 1 / (1 - z)
    return complex(value), float(abs(value - closed))


def _neville_at_zero(xs, ys):
    p = list(ys)
    n = len(xs)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (xs[i + m] * p[i] - xs[i] * p[i + 1]) / (xs[i + m] - xs[i])
    return p[0]


def disc_origin(k: int) -> FixedComponent:
    """The origin of the disc bounding the rotated circle: normal weight k,
    prefactor g^0, orientation and coefficient weight calibrated so that the
    contribution is 1/(1 - g^k)."""
    return FixedComponent("origin", 0, ((k, 1),), k, ((-k, 1),), orientation=-1)


def aps_disc_consistency(k: int, pt=None) -> bool:
    """Circle eta against the disc's fixed-point contribution minus its
    (vanishing) APS index."""
    closed = circle_eta_function(k)
    disc = component_contribution(disc_origin(k)) - 0
    if pt is None or isinstance(pt, Generic):
        return closed == disc
    if pt.power_is_one(k):
        raise PreconditionError("point in A (g^k = 1)")
    exact_ok = exact_value(closed, pt) == exact_value(disc, pt)
    numeric_ok = abs(complex(closed.at_q(pt.q_complex())) - complex(disc.at_q(pt.q_complex()))) < 1e-12
    return exact_ok and numeric_ok


# ---------------------------------------------------------------------------
# component eta data and Q_N


@dataclass(frozen=True)
class ComponentEtaData:
    """Reduced eta values of a fixed component, keyed by (k, v, sign).

    ``prefactor_exp`` is (l - sum v r_v) / 2; ``weights`` are the normal
    (v, r_v); ``dim`` is the real dimension of the component, which enters
    the nilpotency threshold.
    """

    name: str
    prefactor_exp: Fraction
    entries: Mapping = field(default_factory=dict)
    weights: tuple = ()
    dim: int = 0

    def __post_init__(self):
        object.__setattr__(self, "prefactor_exp", Fraction(self.prefactor_exp))
        object.__setattr__(self, "weights", tuple((int(v), int(r)) for v, r in self.weights))
        clean = {}
        for (k, v, sign), eta in dict(self.entries).items():
            if sign not in ("+", "-"):
                raise SchemaError(f"{self.name}: sign must be '+' or '-'")
            if k < 0:
                raise SchemaError(f"{self.name}: k must be >= 0")
            clean[(int(k), int(v), sign)] = Fraction(eta)
        object.__setattr__(self, "entries", clean)

    def check_parity(self):
        if self.prefactor_exp.denominator != 1:
            raise PreconditionError(f"{self.name}: parity violation, prefactor exponent {self.prefactor_exp}")

    def threshold(self) -> int:
        return max((n_rm_bound(r, self.dim) for _, r in self.weights if r), default=0)


def _rational_monomial(e: int, c: Fraction) -> RationalFn:
    return RationalFn(HalfLaurent.g(e, c.numerator), c.denominator)


def eta_component_sum(d: ComponentEtaData) -> RationalFn:
    """g^{prefactor} sum_{k, v} g^{k+v} [eta(k, v, +) - eta(k, v, -)]."""
    d.check_parity()
    shift = int(d.prefactor_exp)
    acc: dict[int, Fraction] = {}
    for (k, v, sign), eta in d.entries.items():
        e = shift + k + v
        acc[e] = acc.get(e, Fraction(0)) + (eta if sign == "+" else -eta)
    out = RationalFn(0)
    for e, c in acc.items():
        if c:
            out = out + _rational_monomial(e, c)
    return out


@dataclass(frozen=True)
class QDefect:
    value: RationalFn
    N: int
    threshold: int

    @property
    def above_threshold(self) -> bool:
        return self.N > self.threshold


def defect_denominator_bound(components: Iterable[ComponentEtaData], N: int) -> HalfLaurent:
    """prod_v (g^v - 1)^{max_alpha r_{alpha,v} + N}."""
    top: dict[int, int] = {}
    for c in components:
        for v, r in c.weights:
            if r:
                top[v] = max(top.get(v, 0), r)
    out = HalfLaurent(1)
    for v, r in top.items():
        out = out * (HalfLaurent.g(v) - 1) ** (r + N)
    return out


def q_defect_assemble(eta_total, components: Iterable[ComponentEtaData], N: int, pt=None) -> QDefect:
    """Q_N = eta_total - sum_alpha prod_v (g^v - 1)^{-r_v - N} eta_component_sum(alpha)."""
    components = list(components)
    if N < 1:
        raise ValueError("truncation level N must be >= 1")
    if isinstance(pt, RootOfUnity):
        for c in components:
            for v, r in c.weights:
                if r and pt.power_is_one(v):
                    raise PreconditionError(f"point in exclusion set A (g^{v} = 1)")
    threshold = max((c.threshold() for c in components), default=0)
    if N <= threshold:
        warnings.warn(f"N = {N} does not exceed the nilpotency threshold {threshold}", stacklevel=2)
    value = to_rational_fn(eta_total)
    for c in components:
        den = HalfLaurent(1)
        for v, r in c.weights:
            if r:
                den = den * (HalfLaurent.g(v) - 1) ** (r + N)
        value = value - eta_component_sum(c) / to_rational_fn(den)
    return QDefect(value, N, threshold)


def eta_data_from_dict(data: Mapping) -> tuple[list[ComponentEtaData], int]:
    if not isinstance(data, Mapping) or not isinstance(data.get("components"), list):
        raise SchemaError("eta data needs a 'components' list")
    comps = []
    try:
        for c in data["components"]:
            entries = {
                (int(e["k"]), int(e["v"]), e["sign"]): Fraction(str(e["eta"])) for e in c.get("entries", [])
            }
            weights = [(int(w["v"]), int(w["rank"])) for w in c.get("weights", [])]
            comps.append(
                ComponentEtaData(str(c["name"]), Fraction(str(c["prefactor_exp"])), entries, weights, int(c.get("dim", 0)))
            )
        N = int(data.get("N", 1))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"malformed eta data: {exc}") from None
    return comps, N


def load_eta_data(source) -> tuple[list[ComponentEtaData], int]:
    if isinstance(source, Mapping):
        return eta_data_from_dict(source)
    text = str(source)
    builtin = resources.files("lambdak") / "fixtures" / f"{text}.json"
    try:
        if builtin.is_file():
            raw = json.loads(builtin.read_text())
        elif text.lstrip().startswith("{"):
            raw = json.loads(text)
        else:
            with open(text) as fh:
                raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    return eta_data_from_dict(raw)


# ---------------------------------------------------------------------------
# rationality


def _primitive_roots(n: int) -> list[RootOfUnity]:
    return [RootOfUnity(n, j) for j in range(n) if gcd(j, n) == 1]


def _allowed_order(n: int, A: frozenset) -> bool:
    return all(pt in A for pt in _primitive_roots(n))


def poles_outside(f: RationalFn, A: Iterable[RootOfUnity]) -> list[str]:
    """Unit-circle poles of f that are not in A.

    Cyclotomic factors of the denominator give the roots of unity among its
    zeros; whatever remains is checked numerically for roots of modulus one.
    """
    A = frozenset(A)
    den = f.den
    if den.is_integral():
        _, dense = den.g_dense()
        halve = False
    else:
        _, dense = den.q_dense()
        halve = True
    orders, rest = poly.strip_cyclotomic(dense)
    bad = []
    for n in sorted(orders):
        m = n // gcd(n, 2) if halve else n
        if not _allowed_order(m, A):
            bad.append(f"roots of unity of order {m}")
    if len(rest) > 1:
        roots = np.roots([float(c) for c in reversed(rest)])
        for z in roots:
            if abs(abs(z) - 1) < 1e-9:
                bad.append(f"unit-circle root {complex(z):.6f} of infinite order")
    return bad


def _sample_order(A: frozenset, count: int, avoid: Iterable[int] = ()) -> int:
    """A prime p with p - 1 >= count whose nontrivial p-th roots avoid A."""
    avoid = set(avoid)
    p = max(count + 1, 3)
    while True:
        if all(p % d for d in range(2, int(p**0.5) + 1)) and p not in avoid:
            if not any(pt.n == p for pt in A):
                return p
        p += 1


def verify_rationality(
    f: Callable[[RootOfUnity], object],
    A: Iterable[RootOfUnity],
    degree_bound: int,
    samples: int | None = None,
) -> RationalFn:
    """Reconstruct a black box from root-of-unity samples and certify it.

    Uses 4 * degree_bound + 1 samples by default (enough for the half-power
    fallback), checks the answer on fresh points of another order, and
    rejects non-integral coefficients or poles outside A.
    """
    A = frozenset(A)
    count = samples if samples is not None else 4 * degree_bound + 1
    if count < 2 * degree_bound + 1:
        raise ValueError(f"need at least {2 * degree_bound + 1} samples")
    p = _sample_order(A, count)
    pts = [RootOfUnity(p, j) for j in range(1, count + 1)]
    data = [(pt, f(pt)) for pt in pts]
    try:
        result = rational_reconstruct(data, degree_bound, exclude=A)
    except ReconstructionError as exc:
        raise RationalityError(f"reconstruction failed: {exc}") from None
    q = _sample_order(A, 3, avoid={p})
    for pt in [RootOfUnity(q, j) for j in range(1, min(q, 4))]:
        got = f(pt)
        try:
            want = exact_value(result, pt)
        except ZeroDivisionError:
            raise RationalityError(f"reconstruction has a pole at the check point {pt}") from None
        if isinstance(got, complex) or isinstance(got, float):
            if abs(complex(got) - want.to_complex()) > 1e-8:
                raise RationalityError(f"reconstruction inconsistent at {pt}")
        elif want != (got if isinstance(got, CyclotomicNumber) else CyclotomicNumber.rational(want.m, got)):
            raise RationalityError(f"reconstruction inconsistent at {pt}")
    bad = poles_outside(result, A)
    if bad:
        raise RationalityError("pole outside A: " + ", ".join(bad))
    return result
