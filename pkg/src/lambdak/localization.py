"""Character-level fixed-point localization of an equivariant index.

Each fixed component contributes

    eps * integral  A(T) ch_g(L_alpha^{1/2}) ch_g(lambda_{-1}(N*)^{-1}_N) ch_g(E)

where L_alpha = L (det N)^{-1}.  For an isolated point this collapses to

    eps * g^{(l - sum v r_v)/2} (sum_w rank E_w g^w) prod_v (g^v / (g^v - 1))^{r_v}.

``eps`` is the orientation sign of the component; it is fixed per component in
the data file (calibrated once against a known character).
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping

import sympy

from .errors import PreconditionError, SchemaError
from .lambda_engine import truncated_inverse
from .ring import HalfLaurent, RationalFn, RootOfUnity, exclusion_for_weights, to_rational_fn
from .symfun import SymSeries, a_hat, integrate, normal_alphabet


@dataclass(frozen=True)
class FixedComponent:
    name: str
    dim: int
    normal: tuple  # ((v, r_v), ...)
    l: int
    E: tuple = ((0, 1),)  # ((weight, rank), ...)
    chern_numbers: Mapping[str, Fraction] | None = None
    orientation: int = 1

    def __post_init__(self):
        object.__setattr__(self, "normal", tuple((int(v), int(r)) for v, r in self.normal))
        object.__setattr__(self, "E", tuple((int(w), int(r)) for w, r in self.E))
        if self.dim < 0 or self.dim % 2:
            raise SchemaError(f"component {self.name}: dim must be a nonnegative even integer")
        if any(v < 1 for v, _ in self.normal):
            raise SchemaError(f"component {self.name}: normal weights must be positive")
        if any(r < 0 for _, r in self.normal) or any(r < 0 for _, r in self.E):
            raise SchemaError(f"component {self.name}: ranks must be nonnegative")
        if self.orientation not in (1, -1):
            raise SchemaError(f"component {self.name}: orientation must be +1 or -1")

    @property
    def weight_sum(self) -> int:
        return sum(v * r for v, r in self.normal)

    @property
    def parity_ok(self) -> bool:
        return (self.weight_sum + self.l) % 2 == 0

    @property
    def prefactor_exponent(self) -> int:
        """(l - sum v r_v) / 2, integral by parity."""
        self.check_parity()
        return (self.l - self.weight_sum) // 2

    @property
    def isolated(self) -> bool:
        return self.dim == 0

    def active_weights(self) -> list[int]:
        return sorted({v for v, r in self.normal if r})

    def check_parity(self):
        if not self.parity_ok:
            raise PreconditionError(
                f"component {self.name}: parity violation, sum v r_v + l = {self.weight_sum + self.l} is odd"
            )

    def e_alphabet(self, i: int) -> str:
        return "E" if len(self.E) == 1 else f"E{i + 1}"


@dataclass(frozen=True)
class FixedPointData:
    components: tuple
    extra_exclusions: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "extra_exclusions", frozenset(self.extra_exclusions))

    @property
    def exclusion_set(self) -> frozenset:
        weights = {v for c in self.components for v in c.active_weights()}
        return exclusion_for_weights(weights) | self.extra_exclusions

    def excludes(self, pt) -> bool:
        if not isinstance(pt, RootOfUnity):
            return False
        if pt in self.extra_exclusions:
            return True
        return any(pt.power_is_one(v) for c in self.components for v in c.active_weights())

    def check_point(self, pt):
        if pt is not None and self.excludes(pt):
            raise PreconditionError(f"point g = exp(2 pi i {pt.t}) is in the exclusion set A")


@dataclass(frozen=True)
class LocalizedIndex:
    value: RationalFn
    contributions: tuple  # ((name, RationalFn), ...)

    def pole_cancellation(self):
        return pole_cancellation_check(self)


# ---------------------------------------------------------------------------
# contributions


def isolated_contribution(c: FixedComponent) -> RationalFn:
    """The closed form for an isolated fixed point."""
    num = HalfLaurent()
    for w, r in c.E:
        num = num + HalfLaurent.g(w, r)
    out = to_rational_fn(num * HalfLaurent.g(c.prefactor_exponent) * c.orientation)
    for v, r in c.normal:
        out = out * RationalFn(HalfLaurent.g(v), HalfLaurent.g(v) - 1) ** r
    return out


def contribution_series(c: FixedComponent, D: int) -> SymSeries:
    """A(T) ch_g(L_alpha^{1/2}) ch_g(inverse_N) ch_g(E) at cutoff D with N = max(D, 1)."""
    normal = [(v, r) for v, r in c.normal if r]
    ranks = {"T": c.dim // 2, "L": 1}
    ranks |= {normal_alphabet(v): r for v, r in normal}
    ranks |= {c.e_alphabet(i): r for i, (_, r) in enumerate(c.E) if r}
    one = SymSeries.constant(to_rational_fn(1), ranks, D)

    half_c1 = SymSeries.power_sum("L", 1, ranks, D)
    for v, _ in normal:
        half_c1 = half_c1 - SymSeries.power_sum(normal_alphabet(v), 1, ranks, D)
    twist = (half_c1 * Fraction(1, 2)).exp() * to_rational_fn(HalfLaurent.g(c.prefactor_exponent))

    coeff = SymSeries(ranks, D)
    for i, (w, r) in enumerate(c.E):
        if r:
            ch = SymSeries(ranks, D)
            for k in range(D + 1):
                ch = ch + SymSeries.power_sum(c.e_alphabet(i), k, ranks, D) * Fraction(1, _factorial(k))
            coeff = coeff + ch * to_rational_fn(HalfLaurent.g(w))

    inverse = truncated_inverse(normal, max(D, 1)).chern(D, ranks) if normal else one
    tangent = a_hat(c.dim // 2, D, "T", ranks) if c.dim else one
    return tangent * twist * inverse * coeff * c.orientation


def _factorial(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def component_contribution(c: FixedComponent, D: int | None = None, pt=None) -> RationalFn:
    """The component's share of the localized index as a rational function of g."""
    c.check_parity()
    if pt is not None and isinstance(pt, RootOfUnity):
        for v in c.active_weights():
            if pt.power_is_one(v):
                raise PreconditionError(f"point in exclusion set A (g^{v} = 1)")
    if c.isolated:
        return isolated_contribution(c)
    if c.chern_numbers is None:
        raise PreconditionError(f"component {c.name} has dim {c.dim} but no Chern numbers")
    degree = c.dim // 2
    series = contribution_series(c, max(D or 0, degree))
    try:
        value = integrate(series, c.chern_numbers, degree)
    except KeyError as exc:
        raise PreconditionError(f"component {c.name}: {exc.args[0]}") from None
    return to_rational_fn(value)


def localized_index(data: FixedPointData, D: int | None = None, pt=None) -> LocalizedIndex:
    data.check_point(pt)
    parts = tuple((c.name, component_contribution(c, D, pt)) for c in data.components)
    total = RationalFn(0)
    for _, v in parts:
        total = total + v
    return LocalizedIndex(total, parts)


def pole_cancellation_check(idx: LocalizedIndex) -> tuple[bool, HalfLaurent | None]:
    """Whether the index is a Laurent polynomial, and the Laurent character if so."""
    if idx.value.is_laurent():
        return True, idx.value.as_laurent()
    return False, None


# ---------------------------------------------------------------------------
# expansion in g^{-1}


def _inverse_power_series(normal, depth: int) -> list[int]:
    """Coefficients of prod_v (1 - x^v)^{-r_v} up to x^depth."""
    out = [1] + [0] * depth
    for v, r in normal:
        for _ in range(r):
            for n in range(v, depth + 1):
                out[n] += out[n - v]
    return out


def _require_isolated(data: FixedPointData):
    for c in data.components:
        if not c.isolated:
            raise PreconditionError(f"component {c.name} is not isolated; expansion needs isolated points")
        c.check_parity()


def _top(c: FixedComponent) -> int:
    ws = [w for w, r in c.E if r]
    return c.prefactor_exponent + max(ws) if ws else c.prefactor_exponent


def sym_expansion(data: FixedPointData, k_range: Iterable[int] | tuple[int, int]) -> dict[int, int]:
    """Coefficient of g^k of the sum of contributions, each expanded in powers of g^{-1}.

    ``k_range`` is either an iterable of k or a pair (lo, hi), inclusive.
    """
    _require_isolated(data)
    if isinstance(k_range, tuple) and len(k_range) == 2:
        ks = list(range(k_range[0], k_range[1] + 1))
    else:
        ks = list(k_range)
    out = {k: 0 for k in ks}
    if not ks:
        return out
    lo = min(ks)
    for c in data.components:
        h = c.prefactor_exponent
        depth = _top(c) - lo
        if depth < 0:
            continue
        series = _inverse_power_series(c.normal, depth)
        for k in ks:
            for w, r in c.E:
                n = h + w - k
                if 0 <= n <= depth:
                    out[k] += c.orientation * r * series[n]
    return out


def cancellation_check(data: FixedPointData, K: int) -> bool:
    """Whether every coefficient of the expansion vanishes for |k| > K.

    The expansion in x = g^{-1} is P(x)/Q(x) with Q = prod_v (1 - x^v)^{R_v};
    once deg Q consecutive coefficients past deg P vanish, all later ones do.
    """
    _require_isolated(data)
    comps = [c for c in data.components if any(r for _, r in c.E)]
    if not comps:
        return True
    top = max(_top(c) for c in comps)
    R: dict[int, int] = {}
    for c in comps:
        for v, r in c.normal:
            R[v] = max(R.get(v, 0), r)
    deg_q = sum(v * r for v, r in R.items())
    deg_p = 0
    for c in comps:
        low = c.prefactor_exponent + min(w for w, r in c.E if r)
        deg_p = max(deg_p, top - low + deg_q - c.weight_sum)
    n_k = top + K + 1
    last = max(n_k + deg_q - 1, deg_p)
    coeffs = sym_expansion(data, (top - last, top))
    return all(v == 0 for k, v in coeffs.items() if abs(k) > K)


# ---------------------------------------------------------------------------
# loading


def _int_field(value, params: Mapping[str, int], what: str) -> int:
    if isinstance(value, bool):
        raise SchemaError(f"{what}: expected an integer")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            expr = sympy.sympify(value, locals={k: sympy.Integer(v) for k, v in params.items()})
        except (sympy.SympifyError, TypeError, SyntaxError):
            raise SchemaError(f"{what}: cannot parse {value!r}") from None
        if expr.free_symbols or not expr.is_integer:
            raise SchemaError(f"{what}: {value!r} is not an integer for parameters {dict(params)}")
        return int(expr)
    raise SchemaError(f"{what}: expected an integer, got {value!r}")


def component_from_dict(d: Mapping, params: Mapping[str, int] | None = None) -> FixedComponent:
    params = params or {}
    if not isinstance(d, Mapping):
        raise SchemaError("component entries must be objects")
    try:
        name = str(d.get("name", "?"))
        dim = _int_field(d.get("dim", 0), params, f"{name}.dim")
        normal = [
            (_int_field(n["v"], params, f"{name}.normal.v"), _int_field(n["rank"], params, f"{name}.normal.rank"))
            for n in d.get("normal", [])
        ]
        E = [
            (_int_field(e["weight"], params, f"{name}.E.weight"), _int_field(e["rank"], params, f"{name}.E.rank"))
            for e in d.get("E", [{"weight": 0, "rank": 1}])
        ]
        l = _int_field(d["l"], params, f"{name}.l")
        orientation = _int_field(d.get("orientation", 1), params, f"{name}.orientation")
    except KeyError as exc:
        raise SchemaError(f"component field missing: {exc.args[0]}") from None
    except TypeError:
        raise SchemaError("malformed component entry") from None
    numbers = d.get("chern_numbers")
    if numbers is not None:
        try:
            numbers = {str(k): Fraction(v) for k, v in numbers.items()}
        except (ValueError, TypeError, AttributeError):
            raise SchemaError(f"{name}: chern_numbers must map monomial names to rationals") from None
    return FixedComponent(name, dim, tuple(normal), l, tuple(E), numbers, orientation)


def fixed_point_data_from_dict(data: Mapping, params: Mapping[str, int] | None = None) -> FixedPointData:
    if not isinstance(data, Mapping) or not isinstance(data.get("components"), list):
        raise SchemaError("fixed point data needs a 'components' list")
    merged = {k: int(v) for k, v in data.get("parameters", {}).items()}
    merged.update(params or {})
    comps = [component_from_dict(c, merged) for c in data["components"]]
    extras = set()
    for e in data.get("exclude", []):
        try:
            extras.add(RootOfUnity(int(e["n"]), int(e["k"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad exclusion entry {e!r}: {exc}") from None
    return FixedPointData(tuple(comps), frozenset(extras))


def load_fixed_point_data(source, params: Mapping[str, int] | None = None) -> FixedPointData:
    """Load from a mapping, a built-in fixture name, a JSON string or a path."""
    if isinstance(source, Mapping):
        return fixed_point_data_from_dict(source, params)
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
    return fixed_point_data_from_dict(raw, params)


def cp1(m: int) -> FixedPointData:
    """CP^1 with the line bundle O(m) and the rotation action."""
    return load_fixed_point_data("cp1_om", {"m": m})
