"""Finite differential graded-commutative algebras and the ring Gamma.

A :class:`Cdga` is free graded-commutative on a few generators, truncated
above a top degree, with a differential given on generators and extended by
the Leibniz rule.  It stands in for the de Rham complex.  On top of it,
:class:`GammaElement` models pairs (closed even form, odd form mod exact)
with the product

    (w1, p1) * (w2, p2) = (w1 w2, w1 p2 + p1 w2 - d(p1) p2),

Adams operations scaling the part of degree 2l (resp. 2l - 1) by k**l, and
the lambda operations obtained from them by the exponential formula.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from functools import cached_property
from importlib import resources
from math import comb, factorial
from typing import Mapping, Sequence

from .errors import PreconditionError, SchemaError
from .ring import HalfLaurent, to_rational_fn

RELATIONS = ("exterior", "truncated-polynomial")


class Cdga:
    """Truncated free graded-commutative algebra with a differential.

    ``generators`` is a sequence of (name, degree) with positive degrees,
    ``differential`` maps generator names to elements (strings like
    ``"x*y - 2*z"`` or mappings monomial -> coefficient).  With
    ``relations="exterior"`` every generator squares to zero; otherwise odd
    generators square to zero and even ones are polynomial.
    """

    def __init__(
        self,
        generators: Sequence[tuple[str, int]],
        differential: Mapping[str, object] | None = None,
        relations: str = "truncated-polynomial",
        top_degree: int | None = None,
        name: str = "",
    ):
        if relations not in RELATIONS:
            raise SchemaError(f"unknown relations {relations!r}")
        names = [n for n, _ in generators]
        if len(set(names)) != len(names):
            raise SchemaError("duplicate generator names")
        for n, deg in generators:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n):
                raise SchemaError(f"bad generator name {n!r}")
            if deg < 1:
                raise SchemaError(f"generator {n} must have positive degree")
        self.name = name
        self.generators = tuple((n, int(d)) for n, d in generators)
        self.relations = relations
        if top_degree is None:
            if relations == "truncated-polynomial" and any(d % 2 == 0 for _, d in self.generators):
                raise SchemaError("top_degree is required with even polynomial generators")
            top_degree = sum(d for _, d in self.generators)
        self.top_degree = int(top_degree)
        self._index = {n: i for i, n in enumerate(names)}
        self._build_basis()
        self._build_products()
        self._d_gen = {}
        for gname, target in (differential or {}).items():
            if gname not in self._index:
                raise SchemaError(f"differential of unknown generator {gname!r}")
            value = self.element(target)
            deg = self.generators[self._index[gname]][1] + 1
            if any(self.degrees[i] != deg for i in value.terms):
                raise SchemaError(f"d({gname}) must have degree {deg}")
            self._d_gen[gname] = value
        self._d_cache: dict[int, Form] = {}
        self.validate()

    # construction -----------------------------------------------------------
    def _max_exponent(self, deg: int) -> int:
        if self.relations == "exterior" or deg % 2:
            return 1
        return self.top_degree // deg

    def _build_basis(self):
        monos = [()]
        for _, deg in self.generators:
            nxt = []
            for m in monos:
                used = sum(e * d for e, (_, d) in zip(m, self.generators))
                for e in range(self._max_exponent(deg) + 1):
                    if used + e * deg <= self.top_degree:
                        nxt.append(m + (e,))
            monos = nxt
        monos.sort(key=lambda m: (self._mono_degree(m), [-e for e in m]))
        self.monomials = monos
        self.mono_index = {m: i for i, m in enumerate(monos)}
        self.degrees = [self._mono_degree(m) for m in monos]
        self.basis = [(self._mono_name(m), d) for m, d in zip(monos, self.degrees)]

    def _mono_degree(self, m) -> int:
        return sum(e * d for e, (_, d) in zip(m, self.generators))

    def _mono_name(self, m) -> str:
        parts = []
        for e, (n, _) in zip(m, self.generators):
            if e == 1:
                parts.append(n)
            elif e > 1:
                parts.append(f"{n}^{e}")
        return "*".join(parts) or "1"

    def _build_products(self):
        odd = [d % 2 for _, d in self.generators]
        table = {}
        for i, a in enumerate(self.monomials):
            for j, b in enumerate(self.monomials):
                if self.degrees[i] + self.degrees[j] > self.top_degree:
                    continue
                m = tuple(x + y for x, y in zip(a, b))
                if m not in self.mono_index:
                    continue
                # moving each odd generator of b left past the odd generators of a
                # with larger index
                swaps = 0
                for jj, e in enumerate(b):
                    if e and odd[jj]:
                        swaps += sum(a[ii] for ii in range(jj + 1, len(a)) if odd[ii])
                table[i, j] = (-1 if swaps % 2 else 1, self.mono_index[m])
        self._table = table

    def validate(self):
        """Check d o d = 0 and the Leibniz rule on all basis elements."""
        basis = [self.basis_element(i) for i in range(len(self.monomials))]
        for i, a in enumerate(basis):
            if not self.d(self.d(a)).is_zero():
                raise SchemaError(f"d o d != 0 on {self.basis[i][0]}")
        for i, a in enumerate(basis):
            sign = -1 if self.degrees[i] % 2 else 1
            da = self.d(a)
            for b in basis:
                if self.d(a * b) != da * b + sign * (a * self.d(b)):
                    raise SchemaError(f"Leibniz rule fails on {a} * {b}")

    # elements ---------------------------------------------------------------
    @cached_property
    def zero(self) -> "Form":
        return Form(self, {})

    @cached_property
    def one(self) -> "Form":
        return Form(self, {0: Fraction(1)})

    def basis_element(self, i: int) -> "Form":
        return Form(self, {i: Fraction(1)})

    def gen(self, name: str) -> "Form":
        return self.element(name)

    def element(self, spec) -> "Form":
        """Build an element from a Form, number, string or mapping."""
        if isinstance(spec, Form):
            if spec.algebra is not self:
                raise ValueError("element of a different algebra")
            return spec
        if isinstance(spec, (int, Fraction)):
            return Form(self, {0: Fraction(spec)})
        if isinstance(spec, str):
            return self._parse(spec)
        if isinstance(spec, Mapping):
            out = self.zero
            for mono, c in spec.items():
                out = out + self._parse(mono) * Fraction(c)
            return out
        raise TypeError(f"cannot build an element from {spec!r}")

    _TERM = re.compile(r"\s*([+-]?)\s*([^+-]+)")

    def _parse(self, text: str) -> "Form":
        text = text.strip()
        if not text:
            raise SchemaError("empty expression")
        out = self.zero
        pos = 0
        for match in self._TERM.finditer(text):
            if match.start() != pos:
                raise SchemaError(f"cannot parse {text!r}")
            pos = match.end()
            sign, body = match.groups()
            term = self.one
            for factor in body.strip().split("*"):
                factor = factor.strip()
                if re.fullmatch(r"\d+(/\d+)?", factor):
                    term = term * Fraction(factor)
                    continue
                fm = re.fullmatch(r"([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?", factor)
                if not fm or fm.group(1) not in self._index:
                    raise SchemaError(f"unknown factor {factor!r} in {text!r}")
                exps = [0] * len(self.generators)
                exps[self._index[fm.group(1)]] = 1
                g = Form(self, {self.mono_index[tuple(exps)]: Fraction(1)}) if tuple(exps) in self.mono_index else self.zero
                for _ in range(int(fm.group(2) or 1)):
                    term = term * g
            out = out - term if sign == "-" else out + term
        if pos != len(text):
            raise SchemaError(f"cannot parse {text!r}")
        return out

    # differential -----------------------------------------------------------
    def _d_basis(self, i: int) -> "Form":
        if i in self._d_cache:
            return self._d_cache[i]
        m = self.monomials[i]
        first = next((j for j, e in enumerate(m) if e), None)
        if first is None:
            out = self.zero
        else:
            name, deg = self.generators[first]
            gen_exps = tuple(1 if j == first else 0 for j in range(len(m)))
            rest_exps = tuple(e - 1 if j == first else e for j, e in enumerate(m))
            gen = self.basis_element(self.mono_index[gen_exps])
            rest = self.basis_element(self.mono_index[rest_exps])
            # m = gen * rest with sign +1 since gen has the smallest index
            dgen = self._d_gen.get(name, self.zero)
            sign = -1 if deg % 2 else 1
            out = dgen * rest + sign * (gen * self._d_basis(self.mono_index[rest_exps]))
        self._d_cache[i] = out
        return out

    def d(self, x: "Form") -> "Form":
        out: dict[int, object] = {}
        for i, c in x.terms.items():
            for j, e in self._d_basis(i).terms.items():
                out[j] = out.get(j, 0) + c * e
        return Form(self, out)

    # linear algebra on degree pieces ----------------------------------------
    def indices_of_degree(self, pred) -> list[int]:
        return [i for i, deg in enumerate(self.degrees) if pred(deg)]

    @cached_property
    def _odd_image(self):
        """Reduced echelon basis of Im d inside odd degrees: list of (pivot, row)."""
        rows = [self.d(self.basis_element(i)).terms for i in self.indices_of_degree(lambda k: k % 2 == 0)]
        return _echelon(rows)

    def reduce_mod_exact(self, phi: "Form") -> "Form":
        """Canonical representative of phi modulo Im d (odd degrees)."""
        terms = dict(phi.terms)
        for pivot, row in self._odd_image:
            c = terms.get(pivot)
            if c:
                for j, v in row.items():
                    terms[j] = terms.get(j, 0) - c * v
        return Form(self, terms)

    def exact_dimension(self) -> int:
        """Dimension of Im d in odd degrees."""
        return len(self._odd_image)

    def closed_basis(self, parity: int) -> list["Form"]:
        """A basis of the closed elements of the given degree parity."""
        idx = self.indices_of_degree(lambda k: k % 2 == parity)
        cols = {i: self.d(self.basis_element(i)).terms for i in idx}
        # kernel of the linear map idx -> d(idx)
        targets = sorted({j for t in cols.values() for j in t})
        mat = [[cols[i].get(j, Fraction(0)) for i in idx] for j in targets]
        return [Form(self, dict(zip(idx, vec))) for vec in _kernel(mat, len(idx))]

    def __repr__(self):
        return f"Cdga({self.name or [n for n, _ in self.generators]}, top={self.top_degree})"


def _echelon(rows):
    """Reduced row echelon form of sparse rows; returns [(pivot, row)]."""
    reduced: list[tuple[int, dict]] = []
    for row in rows:
        row = {k: Fraction(v) for k, v in row.items() if v}
        for pivot, r in reduced:
            c = row.get(pivot)
            if c:
                for j, v in r.items():
                    row[j] = row.get(j, 0) - c * v
                row = {k: v for k, v in row.items() if v}
        if not row:
            continue
        pivot = min(row)
        inv = 1 / row[pivot]
        row = {k: v * inv for k, v in row.items()}
        new = []
        for p, r in reduced:
            c = r.get(pivot)
            if c:
                r = {k: r.get(k, 0) - c * row.get(k, 0) for k in set(r) | set(row)}
                r = {k: v for k, v in r.items() if v}
            new.append((p, r))
        reduced = new + [(pivot, row)]
    return sorted(reduced)


def _kernel(mat, ncols):
    rows = [{j: v for j, v in enumerate(r) if v} for r in mat]
    ech = _echelon(rows)
    pivots = {p for p, _ in ech}
    out = []
    for free in range(ncols):
        if free in pivots:
            continue
        vec = [Fraction(0)] * ncols
        vec[free] = Fraction(1)
        for p, r in ech:
            vec[p] = -r.get(free, Fraction(0))
        out.append(vec)
    return out


class Form:
    """Element of a Cdga: basis index -> coefficient.

    Coefficients are Fractions by default but may be any commutative ring
    elements supporting +, *, and truthiness (e.g. RationalFn).
    """

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: Cdga, terms: Mapping[int, object]):
        self.algebra = algebra
        self.terms = {i: c for i, c in terms.items() if c}

    def _other(self, other) -> "Form | None":
        if isinstance(other, Form):
            if other.algebra is not self.algebra:
                raise ValueError("elements of different algebras")
            return other
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            o = Form(self.algebra, {0: other})
        out = dict(self.terms)
        for i, c in o.terms.items():
            out[i] = out.get(i, 0) + c
        return Form(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.algebra, {i: -c for i, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return Form(self.algebra, {i: c * other for i, c in self.terms.items()})
        table = self.algebra._table
        out: dict[int, object] = {}
        for i, a in self.terms.items():
            for j, b in o.terms.items():
                hit = table.get((i, j))
                if hit is None:
                    continue
                sign, k = hit
                out[k] = out.get(k, 0) + sign * (a * b)
        return Form(self.algebra, out)

    def __rmul__(self, other):
        # scalars commute with everything
        return Form(self.algebra, {i: other * c for i, c in self.terms.items()})

    def __pow__(self, n: int):
        out = self.algebra.one
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.element(other)
        if not isinstance(other, Form):
            return NotImplemented
        return self.algebra is other.algebra and (self - other).is_zero()

    def __hash__(self):
        return hash(tuple(sorted((i, c) for i, c in self.terms.items())))

    def part(self, pred) -> "Form":
        """Restriction to basis elements whose degree satisfies ``pred``."""
        deg = self.algebra.degrees
        return Form(self.algebra, {i: c for i, c in self.terms.items() if pred(deg[i])})

    def degree_part(self, k: int) -> "Form":
        return self.part(lambda d: d == k)

    def even(self) -> "Form":
        return self.part(lambda d: d % 2 == 0)

    def odd(self) -> "Form":
        return self.part(lambda d: d % 2 == 1)

    def scalar(self):
        return self.terms.get(0, 0)

    def is_even(self) -> bool:
        return self.odd().is_zero()

    def is_odd(self) -> bool:
        return self.even().is_zero()

    def d(self) -> "Form":
        return self.algebra.d(self)

    def __repr__(self):
        return f"Form({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for i in sorted(self.terms):
            c = self.terms[i]
            name = self.algebra.basis[i][0]
            if name == "1":
                parts.append(f"{c}")
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append(f"-{name}")
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts).replace("+ -", "- ")


# ---------------------------------------------------------------------------
# fixtures


def cdga_from_dict(data: Mapping) -> Cdga:
    """Build a Cdga from its JSON description."""
    try:
        gens = [(g["name"], int(g["degree"])) for g in data["generators"]]
        relations = data.get("relations", "truncated-polynomial")
        diff: dict[str, str] = {}
        for entry in data.get("d", []):
            src, tgt, c = entry["from"], entry["to"], Fraction(entry.get("coeff", 1))
            term = f"{c}*{tgt}" if c >= 0 else f"-{-c}*{tgt}"
            diff[src] = f"{diff[src]} + {term}" if src in diff else term
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed Cdga description: {exc}") from exc
    return Cdga(gens, diff, relations=relations, top_degree=data.get("top_degree"), name=data.get("name", ""))


def load_cdga(source) -> Cdga:
    """Load a Cdga from a path, a JSON string or a built-in fixture name."""
    if isinstance(source, Mapping):
        return cdga_from_dict(source)
    text = str(source)
    builtin = resources.files("lambdak") / "fixtures" / f"{text}.json"
    if builtin.is_file():
        return cdga_from_dict(json.loads(builtin.read_text()))
    if text.lstrip().startswith("{"):
        return cdga_from_dict(json.loads(text))
    with open(text) as fh:
        return cdga_from_dict(json.load(fh))


def torus() -> Cdga:
    """Exterior algebra on two degree-one classes with d = 0."""
    return load_cdga("torus")


def contractible() -> Cdga:
    """Two acyclic pairs dx = y, da = b, truncated above degree 5."""
    return load_cdga("contractible")


# ---------------------------------------------------------------------------
# Gamma


class GammaElement:
    """A pair (omega, phi): omega even and closed, phi odd modulo exact forms."""

    __slots__ = ("omega", "phi")

    def __init__(self, omega: Form, phi: Form | None = None, *, check: bool = True):
        algebra = omega.algebra
        if phi is None:
            phi = algebra.zero
        if phi.algebra is not algebra:
            raise ValueError("omega and phi live in different algebras")
        if check:
            if not omega.is_even():
                raise PreconditionError("omega must have even degree")
            if not omega.d().is_zero():
                raise PreconditionError("omega must be closed")
            if not phi.is_odd():
                raise PreconditionError("phi must have odd degree")
        self.omega = omega
        self.phi = algebra.reduce_mod_exact(phi)

    @property
    def algebra(self) -> Cdga:
        return self.omega.algebra

    @classmethod
    def unit(cls, algebra: Cdga, scale=1) -> "GammaElement":
        return cls(algebra.one * Fraction(scale))

    @classmethod
    def zero(cls, algebra: Cdga) -> "GammaElement":
        return cls(algebra.zero)

    def _same(self, other: "GammaElement"):
        if not isinstance(other, GammaElement):
            return NotImplemented
        if other.algebra is not self.algebra:
            raise ValueError("Gamma elements over different algebras")
        return other

    def __add__(self, other):
        other = self._same(other)
        if other is NotImplemented:
            return other
        return GammaElement(self.omega + other.omega, self.phi + other.phi, check=False)

    def __neg__(self):
        return GammaElement(-self.omega, -self.phi, check=False)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "GammaElement":
        return GammaElement(self.omega * c, self.phi * c, check=False)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return star_product(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GammaElement) or other.algebra is not self.algebra:
            return NotImplemented
        return self.omega == other.omega and self.phi == other.phi

    def __hash__(self):
        return hash((hash(self.omega), hash(self.phi)))

    def rank(self):
        return self.omega.scalar()

    def gamma_degree_part(self, l: int) -> "GammaElement":
        """The component in Z^{2l} + Omega^{2l-1}/Im d."""
        return GammaElement(self.omega.degree_part(2 * l), self.phi.degree_part(2 * l - 1), check=False)

    def max_gamma_degree(self) -> int:
        return (self.algebra.top_degree + 1) // 2

    def __repr__(self):
        return f"GammaElement({self.omega}; {self.phi})"


def star_product(x: GammaElement, y: GammaElement) -> GammaElement:
    """(w1, p1) * (w2, p2) = (w1 w2, w1 p2 + p1 w2 - d(p1) p2)."""
    if x.algebra is not y.algebra:
        raise ValueError("Gamma elements over different algebras")
    omega = x.omega * y.omega
    phi = x.omega * y.phi + x.phi * y.omega - x.phi.d() * y.phi
    return GammaElement(omega, phi, check=False)


def adams_gamma(k: int, x: GammaElement) -> GammaElement:
    """Psi^k: multiply the Gamma-degree l component by k**l."""
    if k < 1:
        raise ValueError("Adams operations need k >= 1")
    deg = x.algebra.degrees
    omega = Form(x.algebra, {i: c * k ** (deg[i] // 2) for i, c in x.omega.terms.items()})
    phi = Form(x.algebra, {i: c * k ** ((deg[i] + 1) // 2) for i, c in x.phi.terms.items()})
    return GammaElement(omega, phi, check=False)


def _series_mul(a: list, b: list, order: int, unit: GammaElement) -> list:
    zero = unit - unit
    out = [zero] * (order + 1)
    for i, x in enumerate(a):
        for j in range(order + 1 - i):
            if j < len(b):
                out[i + j] = out[i + j] + star_product(x, b[j])
    return out


def lambda_series(x: GammaElement, order: int) -> list[GammaElement]:
    """[lambda^0(x), ..., lambda^order(x)] from
    lambda_t(x) = (1 + t)**a * exp(sum_k (-1)**(k-1) Psi^k(x') t**k / k),
    where a is the integer rank and x' = x - a."""
    a = x.rank()
    if Fraction(a).denominator != 1:
        raise PreconditionError("rank must be integer")
    a = int(a)
    algebra = x.algebra
    unit = GammaElement.unit(algebra)
    zero = GammaElement.zero(algebra)
    nil = x - unit.scale(a)
    log_series = [zero] + [adams_gamma(k, nil).scale(Fraction((-1) ** (k - 1), k)) for k in range(1, order + 1)]
    # exp of a series without constant term; nilpotent in Gamma degree
    exp_series = [unit] + [zero] * order
    power = [unit] + [zero] * order
    for n in range(1, x.max_gamma_degree() + 1):
        power = _series_mul(power, log_series, order, unit)
        coef = Fraction(1, factorial(n))
        exp_series = [e + p.scale(coef) for e, p in zip(exp_series, power)]
    binom = [unit.scale(_binomial(a, j)) for j in range(order + 1)]
    return _series_mul(binom, exp_series, order, unit)


def _binomial(a: int, j: int) -> int:
    if a >= 0:
        return comb(a, j)
    return (-1) ** j * comb(-a + j - 1, j)


def lambda_gamma(k: int, x: GammaElement) -> GammaElement:
    """lambda^k(x), the coefficient of t**k in lambda_t(x)."""
    if k < 0:
        raise ValueError("lambda^k needs k >= 0")
    return lambda_series(x, k)[k]


def cs_product_identity_check(a0: Form, a1: Form, b0: Form, b1: Form, alpha: Form, beta: Form) -> bool:
    """Check (a1, alpha) * (b1, beta) = (a1 b1, alpha b1 + a0 beta) in Gamma.

    Requires closed even a0, a1, b0, b1 and odd alpha, beta with
    d(alpha) = a1 - a0 and d(beta) = b1 - b0.
    """
    for name, f in (("a0", a0), ("a1", a1), ("b0", b0), ("b1", b1)):
        if not f.is_even() or not f.d().is_zero():
            raise PreconditionError(f"{name} must be even and closed")
    for name, f in (("alpha", alpha), ("beta", beta)):
        if not f.is_odd():
            raise PreconditionError(f"{name} must be odd")
    if alpha.d() != a1 - a0:
        raise PreconditionError("d(alpha) != a1 - a0")
    if beta.d() != b1 - b0:
        raise PreconditionError("d(beta) != b1 - b0")
    lhs = star_product(GammaElement(a1, alpha), GammaElement(b1, beta))
    rhs = GammaElement(a1 * b1, alpha * b1 + a0 * beta)
    return lhs == rhs


# ---------------------------------------------------------------------------
# matrices over the algebra


def _mat_mul(a, b, algebra):
    n, m, p = len(a), len(b), len(b[0])
    out = [[algebra.zero for _ in range(p)] for _ in range(n)]
    for i in range(n):
        for k in range(m):
            if a[i][k].is_zero():
                continue
            for j in range(p):
                out[i][j] = out[i][j] + a[i][k] * b[k][j]
    return out


def _rational_inverse(m):
    n = len(m)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise PreconditionError("degree-0 part of the matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        inv = 1 / aug[c][c]
        aug[c] = [v * inv for v in aug[c]]
        for r in range(n):
            if r != c and aug[r][c]:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def matrix_inverse(F, algebra: Cdga):
    """Inverse of a matrix of forms whose degree-0 part is invertible.

    With F = F0 (1 + F0^-1 N) and N nilpotent,
    F^-1 = sum_j (-F0^-1 N)^j F0^-1.
    """
    n = len(F)
    F0 = [[F[i][j].scalar() for j in range(n)] for i in range(n)]
    inv0 = _rational_inverse(F0)
    inv0_f = [[algebra.one * inv0[i][j] for j in range(n)] for i in range(n)]
    N = [[F[i][j] - F0[i][j] for j in range(n)] for i in range(n)]
    step = [[-e for e in row] for row in _mat_mul(inv0_f, N, algebra)]
    term = inv0_f
    total = inv0_f
    for _ in range(algebra.top_degree):
        term = _mat_mul(step, term, algebra)
        total = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(total, term)]
    return total


def odd_chern_matrix(F, g_weights, algebra: Cdga | None = None) -> Form:
    """Odd Chern character sum_n n!/(2n+1)! tr[g (F^-1 dF)^(2n+1)].

    ``F`` is a square matrix of forms (or numbers), ``g_weights`` the diagonal
    of g (HalfLaurent, RationalFn or rational scalars).  The result keeps only
    odd-degree terms; its coefficients lie in the ring of the weights.
    """
    if algebra is None:
        algebra = next(e.algebra for row in F for e in row if isinstance(e, Form))
    n = len(F)
    if any(len(row) != n for row in F) or len(g_weights) != n:
        raise ValueError("F must be square and match the weight list")
    F = [[algebra.element(e) for e in row] for row in F]
    weights = [to_rational_fn(w) if isinstance(w, HalfLaurent) else w for w in g_weights]
    inv = matrix_inverse(F, algebra)
    dF = [[e.d() for e in row] for row in F]
    A = _mat_mul(inv, dF, algebra)
    A2 = _mat_mul(A, A, algebra)
    out = algebra.zero
    power = A
    for k in range((algebra.top_degree + 1) // 2 + 1):
        coef = Fraction(factorial(k), factorial(2 * k + 1))
        for i in range(n):
            diag = power[i][i].odd()
            if not diag.is_zero():
                out = out + diag * (weights[i] * coef)
        power = _mat_mul(power, A2, algebra)
    return out
