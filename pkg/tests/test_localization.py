import cmath
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lambdak.errors import PreconditionError, SchemaError
from lambdak.localization import (
    FixedComponent,
    FixedPointData,
    cancellation_check,
    component_contribution,
    contribution_series,
    cp1,
    isolated_contribution,
    load_fixed_point_data,
    localized_index,
    pole_cancellation_check,
    sym_expansion,
)
from lambdak.ring import HalfLaurent, RationalFn, RootOfUnity, to_rational_fn
from lambdak.symfun import integrate


def g(e=1, c=1):
    return HalfLaurent.g(e, c)


def geometric(m, a=1):
    out = HalfLaurent()
    for j in range(m + 1):
        out = out + g(a * j)
    return out


def rotated_cp1(m, a):
    """CP^1 rotated with speed a, line bundle O(m)."""
    return FixedPointData(
        (
            FixedComponent("north", 0, ((a, 1),), -a, ((0, 1),), orientation=-1),
            FixedComponent("south", 0, ((a, 1),), a, ((m * a, 1),)),
        )
    )


def product(d1, d2):
    """Fixed-point data of a product space with the diagonal action."""
    comps = []
    for a in d1.components:
        for b in d2.components:
            E = tuple((wa + wb, ra * rb) for wa, ra in a.E for wb, rb in b.E)
            comps.append(
                FixedComponent(
                    f"{a.name}x{b.name}", 0, a.normal + b.normal, a.l + b.l, E, orientation=a.orientation * b.orientation
                )
            )
    return FixedPointData(tuple(comps))


# --- examples --------------------------------------------------------------


def test_isolated_examples():
    c = FixedComponent("p", 0, ((1, 1),), 1)
    assert component_contribution(c) == RationalFn(g(), g() - 1)
    assert component_contribution(c) == RationalFn(1, 1 - g(-1))
    assert component_contribution(FixedComponent("p", 0, (), 0)) == 1
    c = FixedComponent("p", 0, ((2, 1),), 2, ((1, 1),))
    assert component_contribution(c) == RationalFn(g(3), g(2) - 1)


def test_closed_form_matches_series_route():
    c = FixedComponent("p", 0, ((2, 1), (1, 2)), 0, ((1, 2), (-1, 1)), orientation=-1)
    series = contribution_series(c, 0)
    assert to_rational_fn(integrate(series, {"1": 1}, 0)) == isolated_contribution(c)


@pytest.mark.parametrize("m", range(0, 11))
def test_cp1_index(m):
    idx = localized_index(cp1(m))
    ok, laurent = pole_cancellation_check(idx)
    assert ok and laurent == geometric(m)
    coeffs = sym_expansion(cp1(m), (-10, 20))
    assert {k for k, v in coeffs.items() if v} == set(range(m + 1))
    assert all(coeffs[k] == 1 for k in range(m + 1))
    assert cancellation_check(cp1(m), m)
    if m >= 1:
        assert not cancellation_check(cp1(m), m - 1)


def test_cp1_zero_is_sum_of_two_poles():
    idx = localized_index(cp1(0))
    values = dict(idx.contributions)
    assert values["north"] == RationalFn(1, 1 - g())
    assert values["south"] == RationalFn(1, 1 - g(-1))
    assert idx.value == 1


def test_point_and_free_orbit():
    assert localized_index(load_fixed_point_data("point")).value == 1
    empty = load_fixed_point_data("free_orbit")
    assert localized_index(empty).value == 0
    assert pole_cancellation_check(localized_index(empty)) == (True, HalfLaurent())
    assert all(v == 0 for v in sym_expansion(empty, (-10, 10)).values())
    assert cancellation_check(empty, 0)


def test_single_pole_does_not_cancel():
    north = FixedPointData((FixedComponent("north", 0, ((1, 1),), 1),))
    ok, laurent = pole_cancellation_check(localized_index(north))
    assert not ok and laurent is None
    for K in range(6):
        assert not cancellation_check(north, K)


def test_cp1_examples_in_sym_expansion():
    coeffs = sym_expansion(cp1(3), (-10, 10))
    assert [k for k, v in coeffs.items() if v] == [0, 1, 2, 3]
    assert cancellation_check(cp1(3), 3) and not cancellation_check(cp1(3), 2)
    assert [k for k, v in sym_expansion(cp1(0), (-10, 10)).items() if v] == [0]


# --- positive dimensional components (Riemann-Roch oracle) ---------------------


@pytest.mark.parametrize("m", [0, 1, 3])
def test_cp1_as_trivial_component(m):
    """Trivial action: the contribution is chi(O(m)) g^w."""
    numbers = {"c1(T)": 2, "c1(L)": 2, "c1(E)": m}
    for w in (0, 2):
        c = FixedComponent("cp1", 2, (), 0, ((w, 1),), numbers)
        assert component_contribution(c) == to_rational_fn(g(w, m + 1))


@pytest.mark.parametrize("m", [0, 1, 2, 4])
def test_cp2_riemann_roch(m):
    numbers = {
        "c1(T)^2": 9,
        "c2(T)": 3,
        "c1(L)^2": 9,
        "c1(L)*c1(T)": 9,
        "c1(E)^2": m * m,
        "c1(E)*c1(L)": 3 * m,
        "c1(E)*c1(T)": 3 * m,
    }
    c = FixedComponent("cp2", 4, (), 0, ((0, 1),), numbers)
    assert component_contribution(c, 2) == Fraction((m + 1) * (m + 2), 2)


def test_positive_dimensional_needs_chern_numbers():
    with pytest.raises(PreconditionError):
        component_contribution(FixedComponent("c", 2, ((1, 1),), 1))
    with pytest.raises(PreconditionError):
        component_contribution(FixedComponent("c", 2, ((1, 1),), 1, chern_numbers={"c1(T)": 2}))


def test_positive_dimensional_with_normal_bundle_is_cutoff_independent():
    numbers = {"c1(T)": 2, "c1(L)": 2, "c1(N1)": -1, "c1(E)": 1}
    c = FixedComponent("c", 2, ((1, 1),), 1, ((1, 1),), numbers)
    base = component_contribution(c, 1)
    assert component_contribution(c, 2) == base
    assert component_contribution(c, 4) == base
    # c1(N) = 0 reduces to (chi) times the isolated normal factor
    flat = FixedComponent("c", 2, ((1, 1),), 1, ((0, 1),), {"c1(T)": 2, "c1(L)": 2, "c1(N1)": 0, "c1(E)": 0})
    assert component_contribution(flat) == RationalFn(g(), g() - 1)


# --- errors and loading -------------------------------------------------------


def test_parity_and_schema_errors():
    with pytest.raises(PreconditionError):
        component_contribution(FixedComponent("p", 0, ((1, 1),), 0))
    with pytest.raises(SchemaError):
        FixedComponent("p", 1, (), 0)
    with pytest.raises(SchemaError):
        FixedComponent("p", 0, ((0, 1),), 0)
    with pytest.raises(SchemaError):
        load_fixed_point_data({"nothing": []})
    with pytest.raises(SchemaError):
        load_fixed_point_data({"components": [{"name": "x", "dim": 0}]})
    with pytest.raises(SchemaError):
        load_fixed_point_data('{"components": [')


def test_unknown_parameter_is_schema_error():
    with pytest.raises(SchemaError):
        load_fixed_point_data({"components": [{"name": "x", "l": "k", "normal": []}]})


def test_excluded_points():
    with pytest.raises(PreconditionError):
        localized_index(cp1(3), pt=RootOfUnity(1, 0))
    localized_index(cp1(3), pt=RootOfUnity(3, 1))
    data = FixedPointData(cp1(1).components, frozenset({RootOfUnity(5, 2)}))
    assert RootOfUnity(5, 2) in data.exclusion_set
    with pytest.raises(PreconditionError):
        localized_index(data, pt=RootOfUnity(5, 2))


def test_exclusion_set_covers_weight_divisors():
    data = product(rotated_cp1(1, 2), rotated_cp1(1, 3))
    A = data.exclusion_set
    for n, k in [(1, 0), (2, 1), (3, 1), (3, 2)]:
        assert RootOfUnity(n, k) in A
    assert RootOfUnity(6, 1) not in A


def test_load_from_path_and_string(tmp_path):
    raw = {
        "components": [{"name": "a", "dim": 0, "normal": [{"v": 2, "rank": 1}], "l": 2, "E": [{"weight": 1, "rank": 1}]}],
        "exclude": [{"n": 7, "k": 3}],
    }
    path = tmp_path / "d.json"
    path.write_text(json.dumps(raw))
    for src in (str(path), json.dumps(raw), raw):
        data = load_fixed_point_data(src)
        assert localized_index(data).value == RationalFn(g(3), g(2) - 1)
        assert RootOfUnity(7, 3) in data.exclusion_set


def test_non_isolated_expansion_rejected():
    data = FixedPointData((FixedComponent("c", 2, (), 0, chern_numbers={"c1(T)": 2, "c1(L)": 2}),))
    with pytest.raises(PreconditionError):
        sym_expansion(data, (0, 3))


# --- properties ---------------------------------------------------------------


@st.composite
def toric_data(draw):
    data = rotated_cp1(draw(st.integers(0, 4)), draw(st.integers(1, 3)))
    if draw(st.booleans()):
        data = product(data, rotated_cp1(draw(st.integers(0, 3)), draw(st.integers(1, 3))))
    return data


@settings(max_examples=30, deadline=None)
@given(toric_data())
def test_expansion_agrees_with_laurent_character(data):
    idx = localized_index(data)
    ok, laurent = pole_cancellation_check(idx)
    assert ok
    terms = {int(e): c for e, c in laurent.g_coefficients().items()}
    lo, hi = min(terms, default=0) - 5, max(terms, default=0) + 5
    coeffs = sym_expansion(data, (lo, hi))
    assert all(coeffs[k] == terms.get(k, 0) for k in coeffs)
    K = max((abs(k) for k in terms), default=0)
    assert cancellation_check(data, K)
    if terms:
        assert not cancellation_check(data, K - 1)


@settings(max_examples=30, deadline=None)
@given(toric_data(), st.integers(0, 10**6))
def test_numeric_sum_of_contributions(data, seed):
    idx = localized_index(data)
    rng = random.Random(seed)
    for _ in range(10):
        z = cmath.exp(2j * cmath.pi * rng.random()) * (1 + 0.1 * rng.random())
        q = cmath.sqrt(z)
        total = sum(complex(v.at_q(q)) for _, v in idx.contributions)
        assert abs(complex(idx.value.at_q(q)) - total) < 1e-10


@settings(max_examples=20, deadline=None)
@given(toric_data())
def test_sym_truncation_reproduces_index(data):
    """Replacing each inverse by Sym(N*) truncated deep enough gives the same index."""
    idx = localized_index(data)
    _, laurent = pole_cancellation_check(idx)
    terms = {int(e): c for e, c in laurent.g_coefficients().items()}
    lo = min(terms, default=0)
    total = HalfLaurent()
    for c in data.components:
        sym = HalfLaurent(1)
        for v, r in c.normal:
            for _ in range(r):
                depth = (max(terms, default=0) - lo) + 10
                sym = sym * sum((g(-v * j) for j in range(depth // v + 2)), HalfLaurent())
        coeff = sum((g(w, r) for w, r in c.E), HalfLaurent())
        total = total + sym * coeff * g(c.prefactor_exponent, c.orientation)
    got = {int(e): v for e, v in total.g_coefficients().items() if int(e) >= lo}
    assert {k: v for k, v in got.items() if v} == terms


@settings(max_examples=30, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1, 4), st.integers(0, 2)), max_size=4),
    st.lists(st.tuples(st.integers(-3, 3), st.integers(0, 2)), min_size=1, max_size=3),
    st.integers(-4, 4),
    st.randoms(use_true_random=False),
)
def test_contribution_invariant_under_normal_permutation(normal, E, l, rnd):
    if (sum(v * r for v, r in normal) + l) % 2:
        l += 1
    shuffled = list(normal)
    rnd.shuffle(shuffled)
    a = FixedComponent("a", 0, tuple(normal), l, tuple(E))
    b = FixedComponent("b", 0, tuple(shuffled), l, tuple(E))
    assert component_contribution(a) == component_contribution(b)
