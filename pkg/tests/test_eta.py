import cmath
import json
import random
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lambdak.errors import PreconditionError, SchemaError
from lambdak.eta import (
    ComponentEtaData,
    RationalityError,
    aps_disc_consistency,
    circle_eta_abel_oracle,
    circle_eta_closed,
    circle_eta_function,
    defect_denominator_bound,
    eta_component_sum,
    load_eta_data,
    poles_outside,
    q_defect_assemble,
    verify_rationality,
)
from lambdak.ring import (
    GENERIC,
    CyclotomicNumber,
    HalfLaurent,
    RationalFn,
    RootOfUnity,
    exact_value,
    exclusion_for_weights,
    roots_of_unity,
)
from lambdak.ring import poly


def g(e=1, c=1):
    return HalfLaurent.g(e, c)


def test_circle_closed_examples():
    assert circle_eta_closed(1, GENERIC) == RationalFn(1, 1 - g())
    assert circle_eta_closed(3, RootOfUnity(3, 1)) == Fraction(1, 2)
    value = circle_eta_closed(2, RootOfUnity(3, 1))
    assert value == exact_value(RationalFn(1, 1 - g(2)), RootOfUnity(3, 1))
    assert abs(value.to_complex() - 1 / (1 - cmath.exp(4j * cmath.pi / 3))) < 1e-14


@pytest.mark.parametrize("k", range(1, 6))
def test_half_on_the_exclusion_set(k):
    for pt in roots_of_unity(k):
        assert circle_eta_closed(k, pt) == Fraction(1, 2)


def test_abel_oracle_examples():
    value, err = circle_eta_abel_oracle(1, 0.3)
    assert err < 1e-9
    assert abs(value - 1 / (1 - cmath.exp(2j * cmath.pi * 0.3))) < 1e-9
    value, err = circle_eta_abel_oracle(2, 0.15)
    assert abs(value - 1 / (1 - cmath.exp(2j * cmath.pi * 0.3))) < 1e-9
    a, _ = circle_eta_abel_oracle(3, Fraction(2, 7))
    b, _ = circle_eta_abel_oracle(3, Fraction(5, 7))
    assert abs(a - b.conjugate()) < 1e-9


def test_abel_oracle_rejects_points_of_a():
    with pytest.raises(PreconditionError):
        circle_eta_abel_oracle(3, Fraction(1, 3))
    with pytest.raises(PreconditionError):
        circle_eta_abel_oracle(2, 0.5)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5), st.floats(0.01, 0.99))
def test_abel_oracle_matches_closed_form(k, t):
    kt = k * t
    if abs(kt - round(kt)) < 0.005:
        return
    value, err = circle_eta_abel_oracle(k, t)
    closed = circle_eta_function(k).at_q(cmath.exp(1j * cmath.pi * t))
    assert abs(value - complex(closed)) < 1e-9
    assert err < 1e-9


@pytest.mark.parametrize("k", range(1, 6))
def test_closed_form_poles_are_exactly_a(k):
    f = circle_eta_function(k)
    _, dense = f.den.g_dense()
    orders, rest = poly.strip_cyclotomic(dense)
    divisors = {d for d in range(1, k + 1) if k % d == 0}
    assert set(orders) == divisors and len(rest) == 1
    assert poles_outside(f, exclusion_for_weights([k])) == []


def test_aps_disc():
    assert all(aps_disc_consistency(k) for k in range(1, 6))
    assert aps_disc_consistency(2, RootOfUnity(3, 1))
    with pytest.raises(PreconditionError):
        aps_disc_consistency(3, RootOfUnity(3, 1))


# --- component data ----------------------------------------------------------


def test_component_sum_examples():
    assert eta_component_sum(ComponentEtaData("a", 0)) == 0
    assert eta_component_sum(ComponentEtaData("a", 0, {(0, 1, "+"): Fraction(1, 2)})) == RationalFn(g(), 2)
    mirrored = ComponentEtaData("a", 1, {(2, 1, "+"): Fraction(3, 7), (2, 1, "-"): Fraction(3, 7)})
    assert eta_component_sum(mirrored) == 0
    shifted = ComponentEtaData("a", -2, {(1, 3, "+"): 1, (0, 1, "-"): Fraction(1, 3)})
    assert eta_component_sum(shifted) == RationalFn(g(2), 1) - RationalFn(g(-1), 3)


def test_component_parity():
    with pytest.raises(PreconditionError):
        eta_component_sum(ComponentEtaData("a", Fraction(1, 2), {(0, 1, "+"): 1}))
    with pytest.raises(SchemaError):
        ComponentEtaData("a", 0, {(0, 1, "*"): 1})


def test_q_defect_examples():
    c = ComponentEtaData("a", 0, {(0, 1, "+"): Fraction(1, 2), (1, 2, "-"): 3}, ((1, 1), (2, 1)))
    part = eta_component_sum(c) / RationalFn((g() - 1) ** 3 * (g(2) - 1) ** 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert q_defect_assemble(part, [c], 2).value == 0
    circle = q_defect_assemble(circle_eta_function(3), [], 1)
    assert circle.value == RationalFn(1, 1 - g(3))
    assert poles_outside(circle.value, exclusion_for_weights([3])) == []


def test_q_defect_threshold_warning_and_errors():
    c = ComponentEtaData("a", 0, {(0, 1, "+"): 1}, ((1, 1),), dim=1)
    with pytest.warns(UserWarning):
        d = q_defect_assemble(0, [c], 3)
    assert d.threshold == 10 and not d.above_threshold
    assert q_defect_assemble(0, [c], 11).above_threshold
    with pytest.raises(PreconditionError):
        q_defect_assemble(0, [c], 11, RootOfUnity(1, 0))


@st.composite
def eta_components(draw):
    weights = draw(st.lists(st.tuples(st.integers(1, 3), st.integers(1, 2)), min_size=1, max_size=2, unique_by=lambda w: w[0]))
    entries = {}
    for _ in range(draw(st.integers(0, 3))):
        key = (draw(st.integers(0, 3)), draw(st.integers(1, 3)), draw(st.sampled_from("+-")))
        entries[key] = Fraction(draw(st.integers(-5, 5)), draw(st.integers(1, 4)))
    return ComponentEtaData("c", draw(st.integers(-2, 2)), entries, tuple(weights))


@settings(max_examples=30, deadline=None)
@given(st.lists(eta_components(), max_size=3), st.integers(1, 3))
def test_q_defect_denominator_shape(components, N):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = q_defect_assemble(0, components, N)
    bound = defect_denominator_bound(components, N)
    # den divides the bound iff value * bound is a Laurent polynomial (up to a rational constant)
    scaled = d.value * RationalFn(bound)
    assert scaled.den.is_monomial()


# --- rationality --------------------------------------------------------------


def test_verify_rationality_examples():
    f = circle_eta_function(2)
    assert verify_rationality(lambda pt: exact_value(f, pt), exclusion_for_weights([2]), 2) == f
    assert verify_rationality(lambda pt: Fraction(1, 2), frozenset(), 2) == RationalFn(1, 2)
    planted = circle_eta_function(3)
    with pytest.raises(RationalityError, match="pole outside A"):
        verify_rationality(lambda pt: exact_value(planted, pt), exclusion_for_weights([2]), 3)


def test_verify_rationality_detects_inconsistency():
    calls = []

    def noisy(pt):
        calls.append(pt)
        return CyclotomicNumber.rational(pt.n, len(calls) ** 2 % 7)

    with pytest.raises(RationalityError):
        verify_rationality(noisy, frozenset(), 1)


def test_non_cyclotomic_unit_circle_pole_flagged():
    # a Salem-type quartic: two roots on the circle, none of finite order
    f = RationalFn(1, HalfLaurent.from_g_coeffs([1, -2, 0, -2, 1]))
    bad = poles_outside(f, frozenset())
    assert any("infinite order" in b for b in bad)


def test_roundtrip_from_q_defect():
    c = ComponentEtaData("a", -1, {(0, 1, "+"): 1, (1, 1, "-"): 2}, ((1, 1),))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d = q_defect_assemble(circle_eta_function(2), [c], 1)
    A = exclusion_for_weights([1, 2])
    got = verify_rationality(lambda pt: exact_value(d.value, pt), A, 4)
    assert got == d.value


def test_load_eta_data(tmp_path):
    raw = {
        "components": [
            {
                "name": "a",
                "prefactor_exp": 0,
                "entries": [{"k": 0, "v": 1, "sign": "+", "eta": "1/2"}],
                "weights": [{"v": 1, "rank": 1}],
            }
        ],
        "N": 2,
    }
    path = tmp_path / "eta.json"
    path.write_text(json.dumps(raw))
    for src in (raw, json.dumps(raw), str(path)):
        comps, N = load_eta_data(src)
        assert N == 2 and eta_component_sum(comps[0]) == RationalFn(g(), 2)
    with pytest.raises(SchemaError):
        load_eta_data({"components": [{"name": "a"}]})
    with pytest.raises(SchemaError):
        load_eta_data("{oops")
