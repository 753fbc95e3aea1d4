from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from lambdak.errors import PreconditionError
from lambdak.lambda_engine import (
    BundleAtom,
    VirtualBundle,
    gamma_k_closed,
    gamma_nilpotency_check,
    lambda_minus_one_normal,
    n_rm_bound,
    p_k_net,
    p_k_pm,
    trivialized_dual_atom,
    truncated_inverse,
    verify_unit_identity,
)
from lambdak.ring import HalfLaurent, RationalFn, RootOfUnity, to_rational_fn
from lambdak.symfun import SymSeries, lambda_ch, lambda_minus_one_dual

from oracles import exterior_symbols, gamma_by_composition, inverse_lambda_series, same_truncated


def to_sympy(vb, name):
    """Map Lambda^j(atom) to the oracle's exterior symbols (single atom)."""
    (atom,) = vb.atoms.values() if vb.atoms else (None,)
    lams = exterior_symbols(name, atom.rank if atom else 0)
    total = sympy.Integer(0)
    for m, c in vb.terms.items():
        term = sympy.Integer(c)
        for (_, j), e in m:
            term *= lams[j] ** e
        total += term
    return sympy.expand(total)


def g(e=1):
    return HalfLaurent.g(e)


# --- examples --------------------------------------------------------------


def test_gamma_closed_examples():
    E = BundleAtom("E", 2)
    assert gamma_k_closed(1, E) == VirtualBundle.of(E) - 2
    assert gamma_k_closed(2, E) == 1 - VirtualBundle.of(E) + VirtualBundle.exterior(E, 2)
    assert gamma_k_closed(3, E).is_zero()
    assert gamma_k_closed(0, E) == 1


@pytest.mark.parametrize("r", [1, 2, 3])
def test_gamma_closed_matches_composition_oracle(r):
    E = BundleAtom("E", r)
    expected = gamma_by_composition(exterior_symbols("E", r), 5)
    for k in range(6):
        assert to_sympy(gamma_k_closed(k, E), "E") == expected[k]


def test_p_k_rank_one():
    L = BundleAtom("L", 1)
    x = VirtualBundle.of(L)
    for k in range(6):
        assert p_k_net(k, L) == (1 - x) ** k
        pos, neg = p_k_pm(k, L)
        assert pos == sum((x**j * comb(k, j) for j in range(0, k + 1, 2)), VirtualBundle.scalar(0))
        assert pos - neg == (1 - x) ** k
    assert p_k_pm(0, L) == (1, 0)


def test_p_k_rank_two_bracket():
    E = BundleAtom("E", 2)
    g1, g2 = gamma_k_closed(1, E), gamma_k_closed(2, E)
    # n = (2, 0) gives g1^2, n = (0, 1) gives -g2
    assert p_k_net(2, E) == g1 * g1 - g2


@pytest.mark.parametrize("r", [1, 2, 3])
def test_inverse_lambda_series_oracle(r):
    """lambda_t(E)^{-1} = (1+t)^{-r} (1 + sum t^k (1+t)^{-k} P_k), compared coefficientwise."""
    order = 6
    E = BundleAtom("E", r)
    t = sympy.Symbol("t")
    rhs = 1 + sum(t**k * (1 + t) ** (-k) * to_sympy(p_k_net(k, E), "E") for k in range(1, order + 1))
    rhs = rhs * (1 + t) ** (-r)
    got = sympy.series(rhs, t, 0, order + 1).removeO()
    expected = inverse_lambda_series(exterior_symbols("E", r), order)
    for k in range(order + 1):
        assert sympy.expand(got.coeff(t, k) - expected[k]) == 0


def test_truncated_inverse_single_line():
    for v in (1, 2, 3):
        inv = truncated_inverse([(v, 1)], 1)
        nstar = VirtualBundle.of(trivialized_dual_atom(v, 1))
        gv1 = to_rational_fn(g(v) - 1)
        D = 3
        one = SymSeries.constant(to_rational_fn(1), {f"N{v}": 1}, D)
        expected = (one - (1 - nstar).chern(D) * gv1.inverse()) * (to_rational_fn(g(v)) / gv1)
        assert inv.chern(D) == expected
        assert inv.denominator_exponents() == {v: 2}


def test_truncated_inverse_empty_and_denominator():
    inv = truncated_inverse([], 3)
    assert inv.character() == 1
    assert inv.chern(2).constant_term() == 1
    inv = truncated_inverse([(1, 1), (2, 1)], 2)
    assert inv.denominator_exponents() == {1: 3, 2: 3}
    assert inv.denominator() == (g() - 1) ** 3 * (g(2) - 1) ** 3


def test_truncated_inverse_errors():
    with pytest.raises(ValueError):
        truncated_inverse([(1, 1)], 0)
    with pytest.raises(PreconditionError):
        truncated_inverse([(2, 1)], 2, RootOfUnity(2, 1))
    truncated_inverse([(2, 1)], 2, RootOfUnity(3, 1))


@pytest.mark.parametrize(
    "weights,D,N",
    [([(1, 1)], 3, 3), ([(1, 2)], 4, 4), ([(1, 1), (3, 1)], 2, 2)],
)
def test_unit_identity_examples(weights, D, N):
    assert verify_unit_identity(weights, N, D)


def test_unit_identity_needs_enough_levels():
    with pytest.raises(PreconditionError):
        verify_unit_identity([(1, 1)], 2, 3)
    with pytest.raises(PreconditionError):
        verify_unit_identity([(1, 1)], 3, 3, RootOfUnity(1, 0))


def test_truncation_below_cutoff_really_fails():
    inv = truncated_inverse([(1, 1)], 1)
    lam = lambda_minus_one_normal([(1, 1)])
    assert lam.chern(3) * inv.chern(3) != SymSeries.constant(to_rational_fn(1), {"N1": 1}, 3)


@pytest.mark.parametrize("weights,D", [([(1, 1)], 3), ([(1, 2)], 3), ([(2, 1), (1, 1)], 2)])
def test_inverse_matches_geometric_series_oracle(weights, D):
    """Compare ch_g(inverse_N) at q = 2 with 1 / prod(1 - g^{-v} e^{-u}) expanded in the roots."""
    inv = truncated_inverse(weights, D).chern(D)
    q = 2
    gval = sympy.Integer(q) ** 2

    def expr(roots):
        prod = sympy.Integer(1)
        for v, _ in weights:
            for u in roots[f"N{v}"]:
                prod *= 1 - gval ** (-v) * sympy.exp(-u)
        return 1 / prod

    assert same_truncated(inv, expr, inv.ranks, D, q=q)


def test_lambda_minus_one_views_agree_with_symfun():
    weights = [(1, 2), (3, 1)]
    D = 3
    vb = lambda_minus_one_normal(weights)
    assert vb.chern(D) == lambda_minus_one_dual(weights, D)
    assert vb.character() == (1 - g(-1)) ** 2 * (1 - g(-3))


def test_n_rm_bound():
    assert n_rm_bound(1, 1) == 10
    assert n_rm_bound(2, 1) == 736
    assert n_rm_bound(1, 0) == 0
    with pytest.raises(ValueError):
        n_rm_bound(0, 1)


def test_gamma_nilpotency_examples():
    for D in range(4):
        assert gamma_nilpotency_check(BundleAtom("L", 1), [D + 1], D)
    E = BundleAtom("E", 2)
    assert gamma_nilpotency_check(E, [1, 2], 4)
    assert not gamma_nilpotency_check(E, [1, 1], 4)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_nilpotency_above_cutoff(r):
    E = BundleAtom("E", r)
    D = 3
    for n1 in range(5):
        for n2 in range(3 if r > 1 else 1):
            ns = [n1, n2][:r]
            if n1 + 2 * (n2 if r > 1 else 0) > D:
                assert gamma_nilpotency_check(E, ns, D)


# --- views ------------------------------------------------------------------


def test_character_view_of_exterior_power():
    E = BundleAtom("E", 3, 2)
    for k in range(4):
        assert VirtualBundle.exterior(E, k).character() == HalfLaurent.g(2 * k, comb(3, k))


def test_chern_view_of_exterior_power_matches_symfun():
    E = BundleAtom("E", 3)
    for k in range(4):
        assert VirtualBundle.exterior(E, k).chern(3) == lambda_ch(k, 3, 3, "E")


def test_lambda_of_atom_is_exterior_power():
    E = BundleAtom("E", 2, 1)
    lam = VirtualBundle.of(E).lambda_series(4)
    assert lam == [VirtualBundle.exterior(E, k) for k in range(5)]


def test_lambda_rejects_products():
    E = BundleAtom("E", 2)
    with pytest.raises(PreconditionError):
        VirtualBundle.exterior(E, 2).lambda_series(2)


def test_string_form():
    E = BundleAtom("E", 2)
    assert str(gamma_k_closed(2, E)) == "1 - E + Lambda^2(E)"
    assert str(truncated_inverse([(1, 1)], 1)) == "[g] * (-2+g + 'N1*) / (g-1)^2"


# --- properties --------------------------------------------------------------

atoms = st.builds(
    BundleAtom,
    id=st.sampled_from(["A", "B", "C"]),
    rank=st.integers(1, 3),
    weight=st.integers(-2, 2),
)


@st.composite
def linear_bundles(draw, max_atoms=3):
    pool = {}
    for a in draw(st.lists(atoms, max_size=max_atoms)):
        pool.setdefault(a.id, a)
    x = VirtualBundle.scalar(draw(st.integers(-2, 2)), pool.values())
    for a in pool.values():
        x = x + VirtualBundle.of(a) * draw(st.sampled_from([-1, 1, 2]))
    return x


def _same_atoms(x, y):
    return all(x.atoms[k] == y.atoms[k] for k in x.atoms.keys() & y.atoms.keys())


@settings(max_examples=25, deadline=None)
@given(linear_bundles(), linear_bundles())
def test_pre_lambda_axioms(x, y):
    if not _same_atoms(x, y):
        return
    K = 5
    lx, ly, lxy = x.lambda_series(K), y.lambda_series(K), (x + y).lambda_series(K)
    assert lx[0] == 1 and lx[1] == x
    for k in range(K + 1):
        conv = sum((lx[i] * ly[k - i] for i in range(k + 1)), VirtualBundle())
        assert lxy[k] == conv
        # both evaluations are ring morphisms
        assert lxy[k].character() == sum((lx[i].character() * ly[k - i].character() for i in range(k + 1)), HalfLaurent())
    D = 2
    for k in range(4):
        conv = None
        for i in range(k + 1):
            p = lx[i].chern(D) * ly[k - i].chern(D)
            conv = p if conv is None else conv + p
        assert lxy[k].chern(D) == conv


@settings(max_examples=25, deadline=None)
@given(linear_bundles(2), linear_bundles(2))
def test_gamma_series_multiplicative(x, y):
    if not _same_atoms(x, y):
        return
    K = 6
    gx, gy, gxy = x.gamma_series(K), y.gamma_series(K), (x + y).gamma_series(K)
    for k in range(K + 1):
        assert gxy[k] == sum((gx[i] * gy[k - i] for i in range(k + 1)), VirtualBundle())


@pytest.mark.parametrize("r", [1, 2, 3])
def test_gamma_series_matches_closed_form(r):
    E = BundleAtom("E", r, 1)
    series = (VirtualBundle.of(E) - r).gamma_series(5)
    for k in range(6):
        assert series[k] == gamma_k_closed(k, E)


@pytest.mark.parametrize("r", [1, 2, 3])
def test_p_k_recursion(r):
    E = BundleAtom("E", r)
    D = 3
    P = [p_k_net(k, E) for k in range(9)]
    gam = [gamma_k_closed(i, E) for i in range(r + 1)]
    for l in range(1, 9):
        total = sum((gam[i] * P[l - i] for i in range(min(r, l) + 1)), VirtualBundle())
        assert total.is_zero()
        assert total.character() == 0
        assert total.chern(D).is_zero()


@pytest.mark.parametrize("r", [1, 2, 3])
def test_p_k_views(r):
    """gamma^i(E - r) has character 0, so P_k does too; its Chern view starts in degree k."""
    E = BundleAtom("E", r)
    for k in range(1, 5):
        assert p_k_net(k, E).character() == 0
        s = p_k_net(k, E).chern(4)
        assert s.is_zero() or s.min_degree() >= k


@settings(max_examples=10, deadline=None)
@given(
    st.lists(st.tuples(st.integers(1, 3), st.integers(1, 2)), min_size=1, max_size=2),
    st.integers(1, 3),
    st.integers(0, 2),
)
def test_truncated_inverse_independent_of_level(weights, D, extra):
    a = truncated_inverse(weights, D).chern(D)
    b = truncated_inverse(weights, D + extra).chern(D)
    assert a == b


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(st.integers(1, 4), st.integers(1, 3)), max_size=3), st.integers(1, 4))
def test_character_inverse_is_exact(weights, N):
    inv = truncated_inverse(weights, N)
    lam = lambda_minus_one_normal(weights)
    assert to_rational_fn(lam.character()) * inv.character() == RationalFn(1)
