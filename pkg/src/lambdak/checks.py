"""Seeded verification suites driven by ``lambdak verify``.

A suite is a list of named checks; each check is a zero-argument callable
returning a bool, run in a small worker pool.  Inputs of a failing check are
reported so it can be reproduced.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import eta, graded, lambda_engine as le, localization, symfun
from .ring import HalfLaurent, RootOfUnity, exact_value, exclusion_for_weights, roots_of_unity

SUITES = ("gamma", "lambda", "chern", "gamma-model", "localization", "eta")

UNIT_WEIGHT_SETS = ([(1, 1)], [(1, 2)], [(2, 1)], [(1, 1), (2, 1)], [(1, 1), (3, 2)])


@dataclass
class Check:
    name: str
    params: dict
    run: Callable[[], bool]


@dataclass
class CheckResult:
    name: str
    params: dict
    status: str  # pass | fail | error
    message: str = ""

    def as_dict(self) -> dict:
        out = {"name": self.name, "params": self.params, "status": self.status}
        if self.status != "pass":
            out["witness"] = dict(self.params)
            if self.message:
                out["message"] = self.message
        return out


@dataclass
class Bounds:
    r_max: int = 3
    d_max: int = 4
    N: int | None = None
    seed: int = 0
    extra: dict = field(default_factory=dict)


def _worker_count() -> int:
    env = os.environ.get("LAMBDAK_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def run_checks(checks: list[Check]) -> list[CheckResult]:
    def one(check: Check) -> CheckResult:
        try:
            ok = bool(check.run())
        except Exception as exc:  # reported, not raised: a suite keeps going
            return CheckResult(check.name, check.params, "error", f"{type(exc).__name__}: {exc}")
        return CheckResult(check.name, check.params, "pass" if ok else "fail")

    with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
        return list(pool.map(one, checks))


# ---------------------------------------------------------------------------
# gamma operations


def _gamma_closed_vs_series(r: int, order: int) -> bool:
    E = le.BundleAtom("E", r)
    series = (le.VirtualBundle.of(E) - r).gamma_series(order)
    return all(series[k] == le.gamma_k_closed(k, E) for k in range(order + 1))


def _gamma_degree_bound(r: int, D: int) -> bool:
    for i in range(r + 1):
        low = symfun.gamma_ch_reduced(i, r, D).min_degree()
        if low is not None and low < i:
            return False
    return True


def _nilpotency_above(r: int, D: int) -> bool:
    E = le.BundleAtom("E", r)
    for n1 in range(D + 2):
        ns = [n1] + [1 if i == 1 else 0 for i in range(1, r)]
        if sum((i + 1) * n for i, n in enumerate(ns)) > D and not le.gamma_nilpotency_check(E, ns, D):
            return False
    return True


def gamma_suite(b: Bounds) -> list[Check]:
    checks = []
    for r in range(1, b.r_max + 1):
        checks.append(Check("gamma closed form vs series composition", {"r": r, "k_max": 6}, lambda r=r: _gamma_closed_vs_series(r, 6)))
        for D in range(1, b.d_max + 1):
            checks.append(Check("gamma generating identity", {"r": r, "D": D}, lambda r=r, D=D: symfun.verify_gamma_generating_identity(r, D)))
        checks.append(Check("ch(gamma^i) starts in degree i", {"r": r, "D": b.d_max}, lambda r=r: _gamma_degree_bound(r, b.d_max)))
        checks.append(Check("gamma products vanish above the cutoff", {"r": r, "D": min(b.d_max, 3)}, lambda r=r: _nilpotency_above(r, min(b.d_max, 3))))
    return checks


# ---------------------------------------------------------------------------
# lambda engine


def _random_linear_bundle(rng: random.Random, pool: list) -> le.VirtualBundle:
    x = le.VirtualBundle.scalar(rng.randint(-2, 2), pool)
    for a in pool:
        x = x + le.VirtualBundle.of(a) * rng.choice([-1, 1, 2])
    return x


def _pre_lambda_axioms(seed: int, K: int, D: int) -> bool:
    rng = random.Random(seed)
    atoms = [le.BundleAtom(n, rng.randint(1, 3), rng.randint(-2, 2)) for n in "ABC"]
    x = _random_linear_bundle(rng, rng.sample(atoms, rng.randint(1, 2)))
    y = _random_linear_bundle(rng, rng.sample(atoms, rng.randint(1, 2)))
    lx, ly, lxy = x.lambda_series(K), y.lambda_series(K), (x + y).lambda_series(K)
    if not (lx[0] == 1 and lx[1] == x):
        return False
    for k in range(K + 1):
        conv = sum((lx[i] * ly[k - i] for i in range(k + 1)), le.VirtualBundle())
        if lxy[k] != conv:
            return False
        char = sum((lx[i].character() * ly[k - i].character() for i in range(k + 1)), HalfLaurent())
        if lxy[k].character() != char:
            return False
    for k in range(min(K, 3) + 1):
        chern = None
        for i in range(k + 1):
            p = lx[i].chern(D) * ly[k - i].chern(D)
            chern = p if chern is None else chern + p
        if lxy[k].chern(D) != chern:
            return False
    return True


def p_k_recursion(r: int, l_max: int, D: int) -> bool:
    """sum_i gamma^i(E - r) (P_{l-i,+} - P_{l-i,-}) = 0 in both views."""
    E = le.BundleAtom("E", r)
    P = [le.p_k_net(k, E) for k in range(l_max + 1)]
    gam = [le.gamma_k_closed(i, E) for i in range(r + 1)]
    for l in range(1, l_max + 1):
        total = sum((gam[i] * P[l - i] for i in range(min(r, l) + 1)), le.VirtualBundle())
        if total.character() != 0 or not total.chern(D).is_zero():
            return False
    return True


def lambda_suite(b: Bounds) -> list[Check]:
    checks = []
    for i in range(10):
        checks.append(Check("pre-lambda axioms", {"seed": b.seed + i, "k_max": 5}, lambda s=b.seed + i: _pre_lambda_axioms(s, 5, 2)))
    for r in range(1, b.r_max + 1):
        checks.append(Check("P_k recursion", {"r": r, "l_max": 8, "D": min(b.d_max, 3)}, lambda r=r: p_k_recursion(r, 8, min(b.d_max, 3))))
    for weights in UNIT_WEIGHT_SETS:
        for D in range(2, min(b.d_max, 4) + 1):
            N = max(D, b.N or D)
            checks.append(
                Check("unit identity", {"weights": weights, "D": D, "N": N}, lambda w=weights, D=D, N=N: le.verify_unit_identity(w, N, D))
            )
    expected = {(1, 1): 10, (2, 1): 736, (1, 0): 0}
    checks.append(Check("nilpotency constants", {"cases": [list(k) for k in expected]}, lambda: all(le.n_rm_bound(*k) == v for k, v in expected.items())))
    return checks


# ---------------------------------------------------------------------------
# characteristic classes


def lambda_ch_exponential(r: int, D: int, order: int) -> list:
    """lambda_t(ch) = exp(sum_k (-1)^(k-1) Psi^k(ch) t^k / k) as a t-series."""
    ch = symfun.chern_character(r, D)
    zero = ch.zero()
    log = [zero] + [ch.adams(k) * Fraction((-1) ** (k - 1), k) for k in range(1, order + 1)]

    def mul(a, c):
        out = [zero] * (order + 1)
        for i, x in enumerate(a):
            for j in range(order + 1 - i):
                out[i + j] = out[i + j] + x * c[j]
        return out

    result = [ch.one()] + [zero] * order
    power = [ch.one()] + [zero] * order
    fact = 1
    for n in range(1, order + 1):
        power = mul(power, log)
        fact *= n
        result = [a + p * Fraction(1, fact) for a, p in zip(result, power)]
    return result


def _lambda_ch_agrees(r: int, D: int) -> bool:
    series = lambda_ch_exponential(r, D, r + 1)
    return all(series[k] == symfun.lambda_ch(k, r, D) for k in range(r + 2))


def _chern_roundtrip(r: int, D: int) -> bool:
    s = symfun.chern_character(r, D) * symfun.a_hat(r, D, "E")
    return symfun.from_chern(s.to_chern(), s.ranks, D) == s


def chern_suite(b: Bounds) -> list[Check]:
    checks = []
    for r in range(1, b.r_max + 1):
        for D in range(1, b.d_max + 1):
            checks.append(Check("lambda^k(ch) = ch(Lambda^k)", {"r": r, "D": D}, lambda r=r, D=D: _lambda_ch_agrees(r, D)))
        checks.append(Check("Chern basis round trip", {"r": r, "D": b.d_max}, lambda r=r: _chern_roundtrip(r, b.d_max)))
    for weights in UNIT_WEIGHT_SETS:
        D = min(b.d_max, 3)
        checks.append(
            Check("twisting identities", {"weights": weights, "l": 1, "D": D}, lambda w=weights, D=D: symfun.verify_twisting_identities(w, 1, D))
        )
    return checks


# ---------------------------------------------------------------------------
# the Gamma model


def _random_gamma(rng: random.Random, alg, rank=None):
    omega = alg.zero
    for w in alg.closed_basis(0):
        omega = omega + w * rng.randint(-3, 3)
    if rank is not None:
        omega = omega - omega.scalar() + rank
    phi = alg.zero
    for i in alg.indices_of_degree(lambda k: k % 2):
        phi = phi + alg.basis_element(i) * rng.randint(-3, 3)
    return graded.GammaElement(omega, phi)


def _ring_axioms(alg, seed: int, count: int) -> bool:
    rng = random.Random(seed)
    for _ in range(count):
        x, y, z = (_random_gamma(rng, alg) for _ in range(3))
        if x * y != y * x or (x * y) * z != x * (y * z):
            return False
    return True


def _lambda_additive(alg, seed: int, count: int) -> bool:
    rng = random.Random(seed)
    order = alg.top_degree // 2 + 1
    for _ in range(count):
        x = _random_gamma(rng, alg, rng.randint(-2, 3))
        y = _random_gamma(rng, alg, rng.randint(-2, 3))
        lx, ly, lxy = graded.lambda_series(x, order), graded.lambda_series(y, order), graded.lambda_series(x + y, order)
        for k in range(order + 1):
            conv = graded.GammaElement.zero(alg)
            for i in range(k + 1):
                conv = conv + lx[i] * ly[k - i]
            if lxy[k] != conv:
                return False
    return True


def _cs_instances(seed: int, count: int) -> bool:
    alg = graded.contractible()
    rng = random.Random(seed)

    def closed_even():
        out = alg.zero
        for w in alg.closed_basis(0):
            out = out + w * rng.randint(-3, 3)
        return out

    def odd():
        out = alg.zero
        for i in alg.indices_of_degree(lambda k: k % 2):
            out = out + alg.basis_element(i) * rng.randint(-3, 3)
        return out

    for _ in range(count):
        a0, b0, alpha, beta = closed_even(), closed_even(), odd(), odd()
        if not graded.cs_product_identity_check(a0, a0 + alpha.d(), b0, b0 + beta.d(), alpha, beta):
            return False
    return True


def _odd_chern_constant(seed: int) -> bool:
    rng = random.Random(seed)
    for alg in (graded.torus(), graded.contractible()):
        for n in (1, 2, 3):
            F = [[alg.one * rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
            for i in range(n):
                F[i][i] = F[i][i] + 10  # diagonally dominant, hence invertible
            weights = [HalfLaurent.g(rng.randint(-2, 2)) for _ in range(n)]
            if not graded.odd_chern_matrix(F, weights, alg).is_zero():
                return False
    return True


def gamma_model_suite(b: Bounds) -> list[Check]:
    checks = []
    for name in ("torus", "contractible"):
        alg = graded.load_cdga(name)
        checks.append(Check("Gamma ring axioms", {"algebra": name, "triples": 100, "seed": b.seed}, lambda a=alg: _ring_axioms(a, b.seed, 100)))
        checks.append(Check("lambda_t additive", {"algebra": name, "pairs": 20, "seed": b.seed}, lambda a=alg: _lambda_additive(a, b.seed, 20)))
    checks.append(Check("Chern-Simons product identity", {"instances": 50, "seed": b.seed}, lambda: _cs_instances(b.seed, 50)))
    checks.append(Check("odd Chern character of constant F", {"seed": b.seed}, lambda: _odd_chern_constant(b.seed)))
    return checks


# ---------------------------------------------------------------------------
# localization


def cp1_check(m: int) -> bool:
    data = localization.cp1(m)
    ok, laurent = localization.pole_cancellation_check(localization.localized_index(data))
    expected = sum((HalfLaurent.g(j) for j in range(m + 1)), HalfLaurent())
    coeffs = localization.sym_expansion(data, (-m - 10, 2 * m + 10))
    support = {k for k, v in coeffs.items() if v}
    return (
        ok
        and laurent == expected
        and support == set(range(m + 1))
        and localization.cancellation_check(data, m)
        and (m == 0 or not localization.cancellation_check(data, m - 1))
    )


def localization_suite(b: Bounds) -> list[Check]:
    checks = [Check("CP1 with O(m)", {"m": m}, lambda m=m: cp1_check(m)) for m in range(11)]
    checks.append(Check("isolated point", {}, lambda: localization.localized_index(localization.load_fixed_point_data("point")).value == 1))
    checks.append(Check("free orbit", {}, lambda: localization.localized_index(localization.load_fixed_point_data("free_orbit")).value == 0))
    return checks


# ---------------------------------------------------------------------------
# eta


def random_circle_points(k: int, count: int, seed: int) -> list[float]:
    """Seeded t in (0, 1) with k t at least 0.002 away from an integer."""
    rng = random.Random(seed * 1000 + k)
    out = []
    while len(out) < count:
        t = rng.random()
        if abs(k * t - round(k * t)) > 0.002:
            out.append(t)
    return out


def _abel_agrees(k: int, ts: list[float]) -> bool:
    return all(eta.circle_eta_abel_oracle(k, t)[1] < 1e-9 for t in ts)


def _half_on_a(k: int) -> bool:
    return all(eta.circle_eta_closed(k, pt) == Fraction(1, 2) for pt in roots_of_unity(k))


def _rationality_roundtrip(seed: int) -> bool:
    rng = random.Random(seed)
    num = HalfLaurent.from_g_coeffs([rng.randint(-4, 4) for _ in range(4)] + [1])
    den = (HalfLaurent.g(1) - 1) * (HalfLaurent.g(2) + 1) * (HalfLaurent.g(3) - 1)
    f = eta.RationalFn(num, den)
    A = exclusion_for_weights([1, 3, 4])
    return eta.verify_rationality(lambda pt: exact_value(f, pt), A, 6) == f


def _planted_pole_flagged() -> bool:
    f = eta.circle_eta_function(3)
    try:
        eta.verify_rationality(lambda pt: exact_value(f, pt), exclusion_for_weights([2]), 3)
    except eta.RationalityError as exc:
        return "pole outside A" in str(exc)
    return False


def eta_suite(b: Bounds) -> list[Check]:
    checks = []
    for k in range(1, 6):
        ts = random_circle_points(k, 4, b.seed)
        checks.append(Check("circle eta vs Abel oracle", {"k": k, "t": [round(t, 12) for t in ts]}, lambda k=k, ts=ts: _abel_agrees(k, ts)))
        checks.append(Check("circle eta is 1/2 on A", {"k": k}, lambda k=k: _half_on_a(k)))
        checks.append(Check("disc consistency", {"k": k}, lambda k=k: eta.aps_disc_consistency(k)))
    checks.append(Check("disc consistency at a root of unity", {"k": 2, "at": "1/3"}, lambda: eta.aps_disc_consistency(2, RootOfUnity(3, 1))))
    checks.append(Check("rationality round trip", {"seed": b.seed}, lambda: _rationality_roundtrip(b.seed)))
    checks.append(Check("planted pole outside A is flagged", {}, _planted_pole_flagged))
    return checks


SUITE_BUILDERS = {
    "gamma": gamma_suite,
    "lambda": lambda_suite,
    "chern": chern_suite,
    "gamma-model": gamma_model_suite,
    "localization": localization_suite,
    "eta": eta_suite,
}


def build_suite(name: str, bounds: Bounds) -> list[tuple[str, Check]]:
    names = SUITES if name == "all" else (name,)
    if any(n not in SUITE_BUILDERS for n in names):
        raise KeyError(name)
    return [(n, c) for n in names for c in SUITE_BUILDERS[n](bounds)]
