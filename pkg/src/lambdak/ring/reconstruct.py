"""Cauchy-style rational interpolation from samples at roots of unity.

Exact samples (elements of Q(zeta_m)) give a linear system over Q solved
by fraction-exact elimination; complex samples go through an mpmath SVD
and are snapped to integers afterwards.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from numbers import Rational

import mpmath

from .laurent import HalfLaurent
from .points import CyclotomicNumber, RootOfUnity, exact_value
from .rational import RationalFn


class ReconstructionError(ValueError):
    pass


def _nullspace(rows, ncols):
    """Basis of the right nullspace of a rational matrix (reduced echelon)."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


_PRIME = (1 << 61) - 1


def _independent_rows(rows, ncols):
    """Rows independent modulo a large prime (hence independent over Q)."""
    basis: dict[int, list[int]] = {}
    chosen = []
    for idx, row in enumerate(rows):
        scale = lcm(*(x.denominator for x in row))
        r = [int(x * scale) % _PRIME for x in row]
        for c in range(ncols):
            if r[c] and c in basis:
                f = r[c]
                r = [(a - f * b) % _PRIME for a, b in zip(r, basis[c])]
        piv = next((c for c in range(ncols) if r[c]), None)
        if piv is None:
            continue
        inv = pow(r[piv], -1, _PRIME)
        basis[piv] = [a * inv % _PRIME for a in r]
        chosen.append(idx)
        if len(chosen) == ncols:
            break
    return [rows[i] for i in chosen]


def _as_cyclotomic(pt: RootOfUnity, value, half: bool = False) -> CyclotomicNumber:
    base = 2 * pt.n if half else pt.n
    if isinstance(value, CyclotomicNumber):
        return value.lift(lcm(value.m, base))
    if isinstance(value, Rational):
        return CyclotomicNumber.rational(base, value)
    raise TypeError(f"not an exact sample value: {value!r}")


def _from_vectors(a, b, half: bool = False) -> RationalFn:
    scale = lcm(*(x.denominator for x in list(a) + list(b)))
    build = HalfLaurent.from_q_dense if half else HalfLaurent.from_g_coeffs
    num = build([int(x * scale) for x in a])
    den = build([int(x * scale) for x in b])
    return RationalFn(num, den)


def _exact_system(samples, d, half):
    # the unknown variable x is g, or q = g**(1/2) when half is set
    rows = []
    for pt, value in samples:
        y = _as_cyclotomic(pt, value, half)
        m = y.m
        step = pt.k * (m // (2 * pt.n if half else pt.n))
        cols = []
        for i in range(d + 1):
            cols.append(CyclotomicNumber.zeta_power(m, step * i))
        for j in range(d + 1):
            cols.append(-y.times_zeta_power(step * j))
        # each row is one rational coordinate of the equation in Q(zeta_m)
        coords = [c.coeffs for c in cols]
        rows.extend(list(r) for r in zip(*coords))
    return rows


def _check_samples(samples, degree_bound):
    if degree_bound < 0:
        raise ValueError("degree bound must be nonnegative")
    if len(samples) < 2 * degree_bound + 1:
        raise ReconstructionError("insufficient samples")
    pts = [pt for pt, _ in samples]
    if len(set(pts)) != len(pts):
        raise ReconstructionError("sample points must be pairwise distinct")


def rational_reconstruct(samples, degree_bound: int, exclude=()) -> RationalFn:
    """Recover the RationalFn of num/den degree <= degree_bound from samples.

    ``samples`` is a list of (RootOfUnity, value); a value is exact (a
    CyclotomicNumber or rational) or complex.  The smallest degree that fits is
    returned, so common factors never appear.
    """
    samples = list(samples)
    _check_samples(samples, degree_bound)
    excluded = set(exclude)
    for pt, _ in samples:
        if pt in excluded:
            raise ReconstructionError(f"sample point {pt} lies in the exclusion set")
    exact = all(isinstance(v, (CyclotomicNumber, Rational)) for _, v in samples)
    solve = _reconstruct_exact if exact else _reconstruct_numeric
    try:
        return solve(samples, degree_bound, False)
    except ReconstructionError:
        if len(samples) < 4 * degree_bound + 1:
            raise
        return solve(samples, 2 * degree_bound, True)


def _reconstruct_exact(samples, degree_bound, half):
    # with 2 * bound + 1 samples every null vector (a, b) with b != 0 is a
    # multiple of the reduced answer, so one solve at the bound suffices
    d = degree_bound
    rows = _exact_system(samples, d, half)
    for subset in (_independent_rows(rows, 2 * d + 2), rows):
        for vec in _nullspace(subset, 2 * d + 2):
            a, b = vec[: d + 1], vec[d + 1 :]
            if not any(b):
                continue
            f = _from_vectors(a, b, half)
            if _matches_exact(f, samples):
                return f
    raise ReconstructionError("inconsistent samples")


def _matches_exact(f: RationalFn, samples) -> bool:
    for pt, value in samples:
        y = _as_cyclotomic(pt, value, not f.is_integral())
        try:
            if exact_value(f, pt, y.m) != y:
                return False
        except ZeroDivisionError:
            return False
    return True


def _reconstruct_numeric(samples, degree_bound, half, dps: int = 50, tol: float = 1e-9):
    with mpmath.workdps(dps):
        pts = [(pt, mpmath.mpc(complex(v)) if not isinstance(v, mpmath.mpc) else v) for pt, v in samples]
        factor = 1 if half else 2
        xs = [mpmath.expjpi(mpmath.mpf(factor * pt.k) / pt.n) for pt, _ in pts]
        for d in range(degree_bound + 1):
            rows = []
            for x, (_, y) in zip(xs, pts):
                row = [x**i for i in range(d + 1)] + [-y * x**j for j in range(d + 1)]
                # the unknown coefficients are real
                rows.append([c.real for c in row])
                rows.append([c.imag for c in row])
            ncols = 2 * d + 2
            _, s, v = mpmath.svd_r(mpmath.matrix(rows), full_matrices=True)
            if len(rows) >= ncols and s[ncols - 1] > tol * max(1, s[0]):
                continue
            vec = [v[ncols - 1, j] for j in range(ncols)]
            f = _snap(vec, d, half)
            if f is not None and _matches_numeric(f, pts):
                return f
    raise ReconstructionError("inconsistent samples")


def _snap(vec, d, half):
    big = max(vec, key=abs)
    vec = [x / big for x in vec]
    smallest = min(abs(x) for x in vec if abs(x) > 1e-9)
    fr = [Fraction(float(x / smallest)).limit_denominator(10**6) for x in vec]
    a, b = fr[: d + 1], fr[d + 1 :]
    if not any(b):
        return None
    return _from_vectors(a, b, half)


def _matches_numeric(f: RationalFn, pts, tol=1e-9) -> bool:
    for pt, y in pts:
        val = f.at_q(complex(pt.q_complex()))
        if abs(val - complex(y)) > tol * max(1.0, abs(complex(y))):
            return False
    return True
