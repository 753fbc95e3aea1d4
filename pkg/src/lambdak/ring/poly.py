"""Dense univariate polynomials over the integers and the rationals.

Polynomials are plain lists (or tuples) of coefficients, index = exponent,
with no trailing zeros; the zero polynomial is the empty list.  These helpers
back the Laurent and rational-function types and the cyclotomic tests.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd


def strip(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def degree(p) -> int:
    return len(p) - 1


def add(p, q):
    n = max(len(p), len(q))
    out = [0] * n
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return strip(out)


def sub(p, q):
    return add(p, [-c for c in q])


def mul(p, q):
    if not p or not q:
        return []
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return strip(out)


def scale(p, c):
    return strip([c * a for a in p])


def content(p) -> int:
    g = 0
    for c in p:
        g = gcd(g, c)
    return g


def primitive(p):
    """Primitive part with positive leading coefficient."""
    if not p:
        return []
    c = content(p)
    if p[-1] < 0:
        c = -c
    return [a // c for a in p]


def divmod_monic(p, m):
    """Division by a monic integer polynomial; exact over the integers."""
    p = list(p)
    dm = len(m) - 1
    if len(p) <= dm:
        return [], strip(p)
    quot = [0] * (len(p) - dm)
    for i in range(len(p) - 1, dm - 1, -1):
        c = p[i]
        if c:
            quot[i - dm] = c
            for j in range(dm + 1):
                p[i - dm + j] -= c * m[j]
    return strip(quot), strip(p[:dm])


def divmod_field(p, q):
    """Long division over the rationals."""
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = [Fraction(c) for c in p]
    lead = Fraction(q[-1])
    dq = len(q) - 1
    if len(p) <= dq:
        return [], strip(p)
    quot = [Fraction(0)] * (len(p) - dq)
    for i in range(len(p) - 1, dq - 1, -1):
        c = p[i] / lead
        if c:
            quot[i - dq] = c
            for j in range(dq + 1):
                p[i - dq + j] -= c * q[j]
    return strip(quot), strip(p[:dq])


def exact_div(p, q):
    """Exact division in Z[x]; raises ArithmeticError when q does not divide p."""
    quot, rem = divmod_field(p, q)
    if rem or any(c.denominator != 1 for c in quot):
        raise ArithmeticError("inexact polynomial division")
    return [int(c) for c in quot]


def pseudo_rem(p, q):
    lq = q[-1]
    dq = len(q) - 1
    r = list(p)
    while len(r) - 1 >= dq and r:
        lr = r[-1]
        shift = len(r) - 1 - dq
        r = [lq * c for c in r]
        for j in range(dq + 1):
            r[shift + j] -= lr * q[j]
        r = strip(r)
    return r


def poly_gcd(p, q):
    """Primitive gcd in Z[x] (positive leading coefficient)."""
    p, q = strip(p), strip(q)
    if not p:
        return primitive(q)
    if not q:
        return primitive(p)
    c = gcd(content(p), content(q))
    a, b = primitive(p), primitive(q)
    if len(a) < len(b):
        a, b = b, a
    while b:
        if len(b) == 1:
            return [c]
        r = pseudo_rem(a, b)
        a, b = b, primitive(r) if r else []
    return scale(primitive(a), c)


def evaluate(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def reciprocal(p):
    """x^deg p(1/x)."""
    return strip(list(reversed(p)))


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple:
    """Coefficients of the n-th cyclotomic polynomial.

    Phi_n = prod_{d | n} (x^d - 1)^mu(n/d); the negative factors are removed
    by exact monic division.
    """
    if n < 1:
        raise ValueError("cyclotomic order must be positive")
    num, den = [1], [1]
    for d in range(1, n + 1):
        if n % d:
            continue
        mu = _mobius(n // d)
        factor = [-1] + [0] * (d - 1) + [1]
        if mu == 1:
            num = mul(num, factor)
        elif mu == -1:
            den = mul(den, factor)
    quot, rem = divmod_monic(num, den)
    if rem:
        raise ArithmeticError("cyclotomic construction failed")
    return tuple(quot)


def euler_phi(n: int) -> int:
    return len(cyclotomic(n)) - 1


def divisible_by_cyclotomic(p, n: int) -> bool:
    if not p:
        return True
    _, rem = divmod_monic(p, cyclotomic(n))
    return not rem


def cyclotomic_orders(p, max_order: int | None = None) -> dict[int, int]:
    """Multiplicities of the cyclotomic factors of an integer polynomial.

    A factor Phi_n of degree phi(n) <= deg p satisfies n <= 2 phi(n)^2, which
    bounds the search.
    """
    p = strip(p)
    found: dict[int, int] = {}
    if len(p) <= 1:
        return found
    deg = len(p) - 1
    limit = max_order if max_order is not None else max(2, 2 * deg * deg + 2)
    for n in range(1, limit + 1):
        phi = cyclotomic(n)
        if len(phi) - 1 > deg:
            continue
        while len(p) > 1:
            quot, rem = divmod_monic(p, phi)
            if rem:
                break
            p = quot
            found[n] = found.get(n, 0) + 1
    return found


def strip_cyclotomic(p):
    """Remove every cyclotomic factor; returns (orders, cofactor)."""
    p = strip(p)
    orders = cyclotomic_orders(p)
    for n, e in orders.items():
        for _ in range(e):
            p, _ = divmod_monic(p, cyclotomic(n))
    return orders, p
