"""Dense univariate polynomials over a finite field context.

A polynomial is a tuple of raw field elements ``(c0, c1, ..., cn)`` with
``cn`` nonzero; the zero polynomial is ``()``.  Every function takes the
coefficient field ``F`` first; ``F`` only needs ``zero``, ``one``, ``add``,
``sub``, ``neg``, ``mul``, ``inv``, ``order``, ``p`` and ``pth_root``.
"""

from __future__ import annotations

import random
from functools import lru_cache

Poly = tuple


def trim(F, coeffs) -> Poly:
    coeffs = list(coeffs)
    z = F.zero
    while coeffs and coeffs[-1] == z:
        coeffs.pop()
    return tuple(coeffs)


def deg(f: Poly) -> int:
    return len(f) - 1


def const(F, c) -> Poly:
    return () if c == F.zero else (c,)


def monomial(F, n: int, c=None) -> Poly:
    c = F.one if c is None else c
    if c == F.zero:
        return ()
    return (F.zero,) * n + (c,)


def x(F) -> Poly:
    return (F.zero, F.one)


def add(F, f: Poly, g: Poly) -> Poly:
    if len(f) < len(g):
        f, g = g, f
    out = list(f)
    for i, c in enumerate(g):
        out[i] = F.add(out[i], c)
    return trim(F, out)


def neg(F, f: Poly) -> Poly:
    return tuple(F.neg(c) for c in f)


def sub(F, f: Poly, g: Poly) -> Poly:
    return add(F, f, neg(F, g))


def scale(F, f: Poly, c) -> Poly:
    if c == F.zero:
        return ()
    return tuple(F.mul(a, c) for a in f)


def mul(F, f: Poly, g: Poly) -> Poly:
    if not f or not g:
        return ()
    z = F.zero
    out = [z] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == z:
            continue
        for j, b in enumerate(g):
            out[i + j] = F.add(out[i + j], F.mul(a, b))
    return trim(F, out)


def divmod_(F, f: Poly, g: Poly) -> tuple[Poly, Poly]:
    if not g:
        raise ZeroDivisionError("polynomial division by zero")
    if len(f) < len(g):
        return (), f
    inv_lc = F.inv(g[-1])
    r = list(f)
    dg = len(g) - 1
    q = [F.zero] * (len(f) - dg)
    for i in range(len(f) - 1, dg - 1, -1):
        c = r[i]
        if c == F.zero:
            continue
        c = F.mul(c, inv_lc)
        q[i - dg] = c
        for j, b in enumerate(g):
            r[i - dg + j] = F.sub(r[i - dg + j], F.mul(c, b))
    return trim(F, q), trim(F, r[:dg])


def div(F, f: Poly, g: Poly) -> Poly:
    q, r = divmod_(F, f, g)
    if r:
        raise ValueError("inexact polynomial division")
    return q


def mod(F, f: Poly, g: Poly) -> Poly:
    return divmod_(F, f, g)[1]


def monic(F, f: Poly) -> Poly:
    if not f:
        return f
    if f[-1] == F.one:
        return f
    return scale(F, f, F.inv(f[-1]))


def gcd(F, f: Poly, g: Poly) -> Poly:
    while g:
        f, g = g, mod(F, f, g)
    return monic(F, f)


def xgcd(F, f: Poly, g: Poly) -> tuple[Poly, Poly, Poly]:
    """Return ``(d, a, b)`` with ``a*f + b*g = d`` and ``d`` monic."""
    r0, r1 = f, g
    s0, s1 = (F.one,), ()
    t0, t1 = (), (F.one,)
    while r1:
        q, r = divmod_(F, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, sub(F, s0, mul(F, q, s1))
        t0, t1 = t1, sub(F, t0, mul(F, q, t1))
    if not r0:
        return (), s0, t0
    c = F.inv(r0[-1])
    return scale(F, r0, c), scale(F, s0, c), scale(F, t0, c)


def powmod(F, f: Poly, n: int, m: Poly) -> Poly:
    result = (F.one,)
    base = mod(F, f, m)
    while n > 0:
        if n & 1:
            result = mod(F, mul(F, result, base), m)
        n >>= 1
        if n:
            base = mod(F, mul(F, base, base), m)
    return result


def evaluate(F, f: Poly, a):
    acc = F.zero
    for c in reversed(f):
        acc = F.add(F.mul(acc, a), c)
    return acc


def derivative(F, f: Poly) -> Poly:
    return trim(F, [F.mul(F.from_int(i), f[i]) for i in range(1, len(f))])


def pth_root(F, f: Poly) -> Poly:
    """Inverse of Frobenius on a polynomial whose exponents are all multiples of p."""
    p = F.p
    return trim(F, [F.pth_root(f[i]) for i in range(0, len(f), p)])


def valuation(F, f: Poly, g: Poly) -> tuple[int, Poly]:
    """Multiplicity of ``g`` in ``f`` and the cofactor."""
    if not f:
        raise ValueError("valuation of zero")
    k = 0
    while True:
        q, r = divmod_(F, f, g)
        if r:
            return k, f
        f = q
        k += 1


def random_poly(F, degree_bound: int, rng: random.Random) -> Poly:
    return trim(F, [F.random(rng) for _ in range(degree_bound)])


def _squarefree(F, f: Poly) -> list[tuple[Poly, int]]:
    out = []
    one = (F.one,)
    if len(f) <= 1:
        return out
    df = derivative(F, f)
    if not df:
        for g, e in _squarefree(F, pth_root(F, f)):
            out.append((g, e * F.p))
        return out
    c = gcd(F, f, df)
    w = div(F, f, c)
    i = 1
    while w != one:
        y = gcd(F, w, c)
        z = div(F, w, y)
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = div(F, c, y)
    if c != one:
        for g, e in _squarefree(F, pth_root(F, c)):
            out.append((g, e * F.p))
    return out


def _distinct_degree(F, f: Poly) -> list[tuple[int, Poly]]:
    out = []
    t = x(F)
    h = t
    i = 1
    rest = f
    while deg(rest) >= 2 * i:
        h = powmod(F, h, F.order, rest)
        g = gcd(F, rest, sub(F, h, t))
        if deg(g) > 0:
            out.append((i, g))
            rest = div(F, rest, g)
            h = mod(F, h, rest)
        i += 1
    if deg(rest) > 0:
        out.append((deg(rest), rest))
    return out


def _equal_degree(F, f: Poly, d: int, rng: random.Random) -> list[Poly]:
    if deg(f) == d:
        return [f]
    exponent = (F.order ** d - 1) // 2
    one = (F.one,)
    while True:
        a = random_poly(F, deg(f), rng)
        if deg(a) < 1:
            continue
        g = gcd(F, a, f)
        if 0 < deg(g) < deg(f):
            break
        b = sub(F, powmod(F, a, exponent, f), one)
        g = gcd(F, b, f)
        if 0 < deg(g) < deg(f):
            break
    return _equal_degree(F, g, d, rng) + _equal_degree(F, div(F, f, g), d, rng)


@lru_cache(maxsize=65536)
def factor(F, f: Poly):
    """Factor ``f`` as ``unit * prod(g**e)`` with monic irreducible ``g``.

    Returns ``(unit, ((g, e), ...))`` sorted by ``(deg g, g)``.
    """
    if not f:
        raise ValueError("zero input")
    unit = f[-1]
    f = monic(F, f)
    rng = random.Random(0x5EED)
    found: dict[Poly, int] = {}
    for g, e in _squarefree(F, f):
        for d, h in _distinct_degree(F, g):
            for irr in _equal_degree(F, h, d, rng):
                found[irr] = found.get(irr, 0) + e
    factors = tuple(sorted(found.items(), key=lambda ge: (len(ge[0]), ge[0])))
    return unit, factors


def is_irreducible(F, f: Poly) -> bool:
    if deg(f) < 1:
        return False
    _, facs = factor(F, f)
    return len(facs) == 1 and facs[0][1] == 1


def irreducibles(F, d: int):
    """All monic irreducible polynomials of degree ``d`` over ``F``."""
    import itertools

    elems = list(F.elements())
    for tail in itertools.product(elems, repeat=d):
        f = tuple(tail) + (F.one,)
        if is_irreducible(F, f):
            yield f
