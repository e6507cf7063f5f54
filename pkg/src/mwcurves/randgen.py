"""Seeded random expressions, classes and families for audits."""

from __future__ import annotations

import random

from . import poly as P
from .fields import FieldElem
from .symbols import MwExpression, normalize

# entry degree bounds over F_q(t) keep residue fields small
ENTRY_DEGREE = {3: 3, 5: 2, 7: 2}


def entry_degree(q: int) -> int:
    return ENTRY_DEGREE.get(q, 2)


def random_unit(ctx, rng: random.Random, max_degree: int | None = None) -> FieldElem:
    if ctx.kind == "finite":
        return ctx.elem(ctx.random_unit(rng))
    B = ctx.base
    md = entry_degree(B.order) if max_degree is None else max_degree
    while True:
        num = P.random_poly(B, rng.randint(1, md + 1), rng)
        if num:
            break
    den = (B.one,)
    if rng.random() < 0.25:
        d = P.monic(B, P.random_poly(B, rng.randint(1, md + 1), rng))
        if d:
            den = d
    return ctx.elem(ctx.normalize(num, den))


def random_expression(ctx, degree: int, rng: random.Random, max_terms: int = 3,
                      max_degree: int | None = None) -> MwExpression:
    """Random terms ``c * eta**i * [u1]...[um]`` of one degree."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        c = rng.choice([-2, -1, 1, 1, 2])
        if degree >= 1:
            m = degree + (1 if rng.random() < 0.3 else 0)
        else:
            m = rng.choice([0, 1, 1, 2]) if degree > -3 else rng.choice([0, 1])
        i = m - degree
        entries = tuple(random_unit(ctx, rng, max_degree) for _ in range(m))
        terms.append((c, i, entries))
    return MwExpression(ctx, tuple(terms))


def random_class(ctx, degree: int, rng: random.Random, **kw):
    return normalize(random_expression(ctx, degree, rng, **kw), degree)


def random_place(ground, rng: random.Random, max_degree: int = 2, line_kind: str = "projective"):
    from .places import Place

    B = ground
    while True:
        d = rng.randint(1, max_degree)
        g = tuple(B.random(rng) for _ in range(d)) + (B.one,)
        if P.is_irreducible(B, g):
            if line_kind == "gm" and g == (B.zero, B.one):
                continue
            return Place(B, g, line_kind)
