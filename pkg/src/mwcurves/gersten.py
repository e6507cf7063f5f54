"""Gersten complexes ``C^0 -> C^1`` of curves over a finite field.

``C^0`` elements are classes over ``F(t)``; ``C^1`` elements are finitely
supported families of twisted classes at closed points.  On ``P^1`` the
first cohomology is read off by the sum of transferred residues.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .fields import FieldElem, FiniteField, function_field
from .places import Place, infinity
from .residues import (ApproximationError, approximate, canonical_section,
                       canonical_transfer, class_places, mw_residue,
                       mw_residue_twisted)
from .symbols import (MwClass, MwError, TwistedClass, constant_embedding,
                      twist_make)

KINDS = ("point", "affine_line", "projective_line", "gm")
LINE_KIND = {"affine_line": "affine", "projective_line": "projective", "gm": "gm"}


class GerstenError(MwError):
    pass


@dataclass(frozen=True)
class CurveScheme:
    kind: str
    ground: FiniteField
    twist: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise GerstenError(f"unknown scheme kind {self.kind!r}")
        if self.twist and self.kind != "projective_line":
            raise GerstenError("twists are only defined on the projective line")

    @property
    def line_kind(self) -> str:
        if self.kind == "point":
            raise GerstenError("a point has no places")
        return LINE_KIND[self.kind]

    @property
    def function_field(self):
        return function_field(self.ground)

    def tag(self, pl: Place) -> str:
        chart = "inf" if pl.is_infinite else "0"
        return f"O({self.twist})@{chart}"

    def chart_factor(self, pl: Place) -> FieldElem:
        """Scalar turning the global section ``e0`` into the chart generator."""
        Kt = self.function_field
        if pl.is_infinite and self.twist:
            return Kt.t() ** self.twist
        return Kt(1)

    @classmethod
    def named(cls, name: str, ground, twist: int = 0) -> "CurveScheme":
        aliases = {"A1": "affine_line", "P1": "projective_line", "Gm": "gm", "GM": "gm",
                   "pt": "point", "point": "point"}
        return cls(aliases.get(name, name), ground, twist)


@dataclass
class SupportedFamily:
    scheme: CurveScheme
    degree: int
    entries: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for pl, tc in self.entries.items():
            if not isinstance(tc, TwistedClass):
                raise GerstenError("family entries must be twisted classes")
            if pl.is_infinite and self.scheme.kind != "projective_line":
                raise GerstenError("infinity is not a place of this scheme")
            if self.scheme.kind == "gm" and pl.poly == (pl.ground.zero, pl.ground.one):
                raise GerstenError("(t) is not a place of G_m")
            if tc.cls.degree != self.degree - 1:
                raise GerstenError("entry degree does not match the family")
            if not tc.cls.is_zero():
                clean[pl] = tc
        self.entries = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))

    def __add__(self, other: "SupportedFamily") -> "SupportedFamily":
        if other.scheme != self.scheme or other.degree != self.degree:
            raise GerstenError("families live on different complexes")
        out = dict(self.entries)
        for pl, tc in other.entries.items():
            if pl in out:
                a = out[pl]
                b = tc.rebased(a.section)
                out[pl] = TwistedClass(a.cls + b.cls, a.tag, a.section, a.place)
            else:
                out[pl] = tc
        return SupportedFamily(self.scheme, self.degree, out)

    def __neg__(self):
        return SupportedFamily(self.scheme, self.degree, {
            pl: TwistedClass(-tc.cls, tc.tag, tc.section, tc.place) for pl, tc in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, SupportedFamily):
            return NotImplemented
        return (self.scheme == other.scheme and self.degree == other.degree
                and self.entries.keys() == other.entries.keys()
                and all(self.entries[pl] == other.entries[pl] for pl in self.entries))

    @property
    def support(self) -> list[Place]:
        return list(self.entries)

    def is_empty(self) -> bool:
        return not self.entries

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme.kind,
            "twist": self.scheme.twist,
            "n": self.degree,
            "entries": [dict(place=pl.label, **tc.to_json()) for pl, tc in self.entries.items()],
        }


def family_entry(scheme: CurveScheme, pl: Place, cls: MwClass, section: FieldElem | None = None) -> tuple:
    """``(place, twisted class)`` with the place's uniformizer as default section."""
    pl = pl if pl.is_infinite else pl.on(scheme.line_kind)
    section = pl.uniformizer if section is None else section
    return pl, twist_make(cls, scheme.tag(pl), section, pl.on("projective"))


def places_of(f: MwClass, scheme: CurveScheme) -> list[Place]:
    out = class_places(f, scheme.line_kind)
    if scheme.kind == "projective_line":
        out.append(infinity(scheme.ground))
    return out


def total_residue(f: MwClass, scheme: CurveScheme) -> SupportedFamily:
    """All nonzero residues of ``f`` on the scheme, tagged by chart."""
    if scheme.kind == "point":
        raise GerstenError("a point has no codimension-one points")
    if f.ctx is not scheme.function_field:
        raise GerstenError("class does not live over the function field of the scheme")
    out = {}
    for pl in places_of(f, scheme):
        g = f
        c = scheme.chart_factor(pl)
        if not c.is_one():
            g = MwClass.unit_form(c) * f
        tc = mw_residue_twisted(g, pl, tag=scheme.tag(pl))
        if not tc.cls.is_zero():
            out[pl] = tc
    return SupportedFamily(scheme, f.degree, out)


def _require_even_twist(scheme: CurveScheme):
    if scheme.twist % 2:
        raise GerstenError("odd twists of the projective line are not supported")


def h1_p1_class(fam: SupportedFamily) -> MwClass:
    """Sum of transferred residues, each rebased to the canonical section."""
    scheme = fam.scheme
    if scheme.kind != "projective_line":
        raise GerstenError("h1 is read off on the projective line")
    _require_even_twist(scheme)
    B = scheme.ground
    total = MwClass.zero(B, fam.degree - 1)
    for pl, tc in fam.entries.items():
        beta = tc.rebased(canonical_section(pl)).cls
        if not pl.is_infinite:
            beta = canonical_transfer(pl.residue_field, B, beta)
        total = total + beta
    return total


@dataclass
class CoboundaryResult:
    preimage: MwClass | None = None
    obstruction: MwClass | None = None

    @property
    def is_coboundary(self) -> bool:
        return self.preimage is not None


def decide_coboundary(fam: SupportedFamily, bound: int | None = None) -> CoboundaryResult:
    """A preimage under :func:`total_residue`, or the ``H^1`` obstruction."""
    scheme = fam.scheme
    if scheme.kind == "point":
        raise GerstenError("decide_coboundary needs a curve")
    Kt = scheme.function_field
    if scheme.kind == "projective_line":
        obs = h1_p1_class(fam)
        if not obs.is_zero():
            return CoboundaryResult(obstruction=obs)
    targets = {}
    for pl, tc in fam.entries.items():
        if pl.is_infinite:
            continue
        sec = tc.section
        if pl.valuation(sec) != 1:
            tc = tc.rebased(pl.uniformizer)
            sec = pl.uniformizer
        targets[pl.with_uniformizer(sec)] = tc.cls
    kw = {} if bound is None else {"bound": bound}
    f = approximate(targets, Kt, fam.degree, line_kind=scheme.line_kind, **kw)
    back = total_residue(f, scheme)
    if back != fam:
        raise ApproximationError("constructed preimage does not recompute to the family", f)
    return CoboundaryResult(preimage=f)


def reciprocity_check(f: MwClass, n: int | None = None) -> bool:
    if n is not None and n != f.degree:
        raise GerstenError("degree mismatch")
    B = f.ctx.base
    fam = total_residue(f, CurveScheme("projective_line", B))
    return h1_p1_class(fam).is_zero()


# ---------------------------------------------------------------------------
# specialization and contractions


def specialize(f: MwClass, a) -> MwClass:
    """Value of ``f`` at the rational point ``t = a`` (``f`` unramified there)."""
    B = f.ctx.base
    a = B(a)
    pl = Place(B, (B.neg(a.v), B.one))
    pi = pl.uniformizer
    return mw_residue(MwClass.bracket(pi) * f, pl)


def contraction_embed(beta: MwClass, Kt=None) -> MwClass:
    """``[t] * beta`` over ``K(t)``."""
    Kt = function_field(beta.ctx) if Kt is None else Kt
    return MwClass.bracket(Kt.t()) * constant_embedding(beta, Kt)


def contraction_project(gamma: MwClass) -> MwClass:
    """Residue at ``(t)`` of a class unramified on ``G_m`` and based at 1."""
    B = gamma.ctx.base
    scheme = CurveScheme("gm", B)
    fam = total_residue(gamma, scheme)
    if not fam.is_empty():
        labels = ", ".join(pl.label for pl in fam.support)
        raise GerstenError(f"class is ramified on G_m at: {labels}")
    if not specialize(gamma, 1).is_zero():
        raise GerstenError("class is not based: its value at t = 1 is nonzero")
    return mw_residue(gamma, Place(B, (B.zero, B.one)))


# ---------------------------------------------------------------------------
# homotopy invariance audit


def _rational_points(B):
    return [B.elem(v) for v in B.elements()]


def _check_constant(g: MwClass, B, rng) -> tuple[bool, dict]:
    """Is an unramified ``g`` the constant class of its value at a rational point?"""
    pts = _rational_points(B)
    a = rng.choice(pts)
    c = specialize(g, a)
    ok = constant_embedding(c, g.ctx) == g
    return ok, {"point": str(a), "value": c.to_json()}


def homotopy_invariance_audit(F: FiniteField, n: int, trials: int, seed: int = 0,
                              max_place_degree: int = 2) -> dict:
    """Check H^0 and H^1 of A^1 and P^1 with coefficients in degree ``n``.

    (a) classes unramified on A^1 are constant; (b) every family on A^1 is a
    coboundary; (c) classes unramified on P^1 are constant; (d) h1 on P^1 is
    onto (via the rational point (t)) and kills coboundaries.
    """
    from .randgen import random_class, random_place

    if trials < 1:
        raise GerstenError("trials must be at least 1")
    rng = random.Random(seed)
    Kt = function_field(F)
    A1 = CurveScheme("affine_line", F)
    P1 = CurveScheme("projective_line", F)
    counts = {"a": 0, "b": 0, "c": 0, "d": 0}
    witnesses = []

    def fail(which, **data):
        witnesses.append(dict(assertion=which, **data))

    for _ in range(trials):
        # (a)
        f = random_class(Kt, n, rng)
        fam = total_residue(f, A1)
        g = f - decide_coboundary(fam).preimage
        if not total_residue(g, A1).is_empty():
            fail("a", cls=g.to_json(), reason="difference is ramified")
        else:
            ok, info = _check_constant(g, F, rng)
            if not ok:
                fail("a", cls=g.to_json(), **info)
        counts["a"] += 1
        # (b)
        entries = {}
        for _ in range(rng.randint(1, 3)):
            pl = random_place(F, rng, max_place_degree, "affine")
            cls = random_class(pl.residue_field, n - 1, rng)
            p, tc = family_entry(A1, pl, cls)
            entries[p] = tc
        fam = SupportedFamily(A1, n, entries)
        try:
            res = decide_coboundary(fam)
            if not res.is_coboundary:
                fail("b", family=fam.to_json(), reason="no preimage")
        except ApproximationError as exc:
            fail("b", family=fam.to_json(), reason=str(exc))
        counts["b"] += 1
        # (c)
        f = random_class(Kt, n, rng)
        fam = total_residue(f, P1)
        res = decide_coboundary(fam)
        if not res.is_coboundary:
            fail("c", cls=f.to_json(), reason="residue family has an obstruction")
        else:
            g = f - res.preimage
            if not total_residue(g, P1).is_empty():
                fail("c", cls=g.to_json(), reason="difference is ramified")
            else:
                ok, info = _check_constant(g, F, rng)
                if not ok:
                    fail("c", cls=g.to_json(), **info)
        counts["c"] += 1
        # (d)
        beta = random_class(F, n - 1, rng)
        p, tc = family_entry(P1, Place(F, (F.zero, F.one)), beta)
        fam = SupportedFamily(P1, n, {p: tc})
        if h1_p1_class(fam) != beta:
            fail("d", beta=beta.to_json(), reason="h1 of the section at (t) is not beta")
        f = random_class(Kt, n, rng)
        cob = total_residue(f, P1)
        if not h1_p1_class(cob).is_zero():
            fail("d", cls=f.to_json(), reason="h1 does not kill a coboundary")
        if h1_p1_class(fam + cob) != beta:
            fail("d", cls=f.to_json(), reason="h1 changes under adding a coboundary")
        counts["d"] += 1
    return {
        "field": F.spec,
        "n": n,
        "trials": trials,
        "seed": seed,
        "checked": counts,
        "failures": witnesses,
        "passed": not witnesses,
    }
