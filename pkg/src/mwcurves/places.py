"""Closed points of A^1, P^1 and G_m over a finite field, with uniformizers.

A :class:`Place` is identified by its point (ground field and monic
irreducible polynomial, or infinity); the line kind and the chosen
uniformizer ride along but do not take part in equality, so places can key
dictionaries of residues.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from . import poly as P
from .fields import FieldElem, FieldError, FiniteField, extension, function_field

LINE_KINDS = ("affine", "projective", "gm")


class PoleError(FieldError):
    pass


@lru_cache(maxsize=None)
def residue_field(ground: FiniteField, g: tuple) -> FiniteField:
    if len(g) == 2:
        return ground
    return extension(ground, g, "t")


@dataclass(frozen=True)
class Place:
    ground: FiniteField
    poly: tuple | None
    line_kind: str = field(default="projective", compare=False)
    uniformizer: FieldElem | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.line_kind not in LINE_KINDS:
            raise FieldError(f"unknown line kind {self.line_kind!r}")
        B = self.ground
        Ft = function_field(B)
        if self.poly is None:
            if self.line_kind != "projective":
                raise FieldError("infinity is only a place of the projective line")
            default = FieldElem(Ft, ((B.one,), (B.zero, B.one)))
        else:
            g = tuple(self.poly)
            if not g or g[-1] != B.one or not P.is_irreducible(B, g):
                raise FieldError("place polynomial must be monic irreducible")
            if self.line_kind == "gm" and g == (B.zero, B.one):
                raise FieldError("(t) is not a place of G_m")
            object.__setattr__(self, "poly", g)
            default = FieldElem(Ft, (g, (B.one,)))
        object.__setattr__(self, "_default_pi", default)
        pi = self.uniformizer
        if pi is None:
            object.__setattr__(self, "uniformizer", default)
            object.__setattr__(self, "_pi_ratio", None)
        else:
            pi = Ft(pi) if not isinstance(pi, FieldElem) or pi.ctx is not Ft else pi
            if self.valuation(pi) != 1:
                raise FieldError("uniformizer must have valuation 1 at the place")
            object.__setattr__(self, "uniformizer", pi)
            ratio = self._split_default(pi / default)[1]
            object.__setattr__(self, "_pi_ratio", None if ratio == self.residue_field.one else ratio)

    # --- descriptors -------------------------------------------------------
    @property
    def is_infinite(self) -> bool:
        return self.poly is None

    @property
    def degree(self) -> int:
        return 1 if self.poly is None else len(self.poly) - 1

    @property
    def function_field(self):
        return function_field(self.ground)

    @property
    def residue_field(self) -> FiniteField:
        if self.poly is None:
            return self.ground
        return residue_field(self.ground, self.poly)

    @property
    def default_uniformizer(self) -> FieldElem:
        return self._default_pi

    @property
    def label(self) -> str:
        if self.poly is None:
            return "inf"
        from .fields import P_format

        return P_format(self.ground, self.poly, "t")

    def __str__(self):
        return f"({self.label})"

    def sort_key(self):
        return (1, ()) if self.poly is None else (0, (len(self.poly), self.poly))

    def with_uniformizer(self, pi) -> "Place":
        return Place(self.ground, self.poly, self.line_kind, pi)

    def on(self, line_kind: str) -> "Place":
        return Place(self.ground, self.poly, line_kind, self.uniformizer if self._pi_ratio else None)

    # --- reduction -----------------------------------------------------------
    def reduce_poly(self, f: tuple):
        """Raw image in the residue field of a polynomial over the ground field."""
        B = self.ground
        g = self.poly
        if len(g) == 2:
            return P.evaluate(B, f, B.neg(g[0]))
        r = P.mod(B, f, g)
        return tuple(r) + (B.zero,) * (len(g) - 1 - len(r))

    def lift(self, c: FieldElem) -> FieldElem:
        """The polynomial of degree < deg(place) representing a residue class."""
        B = self.ground
        Ft = self.function_field
        k = self.residue_field
        if c.ctx is not k:
            c = k(c)
        if self.poly is None or len(self.poly) == 2:
            return FieldElem(Ft, Ft.const(c.v))
        return FieldElem(Ft, Ft.from_poly(P.trim(B, c.v)))

    def valuation(self, f: FieldElem) -> int:
        num, den = f.v
        if not num:
            raise FieldError("valuation of zero")
        if self.poly is None:
            return len(den) - len(num)
        B = self.ground
        return P.valuation(B, num, self.poly)[0] - P.valuation(B, den, self.poly)[0]

    def _split_default(self, f: FieldElem):
        num, den = f.v
        B = self.ground
        k = self.residue_field
        if not num:
            raise FieldError("zero has no unit part")
        if self.poly is None:
            v = len(den) - len(num)
            return v, B.div(num[-1], den[-1])
        a, un = P.valuation(B, num, self.poly)
        b, ud = P.valuation(B, den, self.poly)
        return a - b, k.div(self.reduce_poly(un), self.reduce_poly(ud))

    def split(self, f: FieldElem) -> tuple[int, FieldElem]:
        """``f = pi**k * u``; return ``k`` and the residue of ``u``."""
        k, u = self._split_default(f)
        if self._pi_ratio is not None and k:
            K = self.residue_field
            u = K.mul(u, K.pow(self._pi_ratio, -k))
        return k, FieldElem(self.residue_field, u)


def evaluate_at(f: FieldElem, pl: Place) -> FieldElem:
    """Image of ``f`` in the residue field of ``pl``."""
    if f.is_zero():
        return pl.residue_field(0)
    k, u = pl.split(f)
    if k < 0:
        raise PoleError("pole at place")
    if k > 0:
        return pl.residue_field(0)
    return u


def finite_places_of(f: FieldElem, line_kind: str = "projective") -> list[Place]:
    """Finite places where ``f`` has nonzero valuation."""
    B = f.ctx.base
    out = []
    for part in f.v:
        if len(part) > 1:
            _, facs = P.factor(B, part)
            out.extend(g for g, _ in facs)
    seen = sorted(set(out), key=lambda g: (len(g), g))
    return [Place(B, g, line_kind) for g in seen]


def factor_poly(F: FiniteField, f) -> tuple[FieldElem, list[tuple[tuple, int]]]:
    """Leading unit and monic irreducible factors with multiplicities."""
    if isinstance(f, FieldElem):
        num, den = f.v
        if den != (F.one,):
            raise FieldError("not a polynomial")
        f = num
    if not P.trim(F, tuple(f)):
        raise FieldError("zero input")
    unit, facs = P.factor(F, tuple(f))
    return FieldElem(F, unit), list(facs)


def is_square(a: FieldElem) -> bool:
    if a.ctx.kind != "finite":
        raise FieldError("square testing is only decided over finite fields")
    return a.ctx.is_square(a.v)


def norm(L: FiniteField, K: FiniteField, a: FieldElem) -> FieldElem:
    return FieldElem(K, L.norm_raw(L(a).v, K))


def trace(L: FiniteField, K: FiniteField, a: FieldElem) -> FieldElem:
    return FieldElem(K, L.trace_raw(L(a).v, K))


def rational_place(ground: FiniteField, a, line_kind: str = "projective") -> Place:
    a = ground(a)
    return Place(ground, (ground.neg(a.v), ground.one), line_kind)


def infinity(ground: FiniteField) -> Place:
    return Place(ground, None, "projective")
