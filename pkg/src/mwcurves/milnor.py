"""Milnor K-theory symbols over F_q and F_q(t).

Canonical data by degree:

========  ==========================  ===========================================
degree    over F_q                    over F_q(t)
========  ==========================  ===========================================
0         integer                     integer
1         the unit itself             the unit itself
2         trivial                     tame symbols at all finite places
>= 3      trivial                     trivial
========  ==========================  ===========================================

Degree-2 classes over F_q(t) keep a list of symbols as their representation
(tame symbols at infinity are computed from it directly, never inferred by
reciprocity); the canonical data is derived lazily for equality.
"""

from __future__ import annotations

from collections import defaultdict

from .fields import FieldElem, FieldError, FiniteField
from .places import Place, finite_places_of

MAX_DEGREE = 4


class MilnorError(FieldError):
    pass


def _trivial_from(ctx, degree: int) -> bool:
    """Degrees in which the canonical data is the trivial group."""
    if degree < 0:
        return True
    if ctx.kind == "finite":
        return degree >= 2
    return degree >= 3


class MilnorClass:
    __slots__ = ("ctx", "degree", "data", "_key")

    def __init__(self, ctx, degree: int, data=None):
        self.ctx = ctx
        self.degree = degree
        self._key = None
        if _trivial_from(ctx, degree):
            data = None
        elif degree == 0:
            data = int(data or 0)
        elif degree == 1:
            data = ctx(1) if data is None else ctx(data)
            if data.is_zero():
                raise MilnorError("symbol entry must be a unit")
        else:
            merged: dict = defaultdict(int)
            for (a, b), c in data or ():
                if a.ctx is not ctx or b.ctx is not ctx:
                    a, b = ctx(a), ctx(b)
                if a.is_zero() or b.is_zero():
                    raise MilnorError("symbol entry must be a unit")
                if ctx.is_constant(a.v) and ctx.is_constant(b.v):
                    continue  # K_2 of a finite field vanishes
                merged[(a, b)] += c
            data = tuple(sorted(((ab, c) for ab, c in merged.items() if c),
                                key=lambda abc: (abc[0][0].sort_key(), abc[0][1].sort_key())))
        self.data = data

    # --- constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, ctx, degree: int) -> "MilnorClass":
        if degree == 1 and not _trivial_from(ctx, 1):
            return cls(ctx, 1, ctx(1))
        return cls(ctx, degree, None if degree != 0 else 0)

    @classmethod
    def symbol(cls, entries) -> "MilnorClass":
        entries = list(entries)
        if not entries:
            raise MilnorError("empty symbol; use an integer for degree 0")
        ctx = entries[0].ctx
        out = cls(ctx, 1, entries[0])
        for a in entries[1:]:
            out = out * cls(ctx, 1, a)
        return out

    # --- arithmetic ---------------------------------------------------------------
    def _same(self, other):
        if other.ctx is not self.ctx or other.degree != self.degree:
            raise MilnorError("mismatched Milnor classes")

    def __add__(self, other):
        self._same(other)
        if self.data is None:
            return self
        if self.degree == 0:
            return MilnorClass(self.ctx, 0, self.data + other.data)
        if self.degree == 1:
            return MilnorClass(self.ctx, 1, self.data * other.data)
        return MilnorClass(self.ctx, 2, self.data + other.data)

    def __neg__(self):
        if self.data is None:
            return self
        if self.degree == 0:
            return MilnorClass(self.ctx, 0, -self.data)
        if self.degree == 1:
            return MilnorClass(self.ctx, 1, self.data.inverse())
        return MilnorClass(self.ctx, 2, tuple((ab, -c) for ab, c in self.data))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "MilnorClass":
        if self.data is None:
            return self
        if self.degree == 0:
            return MilnorClass(self.ctx, 0, k * self.data)
        if self.degree == 1:
            return MilnorClass(self.ctx, 1, self.data ** k)
        return MilnorClass(self.ctx, 2, tuple((ab, k * c) for ab, c in self.data))

    def __mul__(self, other):
        if other.ctx is not self.ctx:
            raise MilnorError("mismatched contexts")
        n = self.degree + other.degree
        if self.degree < 0 or other.degree < 0 or _trivial_from(self.ctx, n):
            return MilnorClass(self.ctx, n, None)
        if self.degree == 0:
            return other.scale(self.data)
        if other.degree == 0:
            return self.scale(other.data)
        # both of degree 1 over F_q(t)
        return MilnorClass(self.ctx, 2, (((self.data, other.data), 1),))

    def map(self, target, fn) -> "MilnorClass":
        """Push along a field homomorphism given on elements."""
        if self.data is None or self.degree == 0:
            return MilnorClass(target, self.degree, self.data)
        if self.degree == 1:
            return MilnorClass(target, 1, fn(self.data))
        return MilnorClass(target, 2, tuple(((fn(a), fn(b)), c) for (a, b), c in self.data))

    # --- canonical data ---------------------------------------------------------------
    def key(self):
        if self._key is None:
            if self.data is None:
                self._key = ()
            elif self.degree == 0:
                self._key = self.data
            elif self.degree == 1:
                self._key = self.data.v
            else:
                self._key = frozenset(
                    (pl.poly, val.v) for pl, val in self.tame_family().items())
        return self._key

    def tame_family(self) -> dict:
        """Nontrivial tame symbols at finite places (degree 2 over F_q(t))."""
        places = {}
        for (a, b), _ in self.data or ():
            for x in (a, b):
                for pl in finite_places_of(x):
                    places[pl] = pl
        out = {}
        for pl in sorted(places, key=Place.sort_key):
            val = tame_symbol(self, pl).data
            if not val.is_one():
                out[pl] = val
        return out

    def is_zero(self) -> bool:
        return self.key() == MilnorClass.zero(self.ctx, self.degree).key()

    def __eq__(self, other):
        if not isinstance(other, MilnorClass):
            return NotImplemented
        return other.ctx is self.ctx and other.degree == self.degree and other.key() == self.key()

    def __hash__(self):
        return hash((self.degree, self.key()))

    def dlog(self) -> int:
        """Discrete-log residue mod q-1 of a degree-1 class over F_q."""
        if self.ctx.kind != "finite" or self.degree != 1:
            raise MilnorError("discrete logs are defined for degree 1 over F_q")
        return self.ctx.dlog(self.data.v)

    def __str__(self):
        if self.data is None:
            return "0"
        if self.degree == 0:
            return str(self.data)
        if self.degree == 1:
            return "{" + str(self.data) + "}"
        parts = []
        for (a, b), c in self.data:
            parts.append(("" if c == 1 else f"{c}") + "{" + f"{a},{b}" + "}")
        return "+".join(parts) or "0"

    __repr__ = __str__

    def to_json(self):
        if self.data is None:
            return {"degree": self.degree, "trivial": True}
        if self.degree == 0:
            return {"degree": 0, "value": self.data}
        if self.degree == 1:
            out = {"degree": 1, "unit": str(self.data)}
            if self.ctx.kind == "finite" and self.ctx.order <= 121:
                out["log"] = self.dlog()
            return out
        return {"degree": 2, "tame": {pl.label: str(v) for pl, v in self.tame_family().items()}}


# ---------------------------------------------------------------------------


def milnor_normalize(symbols, ctx=None) -> MilnorClass:
    """Canonical class of a formal sum of symbols.

    ``symbols`` is an iterable of ``(coefficient, [a1, ..., an])`` with all
    entries units; all symbols must share one degree.
    """
    total = None
    for coef, entries in symbols:
        entries = list(entries)
        if len(entries) > MAX_DEGREE:
            raise MilnorError("degree cap exceeded")
        for a in entries:
            if a.is_zero():
                raise MilnorError("symbol entry must be a unit")
        if entries:
            term = MilnorClass.symbol(entries).scale(coef)
        else:
            if ctx is None:
                raise MilnorError("degree-0 terms need an explicit field")
            term = MilnorClass(ctx, 0, coef)
        if total is not None and term.degree != total.degree:
            raise MilnorError("degree mismatch")
        total = term if total is None else total + term
    if total is None:
        if ctx is None:
            raise MilnorError("empty sum needs an explicit field")
        return MilnorClass(ctx, 0, 0)
    return total


def tame_symbol(m: MilnorClass, place: Place) -> MilnorClass:
    """Residue of ``m`` at ``place`` w.r.t. the place's uniformizer.

    Convention: ``{pi, u2, ..., un} -> {u2, ..., un}``; in degree 2 this is
    ``{a, b} -> (-1)^(v(a)v(b)) * b^v(a) / a^v(b)`` reduced at the place.
    """
    if m.ctx.kind != "rational_function":
        raise MilnorError("tame symbols are taken over F_q(t)")
    if m.ctx is not place.function_field:
        raise MilnorError("class and place live over different fields")
    k = place.residue_field
    n = m.degree
    if n < 1:
        raise MilnorError("tame symbol needs degree >= 1")
    if m.data is None:
        return MilnorClass(k, n - 1, None if n - 1 != 0 else 0)
    if n == 1:
        return MilnorClass(k, 0, place.valuation(m.data))
    acc = k.one
    for (a, b), c in m.data:
        i, u = place.split(a)
        j, w = place.split(b)
        val = k.div(k.pow(w.v, i), k.pow(u.v, j))
        if (i * j) % 2:
            val = k.neg(val)
        acc = k.mul(acc, k.pow(val, c))
    return MilnorClass(k, 1, FieldElem(k, acc))


def milnor_transfer(L: FiniteField, K: FiniteField, m: MilnorClass) -> MilnorClass:
    """Norm transfer for a finite-field extension ``L/K``."""
    if m.ctx is not L or not isinstance(L, FiniteField) or not L.has_subfield(K):
        raise MilnorError("mismatched tower")
    d = L.degree_over(K)
    if m.data is None:
        return MilnorClass(K, m.degree, None)
    if m.degree == 0:
        return MilnorClass(K, 0, d * m.data)
    return MilnorClass(K, 1, FieldElem(K, L.norm_raw(m.data.v, K)))


def milnor_restrict(K, L, m: MilnorClass) -> MilnorClass:
    """Extension of scalars along a constructed inclusion ``K -> L``."""
    return m.map(L, lambda a: L(a))
