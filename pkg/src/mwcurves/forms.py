"""Diagonal quadratic forms, their Grothendieck-Witt and Witt classes.

A :class:`FormClass` is the virtual form ``<a1,...,an> + k*H`` where ``H``
is the hyperbolic plane ``<1,-1>`` and ``k`` may be negative, so formal
differences need no second list of entries.

Equality is decided through complete invariants:

* over F_q, by rank and discriminant;
* over F_q(t), by rank together with the Witt invariants
  (first residue at infinity w.r.t. ``1/t``, second residues at every
  finite place w.r.t. the monic generator).  A class whose finite second
  residues all vanish is constant, and the first residue at infinity of a
  constant is the constant itself, so these invariants separate classes.
"""

from __future__ import annotations

from collections import Counter

from . import poly as P
from .fields import FieldElem, FieldError, FiniteField, FunctionField
from .places import Place, finite_places_of, infinity


class FormError(FieldError):
    pass


def square_class(a: FieldElem) -> FieldElem:
    """Canonical representative of ``a`` modulo squares."""
    F = a.ctx
    if a.is_zero():
        raise FormError("zero has no class")
    if F.kind == "finite":
        return FieldElem(F, F.square_class(a.v))
    B = F.base
    num, den = a.v
    odd: Counter = Counter()
    c = num[-1]
    for part in (num, den):
        if len(part) > 1:
            _, facs = P.factor(B, part)
            for g, e in facs:
                odd[g] += e
    out = (B.square_class(c),)
    for g in sorted(odd, key=lambda g: (len(g), g)):
        if odd[g] % 2:
            out = P.mul(B, out, g)
    return FieldElem(F, (out, (B.one,)))


class FormClass:
    """GW class of ``<entries> + hyperbolic * H`` over a supported field."""

    __slots__ = ("ctx", "entries", "hyperbolic", "_gw_key", "_witt_key")

    def __init__(self, ctx, entries=(), hyperbolic: int = 0):
        self.ctx = ctx
        es = []
        for a in entries:
            a = a if isinstance(a, FieldElem) and a.ctx is ctx else ctx(a)
            if a.is_zero():
                raise FormError("form entries must be nonzero")
            es.append(a)
        self.entries = tuple(es)
        self.hyperbolic = int(hyperbolic)
        self._gw_key = None
        self._witt_key = None

    # --- basic structure ----------------------------------------------------
    @classmethod
    def one(cls, ctx) -> "FormClass":
        return cls(ctx, (ctx(1),))

    @classmethod
    def zero(cls, ctx) -> "FormClass":
        return cls(ctx, ())

    @classmethod
    def pfister(cls, a: FieldElem) -> "FormClass":
        """``<a> - 1`` as a virtual class: ``<a, -1> - H``."""
        return cls(a.ctx, (a, a.ctx(-1)), -1)

    @property
    def rank(self) -> int:
        return len(self.entries) + 2 * self.hyperbolic

    def _check(self, other):
        if not isinstance(other, FormClass):
            raise TypeError("expected a FormClass")
        if other.ctx is not self.ctx:
            raise FormError("mismatched contexts")

    def __add__(self, other):
        if isinstance(other, int):
            other = FormClass(self.ctx, (self.ctx(1),) * other) if other >= 0 else -FormClass(self.ctx, (self.ctx(1),) * -other)
        self._check(other)
        return FormClass(self.ctx, self.entries + other.entries, self.hyperbolic + other.hyperbolic)

    __radd__ = __add__

    def __neg__(self):
        return FormClass(self.ctx, tuple(-a for a in self.entries), -self.hyperbolic - len(self.entries))

    def __sub__(self, other):
        if isinstance(other, int):
            return self + (-other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other >= 0:
                return FormClass(self.ctx, self.entries * other, self.hyperbolic * other)
            return -(self * (-other))
        self._check(other)
        entries = tuple(a * b for a in self.entries for b in other.entries)
        h = (self.hyperbolic * len(other.entries) + other.hyperbolic * len(self.entries)
             + 2 * self.hyperbolic * other.hyperbolic)
        return FormClass(self.ctx, entries, h)

    __rmul__ = __mul__

    def scaled(self, a: FieldElem) -> "FormClass":
        """``<a> * self``."""
        a = self.ctx(a)
        return FormClass(self.ctx, tuple(a * b for b in self.entries), self.hyperbolic)

    def map(self, target, fn) -> "FormClass":
        """Push the entries along a field map ``fn``."""
        return FormClass(target, tuple(fn(a) for a in self.entries), self.hyperbolic)

    def det(self) -> FieldElem:
        d = self.ctx(-1) ** (self.hyperbolic % 2)
        for a in self.entries:
            d = d * a
        return d

    def signed_disc(self) -> FieldElem:
        r = self.rank
        return self.det() * (self.ctx(-1) ** ((r * (r - 1) // 2) % 2))

    # --- invariants -------------------------------------------------------------
    def witt_key(self):
        if self._witt_key is None:
            if self.ctx.kind == "finite":
                self._witt_key = (self.rank % 2, self.ctx.is_square(self.signed_disc().v))
            else:
                self._witt_key = _function_field_witt_key(self)
        return self._witt_key

    def gw_key(self):
        if self._gw_key is None:
            self._gw_key = (self.rank, self.witt_key())
        return self._gw_key

    def is_witt_zero(self) -> bool:
        return self.witt_key() == zero_witt_key(self.ctx)

    def reduced(self) -> "FormClass":
        """A small representative of the same GW class."""
        if self.ctx.kind == "finite":
            w = _finite_witt_rep(self.ctx, *self.witt_key())
            return FormClass(self.ctx, w, (self.rank - len(w)) // 2)
        reps = [square_class(a) for a in self.entries]
        counts = Counter(reps)
        h = self.hyperbolic
        kept = []
        for a in sorted(counts, key=lambda e: e.sort_key()):
            n = counts[a]
            if n == 0:
                continue
            b = square_class(-a)
            if b == a:
                pairs = n // 2
                h += pairs
                kept.extend([a] * (n - 2 * pairs))
                counts[a] = 0
            else:
                m = counts.get(b, 0)
                pairs = min(n, m)
                h += pairs
                kept.extend([a] * (n - pairs))
                if b in counts:
                    counts[b] = m - pairs
                counts[a] = 0
        out = FormClass(self.ctx, tuple(kept), h)
        out._witt_key = self._witt_key
        out._gw_key = self._gw_key
        return out

    def witt_reduced(self) -> "FormClass":
        r = self.reduced()
        return FormClass(self.ctx, r.entries, 0)

    # --- residues -------------------------------------------------------------------
    def second_residue(self, place: Place) -> "FormClass":
        k = place.residue_field
        out = []
        for a in self.entries:
            v, u = place.split(a)
            if v % 2:
                out.append(u)
        return FormClass(k, out)

    def first_residue(self, place: Place) -> "FormClass":
        k = place.residue_field
        out = []
        for a in self.entries:
            v, u = place.split(a)
            if v % 2 == 0:
                out.append(u)
        return FormClass(k, out, self.hyperbolic)

    def ramification_places(self) -> list[Place]:
        seen = {}
        for a in self.entries:
            for pl in finite_places_of(square_class(a)):
                seen[pl] = pl
        return sorted(seen.values(), key=Place.sort_key)

    # --- display ---------------------------------------------------------------------
    def __str__(self):
        body = "<" + ",".join(str(a) for a in self.entries) + ">"
        if self.hyperbolic:
            body += f"{self.hyperbolic:+d}H"
        return body

    def __repr__(self):
        return f"FormClass({self}, {self.ctx})"

    def to_json(self, gw: bool = True) -> dict:
        r = self.reduced()
        out = {"form": str(r if gw else FormClass(self.ctx, r.entries))}
        if gw:
            out["rank"] = self.rank
        else:
            out["rank_mod_2"] = self.rank % 2
        if self.ctx.kind == "finite":
            out["disc"] = str(square_class(self.signed_disc()))
        else:
            out["disc"] = str(square_class(self.signed_disc()))
            inf_key, res = self.witt_key()
            out["residues"] = {pl_label: list(k) for pl_label, k in _residue_labels(self.ctx, res)}
            out["constant_part_at_inf"] = list(inf_key)
        return out


def _residue_labels(ctx, res):
    from .fields import P_format

    out = []
    for g, key in sorted(res, key=lambda gk: (len(gk[0]), gk[0])):
        out.append((P_format(ctx.base, g, "t"), key))
    return out


def zero_witt_key(ctx):
    if ctx.kind == "finite":
        return (0, True)
    return ((0, True), frozenset())


def _finite_witt_rep(F: FiniteField, parity: int, sd_square: bool) -> tuple:
    one = F(1)
    g = FieldElem(F, F.generator)
    if parity:
        return (one,) if sd_square else (g,)
    return () if sd_square else (one, -g)


def _function_field_witt_key(f: FormClass):
    ctx: FunctionField = f.ctx
    res = []
    for pl in f.ramification_places():
        r = f.second_residue(pl)
        key = r.witt_key()
        if key != (0, True):
            res.append((pl.poly, key))
    inf = f.first_residue(infinity(ctx.base)).witt_key()
    return (inf, frozenset(res))


# ---------------------------------------------------------------------------
# public operations


def gw_equal(f: FormClass, g: FormClass) -> bool:
    if f.ctx is not g.ctx:
        raise FormError("mismatched contexts")
    return f.gw_key() == g.gw_key()


def witt_equal(f: FormClass, g: FormClass) -> bool:
    if f.ctx is not g.ctx:
        raise FormError("mismatched contexts")
    return f.witt_key() == g.witt_key()


def second_residue(f: FormClass, place: Place) -> FormClass:
    if f.ctx is not place.function_field:
        raise FormError("form and place live over different fields")
    return f.second_residue(place)


def first_residue(f: FormClass, place: Place) -> FormClass:
    if f.ctx is not place.function_field:
        raise FormError("form and place live over different fields")
    return f.first_residue(place)


def witt_class(f: FormClass) -> FormClass:
    """Canonical Witt representative (no hyperbolic planes).

    Over F_q the result has rank at most 2.  Over F_q(t) the representative
    is rebuilt from the residue invariants: residues are lifted to
    ``<g * u>`` terms place by place in decreasing degree, which only
    disturbs places of smaller degree, and the constant part is fixed last.
    """
    if f.ctx.kind == "finite":
        return FormClass(f.ctx, _finite_witt_rep(f.ctx, *f.witt_key()))
    ctx = f.ctx
    B = ctx.base
    inf_key, res = f.witt_key()
    targets = {Place(B, g): key for g, key in res}
    pending = dict.fromkeys(targets)
    cur = FormClass(ctx, ())
    while pending:
        d = max(pl.degree for pl in pending)
        layer = sorted((pl for pl in pending if pl.degree == d), key=Place.sort_key)
        for pl in layer:
            del pending[pl]
            want = targets.get(pl, (0, True))
            have = cur.second_residue(pl)
            k = pl.residue_field
            defect = FormClass(k, _finite_witt_rep(k, *want)) - have
            rep = _finite_witt_rep(k, *defect.witt_key())
            g = FieldElem(ctx, (pl.poly, (B.one,)))
            for u in rep:
                term = g * pl.lift(u)
                cur = cur + FormClass(ctx, (term,))
                for q in finite_places_of(square_class(term)):
                    if q.degree < d and q not in pending:
                        pending[q] = None
    have = cur.first_residue(infinity(B))
    const = FormClass(B, _finite_witt_rep(B, *inf_key)) - have
    for u in _finite_witt_rep(B, *const.witt_key()):
        cur = cur + FormClass(ctx, (ctx(u),))
    return cur.witt_reduced()


def _diagonalize(K: FiniteField, G: list[list]) -> list:
    """Diagonalize a nondegenerate symmetric matrix over ``K`` by congruence."""
    G = [row[:] for row in G]
    idx = list(range(len(G)))
    out = []
    z = K.zero
    while idx:
        piv = next((i for i in idx if G[i][i] != z), None)
        if piv is None:
            pair = next(((i, j) for i in idx for j in idx if i < j and G[i][j] != z), None)
            if pair is None:
                raise FormError("degenerate bilinear form")
            i, j = pair
            # replace basis vector e_i by e_i + e_j
            for k in idx:
                G[i][k] = K.add(G[i][k], G[j][k])
            for k in idx:
                G[k][i] = K.add(G[k][i], G[k][j])
            piv = i
        a = G[piv][piv]
        out.append(a)
        ainv = K.inv(a)
        rest = [i for i in idx if i != piv]
        for j in rest:
            c = K.mul(G[j][piv], ainv)
            if c == z:
                continue
            for k in rest:
                G[j][k] = K.sub(G[j][k], K.mul(c, G[piv][k]))
        for j in rest:
            G[j][piv] = z
            G[piv][j] = z
        idx = rest
    return out


def trace_form_entries(L: FiniteField, K: FiniteField, lam) -> list:
    """Diagonal entries over ``K`` of ``(x, y) -> Tr_{L/K}(lam * x * y)``."""
    basis = L.basis_over(K)
    n = len(basis)
    G = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            v = L.trace_raw(L.mul(lam, L.mul(basis[i], basis[j])), K)
            G[i][j] = G[j][i] = v
    return _diagonalize(K, G)


def trace_transfer(L: FiniteField, K: FiniteField, f: FormClass) -> FormClass:
    """Scharlau transfer along the field trace ``Tr_{L/K}``."""
    if f.ctx is not L:
        raise FormError("form does not live over the top field")
    if not isinstance(L, FiniteField) or not L.has_subfield(K):
        raise FormError("mismatched tower")
    d = L.degree_over(K)
    entries = []
    for a in f.entries:
        entries.extend(FieldElem(K, v) for v in trace_form_entries(L, K, a.v))
    return FormClass(K, entries, d * f.hyperbolic)


def parse_form(text: str, ctx) -> FormClass:
    """Parse ``<a1,...,an>`` with field-element syntax inside."""
    from .fields import parse_element

    s = text.strip()
    if not (s.startswith("<") and s.endswith(">")):
        raise FormError(f"form must look like <a1,...,an>: {text!r}")
    body = s[1:-1].strip()
    if not body:
        return FormClass(ctx, ())
    parts = _split_top(body)
    return FormClass(ctx, [parse_element(p, ctx) for p in parts])


def _split_top(body: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in body:
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    out.append("".join(cur))
    return out
