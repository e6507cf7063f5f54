"""Milnor-Witt classes: expressions, the pair normal form, twists.

A class of degree ``n`` is stored as the pair (Milnor class of degree
``max(n, 0)``, form class).  The form part is a Grothendieck-Witt class
when ``n == 0`` and a Witt class otherwise.  Generators map as

    [a]  -> ({a}, <a> - 1)
    eta  -> (0, <1>)            in degree -1
    <a>  =  1 + eta [a]

and eta forgets the Milnor part.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .fields import FieldElem, FieldError, ParseError, parse_element
from .forms import FormClass, square_class
from .milnor import MilnorClass, tame_symbol

DEGREE_WINDOW = 4
DEBUG = os.environ.get("MWCURVES_DEBUG", "") not in ("", "0")


class MwError(FieldError):
    pass


def set_debug(flag: bool) -> None:
    global DEBUG
    DEBUG = bool(flag)


# ---------------------------------------------------------------------------
# classes


class MwClass:
    __slots__ = ("ctx", "degree", "milnor", "form", "_key")

    def __init__(self, ctx, degree: int, milnor: MilnorClass, form: FormClass):
        if abs(degree) > DEGREE_WINDOW:
            raise MwError(f"degree {degree} outside the window [-{DEGREE_WINDOW}, {DEGREE_WINDOW}]")
        self.ctx = ctx
        self.degree = degree
        self.milnor = milnor
        self.form = form
        self._key = None
        if DEBUG:
            check_compatible(self)

    @classmethod
    def assemble(cls, ctx, degree: int, milnor: MilnorClass | None, form: FormClass) -> "MwClass":
        """Build a class, fixing up the redundant parts.

        In degree 0 the rank of the form is set from the Milnor integer by
        adding hyperbolic planes; in negative degrees the Milnor part is
        the zero integer.
        """
        if degree < 0 or milnor is None:
            milnor = MilnorClass.zero(ctx, max(degree, 0))
        if degree == 0:
            r = milnor.data
            diff = r - form.rank
            if diff % 2:
                raise MwError("rank parity does not match the Witt class")
            form = FormClass(ctx, form.entries, form.hyperbolic + diff // 2)
        if ctx.kind == "finite":
            form = form.reduced() if degree == 0 else form.witt_reduced()
        elif len(form.entries) > 16:
            form = form.reduced()
        return cls(ctx, degree, milnor, form)

    @classmethod
    def zero(cls, ctx, degree: int) -> "MwClass":
        return cls.assemble(ctx, degree, MilnorClass.zero(ctx, max(degree, 0)), FormClass.zero(ctx))

    @classmethod
    def integer(cls, ctx, k: int) -> "MwClass":
        return cls.assemble(ctx, 0, MilnorClass(ctx, 0, k), FormClass.one(ctx) * k)

    @classmethod
    def bracket(cls, a: FieldElem) -> "MwClass":
        if a.is_zero():
            raise MwError("symbol entry must be a unit")
        return cls(a.ctx, 1, MilnorClass(a.ctx, 1, a), FormClass.pfister(a))

    @classmethod
    def eta(cls, ctx) -> "MwClass":
        return cls(ctx, -1, MilnorClass.zero(ctx, 0), FormClass.one(ctx))

    @classmethod
    def from_form(cls, g: FormClass) -> "MwClass":
        """Degree-0 class of a Grothendieck-Witt element."""
        return cls.assemble(g.ctx, 0, MilnorClass(g.ctx, 0, g.rank), g)

    @classmethod
    def unit_form(cls, a: FieldElem) -> "MwClass":
        """``<a> = 1 + eta [a]``."""
        return cls.from_form(FormClass(a.ctx, (a,)))

    # --- arithmetic ------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, MwClass):
            raise TypeError("expected an MwClass")
        if other.ctx is not self.ctx:
            raise MwError("classes live over different fields")

    def __add__(self, other):
        self._check(other)
        if other.degree != self.degree:
            raise MwError(f"degree mismatch ({self.degree} vs {other.degree})")
        return MwClass.assemble(self.ctx, self.degree, self.milnor + other.milnor, self.form + other.form)

    def __neg__(self):
        return MwClass.assemble(self.ctx, self.degree, -self.milnor, -self.form)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return MwClass.assemble(self.ctx, self.degree, self.milnor.scale(other), self.form * other)
        self._check(other)
        n = self.degree + other.degree
        if abs(n) > DEGREE_WINDOW:
            raise MwError(f"degree {n} outside the window [-{DEGREE_WINDOW}, {DEGREE_WINDOW}]")
        if self.degree >= 0 and other.degree >= 0:
            milnor = self.milnor * other.milnor
        else:
            milnor = MilnorClass.zero(self.ctx, max(n, 0))
        return MwClass.assemble(self.ctx, n, milnor, self.form * other.form)

    __rmul__ = __mul__

    def map(self, target, fn) -> "MwClass":
        """Push along a field homomorphism ``fn`` into ``target``."""
        return MwClass.assemble(target, self.degree, self.milnor.map(target, fn), self.form.map(target, fn))

    # --- equality -----------------------------------------------------------------
    def key(self):
        if self._key is None:
            fk = self.form.gw_key() if self.degree == 0 else self.form.witt_key()
            mk = self.milnor.key() if self.degree > 0 else ()
            self._key = (self.degree, mk, fk)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, MwClass):
            return NotImplemented
        return other.ctx is self.ctx and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def is_zero(self) -> bool:
        return self == MwClass.zero(self.ctx, self.degree)

    def __str__(self):
        if self.degree == 0:
            return f"GW {self.form.reduced()}"
        if self.degree < 0:
            return f"deg {self.degree}: W {self.form.witt_reduced()}"
        return f"deg {self.degree}: ({self.milnor}, {self.form.witt_reduced()})"

    __repr__ = __str__

    def to_json(self) -> dict:
        out = {"degree": self.degree, "form": self.form.to_json(gw=self.degree == 0)}
        if self.degree > 0:
            out["milnor"] = self.milnor.to_json()
        elif self.degree == 0:
            out["milnor"] = {"degree": 0, "value": self.milnor.data}
        else:
            out["milnor"] = {"degree": 0, "trivial": True}
        return out


def check_compatible(x: MwClass) -> None:
    """Assert that the two parts of ``x`` have the same image mod I^(n+1)."""
    n, ctx, f = x.degree, x.ctx, x.form
    if n == 0:
        if x.milnor.data != f.rank:
            raise AssertionError(f"rank {f.rank} does not match Milnor part {x.milnor.data}")
        return
    if n < 0:
        return
    if f.rank % 2:
        raise AssertionError("form part of a positive-degree class has odd rank")
    if n == 1:
        if square_class(f.signed_disc()) != square_class(x.milnor.data):
            raise AssertionError("discriminant of the form part does not match the symbol")
        return
    if ctx.kind == "finite":
        if not f.is_witt_zero():
            raise AssertionError("I^2 of a finite field is zero")
        return
    if n >= 3:
        if not f.is_witt_zero():
            raise AssertionError("I^3 of F_q(t) is zero")
        return
    if not square_class(f.signed_disc()).is_one():
        raise AssertionError("form part of a degree-2 class is not in I^2")
    from .places import Place, infinity

    places = {pl: None for pl in f.ramification_places()}
    for (a, b), _ in x.milnor.data or ():
        for e in (a, b):
            for pl in _places_of(e):
                places[pl] = None
    for pl in list(places) + [infinity(ctx.base)]:
        res = f.second_residue(pl)
        val = tame_symbol(x.milnor, pl).data
        if res.rank % 2 or square_class(res.signed_disc()) != square_class(val):
            raise AssertionError(f"degree-2 parts disagree at {pl}")


def _places_of(e):
    from .places import finite_places_of

    return finite_places_of(e)


# ---------------------------------------------------------------------------
# ring operations


def mw_add(x: MwClass, y: MwClass) -> MwClass:
    return x + y


def mw_mul(x: MwClass, y: MwClass) -> MwClass:
    return x * y


def eta_act(x: MwClass) -> MwClass:
    return MwClass.eta(x.ctx) * x


def gw_scale(g: FormClass, x: MwClass) -> MwClass:
    """Action of a Grothendieck-Witt class on ``x``."""
    if g.ctx is not x.ctx:
        g = g.map(x.ctx, x.ctx)
    return MwClass.from_form(g) * x


def unit_scale(u: FieldElem, x: MwClass) -> MwClass:
    """``<u> * x``."""
    return MwClass.unit_form(u) * x


def constant_embedding(x: MwClass, target) -> MwClass:
    """Image of a class over ``F`` in ``F(t)`` (or any overfield)."""
    return x.map(target, target)


# ---------------------------------------------------------------------------
# expressions


@dataclass(frozen=True)
class MwExpression:
    """Formal sum of ``coef * eta**i * [u1]...[um]``."""

    ctx: object
    terms: tuple = ()

    @property
    def degree(self) -> int | None:
        if not self.terms:
            return None
        _, i, entries = self.terms[0]
        return len(entries) - i

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for c, i, entries in self.terms:
            fac = [] if c == 1 else [str(c)]
            fac += ["eta"] * i
            fac += ["[" + str(a) + "]" for a in entries]
            parts.append("*".join(fac) or "1")
        return " + ".join(parts)


def _term_degree(t) -> int:
    return len(t[2]) - t[1]


def _combine(terms):
    """Merge equal monomials; drop zero coefficients."""
    acc: dict = {}
    order = []
    for c, i, entries in terms:
        k = (i, entries)
        if k not in acc:
            acc[k] = 0
            order.append(k)
        acc[k] += c
    return tuple((acc[k], k[0], k[1]) for k in order if acc[k])


class _ExprParser:
    def __init__(self, text: str, ctx):
        self.text = text
        self.ctx = ctx
        self.pos = 0

    def fail(self, msg, pos=None):
        raise ParseError(msg, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> MwExpression:
        terms = self.expr()
        if self.peek():
            self.fail(f"unexpected {self.peek()!r}")
        return MwExpression(self.ctx, terms)

    def expr(self):
        start = self.pos
        sign = 1
        if self.peek() in "+-" and self.peek():
            sign = -1 if self.text[self.pos] == "-" else 1
            self.pos += 1
        terms = [(sign * c, i, e) for c, i, e in self.term()]
        while self.peek() in ("+", "-") and self.peek():
            op = self.text[self.pos]
            self.pos += 1
            nxt = self.term()
            s = 1 if op == "+" else -1
            terms.extend((s * c, i, e) for c, i, e in nxt)
        degs = {_term_degree(t) for t in terms}
        if len(degs) > 1:
            self.fail(f"degree mismatch between terms ({', '.join(map(str, sorted(degs)))})", start)
        return _combine(terms)

    def term(self):
        acc = self.factor()
        while self.peek() == "*":
            self.pos += 1
            rhs = self.factor()
            acc = _combine((c1 * c2, i1 + i2, e1 + e2) for c1, i1, e1 in acc for c2, i2, e2 in rhs)
        return acc

    def factor(self):
        ch = self.peek()
        start = self.pos
        if ch == "-":
            self.pos += 1
            return tuple((-c, i, e) for c, i, e in self.factor())
        if ch.isdigit():
            end = start
            while end < len(self.text) and self.text[end].isdigit():
                end += 1
            self.pos = end
            return ((int(self.text[start:end]), 0, ()),)
        if self.text.startswith("eta", start) and not self.text[start + 3:start + 4].isalnum():
            self.pos = start + 3
            return ((1, 1, ()),)
        if ch == "[":
            a = self.entry("]")
            return ((1, 0, (a,)),)
        if ch == "<":
            a = self.entry(">")
            return ((1, 0, ()), (1, 1, (a,)))
        if ch == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                self.fail("')' expected")
            self.pos += 1
            return inner
        self.fail("factor expected" if ch else "unexpected end of input")

    def entry(self, close: str) -> FieldElem:
        open_pos = self.pos
        self.pos += 1
        depth = 0
        i = self.pos
        while i < len(self.text):
            c = self.text[i]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            elif c == close and depth == 0:
                break
            i += 1
        else:
            self.fail(f"unclosed {self.text[open_pos]!r}", open_pos)
        body = self.text[self.pos:i]
        if not body.strip():
            self.fail("empty symbol entry", open_pos)
        a = parse_element(body, self.ctx, offset=self.pos)
        if a.is_zero():
            self.fail("symbol entry must be a unit", open_pos)
        self.pos = i + 1
        return a


def parse_expression(text: str, ctx) -> MwExpression:
    """Parse the expression grammar over ``ctx`` without normalizing."""
    return _ExprParser(text, ctx).parse()


def normalize(e: MwExpression, degree: int | None = None) -> MwClass:
    """Canonical pair class of an expression.

    ``degree`` is only needed for the empty expression; when given it must
    match the degree of the terms.
    """
    n = e.degree
    if n is None:
        if degree is None:
            degree = 0
        return MwClass.zero(e.ctx, degree)
    if degree is not None and degree != n:
        raise MwError(f"degree mismatch ({n} vs {degree})")
    if abs(n) > DEGREE_WINDOW:
        raise MwError(f"degree {n} outside the window [-{DEGREE_WINDOW}, {DEGREE_WINDOW}]")
    ctx = e.ctx
    total = MwClass.zero(ctx, n)
    eta = MwClass.eta(ctx)
    for c, i, entries in e.terms:
        if i > DEGREE_WINDOW:
            raise MwError("degree overflow: too many eta factors")
        x = MwClass.integer(ctx, 1)
        for _ in range(i):
            x = x * eta
        for a in entries:
            x = x * MwClass.bracket(a)
        total = total + x * c
    return total


def mw(text: str, ctx, degree: int | None = None) -> MwClass:
    """Parse and normalize in one step."""
    return normalize(parse_expression(text, ctx), degree)


# ---------------------------------------------------------------------------
# twists


@dataclass(frozen=True)
class TwistedClass:
    """A class tensored with a nonvanishing section of a line.

    ``section`` is an element of the function field; when ``place`` is set
    the section is a generator of the local twist at that place and two
    sections are compared through the residue of their ratio.
    """

    cls: MwClass
    tag: str
    section: FieldElem
    place: object = None

    def ratio(self, other_section: FieldElem) -> FieldElem:
        """The unit ``u`` with ``self.section = u * other_section``."""
        r = self.section / other_section
        if self.place is None:
            return r
        k, u = self.place.split(r)
        if k:
            raise MwError("sections differ by a non-unit at the place")
        return u

    def rebased(self, new_section: FieldElem) -> "TwistedClass":
        return twist_rebase(self, new_section, self.ratio(new_section))

    def __eq__(self, other):
        if not isinstance(other, TwistedClass):
            return NotImplemented
        if self.tag != other.tag or self.place != other.place:
            return False
        return self.rebased(other.section).cls == other.cls

    def __hash__(self):
        return hash((self.tag, self.place))

    def to_json(self) -> dict:
        return {"class": self.cls.to_json(), "twist": self.tag, "section": str(self.section)}


def twist_make(cls: MwClass, tag: str, section: FieldElem, place=None) -> TwistedClass:
    if section.is_zero():
        raise MwError("section must be nonvanishing")
    return TwistedClass(cls, tag, section, place)


def twist_rebase(tc: TwistedClass, new_section: FieldElem, unit: FieldElem) -> TwistedClass:
    """``(m, u*s) -> (<u>*m, s)``."""
    if unit.is_zero():
        raise MwError("rebase unit must be nonzero")
    if unit.ctx is not tc.cls.ctx:
        unit = tc.cls.ctx(unit)
    return TwistedClass(unit_scale(unit, tc.cls), tc.tag, new_section, tc.place)
