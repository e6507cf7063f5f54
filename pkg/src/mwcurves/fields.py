"""Exact arithmetic for odd prime fields, their finite extensions and F_q(t).

Field contexts are immutable and interned: asking twice for the same field
returns the same object, so contexts compare by identity.  Elements are
wrapped in :class:`FieldElem`; the contexts themselves work on *raw*
values (ints for prime fields, fixed-length tuples of base-field raw
values for extensions, ``(num, den)`` polynomial pairs for F_q(t)).
"""

from __future__ import annotations

import random
import re
import threading
from functools import lru_cache

from . import poly as P

DEFAULT_Q_CAP = 121


class FieldError(ValueError):
    pass


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class FieldElem:
    """An element of a field context, with the usual operators."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx, v):
        self.ctx = ctx
        self.v = v

    def _lift(self, other):
        if isinstance(other, FieldElem):
            if other.ctx is self.ctx:
                return self, other
            if self.ctx.can_coerce(other.ctx):
                return self, FieldElem(self.ctx, self.ctx.coerce(other))
            if other.ctx.can_coerce(self.ctx):
                return FieldElem(other.ctx, other.ctx.coerce(self)), other
            raise FieldError(f"no common field for {self.ctx} and {other.ctx}")
        if isinstance(other, int):
            return self, FieldElem(self.ctx, self.ctx.from_int(other))
        return None, None

    def __add__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.add(a.v, b.v))

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.sub(a.v, b.v))

    def __rsub__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.sub(b.v, a.v))

    def __mul__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.mul(a.v, b.v))

    __rmul__ = __mul__

    def __truediv__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.mul(a.v, a.ctx.inv(b.v)))

    def __rtruediv__(self, other):
        a, b = self._lift(other)
        if a is None:
            return NotImplemented
        return FieldElem(a.ctx, a.ctx.mul(b.v, a.ctx.inv(a.v)))

    def __neg__(self):
        return FieldElem(self.ctx, self.ctx.neg(self.v))

    def __pow__(self, n: int):
        return FieldElem(self.ctx, self.ctx.pow(self.v, n))

    def inverse(self):
        return FieldElem(self.ctx, self.ctx.inv(self.v))

    def is_zero(self) -> bool:
        return self.v == self.ctx.zero

    def is_one(self) -> bool:
        return self.v == self.ctx.one

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.v == self.ctx.from_int(other)
        if not isinstance(other, FieldElem):
            return NotImplemented
        if other.ctx is self.ctx:
            return self.v == other.v
        try:
            a, b = self._lift(other)
        except FieldError:
            return False
        return a.v == b.v

    def __hash__(self):
        return hash(self.v)

    def sort_key(self):
        return self.ctx.sort_key(self.v)

    def __str__(self):
        return self.ctx.format(self.v)

    def __repr__(self):
        return f"{self.ctx.format(self.v)} in {self.ctx}"


class _Field:
    kind = ""

    def __call__(self, x=None):
        if x is None:
            return FieldElem(self, self.zero)
        if isinstance(x, FieldElem):
            return FieldElem(self, self.coerce(x))
        if isinstance(x, int):
            return FieldElem(self, self.from_int(x))
        if isinstance(x, str):
            return parse_element(x, self)
        return FieldElem(self, x)

    def elem(self, raw) -> FieldElem:
        return FieldElem(self, raw)

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        if n < 0:
            a = self.inv(a)
            n = -n
        result = self.one
        while n:
            if n & 1:
                result = self.mul(result, a)
            n >>= 1
            if n:
                a = self.mul(a, a)
        return result

    def sort_key(self, a):
        return a

    def __repr__(self):
        return f"Field({self.spec})"

    __str__ = __repr__


class FiniteField(_Field):
    """F_p, or an extension ``base[var]/(modulus)`` of another finite field."""

    kind = "finite"

    def __init__(self, p: int, base: "FiniteField | None" = None, modulus=None, var: str = "s"):
        if not _is_prime(p) or p == 2:
            raise FieldError(f"characteristic must be an odd prime, got {p}")
        self.p = p
        self.base = base
        self.var = var
        if base is None:
            self.degree = 1
            self.modulus = None
            self.zero = 0
            self.one = 1
            self.order = p
            self.absolute_degree = 1
        else:
            if base.p != p:
                raise FieldError("characteristic mismatch in tower")
            modulus = P.trim(base, modulus)
            if not modulus or modulus[-1] != base.one:
                raise FieldError("modulus must be monic")
            if not P.is_irreducible(base, modulus):
                raise FieldError("modulus must be irreducible")
            self.modulus = modulus
            self.degree = len(modulus) - 1
            self.zero = (base.zero,) * self.degree
            self.one = (base.one,) + (base.zero,) * (self.degree - 1)
            self.order = base.order ** self.degree
            self.absolute_degree = base.absolute_degree * self.degree
        self._lock = threading.Lock()
        self._log_table = None
        self.generator = self._find_generator()

    # --- description -------------------------------------------------
    @property
    def spec(self) -> str:
        if self.base is None:
            return f"p={self.p}"
        inner = self.base.spec
        mod = P_format(self.base, self.modulus, self.var)
        if self.base.base is None:
            return f"q={self.order}:{mod}"
        return f"{inner}/{self.var}:{mod}"

    def chain(self) -> list["FiniteField"]:
        out = [self]
        while out[-1].base is not None:
            out.append(out[-1].base)
        return out

    def has_subfield(self, K) -> bool:
        return any(F is K for F in self.chain())

    def degree_over(self, K) -> int:
        if not self.has_subfield(K):
            raise FieldError(f"{K} is not a constructed subfield of {self}")
        return self.absolute_degree // K.absolute_degree

    # --- raw arithmetic ----------------------------------------------
    def from_int(self, n: int):
        if self.base is None:
            return n % self.p
        return (self.base.from_int(n),) + (self.base.zero,) * (self.degree - 1)

    def add(self, a, b):
        if self.base is None:
            return (a + b) % self.p
        B = self.base
        return tuple(B.add(x, y) for x, y in zip(a, b))

    def neg(self, a):
        if self.base is None:
            return (-a) % self.p
        B = self.base
        return tuple(B.neg(x) for x in a)

    def sub(self, a, b):
        if self.base is None:
            return (a - b) % self.p
        B = self.base
        return tuple(B.sub(x, y) for x, y in zip(a, b))

    def mul(self, a, b):
        if self.base is None:
            return (a * b) % self.p
        B = self.base
        prod = P.mul(B, P.trim(B, a), P.trim(B, b))
        return self._pad(P.mod(B, prod, self.modulus))

    def _pad(self, f):
        return tuple(f) + (self.base.zero,) * (self.degree - len(f))

    def inv(self, a):
        if a == self.zero:
            raise ZeroDivisionError("inverse of zero")
        if self.base is None:
            return pow(a, self.p - 2, self.p)
        B = self.base
        d, s, _ = P.xgcd(B, P.trim(B, a), self.modulus)
        return self._pad(P.mod(B, s, self.modulus))

    def embed_base(self, b):
        return (b,) + (self.base.zero,) * (self.degree - 1)

    def can_coerce(self, K) -> bool:
        return isinstance(K, FiniteField) and self.has_subfield(K)

    def coerce(self, x):
        """Raw value in ``self`` of an element of a constructed subfield."""
        if isinstance(x, FieldElem):
            K, v = x.ctx, x.v
        else:
            raise FieldError("coerce expects a FieldElem")
        return self.coerce_raw(v, K)

    def coerce_raw(self, v, K):
        if K is self:
            return v
        if self.base is None or not self.has_subfield(K):
            raise FieldError(f"cannot coerce from {K} into {self}")
        return self.embed_base(self.base.coerce_raw(v, K))

    def restrict_raw(self, v, K):
        """Inverse of :meth:`coerce_raw`; fails if ``v`` is not in ``K``."""
        F = self
        while F is not K:
            if F.base is None:
                raise FieldError(f"{K} is not a subfield of {self}")
            if any(c != F.base.zero for c in v[1:]):
                raise FieldError("element does not lie in the requested subfield")
            v = v[0]
            F = F.base
        return v

    def pth_root(self, a):
        return self.pow(a, self.order // self.p)

    # --- enumeration / sampling ---------------------------------------
    def element_from_index(self, k: int):
        if self.base is None:
            return k % self.p
        Q = self.base.order
        out = []
        for _ in range(self.degree):
            out.append(self.base.element_from_index(k % Q))
            k //= Q
        return tuple(out)

    def elements(self):
        for k in range(self.order):
            yield self.element_from_index(k)

    def units(self):
        for k in range(1, self.order):
            yield self.element_from_index(k)

    def random(self, rng: random.Random):
        return self.element_from_index(rng.randrange(self.order))

    def random_unit(self, rng: random.Random):
        return self.element_from_index(rng.randrange(1, self.order))

    # --- multiplicative structure ---------------------------------------
    def _find_generator(self):
        n = self.order - 1
        primes = _prime_factors(n)
        for k in range(1, self.order):
            g = self.element_from_index(k)
            if all(self.pow(g, n // l) != self.one for l in primes):
                return g
        raise FieldError("no generator found")  # pragma: no cover

    def is_square(self, a) -> bool:
        if a == self.zero:
            raise FieldError("zero has no class")
        return self.pow(a, (self.order - 1) // 2) == self.one

    def square_class(self, a):
        """Canonical representative of ``a`` modulo squares: 1 or the generator."""
        return self.one if self.is_square(a) else self.generator

    def dlog(self, a, cap: int | None = None) -> int:
        """Discrete log to the cached generator, by table enumeration."""
        if a == self.zero:
            raise FieldError("zero has no logarithm")
        cap = DEFAULT_Q_CAP if cap is None else cap
        if self.order > cap:
            raise FieldError(f"q={self.order} exceeds the enumeration cap {cap}")
        with self._lock:
            if self._log_table is None:
                table = {}
                x = self.one
                for i in range(self.order - 1):
                    table[x] = i
                    x = self.mul(x, self.generator)
                self._log_table = table
        return self._log_table[a]

    # --- relative structure ---------------------------------------------
    def _frob(self, a, k: int):
        """``a ** (Q**k)`` with Q the order of the immediate base."""
        return self.pow(a, self.base.order ** k)

    def trace_raw(self, a, K):
        """Trace from ``self`` down to the constructed subfield ``K`` (raw)."""
        F, v = self, a
        while F is not K:
            if F.base is None:
                raise FieldError(f"{K} is not a subfield of {self}")
            s = F.zero
            for i in range(F.degree):
                s = F.add(s, F._frob(v, i))
            v = F.restrict_raw(s, F.base)
            F = F.base
        return v

    def norm_raw(self, a, K):
        F, v = self, a
        while F is not K:
            if F.base is None:
                raise FieldError(f"{K} is not a subfield of {self}")
            e = (F.order - 1) // (F.base.order - 1)
            v = F.restrict_raw(F.pow(v, e), F.base)
            F = F.base
        return v

    def basis_over(self, K) -> list:
        if K is self:
            return [self.one]
        if self.base is None:
            raise FieldError(f"{K} is not a subfield of {self}")
        sub = self.base.basis_over(K)
        out = []
        for i in range(self.degree):
            for b in sub:
                v = [self.base.zero] * self.degree
                v[i] = b
                out.append(tuple(v))
        return out

    def coords_over(self, a, K) -> list:
        if K is self:
            return [a]
        if self.base is None:
            raise FieldError(f"{K} is not a subfield of {self}")
        out = []
        for c in a:
            out.extend(self.base.coords_over(c, K))
        return out

    def from_coords(self, coords, K):
        if K is self:
            (c,) = coords
            return c
        n = self.base.degree_over(K)
        parts = [self.base.from_coords(coords[i * n:(i + 1) * n], K) for i in range(self.degree)]
        return tuple(parts)

    # --- I/O ------------------------------------------------------------
    def format(self, a) -> str:
        if self.base is None:
            return str(a)
        return P_format(self.base, P.trim(self.base, a), self.var)

    def names(self) -> dict:
        if self.base is None:
            return {}
        out = {k: FieldElem(self, self.coerce_raw(v.v, v.ctx)) for k, v in self.base.names().items()}
        B = self.base
        if self.degree == 1:
            root = (B.neg(self.modulus[0]),)
        else:
            root = (B.zero, B.one) + (B.zero,) * (self.degree - 2)
        out[self.var] = FieldElem(self, root)
        return out

    def gen(self) -> FieldElem:
        """The adjoined root ``var`` of the defining modulus."""
        return self.names()[self.var]


class FunctionField(_Field):
    """The rational function field ``base(t)`` over a finite field."""

    kind = "rational_function"

    def __init__(self, base: FiniteField, var: str = "t"):
        if not isinstance(base, FiniteField):
            raise FieldError("function fields are only built over finite fields")
        self.base = base
        self.var = var
        self.p = base.p
        B = base
        self.zero = ((), (B.one,))
        self.one = ((B.one,), (B.one,))

    @property
    def spec(self) -> str:
        return f"{self.base.spec},F=Fq(t)"

    def normalize(self, num, den):
        B = self.base
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            return self.zero
        if len(den) > 1:
            g = P.gcd(B, num, den)
            if len(g) > 1:
                num = P.div(B, num, g)
                den = P.div(B, den, g)
        c = den[-1]
        if c != B.one:
            ci = B.inv(c)
            num = P.scale(B, num, ci)
            den = P.scale(B, den, ci)
        return (num, den)

    def from_int(self, n: int):
        c = self.base.from_int(n)
        return (P.const(self.base, c), (self.base.one,))

    def from_poly(self, f):
        return (P.trim(self.base, f), (self.base.one,))

    def const(self, c):
        return (P.const(self.base, c), (self.base.one,))

    def t(self) -> FieldElem:
        B = self.base
        return FieldElem(self, ((B.zero, B.one), (B.one,)))

    def add(self, a, b):
        B = self.base
        (n1, d1), (n2, d2) = a, b
        if d1 == d2:
            return self.normalize(P.add(B, n1, n2), d1)
        return self.normalize(P.add(B, P.mul(B, n1, d2), P.mul(B, n2, d1)), P.mul(B, d1, d2))

    def neg(self, a):
        return (P.neg(self.base, a[0]), a[1])

    def mul(self, a, b):
        B = self.base
        (n1, d1), (n2, d2) = a, b
        if not n1 or not n2:
            return self.zero
        return self.normalize(P.mul(B, n1, n2), P.mul(B, d1, d2))

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("inverse of zero")
        return self.normalize(a[1], a[0])

    def can_coerce(self, K) -> bool:
        return K is self or (isinstance(K, FiniteField) and self.base.has_subfield(K))

    def coerce(self, x):
        if x.ctx is self:
            return x.v
        return self.const(self.base.coerce_raw(x.v, x.ctx))

    def is_constant(self, a) -> bool:
        return len(a[0]) <= 1 and len(a[1]) == 1

    def format(self, a) -> str:
        num, den = a
        ns = P_format(self.base, num, self.var)
        if den == (self.base.one,):
            return ns
        ds = P_format(self.base, den, self.var)
        return f"({ns})/({ds})"

    def names(self) -> dict:
        out = {k: FieldElem(self, self.const(v.v)) for k, v in self.base.names().items()}
        out[self.var] = self.t()
        return out

    def random(self, rng: random.Random, max_degree: int = 2):
        B = self.base
        num = P.random_poly(B, max_degree + 1, rng)
        den = P.random_poly(B, max_degree + 1, rng) if rng.random() < 0.3 else (B.one,)
        if not den:
            den = (B.one,)
        return self.normalize(num, den)


def P_format(B, f, var: str) -> str:
    """Human-readable polynomial, highest degree first."""
    if not f:
        return "0"
    parts = []
    for i in range(len(f) - 1, -1, -1):
        c = f[i]
        if c == B.zero:
            continue
        cs = B.format(c)
        if i > 0 and ("+" in cs or "-" in cs[1:] or "*" in cs):
            cs = f"({cs})"
        mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mon:
            term = cs
        elif c == B.one:
            term = mon
        else:
            term = f"{cs}*{mon}"
        parts.append(term)
    return "+".join(parts)


# ---------------------------------------------------------------------------
# interned constructors


@lru_cache(maxsize=None)
def prime_field(p: int) -> FiniteField:
    return FiniteField(p)


@lru_cache(maxsize=None)
def extension(base: FiniteField, modulus: tuple, var: str = "s") -> FiniteField:
    return FiniteField(base.p, base, modulus, var)


@lru_cache(maxsize=None)
def function_field(base: FiniteField) -> FunctionField:
    return FunctionField(base)


def gf(q: int, var: str = "s") -> FiniteField:
    """A field of order ``q``: the prime field, or F_p[var]/(g) with the
    smallest monic irreducible ``g`` in lexicographic coefficient order."""
    for p in range(3, q + 1):
        if _is_prime(p) and q % p == 0:
            break
    else:
        raise FieldError(f"bad field order {q}")
    e = 0
    n = q
    while n % p == 0:
        n //= p
        e += 1
    if n != 1:
        raise FieldError(f"{q} is not a prime power")
    Fp = prime_field(p)
    if e == 1:
        return Fp
    return extension(Fp, next(P.irreducibles(Fp, e)), var)


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            if m.group(3).isspace():
                pos = m.end()
                continue
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", None, len(text)))
    return out


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class _ElemParser:
    def __init__(self, text: str, ctx, offset: int = 0):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx
        self.names = ctx.names()
        self.offset = offset

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, tok[2] + self.offset)

    def parse(self) -> FieldElem:
        v = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            tok = self.take()
            w = self.unary()
            if tok[1] == "/":
                if w.is_zero():
                    self.fail("division by zero", tok)
                v = v / w
            else:
                v = v * w
        return v

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            tok = self.take()
            if tok[0] != "int":
                self.fail("integer exponent expected", tok)
            if sign < 0 and v.is_zero():
                self.fail("division by zero", tok)
            v = v ** (sign * tok[1])
        return v

    def atom(self):
        tok = self.take()
        if tok[0] == "int":
            return FieldElem(self.ctx, self.ctx.from_int(tok[1]))
        if tok[0] == "name":
            if tok[1] not in self.names:
                self.fail(f"unknown name {tok[1]!r}", tok)
            return self.names[tok[1]]
        if tok[:2] == ("op", "("):
            v = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("')' expected")
            self.take()
            return v
        self.fail("field element expected", tok)


def parse_element(text: str, ctx, offset: int = 0) -> FieldElem:
    """Parse a rational expression in the field's variable names."""
    return _ElemParser(text, ctx, offset).parse()


def parse_poly(text: str, base: FiniteField, var: str = "t") -> tuple:
    """Parse a polynomial in ``var`` over ``base`` into a raw coefficient tuple."""
    F = FunctionField(base, var)
    e = parse_element(text, F)
    num, den = e.v
    if den != (base.one,):
        raise FieldError(f"{text!r} is not a polynomial")
    return num


def parse_field_spec(spec: str):
    """``p=5``, ``q=9:s^2+1``, optionally followed by ``,F=Fq(t)``."""
    parts = [s.strip() for s in spec.split(",") if s.strip()]
    if not parts:
        raise FieldError("empty field spec")
    func = False
    rest = []
    for part in parts:
        if part.replace(" ", "") in ("F=Fq(t)", "Fq(t)"):
            func = True
        else:
            rest.append(part)
    if len(rest) != 1:
        raise FieldError(f"bad field spec {spec!r}")
    head = rest[0]
    m = re.fullmatch(r"p\s*=\s*(\d+)", head)
    if m:
        K = prime_field(int(m.group(1)))
    else:
        m = re.fullmatch(r"q\s*=\s*(\d+)(?::(.*))?", head)
        if not m:
            raise FieldError(f"bad field spec {spec!r}")
        q = int(m.group(1))
        if m.group(2) is None:
            K = gf(q)
        else:
            ptxt = m.group(2)
            var_m = re.search(r"[A-Za-z_]\w*", ptxt)
            var = var_m.group(0) if var_m else "s"
            Kp = gf(q)
            Fp = prime_field(Kp.p)
            mod = parse_poly(ptxt, Fp, var)
            K = prime_field(Fp.p) if len(mod) == 2 else extension(Fp, mod, var)
            if K.order != q:
                raise FieldError(f"modulus degree does not match q={q}")
    return function_field(K) if func else K
