"""Residue maps at places of the line and transfers of finite extensions.

Two transfers are provided for a finite extension ``L/K`` of finite fields:

* :func:`canonical_transfer` works componentwise (norm on the Milnor part,
  Scharlau trace form on the form part);
* :func:`geometric_transfer` realizes ``L`` as the residue field of a closed
  point of the affine line, builds a class over ``K(t)`` with the prescribed
  residue there and none elsewhere, and reads off minus its residue at
  infinity.

The two must agree; the tests hold them to it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from . import poly as P
from .fields import FieldElem, FieldError, FiniteField, function_field
from .forms import FormClass, trace_transfer
from .milnor import MilnorClass, milnor_transfer, tame_symbol
from .places import Place, finite_places_of, infinity, residue_field
from .symbols import (MwClass, MwError, MwExpression, TwistedClass, normalize,
                      twist_make)

TRANSFER_DEGREE_CAP = 4
ITERATION_BOUND = 16


class TransferError(MwError):
    pass


class ApproximationError(MwError):
    """Weak approximation did not settle; carries the partial class."""

    def __init__(self, message: str, partial=None, pending=()):
        super().__init__(message)
        self.partial = partial
        self.pending = list(pending)


# ---------------------------------------------------------------------------
# residues


@dataclass(frozen=True)
class ResidueRequest:
    cls: MwClass
    place: Place
    uniformizer: FieldElem | None = None

    def __post_init__(self):
        if self.uniformizer is not None and self.place.valuation(self.uniformizer) != 1:
            raise FieldError("uniformizer must have valuation 1 at the place")

    def resolved_place(self) -> Place:
        if self.uniformizer is None:
            return self.place
        return self.place.with_uniformizer(self.uniformizer)


def mw_residue(cls, place: Place | None = None, uniformizer: FieldElem | None = None) -> MwClass:
    """Residue of a class over ``F(t)`` at a place, in degree one lower.

    Accepts either a :class:`ResidueRequest` or ``(cls, place[, uniformizer])``.
    """
    if isinstance(cls, ResidueRequest):
        pl = cls.resolved_place()
        cls = cls.cls
    else:
        pl = ResidueRequest(cls, place, uniformizer).resolved_place()
    if cls.ctx is not pl.function_field:
        raise MwError("class and place live over different fields")
    k = pl.residue_field
    n = cls.degree
    milnor = tame_symbol(cls.milnor, pl) if n >= 1 else None
    return MwClass.assemble(k, n - 1, milnor, cls.form.second_residue(pl))


def mw_residue_twisted(cls: MwClass, place: Place, section: FieldElem | None = None,
                       tag: str = "O(0)", uniformizer: FieldElem | None = None) -> TwistedClass:
    """Residue of ``cls (x) section`` tagged with ``uniformizer * section``.

    ``section`` is a local generator of the twist near the place; it must be
    a unit there.
    """
    pl = ResidueRequest(cls, place, uniformizer).resolved_place()
    Kt = pl.function_field
    section = Kt(1) if section is None else section
    if section.is_zero() or pl.valuation(section) != 0:
        raise MwError(f"section vanishes or has a pole at {pl}")
    return twist_make(mw_residue(cls, pl), tag, pl.uniformizer * section, pl.on("projective"))


def class_places(x: MwClass, line_kind: str = "projective") -> list[Place]:
    """Finite places where some entry of ``x`` is not a unit.

    Residues of ``x`` vanish at every finite place outside this list.
    """
    elems = list(x.form.entries)
    m = x.milnor
    if x.degree >= 1 and m.data is not None:
        if x.degree == 1:
            elems.append(m.data)
        else:
            for (a, b), _ in m.data:
                elems.extend((a, b))
    seen = {}
    for e in elems:
        for pl in finite_places_of(e):
            seen[pl] = None
    out = sorted(seen, key=Place.sort_key)
    if line_kind != "projective":
        out = [pl.on(line_kind) for pl in out if not (line_kind == "gm" and pl.poly == (pl.ground.zero, pl.ground.one))]
    return out


# ---------------------------------------------------------------------------
# canonical transfer


def canonical_transfer(L: FiniteField, K: FiniteField, beta: MwClass,
                       cap: int | None = None) -> MwClass:
    cap = TRANSFER_DEGREE_CAP if cap is None else cap
    if beta.ctx is not L or not isinstance(L, FiniteField) or not L.has_subfield(K):
        raise TransferError("tower mismatch")
    d = L.degree_over(K)
    if d > cap:
        raise TransferError(f"extension degree {d} exceeds the cap {cap}")
    n = beta.degree
    if n >= 1:
        milnor = milnor_transfer(L, K, beta.milnor)
    elif n == 0:
        milnor = MilnorClass(K, 0, d * beta.milnor.data)
    else:
        milnor = None
    return MwClass.assemble(K, n, milnor, trace_transfer(L, K, beta.form))


def restrict(beta: MwClass, L: FiniteField) -> MwClass:
    """Extension of scalars to a constructed overfield."""
    return beta.map(L, L)


# ---------------------------------------------------------------------------
# linear algebra over a finite field (raw values)


def _solve(K, A, b):
    """Solve ``A y = b`` for square invertible ``A``."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != K.zero), None)
        if piv is None:
            raise FieldError("singular system")
        M[c], M[piv] = M[piv], M[c]
        inv = K.inv(M[c][c])
        M[c] = [K.mul(v, inv) for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != K.zero:
                f = M[r][c]
                M[r] = [K.sub(v, K.mul(f, w)) for v, w in zip(M[r], M[c])]
    return [M[i][n] for i in range(n)]


def _is_independent(K, vectors) -> bool:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != K.zero), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = K.inv(rows[rank][c])
        for r in range(len(rows)):
            if r != rank and rows[r][c] != K.zero:
                f = K.mul(rows[r][c], inv)
                rows[r] = [K.sub(v, K.mul(f, w)) for v, w in zip(rows[r], rows[rank])]
        rank += 1
    return rank == len(rows)


@lru_cache(maxsize=None)
def _minpoly_raw(L, K, theta_raw):
    powers = [L.one]
    while True:
        nxt = L.mul(powers[-1], theta_raw)
        cols = [L.coords_over(v, K) for v in powers]
        if not _is_independent(K, cols + [L.coords_over(nxt, K)]):
            break
        powers.append(nxt)
    d = len(powers)
    A = [[cols[j][i] for j in range(d)] for i in range(len(cols[0]))]
    target = L.coords_over(nxt, K)
    # the system is consistent; solve it on an invertible minor
    rows = _independent_rows(K, A)
    y = _solve(K, [A[i] for i in rows], [target[i] for i in rows])
    return tuple(K.neg(c) for c in y) + (K.one,)


def _independent_rows(K, A):
    chosen = []
    for i in range(len(A)):
        if _is_independent(K, [A[j] for j in chosen] + [A[i]]):
            chosen.append(i)
        if len(chosen) == len(A[0]):
            break
    return chosen


def minimal_polynomial(L: FiniteField, K: FiniteField, theta: FieldElem) -> tuple:
    """Monic minimal polynomial of ``theta`` over ``K`` (raw coefficients)."""
    if not L.has_subfield(K):
        raise TransferError("tower mismatch")
    return _minpoly_raw(L, K, L(theta).v)


def find_generator(L: FiniteField, K: FiniteField) -> FieldElem:
    """A primitive element of ``L/K``; the adjoined root when it works."""
    d = L.degree_over(K)
    first = L.gen() if L is not K and L.base is not None else L(1)
    if len(minimal_polynomial(L, K, first)) - 1 == d:
        return first
    for v in L.elements():
        if len(minimal_polynomial(L, K, L.elem(v))) - 1 == d:
            return L.elem(v)
    raise TransferError("no generator found")


class GeneratorMap:
    """The field map ``L -> target`` sending ``theta`` to ``root``."""

    def __init__(self, L: FiniteField, K: FiniteField, theta: FieldElem, target, root: FieldElem):
        self.L, self.K, self.target = L, K, target
        self.theta = L(theta)
        d = L.degree_over(K)
        m = minimal_polynomial(L, K, self.theta)
        if len(m) - 1 != d:
            raise TransferError("element does not generate the extension")
        self.minpoly = m
        self.root = target(root)
        powers = [L.one]
        for _ in range(d - 1):
            powers.append(L.mul(powers[-1], self.theta.v))
        cols = [L.coords_over(v, K) for v in powers]
        self._A = [[cols[j][i] for j in range(d)] for i in range(d)]
        rp = [target.one]
        for _ in range(d - 1):
            rp.append(target.mul(rp[-1], self.root.v))
        self._root_powers = rp

    def __call__(self, a: FieldElem) -> FieldElem:
        a = self.L(a)
        K, T = self.K, self.target
        y = _solve(K, self._A, self.L.coords_over(a.v, K))
        acc = T.zero
        for c, r in zip(y, self._root_powers):
            acc = T.add(acc, T.mul(T.coerce_raw(c, K), r))
        return FieldElem(T, acc)


# ---------------------------------------------------------------------------
# weak approximation


def canonical_expression(gamma: MwClass) -> MwExpression:
    """An expression over a finite field that normalizes to ``gamma``."""
    F = gamma.ctx
    if F.kind != "finite":
        raise MwError("canonical expressions are built over finite fields")
    n = gamma.degree
    if n >= 2:
        return MwExpression(F, ())
    if n == 1:
        a = gamma.milnor.data
        return MwExpression(F, () if a.is_one() else ((1, 0, (a,)),))
    k = -n
    if n == 0:
        r = gamma.form.reduced()
        entries, h = r.entries, r.hyperbolic
    else:
        entries, h = gamma.form.witt_reduced().entries, 0
    terms = []
    for a in entries:
        terms.append((1, k, ()))
        if not a.is_one():
            terms.append((1, k + 1, (a,)))
    if h:
        terms.append((2 * h, k, ()))
        terms.append((h, k + 1, (F(-1),)))
    acc: dict = {}
    for c, i, e in terms:
        acc[(i, e)] = acc.get((i, e), 0) + c
    return MwExpression(F, tuple((c, i, e) for (i, e), c in acc.items() if c))


def lift_class(gamma: MwClass, place: Place) -> MwClass:
    """A class over ``K(t)`` with unit entries at ``place`` reducing to ``gamma``."""
    e = canonical_expression(gamma)
    Kt = place.function_field
    terms = tuple((c, i, tuple(place.lift(a) for a in entries)) for c, i, entries in e.terms)
    return normalize(MwExpression(Kt, terms), gamma.degree)


def _bracket_times(pi: FieldElem, h: MwClass) -> MwClass:
    return MwClass.bracket(pi) * h


def approximate(targets: dict, Kt, degree: int, bound: int | None = None,
                line_kind: str = "projective") -> MwClass:
    """A class of ``degree`` over ``K(t)`` with prescribed finite residues.

    ``targets`` maps finite places (with their uniformizers) to classes of
    degree ``degree - 1``; the result has exactly these residues at those
    places and zero residue at every other finite place (the place ``(t)``
    is left alone on ``G_m``).  Corrections are applied in layers of
    decreasing place degree, each layer only disturbing smaller places.
    """
    bound = ITERATION_BOUND if bound is None else bound
    B = Kt.base
    skip_t = line_kind == "gm"
    t_poly = (B.zero, B.one)
    pinned = {pl: cls for pl, cls in targets.items()}
    pending = {pl: pl for pl in pinned}
    f = MwClass.zero(Kt, degree)
    rounds = 0
    while pending:
        rounds += 1
        if rounds > bound:
            raise ApproximationError("weak approximation exceeded its iteration bound", f, pending)
        d = max(pl.degree for pl in pending)
        layer = sorted((pl for pl in pending if pl.degree == d), key=Place.sort_key)
        for pl in layer:
            del pending[pl]
            have = mw_residue(f, pl)
            want = pinned.get(pl)
            defect = (want - have) if want is not None else -have
            if defect.is_zero():
                continue
            term = _bracket_times(pl.uniformizer, lift_class(defect, pl))
            f = f + term
            for q in class_places(term):
                if q.degree < d and q not in pending and q not in pinned:
                    if skip_t and q.poly == t_poly:
                        continue
                    pending[q] = q
    for q in class_places(f):
        if skip_t and q.poly == t_poly:
            continue
        want = pinned.get(q)
        have = mw_residue(f, pinned_place(pinned, q))
        ok = have.is_zero() if want is None else have == want
        if not ok:
            raise ApproximationError(f"residue at {q} not settled", f, [q])
    return f


def pinned_place(pinned: dict, q: Place) -> Place:
    """``q`` carrying the uniformizer it was pinned with, if any."""
    for pl in pinned:
        if pl == q:
            return pl
    return q


# ---------------------------------------------------------------------------
# geometric transfer


def canonical_section(pl: Place) -> FieldElem:
    """Local generator of the twist at a place: ``g/g'`` or ``-1/t``."""
    Kt = pl.function_field
    B = pl.ground
    if pl.is_infinite:
        return Kt.elem(((B.neg(B.one),), (B.zero, B.one)))
    g = pl.poly
    return Kt.elem(Kt.normalize(g, P.derivative(B, g)))


def canonical_place(pl: Place) -> Place:
    return pl.with_uniformizer(canonical_section(pl))


def geometric_transfer(L: FiniteField, K: FiniteField, theta: FieldElem, beta: MwClass,
                       bound: int | None = None) -> MwClass:
    """Transfer through the projective line at the closed point of ``theta``."""
    if beta.ctx is not L or not L.has_subfield(K):
        raise TransferError("tower mismatch")
    gm = point_map(L, K, theta)
    x = canonical_place(Place(K, gm.minpoly))
    beta_x = beta.map(x.residue_field, gm)
    if beta_x.is_zero():
        return MwClass.zero(K, beta.degree)
    Kt = function_field(K)
    f = approximate({x: beta_x}, Kt, beta.degree + 1, bound)
    return -mw_residue(f, canonical_place(infinity(K)))


def point_map(L: FiniteField, K: FiniteField, theta: FieldElem) -> GeneratorMap:
    """``L -> K[t]/(m)``, ``theta -> t`` for the minimal polynomial ``m``."""
    m = minimal_polynomial(L, K, theta)
    kx = residue_field(K, m)
    root = kx.elem(K.neg(m[0])) if len(m) == 2 else kx.gen()
    return GeneratorMap(L, K, theta, kx, root)


def transfer_chain(tower, generators, beta: MwClass, route: str = "geometric") -> MwClass:
    """Compose step transfers down ``tower = [K, L1, ..., L]``.

    ``generators[i]`` generates ``tower[i+1]`` over ``tower[i]``.
    """
    tower = list(tower)
    if len(generators) != len(tower) - 1:
        raise TransferError("one generator per step is required")
    for lo, hi in zip(tower, tower[1:]):
        if not isinstance(hi, FiniteField) or not hi.has_subfield(lo):
            raise TransferError("invalid tower")
    if beta.ctx is not tower[-1]:
        raise TransferError("class does not live over the top of the tower")
    x = beta
    for i in range(len(tower) - 1, 0, -1):
        L, K = tower[i], tower[i - 1]
        if route == "geometric":
            x = geometric_transfer(L, K, generators[i - 1], x)
        else:
            x = canonical_transfer(L, K, x)
    return x


# ---------------------------------------------------------------------------
# base change


def tensor_factors(L: FiniteField, K: FiniteField, Kp: FiniteField, theta: FieldElem | None = None):
    """Factor fields of ``L (x)_K K'`` with the induced maps ``L -> E_i``."""
    theta = find_generator(L, K) if theta is None else L(theta)
    m = minimal_polynomial(L, K, theta)
    mp = P.trim(Kp, [Kp.coerce_raw(c, K) for c in m])
    _, facs = P.factor(Kp, mp)
    out = []
    for h, e in facs:
        if e != 1:
            raise TransferError("inseparable tensor product")
        E = residue_field(Kp, h)
        root = E.elem(Kp.neg(h[0])) if len(h) == 2 else E.gen()
        out.append((E, GeneratorMap(L, K, theta, E, root)))
    return out


def base_change_transfer_check(L: FiniteField, K: FiniteField, Kp: FiniteField, beta: MwClass,
                               theta: FieldElem | None = None) -> bool:
    """Does restriction to ``K'`` commute with transfer along ``L/K``?"""
    if not Kp.has_subfield(K) or not L.has_subfield(K) or beta.ctx is not L:
        raise TransferError("tower mismatch")
    lhs = restrict(canonical_transfer(L, K, beta), Kp)
    rhs = MwClass.zero(Kp, beta.degree)
    for E, phi in tensor_factors(L, K, Kp, theta):
        rhs = rhs + canonical_transfer(E, Kp, beta.map(E, phi))
    return lhs == rhs
