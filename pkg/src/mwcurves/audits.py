"""Audit suites: each returns a JSON-ready report with case counts and witnesses.

Reports contain no timing data, so a fixed seed gives identical bytes.
"""

from __future__ import annotations

import itertools
import random

from . import poly as P
from .conventions import FINGERPRINT
from .fields import FieldElem, extension, function_field, gf
from .forms import FormClass
from .gersten import (CurveScheme, SupportedFamily, family_entry, h1_p1_class,
                      homotopy_invariance_audit, reciprocity_check, total_residue)
from .places import Place
from .randgen import random_class, random_place, random_unit
from .residues import (base_change_transfer_check, canonical_section, canonical_transfer,
                       geometric_transfer, lift_class, minimal_polynomial, mw_residue,
                       mw_residue_twisted, restrict, transfer_chain)
from .symbols import (MwClass, MwExpression, eta_act, normalize, parse_expression,
                      twist_make, twist_rebase)

SUITES = ("relations", "structure", "residues", "transfers", "reciprocity", "homotopy",
          "basechange", "twists")

DEFAULTS = {
    "relations": {"q": [3, 5, 7, 9, 11]},
    "structure": {"q": [3, 5, 7, 9, 11]},
    "residues": {"q": [3, 5, 7], "trials": 300},
    "transfers": {"q": [3, 5]},
    "reciprocity": {"q": [3, 5, 7], "n": [1, 2, 3], "trials": 500},
    "homotopy": {"q": [3, 5, 7], "n": [0, 1, 2], "trials": 100},
    "basechange": {"q": [3, 5]},
    "twists": {"q": [3, 5, 7], "trials": 200},
}


class Tally:
    """Case counter with a capped witness list."""

    def __init__(self, max_witnesses: int = 20):
        self.cases: dict = {}
        self.failures: list = []
        self.failed_by_case: dict = {}
        self.n_failed = 0
        self.max_witnesses = max_witnesses

    def check(self, name: str, ok: bool, **witness) -> bool:
        self.cases[name] = self.cases.get(name, 0) + 1
        if not ok:
            self.n_failed += 1
            self.failed_by_case[name] = self.failed_by_case.get(name, 0) + 1
            if len(self.failures) < self.max_witnesses:
                self.failures.append(dict(case=name, **witness))
        return ok

    def report(self, suite: str, params: dict) -> dict:
        return {
            "suite": suite,
            "params": params,
            "cases": dict(sorted(self.cases.items())),
            "total_cases": sum(self.cases.values()),
            "failed": self.n_failed,
            "failed_by_case": dict(sorted(self.failed_by_case.items())),
            "failures": self.failures,
            "passed": self.n_failed == 0,
            "conventions": FINGERPRINT,
        }


def _rng(seed: int, *parts) -> random.Random:
    return random.Random(":".join(map(str, (seed,) + parts)))


def _units(F):
    return [F.elem(v) for v in F.units()]


def _e(text, F):
    return normalize(parse_expression(text, F))


def _fmt(a: FieldElem) -> str:
    return "(" + str(a) + ")"


# ---------------------------------------------------------------------------


def suite_relations(qs, tally: Tally, **_):
    """Defining relations and their first consequences on all unit pairs."""
    for q in qs:
        F = gf(q)
        U = _units(F)
        one = MwClass.integer(F, 1)
        eta = MwClass.eta(F)
        tally.check(f"q={q}: eta(2+eta[-1])=0", _e("eta*(2+eta*[-1])", F).is_zero())
        tally.check(f"q={q}: [1]=0", _e("[1]", F).is_zero())
        tally.check(f"q={q}: <1>=1", _e("<1>", F) == one)
        for a in U:
            A = _fmt(a)
            if not a.is_one():
                tally.check(f"q={q}: [a][1-a]=0", _e(f"[{A}]*[{_fmt(F(1) - a)}]", F).is_zero(), a=str(a))
            tally.check(f"q={q}: eta[a]=[a]eta", eta * MwClass.bracket(a) == MwClass.bracket(a) * eta, a=str(a))
            tally.check(f"q={q}: <a^2>=1", _e(f"<{_fmt(a * a)}>", F) == one, a=str(a))
            for b in U:
                B = _fmt(b)
                w = dict(a=str(a), b=str(b))
                tally.check(f"q={q}: [ab]=[a]+[b]+eta[a][b]",
                            _e(f"[{_fmt(a * b)}] - [{A}] - [{B}] - eta*[{A}]*[{B}]", F).is_zero(), **w)
                tally.check(f"q={q}: <a><b>=<ab>", _e(f"<{A}>*<{B}>", F) == _e(f"<{_fmt(a * b)}>", F), **w)
                Ax, Bx = MwClass.bracket(a), MwClass.bracket(b)
                tally.check(f"q={q}: eta[a][b]=[a]eta[b]=[a][b]eta",
                            eta * Ax * Bx == Ax * eta * Bx == Ax * Bx * eta, **w)
                tally.check(f"q={q}: [a][b]=-<-1>[b][a]",
                            _e(f"[{A}]*[{B}] + <(-1)>*[{B}]*[{A}]", F).is_zero(), **w)


def _euler_square(F, a) -> bool:
    """Square test by Euler's criterion, independent of the log tables."""
    return F.pow(a.v, (F.order - 1) // 2) == F.one


def suite_structure(qs, tally: Tally, seed: int = 0, **_):
    """Images of normalize on bounded expressions, degree by degree."""
    for q in qs:
        F = gf(q)
        U = _units(F)
        rng = _rng(seed, "structure", q)
        # degree 1: brackets and eta[a][b] monomials, plus pairwise sums
        mono1 = [MwExpression(F, ((1, 0, (a,)),)) for a in U]
        mono1 += [MwExpression(F, ((1, 1, (a, b)),)) for a in U for b in U]
        img = {normalize(e) for e in mono1}
        for _ in range(4 * q * q):
            e1, e2 = rng.choice(mono1), rng.choice(mono1)
            img.add(normalize(MwExpression(F, e1.terms + ((rng.choice([-1, 1, 2]),) + e2.terms[0][1:],))))
        tally.check(f"q={q}: |degree-1 image| = q-1", len(img) == q - 1, size=len(img))
        # degrees 2 and 3 collapse
        for a, b in itertools.product(U, U):
            tally.check(f"q={q}: degree 2 is zero", normalize(MwExpression(F, ((1, 0, (a, b)),))).is_zero(),
                        a=str(a), b=str(b))
        for _ in range(q * q):
            a, b, c, d = (rng.choice(U) for _ in range(4))
            tally.check(f"q={q}: degree 2 is zero",
                        normalize(MwExpression(F, ((1, 1, (a, b, c)),))).is_zero(), a=str(a), b=str(b), c=str(c))
            tally.check(f"q={q}: degree 3 is zero",
                        normalize(MwExpression(F, ((1, 0, (a, b, c)),))).is_zero(), a=str(a), b=str(b), c=str(c))
            tally.check(f"q={q}: degree 3 is zero",
                        normalize(MwExpression(F, ((1, 1, (a, b, c, d)),))).is_zero(), a=str(a))
        # degree 0: integer combinations of <a>, checked against (rank, det) arithmetic
        combos = []
        for _ in range(6 * q):
            k = rng.randint(1, 3)
            terms = [(rng.choice([-2, -1, 1, 2]), rng.choice(U)) for _ in range(k)]
            combos.append(terms)
        combos += [[(1, a)] for a in U]

        def oracle(terms):
            r = sum(c for c, _ in terms)
            parity = sum(c * (0 if _euler_square(F, a) else 1) for c, a in terms) % 2
            return r, parity

        def expr(terms):
            return normalize(MwExpression(F, tuple(t for c, a in terms for t in ((c, 0, ()), (c, 1, (a,)))
                                                  if not (t[1] == 1 and a.is_one()))), 0)

        def invariants(x):
            return x.form.rank, 0 if _euler_square(F, x.form.det()) else 1

        classes = []
        for terms in combos:
            x = expr(terms)
            classes.append((x, oracle(terms)))
            tally.check(f"q={q}: degree 0 matches (rank, det)", invariants(x) == oracle(terms),
                        terms=[[c, str(a)] for c, a in terms])
        pairs = {(ra % 4, pa) for _, (ra, pa) in classes}
        for _ in range(4 * q):
            (x, (r1, d1)), (y, (r2, d2)) = rng.choice(classes), rng.choice(classes)
            want = (r1 * r2, (d1 * r2 + d2 * r1) % 2)
            tally.check(f"q={q}: degree 0 closed under product", invariants(x * y) == want,
                        left=x.to_json(), right=y.to_json())
        tally.check(f"q={q}: degree 0 reaches both determinant classes", {p for _, p in pairs} == {0, 1})


def suite_residues(qs, tally: Tally, seed: int = 0, trials: int = 300, **_):
    """d^pi([pi] * m~) = m, and vanishing on all-unit classes."""
    for q in qs:
        B = gf(q)
        Kt = function_field(B)
        rng = _rng(seed, "residues", q)
        for i in range(trials):
            pl = random_place(B, rng, 2)
            n = rng.randint(0, 2)
            m = random_class(pl.residue_field, n - 1 if n > 0 else rng.choice([-1, 0]), rng)
            pi = pl.uniformizer
            if rng.random() < 0.5:
                u = _unit_at(pl, rng)
                pi = pi * u
                pl = pl.with_uniformizer(pi)
            lifted = lift_class(m, pl)
            got = mw_residue(MwClass.bracket(pi) * lifted, pl)
            tally.check(f"q={q}: d([pi] m) = m", got == m, place=pl.label, pi=str(pi), m=m.to_json())
            # all-unit class
            n = rng.randint(-1, 3)
            cls = _unit_class(Kt, pl, n, rng)
            tally.check(f"q={q}: all-unit classes have zero residue", mw_residue(cls, pl).is_zero(),
                        place=pl.label, cls=cls.to_json())


def _unit_at(pl: Place, rng) -> FieldElem:
    Kt = pl.function_field
    while True:
        u = random_unit(Kt, rng, 2)
        if pl.valuation(u) == 0:
            return u


def _unit_class(Kt, pl, n, rng) -> MwClass:
    terms = []
    for _ in range(rng.randint(1, 2)):
        m = n + (1 if n < 1 or rng.random() < 0.3 else 0)
        m = max(m, 0)
        terms.append((rng.choice([-1, 1, 2]), m - n, tuple(_unit_at(pl, rng) for _ in range(m))))
    return normalize(MwExpression(Kt, tuple(terms)), n)


def spanning_set(L) -> list[MwClass]:
    """Additive generators of the classes over a finite field in degrees -1, 0, 1."""
    g = L.elem(L.generator)
    return [
        MwClass.integer(L, 1),
        MwClass.unit_form(g),
        MwClass.bracket(g),
        MwClass.bracket(L(-1)),
        eta_act(MwClass.integer(L, 1)),
        eta_act(MwClass.unit_form(g)),
    ]


def _generators(L, K):
    d = L.degree_over(K)
    return [L.elem(v) for v in L.elements() if len(minimal_polynomial(L, K, L.elem(v))) - 1 == d]


def _corrupt(x: MwClass) -> MwClass:
    """Test-only negative control: scale by a nonsquare unit form."""
    F = x.ctx
    return MwClass.unit_form(F.elem(F.generator)) * x


def suite_transfers(qs, tally: Tally, seed: int = 0, corrupt_oracle: bool = False, full: bool = True, **_):
    """Generator independence, chains, and geometric vs canonical transfer."""
    oracle = _corrupt if corrupt_oracle else (lambda x: x)
    F3, F5, F9 = gf(3), gf(5), gf(9)
    rng = _rng(seed, "transfers")
    # well-definedness: every generator of F9/F3 and F25/F5
    for K, L in ((F3, F9), (F5, gf(25))):
        if K.order not in qs:
            continue
        for beta in spanning_set(L):
            want = oracle(canonical_transfer(L, K, beta))
            for th in _generators(L, K):
                got = geometric_transfer(L, K, th, beta)
                tally.check(f"{L.spec}/{K.spec}: generator independence", got == want,
                            generator=str(th), beta=beta.to_json())
    # F81/F3 directly and through F9
    if 3 in qs:
        u2 = next(P.irreducibles(F9, 2))
        F81 = extension(F9, u2, "u")
        gens4 = _generators(F81, F3)
        gens_top = _generators(F81, F9)
        gens_mid = _generators(F9, F3)
        if not full:
            gens4 = rng.sample(gens4, 8)
            gens_top = rng.sample(gens_top, 6)
        for beta in spanning_set(F81):
            want = oracle(canonical_transfer(F81, F3, beta))
            for th in gens4:
                got = transfer_chain([F3, F81], [th], beta)
                tally.check("F81/F3: direct degree-4 step", got == want, generator=str(th), beta=beta.to_json())
            for th_top in gens_top:
                mid = geometric_transfer(F81, F9, th_top, beta)
                tally.check("F81/F9: generator independence", mid == canonical_transfer(F81, F9, beta),
                            generator=str(th_top), beta=beta.to_json())
                for th_mid in gens_mid[:2] if not full else gens_mid:
                    got = geometric_transfer(F9, F3, th_mid, mid)
                    tally.check("F81/F3: chain via F9", got == want,
                                generators=[str(th_mid), str(th_top)], beta=beta.to_json())
            tally.check("F81/F3: canonical chain", transfer_chain([F3, F9, F81], [None, None], beta,
                                                               route="canonical") == want, beta=beta.to_json())
    # cross-oracle on every degree <= 4 over F3 and F5
    for q in (3, 5):
        if q not in qs:
            continue
        K = gf(q)
        for d in (1, 2, 3, 4):
            L = K if d == 1 else extension(K, next(P.irreducibles(K, d)), "s")
            gens = _generators(L, K)
            picks = gens if len(gens) <= 4 else [gens[0]] + rng.sample(gens[1:], 3)
            for beta in spanning_set(L):
                want = oracle(canonical_transfer(L, K, beta))
                for th in picks:
                    got = geometric_transfer(L, K, th, beta)
                    tally.check(f"q={q}, d={d}: geometric = canonical", got == want,
                                generator=str(th), beta=beta.to_json())
            # transfer of a restriction is multiplication by the trace form of <1>
            tr1 = FormClass(K, ()) + canonical_transfer(L, K, MwClass.integer(L, 1)).form
            for _ in range(4):
                b = random_class(K, rng.randint(-1, 1), rng)
                tally.check(f"q={q}, d={d}: projection formula",
                            canonical_transfer(L, K, restrict(b, L)) == MwClass.from_form(tr1) * b,
                            beta=b.to_json())


def suite_reciprocity(qs, tally: Tally, seed: int = 0, trials: int = 500, ns=(1, 2, 3), **_):
    for q in qs:
        Kt = function_field(gf(q))
        for n in ns:
            rng = _rng(seed, "reciprocity", q, n)
            for _ in range(trials):
                f = random_class(Kt, n, rng)
                tally.check(f"q={q}, n={n}: reciprocity", reciprocity_check(f), cls=f.to_json())


def suite_homotopy(qs, tally: Tally, seed: int = 0, trials: int = 100, ns=(0, 1, 2), **_):
    for q in qs:
        for n in ns:
            rep = homotopy_invariance_audit(gf(q), n, trials, seed=seed)
            for k, v in rep["checked"].items():
                tally.cases[f"q={q}, n={n}: ({k})"] = v
            for w in rep["failures"]:
                tally.check(f"q={q}, n={n}: ({w['assertion']})", False, **w)


def suite_basechange(qs, tally: Tally, seed: int = 0, **_):
    """Restriction commutes with transfer, summing over the factors of L (x) K'."""
    rng = _rng(seed, "basechange")
    for q in qs:
        K = gf(q)
        fields = {1: K}
        for d in (2, 3):
            fields[d] = extension(K, next(P.irreducibles(K, d)), "s")
        # a second, separately constructed quadratic extension (L isomorphic to K')
        twin = extension(K, list(itertools.islice(P.irreducibles(K, 2), 2))[-1], "r")
        combos = [(fields[a], fields[b]) for a in (1, 2, 3) for b in (1, 2, 3)] + [(fields[2], twin)]
        for L, Kp in combos:
            for beta in spanning_set(L) + [random_class(L, rng.randint(-1, 1), rng) for _ in range(3)]:
                tally.check(f"q={q}: [L:K]={L.degree_over(K)}, [K':K]={Kp.degree_over(K)}",
                            base_change_transfer_check(L, K, Kp, beta), L=L.spec, Kp=Kp.spec, beta=beta.to_json())


def suite_twists(qs, tally: Tally, seed: int = 0, trials: int = 200, **_):
    """Square rebase invariance, rebase covariance, residue covariance, O(d) charts."""
    for q in qs:
        B = gf(q)
        Kt = function_field(B)
        rng = _rng(seed, "twists", q)
        for _ in range(trials):
            n = rng.randint(-1, 2)
            ctx = Kt if rng.random() < 0.5 else B
            m = random_class(ctx, n, rng)
            s = random_unit(ctx, rng)
            tc = twist_make(m, "L", s)
            c = random_unit(ctx, rng)
            sq = twist_rebase(tc, s, c * c)
            tally.check(f"q={q}: square rebase leaves the class", sq.cls == m, cls=m.to_json(), unit=str(c))
            u, v = random_unit(ctx, rng), random_unit(ctx, rng)
            one_step = twist_rebase(tc, s, u * v)
            two_step = twist_rebase(twist_rebase(tc, s, u), s, v)
            tally.check(f"q={q}: rebase is multiplicative", one_step.cls == two_step.cls, cls=m.to_json())
            tally.check(f"q={q}: rebased pair is the same twisted class",
                        twist_make(m, "L", u * s) == twist_rebase(twist_make(m, "L", u * s), s, u))
            # residue covariance under a change of uniformizer
            pl = random_place(B, rng, 2)
            f = random_class(Kt, rng.randint(0, 2), rng)
            w = _unit_at(pl, rng)
            r1 = mw_residue_twisted(f, pl)
            r2 = mw_residue_twisted(f, pl, uniformizer=pl.uniformizer * w)
            tally.check(f"q={q}: twisted residue is uniformizer independent", r1 == r2,
                        cls=f.to_json(), place=pl.label, unit=str(w))
            wbar = pl.split(w)[1]
            direct = mw_residue(f, pl.with_uniformizer(pl.uniformizer * w))
            tally.check(f"q={q}: d^(u pi) = <u> d^pi", direct == MwClass.unit_form(wbar) * mw_residue(f, pl),
                        cls=f.to_json(), place=pl.label, unit=str(w))
            # O(d) for even d: the chart transition t^d is a square
            d = rng.choice([-4, -2, 2, 4])
            twisted = total_residue(f, CurveScheme("projective_line", B, d))
            plain = total_residue(f, CurveScheme("projective_line", B, 0))
            inf_t = [tc for p, tc in twisted.entries.items() if p.is_infinite]
            inf_p = [tc for p, tc in plain.entries.items() if p.is_infinite]
            same_inf = (len(inf_t) == len(inf_p)) and all(a.cls == b.cls for a, b in zip(inf_t, inf_p))
            tally.check(f"q={q}: O(d) chart transition at infinity", same_inf, d=d, cls=f.to_json())
            tally.check(f"q={q}: O(d) h1 matches the untwisted h1", h1_p1_class(twisted) == h1_p1_class(plain),
                        d=d, cls=f.to_json())


RUNNERS = {
    "relations": suite_relations,
    "structure": suite_structure,
    "residues": suite_residues,
    "transfers": suite_transfers,
    "reciprocity": suite_reciprocity,
    "homotopy": suite_homotopy,
    "basechange": suite_basechange,
    "twists": suite_twists,
}


def run_suite(name: str, qs=None, ns=None, trials=None, seed: int = 0, corrupt_oracle: bool = False,
              full: bool = True) -> dict:
    """Run one suite with defaults filled in; returns the canonical report."""
    if name not in RUNNERS:
        raise KeyError(f"unknown suite {name!r}")
    d = DEFAULTS[name]
    qs = list(qs or d["q"])
    params = {"q": qs, "seed": seed}
    kw = {"seed": seed}
    if "n" in d:
        ns = list(ns if ns is not None else d["n"])
        params["n"] = ns
        kw["ns"] = ns
    if "trials" in d:
        trials = trials if trials is not None else d["trials"]
        params["trials"] = trials
        kw["trials"] = trials
    if name == "transfers":
        kw["corrupt_oracle"] = corrupt_oracle
        kw["full"] = full
        params["corrupt_oracle"] = corrupt_oracle
        params["full"] = full
    tally = Tally()
    RUNNERS[name](qs, tally, **kw)
    return tally.report(name, params)
