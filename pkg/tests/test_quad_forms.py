import itertools
import random

import pytest

from mwcurves.fields import function_field, gf, prime_field
from mwcurves.forms import FormClass, FormError, gw_equal, parse_form, trace_form_entries, trace_transfer, witt_equal
from mwcurves.places import Place, rational_place


def vectors(F, n):
    els = [F.elem(v) for v in F.elements()]
    return itertools.product(els, repeat=n)


def value(diag, x):
    return sum((a * xi * xi for a, xi in zip(diag, x)), diag[0].ctx(0))


def rep_counts(F, diag):
    """How often each field value is represented; determines the isometry class."""
    counts = {}
    for x in vectors(F, len(diag)):
        k = value(diag, x).v
        counts[k] = counts.get(k, 0) + 1
    return counts


def is_hyperbolic(F, diag):
    """Brute force: a totally isotropic subspace of half the dimension exists."""
    n = len(diag)
    if n % 2:
        return False
    if n == 0:
        return True
    zero = F(0)
    iso = [x for x in vectors(F, n) if any(not c.is_zero() for c in x) and value(diag, x) == zero]
    if n == 2:
        return bool(iso)

    def bil(x, y):
        return sum((a * xi * yi for a, xi, yi in zip(diag, x, y)), zero)

    for v, w in itertools.combinations(iso, 2):
        if bil(v, w) == zero and not _parallel(v, w):
            return True
    return False


def _parallel(v, w):
    F = v[0].ctx
    return any(all(c * a == b for a, b in zip(v, w)) for c in (F.elem(u) for u in F.units()))


def test_identity_and_square_entries():
    F5, F7 = prime_field(5), prime_field(7)
    assert gw_equal(parse_form("<1,1>", F5), parse_form("<1,1>", F5))
    for a in range(1, 7):
        assert gw_equal(FormClass(F7, [F7(a) * F7(a)]), FormClass.one(F7))


def test_gram_congruence_f3():
    # <1,-1> and <2,-2> over F3: search for M with M^T A M = B
    F = prime_field(3)
    A = [[F(1), F(0)], [F(0), F(-1)]]
    B = [[F(2), F(0)], [F(0), F(-2)]]
    found = False
    for m in vectors(F, 4):
        M = [[m[0], m[1]], [m[2], m[3]]]
        if (M[0][0] * M[1][1] - M[0][1] * M[1][0]).is_zero():
            continue
        C = [[sum((M[k][i] * A[k][l] * M[l][j] for k in range(2) for l in range(2)), F(0))
              for j in range(2)] for i in range(2)]
        if C == B:
            found = True
            break
    assert found
    assert witt_equal(parse_form("<1,-1>", F), parse_form("<2,-2>", F))
    assert gw_equal(parse_form("<1,-1>", F), parse_form("<2,-2>", F))


@pytest.mark.parametrize("text,q", [("<1,-1>", 5), ("<1,1,1,1>", 3), ("<1,1>", 5)])
def test_witt_zero_examples(text, q):
    F = prime_field(q)
    f = parse_form(text, F)
    assert f.is_witt_zero()
    assert is_hyperbolic(F, list(f.entries))


def test_witt_order_of_one():
    F3, F5 = prime_field(3), prime_field(5)
    assert [FormClass(F3, [F3(1)] * k).is_witt_zero() for k in range(1, 5)] == [False, False, False, True]
    assert [FormClass(F5, [F5(1)] * k).is_witt_zero() for k in range(1, 3)] == [False, True]


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_gw_equality_matches_representation_counts(q):
    F = gf(q)
    units = [F.elem(u) for u in F.units()]
    for r in (1, 2):
        diags = list(itertools.combinations_with_replacement(units, r))
        for d1, d2 in itertools.combinations(diags, 2):
            oracle = rep_counts(F, d1) == rep_counts(F, d2)
            assert gw_equal(FormClass(F, d1), FormClass(F, d2)) == oracle, (d1, d2)


@pytest.mark.parametrize("q", [3, 5])
def test_witt_equality_matches_isotropy_oracle(q):
    F = prime_field(q)
    units = [F(u) for u in range(1, q)]
    diags = [d for r in (1, 2) for d in itertools.combinations_with_replacement(units, r)]
    for d1, d2 in itertools.product(diags, repeat=2):
        orth = list(d1) + [-a for a in d2]
        oracle = is_hyperbolic(F, orth)
        assert witt_equal(FormClass(F, d1), FormClass(F, d2)) == oracle, (d1, d2)


def test_witt_equality_rank_two_f7():
    F = prime_field(7)
    for a, b in itertools.product(range(1, 7), repeat=2):
        d = [F(a), F(b)]
        assert FormClass(F, d).is_witt_zero() == is_hyperbolic(F, d)


def test_virtual_arithmetic():
    F = prime_field(5)
    x = FormClass(F, [F(2), F(3)])
    assert gw_equal(x - x, FormClass.zero(F))
    assert (x * x).rank == 4
    assert gw_equal(FormClass.pfister(F(2)) + 1, FormClass(F, [F(2)]))
    with pytest.raises(FormError):
        x + FormClass.one(prime_field(7))


def test_second_residue_examples():
    F7, F5 = prime_field(7), prime_field(5)
    K7, K5 = function_field(F7), function_field(F5)
    pl = rational_place(F7, 0)
    res = FormClass(K7, [K7("t")]).second_residue(pl)
    assert witt_equal(res, FormClass.one(F7))
    assert FormClass(K7, [K7("3*t^2")]).second_residue(pl).is_witt_zero()
    pl5 = Place(F5, (F5.one, F5.one), uniformizer=K5("t+1"))
    assert witt_equal(FormClass(K5, [K5("(t+1)*2")]).second_residue(pl5), FormClass(F5, [F5(2)]))


def test_second_residue_kills_unit_forms():
    F = prime_field(5)
    K = function_field(F)
    rng = random.Random(3)
    pl = rational_place(F, 2)
    for _ in range(30):
        u = K.elem(K.normalize((F.random_unit(rng), F.random(rng), F.one), (F.one,)))
        if pl.valuation(u) == 0:
            assert FormClass(K, [u]).second_residue(pl).is_witt_zero()


def gram_det(K, L, lam):
    basis = [L.elem(b) for b in L.basis_over(K)]
    G = [[K.elem(L.trace_raw((lam * x * y).v, K)) for y in basis] for x in basis]
    if len(G) == 2:
        return G[0][0] * G[1][1] - G[0][1] * G[1][0]
    from test_base_fields import _det
    return _det(K, G)


@pytest.mark.parametrize("L_q,K_q", [(9, 3), (25, 5), (27, 3)])
def test_trace_transfer_matches_gram_matrix(L_q, K_q):
    L, K = gf(L_q), prime_field(K_q)
    for lam in (L.elem(u) for u in L.units()):
        tf = trace_transfer(L, K, FormClass(L, [lam]))
        assert tf.rank == L.degree_over(K)
        ratio = tf.det() / gram_det(K, L, lam)
        assert (ratio ** ((K.order - 1) // 2)).is_one()
        assert len(trace_form_entries(L, K, lam.v)) == tf.rank


def test_trace_transfer_of_zero():
    L, K = gf(9), prime_field(3)
    assert trace_transfer(L, K, FormClass.zero(L)).rank == 0
