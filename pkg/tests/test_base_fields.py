import itertools
import random

import pytest

from mwcurves import poly as P
from mwcurves.fields import FieldError, ParseError, function_field, gf, parse_field_spec, prime_field
from mwcurves.places import PoleError, Place, evaluate_at, factor_poly, infinity, is_square, norm, rational_place, trace


def roots(F, f):
    return [a for a in F.elements() if P.evaluate(F, f, a) == F.zero]


def test_factor_difference_of_squares_f5():
    F = prime_field(5)
    unit, fac = factor_poly(F, (F.from_int(-1), F.zero, F.one))
    assert unit.is_one()
    assert sorted(fac) == sorted([((F.from_int(-1), F.one), 1), ((F.from_int(1), F.one), 1)])


def test_t2_plus_1_irreducible_over_f3():
    F = prime_field(3)
    f = (F.one, F.zero, F.one)
    assert roots(F, f) == []
    assert P.is_irreducible(F, f)
    _, fac = factor_poly(F, f)
    assert fac == [(f, 1)]


def test_t2_plus_1_splits_over_f5():
    F = prime_field(5)
    f = (F.one, F.zero, F.one)
    assert sorted(roots(F, f)) == [2, 3]
    _, fac = factor_poly(F, f)
    assert sorted(fac) == sorted([((F.from_int(-2), F.one), 1), ((F.from_int(-3), F.one), 1)])


def test_factor_zero_raises():
    with pytest.raises(FieldError, match="zero input"):
        factor_poly(prime_field(5), ())


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_factor_reconstructs_and_roots_match(q):
    F = gf(q)
    rng = random.Random(q)
    for _ in range(40):
        f = P.random_poly(F, rng.randint(1, 6), rng)
        if not f:
            continue
        unit, fac = factor_poly(F, f)
        prod = (unit.v,)
        for g, e in fac:
            assert P.is_irreducible(F, g)
            for _ in range(e):
                prod = P.mul(F, prod, g)
        assert prod == P.trim(F, f)
        linear = [F.neg(g[0]) for g, _ in fac if len(g) == 2]
        assert sorted(map(F.sort_key, linear)) == sorted(map(F.sort_key, roots(F, f)))


def test_square_classes():
    F7 = prime_field(7)
    assert is_square(F7(4))
    assert not is_square(F7(3))
    assert sorted({(a * a) % 7 for a in range(1, 7)}) == [1, 2, 4]
    assert [is_square(F7(a)) for a in range(1, 7)] == [a in (1, 2, 4) for a in range(1, 7)]
    assert is_square(gf(9)(1))
    with pytest.raises(FieldError, match="zero has no class"):
        is_square(F7(0))


def test_norm_f9_over_f3():
    F3, F9 = prime_field(3), gf(9)
    for a in range(3):
        assert norm(F9, F3, F9(a)) == F3(a) * F3(a)
    for v in F9.units():
        x = F9.elem(v)
        assert norm(F9, F3, x) == F3.elem(F9.restrict_raw((x ** 4).v, F3))
        assert trace(F9, F3, x) == F3.elem(F9.restrict_raw((x + x ** 3).v, F3))


def test_norm_multiplicative():
    F3, F81 = prime_field(3), gf(81)
    rng = random.Random(1)
    for _ in range(100):
        a, b = F81.elem(F81.random(rng)), F81.elem(F81.random(rng))
        assert norm(F81, F3, a * b) == norm(F81, F3, a) * norm(F81, F3, b)


def test_norm_matches_multiplication_matrix_determinant():
    F3, F81 = prime_field(3), gf(81)
    basis = [F81.elem(b) for b in F81.basis_over(F3)]
    rng = random.Random(2)
    for _ in range(20):
        a = F81.elem(F81.random_unit(rng))
        M = [[F3.elem(c) for c in F81.coords_over((a * b).v, F3)] for b in basis]
        assert norm(F81, F3, a) == _det(F3, M)


def _det(K, M):
    n = len(M)
    total = K(0)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = K(-1) ** inv
        for i in range(n):
            term = term * M[i][perm[i]]
        total = total + term
    return total


def test_norm_needs_subfield():
    with pytest.raises(FieldError):
        norm(prime_field(5), gf(9), prime_field(5)(2))


def test_evaluate_at_places():
    F = prime_field(5)
    Kt = function_field(F)
    assert evaluate_at(Kt("t+2"), rational_place(F, 0)) == F(2)
    assert evaluate_at(Kt("(t^2+1)/(t+1)"), rational_place(F, 1)) == F(1)
    with pytest.raises(PoleError, match="pole at place"):
        evaluate_at(Kt("t"), infinity(F))


def test_valuations():
    F = prime_field(5)
    Kt = function_field(F)
    pl = rational_place(F, 0)
    assert pl.valuation(Kt("t^3*(t+1)")) == 3
    assert pl.valuation(Kt("1/t^2")) == -2
    assert infinity(F).valuation(Kt("t^3+1")) == -3
    with pytest.raises(FieldError):
        Place(F, (F.one, F.zero, F.one))  # t^2+1 splits over F5


@pytest.mark.parametrize("spec,order", [("p=5", 5), ("q=9:s^2+1", 9), ("q=25", 25)])
def test_field_specs(spec, order):
    assert parse_field_spec(spec).order == order
    Kt = parse_field_spec(spec + ",F=Fq(t)")
    assert Kt.kind == "rational_function"
    assert Kt.base.order == order


def test_bad_specs():
    for bad in ["p=4", "q=12", "q=9:s^3+1", "banana"]:
        with pytest.raises(FieldError):
            parse_field_spec(bad)


def test_parse_error_has_position():
    Kt = function_field(prime_field(5))
    with pytest.raises(ParseError) as exc:
        Kt("t+*2")
    assert "position" in str(exc.value)
