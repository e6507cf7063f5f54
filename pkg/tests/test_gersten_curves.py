import random

import pytest

from mwcurves.fields import function_field, gf, prime_field
from mwcurves.gersten import (CurveScheme, GerstenError, SupportedFamily, decide_coboundary, family_entry,
                              h1_p1_class, homotopy_invariance_audit, reciprocity_check, specialize,
                              total_residue)
from mwcurves.places import Place, infinity, rational_place
from mwcurves.randgen import random_class, random_place
from mwcurves.residues import canonical_section, canonical_transfer, mw_residue
from mwcurves.symbols import MwClass, constant_embedding, eta_act, mw


def F_and_Kt(q):
    F = gf(q)
    return F, function_field(F)


def test_constant_class_has_empty_residue():
    F, K = F_and_Kt(5)
    for scheme in ("affine_line", "projective_line", "gm"):
        fam = total_residue(constant_embedding(MwClass.bracket(F(2)), K), CurveScheme(scheme, F))
        assert fam.is_empty()


def test_total_residue_of_bracket_t():
    F, K = F_and_Kt(5)
    fam = total_residue(mw("[t]", K), CurveScheme("projective_line", F))
    assert sorted(pl.label for pl in fam.support) == sorted([rational_place(F, 0).label, infinity(F).label])
    assert total_residue(mw("[t]", K), CurveScheme("gm", F)).is_empty()


def test_obstruction_at_rational_point():
    F, _ = F_and_Kt(7)
    P1 = CurveScheme("projective_line", F)
    beta = MwClass.unit_form(F(2))
    p, tc = family_entry(P1, rational_place(F, 0), beta)
    res = decide_coboundary(SupportedFamily(P1, 1, {p: tc}))
    assert not res.is_coboundary
    assert res.obstruction == beta


def test_affine_family_preimage():
    F, K = F_and_Kt(5)
    A1 = CurveScheme("affine_line", F)
    p, tc = family_entry(A1, rational_place(F, 0), MwClass.integer(F, 1))
    res = decide_coboundary(SupportedFamily(A1, 1, {p: tc}))
    assert res.is_coboundary
    assert total_residue(res.preimage, A1) == total_residue(mw("[t]", K), A1)
    assert res.preimage == mw("[t]", K)


@pytest.mark.parametrize("q", [3, 5, 7])
def test_coboundaries_have_preimages(q):
    F, K = F_and_Kt(q)
    P1 = CurveScheme("projective_line", F)
    rng = random.Random(q)
    for _ in range(10):
        f = random_class(K, rng.randint(0, 2), rng)
        fam = total_residue(f, P1)
        assert h1_p1_class(fam).is_zero()
        res = decide_coboundary(fam)
        assert res.is_coboundary
        assert total_residue(res.preimage, P1) == fam


def test_h1_of_single_higher_degree_point():
    F, _ = F_and_Kt(3)
    P1 = CurveScheme("projective_line", F)
    pl = Place(F, (F.one, F.zero, F.one))
    k = pl.residue_field
    beta = MwClass.bracket(k.gen())
    p, tc = family_entry(P1, pl, beta)
    assert h1_p1_class(SupportedFamily(P1, 2, {p: tc})) == canonical_transfer(k, F, beta)
    assert h1_p1_class(SupportedFamily(P1, 2, {})).is_zero()


def test_even_twist_and_odd_twist():
    F, K = F_and_Kt(5)
    rng = random.Random(3)
    O2 = CurveScheme("projective_line", F, 2)
    for _ in range(5):
        f = random_class(K, 1, rng)
        assert h1_p1_class(total_residue(f, O2)).is_zero()
    O1 = CurveScheme("projective_line", F, 1)
    with pytest.raises(GerstenError):
        h1_p1_class(total_residue(mw("[t]", K), O1))
    with pytest.raises(GerstenError):
        CurveScheme("affine_line", F, 2)


def test_reciprocity_examples():
    F, K = F_and_Kt(5)
    assert reciprocity_check(mw("[t]", K), 1)
    assert reciprocity_check(constant_embedding(MwClass.bracket(F(3)), K))
    rng = random.Random(11)
    for q in (3, 5, 7):
        Fq, Kq = F_and_Kt(q)
        for n in (1, 2, 3):
            for _ in range(5):
                assert reciprocity_check(random_class(Kq, n, rng), n)


def test_specialize_constant():
    F, K = F_and_Kt(7)
    x = MwClass.bracket(F(3)) * MwClass.eta(F)
    assert specialize(constant_embedding(x, K), 2) == x
    assert specialize(mw("[t+1]", K), 1) == MwClass.bracket(F(2))


def test_family_arithmetic():
    F, _ = F_and_Kt(5)
    A1 = CurveScheme("affine_line", F)
    p, tc = family_entry(A1, rational_place(F, 1), MwClass.unit_form(F(2)))
    fam = SupportedFamily(A1, 1, {p: tc})
    assert (fam + -fam).is_empty()
    with pytest.raises(GerstenError):
        SupportedFamily(A1, 2, {p: tc})
    with pytest.raises(GerstenError):
        SupportedFamily(A1, 1, {infinity(F): tc})


@pytest.mark.parametrize("n", [0, 1])
def test_homotopy_audit_small(n):
    report = homotopy_invariance_audit(gf(5), n, trials=10, seed=1)
    assert report["passed"], report["failures"]
    assert report["checked"] == {"a": 10, "b": 10, "c": 10, "d": 10}


def test_homotopy_audit_needs_trials():
    with pytest.raises(GerstenError):
        homotopy_invariance_audit(gf(5), 1, trials=0)


def test_convention_negative_control():
    """Using +1/t at infinity instead of the pinned section breaks the h1 identity."""
    F, K = F_and_Kt(3)
    P1 = CurveScheme("projective_line", F)
    beta = MwClass.integer(F, 1)
    # wrong section at infinity flips by <-1>
    inf = infinity(F)
    p_good, tc_good = family_entry(P1, inf, beta, K("-1/t"))
    p_bad, tc_bad = family_entry(P1, inf, beta, K("1/t"))
    good = h1_p1_class(SupportedFamily(P1, 1, {p_good: tc_good}))
    bad = h1_p1_class(SupportedFamily(P1, 1, {p_bad: tc_bad}))
    assert good == beta
    assert bad == MwClass.unit_form(F(-1)) * beta
    assert bad != good


def _random_affine_family(scheme, n, rng):
    F = scheme.ground
    entries = {}
    for _ in range(rng.randint(1, 3)):
        pl = random_place(F, rng, 2, "affine")
        p, tc = family_entry(scheme, pl, random_class(pl.residue_field, n - 1, rng))
        entries[p] = tc
    return SupportedFamily(scheme, n, entries)


def test_excision_affine_vs_projective():
    F, K = F_and_Kt(5)
    A1, P1 = CurveScheme("affine_line", F), CurveScheme("projective_line", F)
    rng = random.Random(21)
    for _ in range(8):
        fam_a = _random_affine_family(A1, 1, rng)
        entries = {pl.on("projective"): tc for pl, tc in fam_a.entries.items()}
        # cancel the obstruction with an entry at infinity, leaving the affine part untouched
        obs = h1_p1_class(SupportedFamily(P1, 1, entries))
        p, tc = family_entry(P1, infinity(F), -obs, canonical_section(infinity(F)))
        entries[p] = tc
        res_p = decide_coboundary(SupportedFamily(P1, 1, entries))
        assert res_p.is_coboundary
        diff = decide_coboundary(fam_a).preimage - res_p.preimage
        assert total_residue(diff, A1).is_empty()


def test_even_twist_matches_untwisted_away_from_infinity():
    F, K = F_and_Kt(3)
    rng = random.Random(8)
    for d in (2, 4, -2):
        Od, O0 = CurveScheme("projective_line", F, d), CurveScheme("projective_line", F)
        for _ in range(6):
            fam0 = _random_affine_family(O0, 1, rng)
            famd = SupportedFamily(Od, 1, {pl: type(tc)(tc.cls, Od.tag(pl), tc.section, tc.place)
                                            for pl, tc in fam0.entries.items()})
            assert h1_p1_class(famd) == h1_p1_class(fam0)
            f = random_class(K, 1, rng)
            assert h1_p1_class(total_residue(f, Od)).is_zero()
