from fractions import Fraction as F

import pytest

from zetalab.artin import elliptic_zeta
from zetalab.bundles import (
    BundleDescriptor,
    Convention,
    CurveData,
    InvariantTable,
    LineOrbit,
    StratumKey,
    aut_order,
    bn_stratum_shape,
    class_contents,
    h0_of_bundle,
    hn_correction_truncated,
    hn_tail_closed,
    invariant,
    mass_recursion_beta,
    strata_census,
)
from zetalab.errors import CapabilityError, InputError
from zetalab.ffield import FieldSpec, WeierstrassCurve, norm_kernel_size

O = LineOrbit.trivial()
L = LineOrbit.rational(1)
M = LineOrbit.rational(2)

E59 = CurveData.from_curve(WeierstrassCurve(FieldSpec(5), 1, 1))
E58 = CurveData.from_curve(WeierstrassCurve(FieldSpec(5), 4, 0))

GALLERY = [
    E59,
    E58,
    CurveData.from_curve(WeierstrassCurve(FieldSpec(7), 1, 1)),
    CurveData.from_curve(WeierstrassCurve(FieldSpec(7), 1, 3)),
    CurveData.from_curve(WeierstrassCurve(FieldSpec(11), 1, 1)),
    CurveData.from_curve(WeierstrassCurve(FieldSpec(11), 2, 5)),
]


class TestAutOrder:
    def test_split_rank2(self):
        q = 5
        assert aut_order(BundleDescriptor.of((1, O), (1, O)), q) == (q * q - 1) * (q * q - q)

    def test_jordan_blocks(self):
        q = 5
        assert aut_order(BundleDescriptor.of((2, O)), q) == (q - 1) * q
        assert aut_order(BundleDescriptor.of((3, O)), q) == (q - 1) * q * q

    def test_paper_mixed_block(self):
        q = 5
        v = BundleDescriptor.of((1, O), (2, O))
        assert aut_order(v, q) == (q - 1) ** 2 * q ** 3

    def test_multiplicative_over_distinct_orbits(self):
        q = 7
        for parts in (((1, O), (1, L)), ((2, O), (1, L)), ((1, L), (2, M))):
            whole = aut_order(BundleDescriptor(parts), q)
            split = 1
            for s in parts:
                split *= aut_order(BundleDescriptor.of(s), q)
            assert whole == split

    def test_conjugate_orbit_unit_group(self):
        q = 5
        assert aut_order(BundleDescriptor.of((1, LineOrbit.conjugate(2))), q) == q * q - 1
        assert aut_order(BundleDescriptor.of((1, LineOrbit.conjugate(3))), q) == q ** 3 - 1

    def test_rank_cap(self):
        v = BundleDescriptor.of((5, O))
        with pytest.raises(CapabilityError):
            aut_order(v, 5)


class TestClassContents:
    def test_trivial_rank4_class(self):
        gr = BundleDescriptor.of(*([(1, O)] * 4))
        assert len(class_contents(gr)) == 5  # partitions of 4

    def test_single_line_bundle(self):
        assert len(class_contents(BundleDescriptor.of((1, O)))) == 1

    def test_mixed(self):
        gr = BundleDescriptor.of((1, O), (1, O), (1, L))
        assert len(class_contents(gr)) == 2  # partitions(2) x partitions(1)

    def test_rejects_nontrivial_jordan_input(self):
        with pytest.raises(InputError):
            class_contents(BundleDescriptor.of((2, O)))


class TestH0:
    def test_values(self):
        assert h0_of_bundle(BundleDescriptor.of((1, O), (1, O), (1, O))) == 3
        assert h0_of_bundle(BundleDescriptor.of((3, O))) == 1
        assert h0_of_bundle(BundleDescriptor.of((2, L))) == 0


class TestCensus:
    def test_rank1(self):
        res = strata_census(1, E59, Convention.PAPER_SPLIT)
        assert res.total_classes == E59.n1
        assert all(r.mass_per_class == F(1, 4) for r in res.rows)
        assert res.gamma == 1

    def test_rank2_paper_split_counts(self):
        res = strata_census(2, E59, Convention.PAPER_SPLIT)
        by_label = {r.label: r for r in res.rows}
        assert by_label["(2;0)"].classes == 1
        assert by_label["(0;2)"].classes == 3
        assert by_label["(0;1,1)"].classes == E59.q + 1 - 4
        assert res.total_classes == E59.q + 1

    def test_rank2_descent_q5_n9(self):
        res = strata_census(2, E59, Convention.GALOIS_DESCENT)
        by_label = {r.label: r for r in res.rows}
        assert by_label["(0;2)"].classes == 0          # no rational 2-torsion
        assert by_label["(0;1,1)"].classes == 4
        assert by_label["(0;conj-pair)"].classes == 1
        assert res.total_classes == 6

    def test_descent_completeness_across_gallery(self):
        for curve in GALLERY:
            for r in (2, 3):
                res = strata_census(r, curve, Convention.GALOIS_DESCENT)
                assert res.total_classes == (curve.q ** r - 1) // (curve.q - 1)

    def test_conjugate_pair_count_against_trace_oracle(self):
        for wc in (WeierstrassCurve(FieldSpec(5), 1, 1),
                   WeierstrassCurve(FieldSpec(5), 4, 0),
                   WeierstrassCurve(FieldSpec(7), 1, 3)):
            curve = CurveData.from_curve(wc)
            k2 = norm_kernel_size(wc, 2)
            eps2 = curve.torsion(2)
            res = strata_census(2, curve, Convention.GALOIS_DESCENT)
            conj = next(r for r in res.rows if r.label == "(0;conj-pair)")
            assert conj.classes == F(k2 - eps2, 2)

    def test_gamma_only_from_sections(self):
        for curve in GALLERY[:3]:
            for conv in Convention:
                res = strata_census(2, curve, conv)
                for row in res.rows:
                    has_trivial = row.key.a0 > 0
                    assert (row.gamma_per_class > 0) == has_trivial


class TestInvariant:
    def test_beta_rank2_odd_degree(self):
        for curve in GALLERY:
            for conv in Convention:
                assert invariant("beta", 2, 1, curve, conv) == F(curve.n1, curve.q - 1)

    def test_beta_rank2_paper_closed_form(self):
        for curve in GALLERY:
            expected = F(curve.n1 * (curve.q + 3), curve.q ** 2 - 1)
            assert invariant("beta", 2, 0, curve, Convention.PAPER_SPLIT) == expected

    def test_gamma_rank2_degree0_both_conventions(self):
        for curve in GALLERY:
            for conv in Convention:
                assert invariant("gamma", 2, 0, curve, conv) == F(curve.n1, curve.q - 1)

    def test_beta_descent_equals_recursion_rank2(self):
        assert invariant("beta", 2, 0, E59, Convention.GALOIS_DESCENT) == F(99, 32)
        for curve in GALLERY:
            zc = curve.zeta
            assert invariant("beta", 2, 0, curve, Convention.GALOIS_DESCENT) == \
                mass_recursion_beta(2, 0, zc)

    def test_beta_descent_equals_recursion_rank3(self):
        assert invariant("beta", 3, 0, E59, Convention.GALOIS_DESCENT) == F(13707, 3968)
        for curve in GALLERY:
            assert invariant("beta", 3, 0, curve, Convention.GALOIS_DESCENT) == \
                mass_recursion_beta(3, 0, curve.zeta)

    def test_paper_split_agreement_locus(self):
        # printed closed form matches the recursion exactly iff N1 = 2(q-1)
        for curve in GALLERY:
            paper = invariant("beta", 2, 0, curve, Convention.PAPER_SPLIT)
            rec = mass_recursion_beta(2, 0, curve.zeta)
            if curve.n1 == 2 * (curve.q - 1):
                assert paper == rec
            else:
                assert paper != rec
        assert E58.n1 == 2 * (E58.q - 1)
        assert invariant("beta", 2, 0, E58, Convention.PAPER_SPLIT) == F(8, 3)

    def test_beta_periodicity(self):
        for conv in Convention:
            for d in (-3, -1, 2, 3, 5, 6):
                assert invariant("beta", 3, d, E59, conv) == \
                    invariant("beta", 3, d % 3, E59, conv)

    def test_gamma_telescopes_to_lower_rank_beta(self):
        for curve in GALLERY[:4]:
            for conv in Convention:
                for r in (2, 3):
                    assert invariant("gamma", r, 0, curve, conv) == \
                        invariant("beta", r - 1, 0, curve, conv)

    def test_alpha_beta_gamma_relation(self):
        for conv in Convention:
            for r in (1, 2, 3):
                for d in range(-2, 5):
                    a = invariant("alpha", r, d, E59, conv)
                    b = invariant("beta", r, d, E59, conv)
                    g = invariant("gamma", r, d, E59, conv)
                    assert g == a - b
                    assert a >= 0 and b >= 0 and g >= 0

    def test_table_build_and_validate(self):
        table = InvariantTable.build(E59, Convention.GALOIS_DESCENT)
        assert table.entries[("beta", 2, 0)] == F(99, 32)


class TestMassRecursion:
    def test_rank1_base(self):
        assert mass_recursion_beta(1, 0, E59.zeta) == F(9, 4)

    def test_rank2_values(self):
        assert mass_recursion_beta(2, 0, E59.zeta) == F(99, 32)
        assert mass_recursion_beta(2, 0, E58.zeta) == F(8, 3)

    def test_offdiagonal_degrees_reduce_to_stable_count(self):
        # every degree coprime to the rank must give N1/(q-1)
        for curve in GALLERY:
            b1 = F(curve.n1, curve.q - 1)
            zc = curve.zeta
            assert mass_recursion_beta(2, 1, zc) == b1
            assert mass_recursion_beta(3, 1, zc) == b1
            assert mass_recursion_beta(3, 2, zc) == b1

    def test_closed_form_equals_truncation_plus_exact_tail(self):
        for curve in (E59, E58):
            zc = curve.zeta
            for r, d in ((2, 0), (2, 1), (3, 0), (3, 1), (3, 2)):
                closed = hn_correction_truncated(r, d, zc, 30) + hn_tail_closed(r, d, zc, 30)
                b1 = F(curve.n1, curve.q - 1)
                if r == 2:
                    full = b1 * zc.zfunc(F(1, zc.q ** 2)) - mass_recursion_beta(2, d, zc)
                else:
                    full = (b1 * zc.zfunc(F(1, zc.q ** 2)) * zc.zfunc(F(1, zc.q ** 3))
                            - mass_recursion_beta(3, d, zc))
                assert closed == full

    def test_truncation_within_geometric_tail_bound(self):
        zc = E59.zeta
        for r, d in ((2, 0), (3, 0)):
            b1 = F(9, 4)
            if r == 2:
                full = b1 * zc.zfunc(F(1, 25)) - mass_recursion_beta(2, d, zc)
            else:
                full = (b1 * zc.zfunc(F(1, 25)) * zc.zfunc(F(1, 125))
                        - mass_recursion_beta(3, d, zc))
            trunc = hn_correction_truncated(r, d, zc, 30)
            assert 0 <= full - trunc < F(1, 5 ** 40)

    def test_requires_elliptic(self):
        from zetalab.artin import ZetaCurve
        from zetalab.exact import Poly
        genus2 = ZetaCurve(5, 2, Poly([1, 3, 5]) * Poly([1, 3, 5]))
        with pytest.raises(InputError):
            mass_recursion_beta(2, 0, genus2)


class TestStratumShape:
    def test_point(self):
        shape = bn_stratum_shape(StratumKey(3))
        assert shape.describe() == "point"

    def test_p1_locus(self):
        shape = bn_stratum_shape(StratumKey(1, (1, 1)))
        assert shape.describe() == "P^1"
        assert shape.components == 1

    def test_curve_isomorphic_to_base(self):
        shape = bn_stratum_shape(StratumKey(0, (2, 1)))
        assert shape.describe() == "E"

    def test_torsion_components(self):
        assert bn_stratum_shape(StratumKey(0, (2,))).components == 4
        assert bn_stratum_shape(StratumKey(1, (2,))).components == 4
        assert bn_stratum_shape(StratumKey(0, (3,))).components == 9

    def test_regrouping_sorted_descending(self):
        shape = bn_stratum_shape(StratumKey(0, (1, 2, 1)))
        assert shape.regrouped == ((2, 1), (1, 2))
