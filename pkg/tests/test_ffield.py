import pytest

from zetalab.errors import CapabilityError, InputError, ResourceError
from zetalab.ffield import (
    FieldSpec,
    GroupStructure,
    WeierstrassCurve,
    count_points,
    group_structure,
    norm_kernel_size,
    smallest_irreducible,
    torsion_count,
    trace_of_frobenius,
)

F5 = FieldSpec(5)
E_A1B1 = WeierstrassCurve(F5, 1, 1)   # y^2 = x^3 + x + 1
E_A4B0 = WeierstrassCurve(F5, 4, 0)   # y^2 = x^3 + 4x


class TestFieldSpec:
    def test_rejects_composite_characteristic(self):
        with pytest.raises(InputError):
            FieldSpec(6)

    def test_extension_modulus_is_deterministic(self):
        f = FieldSpec(5, 2)
        assert f.modulus == smallest_irreducible(5, 2)
        assert f.modulus == FieldSpec(5, 2).modulus

    def test_modulus_is_irreducible(self):
        # x^2 - 1 splits; the constructor must refuse it
        with pytest.raises(InputError):
            FieldSpec(5, 2, (4, 0, 1))

    def test_extension_field_arithmetic(self):
        f = FieldSpec(5, 2)
        elems = list(f.elements())
        assert len(elems) == 25
        for a in elems:
            if a == ():
                continue
            assert f.mul(a, f.inv(a)) == f.one()

    def test_inverse_exhaustive_f27_style(self):
        f = FieldSpec(7, 3)
        probe = [f.from_int(3), (1, 2), (0, 0, 4), (6, 6, 6)]
        for a in probe:
            assert f.mul(a, f.inv(a)) == f.one()


class TestCountPoints:
    def test_f5_curve_a1b1(self):
        assert count_points(E_A1B1, 1) == 9

    def test_f5_curve_a4b0(self):
        assert count_points(E_A4B0, 1) == 8

    def test_f25_extension(self):
        assert count_points(E_A1B1, 2) == 27

    def test_budget(self):
        big = WeierstrassCurve(FieldSpec(9973), 1, 1)
        with pytest.raises(ResourceError):
            count_points(big, 2)

    def test_hasse_bound_over_gallery(self):
        for p in (5, 7, 11, 13):
            fld = FieldSpec(p)
            for a in range(p):
                for b in range(p):
                    if (4 * a ** 3 + 27 * b ** 2) % p == 0:
                        continue
                    n1 = count_points(WeierstrassCurve(fld, a, b), 1)
                    assert (p + 1 - n1) ** 2 <= 4 * p

    def test_trace_of_frobenius_matches_count(self):
        assert trace_of_frobenius(5, 1, 1) == 5 + 1 - 9
        assert trace_of_frobenius(5, 4, 0) == -2

    def test_curves_only_over_prime_fields(self):
        with pytest.raises(CapabilityError):
            WeierstrassCurve(FieldSpec(5, 2), 1, 1)

    def test_small_characteristic_rejected(self):
        with pytest.raises(InputError):
            WeierstrassCurve(FieldSpec(3), 1, 1)


class TestGroupStructure:
    def test_full_two_torsion_curve(self):
        assert group_structure(E_A4B0) == GroupStructure(2, 4)

    def test_cyclic_curve(self):
        assert group_structure(E_A1B1) == GroupStructure(1, 9)

    def test_prime_order_is_cyclic(self):
        # y^2 = x^3 + 2 over F_7 has 9 points; find one with prime order instead
        for p, a, b in ((5, 2, 1), (7, 1, 3), (11, 1, 1)):
            curve = WeierstrassCurve(FieldSpec(p), a, b)
            n = count_points(curve, 1)
            gs = group_structure(curve)
            assert gs.order == n
            if _is_prime(n):
                assert gs == GroupStructure(1, n)

    def test_weil_constraint(self):
        for curve in (E_A1B1, E_A4B0):
            gs = group_structure(curve)
            assert (curve.p - 1) % gs.n1 == 0
            assert gs.n2 % gs.n1 == 0


def _is_prime(n):
    return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class TestTorsionCount:
    def test_examples(self):
        assert torsion_count(GroupStructure(2, 4), 2) == 4
        assert torsion_count(GroupStructure(1, 9), 2) == 1
        assert torsion_count(GroupStructure(1, 9), 3) == 3

    def test_divisibility_invariants(self):
        for gs in (GroupStructure(2, 4), GroupStructure(1, 9), GroupStructure(3, 3)):
            for m in range(1, 8):
                t = torsion_count(gs, m)
                assert m * m % t == 0
                assert gs.order % t == 0


class TestNormKernel:
    def test_kernel_size_equals_point_count_ratio(self):
        # #ker(trace: E(F_{q^2}) -> E(F_q)) = N_2 / N_1
        for curve in (E_A1B1, E_A4B0):
            n1 = count_points(curve, 1)
            n2 = count_points(curve, 2)
            assert norm_kernel_size(curve, 2) == n2 // n1
