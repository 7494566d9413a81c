import math
import random
from fractions import Fraction as F

import mpmath
import pytest

from zetalab.errors import CapabilityError, ConfigError, InputError
from zetalab.lattice import (
    HNFiltration,
    Lattice,
    deg,
    dual,
    hn_filtration,
    is_semistable,
    reduce_rank2,
    rr_check,
    shortest_vector,
    theta_h0,
    unimodular_semistable_check,
    xi_q,
)

# a rational lattice 4e-14 below the hexagonal fundamental-domain corner,
# with covolume exactly 1
A0 = F(2149139863647, 2 * 10 ** 12)
HEX_LIKE = Lattice.from_basis_columns([[A0, 0], [A0 / 2, 1 / A0]])


class TestLatticeConstruction:
    def test_standard(self):
        z3 = Lattice.standard(3)
        assert z3.covolume2 == 1
        assert z3.rank == 3

    def test_gram_must_be_positive_definite(self):
        with pytest.raises(InputError):
            Lattice.from_gram([[1, 2], [2, 1]])

    def test_gram_must_be_symmetric(self):
        with pytest.raises(InputError):
            Lattice.from_gram([[1, 1], [0, 1]])

    def test_rank_cap(self):
        with pytest.raises(CapabilityError):
            Lattice.from_gram([[1 if i == j else 0 for j in range(5)]
                               for i in range(5)])

    def test_covolume2_exact(self):
        lat = Lattice.diagonal([F(1, 2), 2])
        assert lat.covolume2 == 1


class TestDeg:
    def test_standard_lattice(self):
        for n in (1, 2, 3):
            assert deg(Lattice.standard(n)) == 0.0

    def test_scaled_line(self):
        assert abs(deg(Lattice.diagonal([2])) + math.log(2)) < 1e-15

    def test_determinant_one_shear(self):
        assert deg(Lattice.diagonal([3, F(1, 3)])) == 0.0


class TestDual:
    def test_selfdual_standard(self):
        z2 = Lattice.standard(2)
        assert dual(z2).gram == z2.gram

    def test_involution_exact(self):
        rng = random.Random(5)
        for _ in range(20):
            cols = [[F(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(3)]
                    for _ in range(3)]
            try:
                lat = Lattice.from_basis_columns(cols)
            except InputError:
                continue
            back = dual(dual(lat))
            assert back.gram == lat.gram
            assert back.basis == lat.basis

    def test_scaled_line_inverts(self):
        lat = Lattice.diagonal([4])
        assert dual(lat).gram == ((F(1, 16),),)

    def test_deg_antisymmetry(self):
        lat = Lattice.from_gram([[2, 1], [1, 3]])
        assert abs(deg(dual(lat)) + deg(lat)) < 1e-12

    def test_gram_diag_swap(self):
        lat = Lattice.diagonal([F(2) ** F(1), F(1, 2)])
        d = dual(lat)
        assert d.gram == ((F(1, 4), F(0)), (F(0), F(4)))


class TestSemistability:
    def test_standard_semistable_not_stable(self):
        for n in (1, 2, 3):
            assert is_semistable(Lattice.standard(n))

    def test_unbalanced_diagonal_unstable(self):
        assert not is_semistable(Lattice.diagonal([F(1, 2), 2]))

    def test_hexagonal_like_stable(self):
        lam2, _ = shortest_vector(HEX_LIKE)
        assert lam2 ** 2 > HEX_LIKE.covolume2
        assert is_semistable(HEX_LIKE)

    def test_rank3_dual_route(self):
        # very flat lattice: a dense rank-2 sublattice destabilizes
        lat = Lattice.diagonal([1, 1, 9])
        assert not is_semistable(lat)

    def test_semistable_iff_single_hn_step(self):
        rng = random.Random(11)
        samples = [Lattice.standard(2), Lattice.standard(3),
                   Lattice.diagonal([F(1, 2), 2]), Lattice.diagonal([1, 1, 9]),
                   HEX_LIKE]
        for _ in range(15):
            cols = [[F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(3)]
                    for _ in range(3)]
            try:
                samples.append(Lattice.from_basis_columns(cols))
            except InputError:
                pass
        for lat in samples:
            assert is_semistable(lat) == hn_filtration(lat).is_single


class TestHNFiltration:
    def test_two_step_example(self):
        f = hn_filtration(Lattice.diagonal([F(1, 2), 2]))
        assert len(f.steps) == 2
        assert f.steps[0].covol2 == F(1, 4)
        assert f.steps[1].covol2 == F(4)
        assert abs(f.steps[0].slope - math.log(2)) < 1e-12
        assert abs(f.steps[1].slope + math.log(2)) < 1e-12

    def test_covolume_reconstruction(self):
        rng = random.Random(23)
        for _ in range(25):
            n = rng.choice([2, 3])
            cols = [[F(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
                    for _ in range(n)]
            try:
                lat = Lattice.from_basis_columns(cols)
            except InputError:
                continue
            f = hn_filtration(lat)
            total = F(1)
            for step in f.steps:
                total *= step.covol2
            assert total == lat.covolume2
            slopes = [s.slope for s in f.steps]
            assert slopes == sorted(slopes, reverse=True)

    def test_rank3_maximal_destabilizer_is_rank2(self):
        lat = Lattice.diagonal([1, 1, 9])
        f = hn_filtration(lat)
        assert f.steps[0].rank == 2
        assert f.steps[0].covol2 == 1

    def test_rank3_rank1_first(self):
        lat = Lattice.diagonal([F(1, 4), 1, 4])
        f = hn_filtration(lat)
        assert f.steps[0].rank == 1
        assert f.steps[0].covol2 == F(1, 16)


class TestUnimodular:
    def test_standard_lattices(self):
        assert unimodular_semistable_check(Lattice.standard(1)) == (True, True)
        assert unimodular_semistable_check(Lattice.standard(2)) == (True, False)
        assert unimodular_semistable_check(Lattice.standard(3)) == (True, False)

    def test_integral_gram_library(self):
        library = [
            [[1]],
            [[1, 0], [0, 1]],
            [[2, 1], [1, 1]],                      # unimodular, has norm-1 vector
            [[1, 0, 0], [0, 2, 1], [0, 1, 1]],
            [[2, 1, 0], [1, 2, 1], [0, 1, 1]],
        ]
        for gram in library:
            lat = Lattice.from_gram(gram)
            if lat.covolume2 != 1:
                continue
            semi, _ = unimodular_semistable_check(lat)
            assert semi

    def test_rejects_nonintegral(self):
        with pytest.raises(InputError):
            unimodular_semistable_check(Lattice.diagonal([F(1, 2), 2]))


class TestReduceRank2:
    def test_standard(self):
        a, b, ok = reduce_rank2(Lattice.standard(2))
        assert (a, b, ok) == (1.0, 0.0, True)

    def test_hexagonal_corner(self):
        a, b, ok = reduce_rank2(HEX_LIKE)
        assert abs(a - 1.07456993182354) < 1e-9
        assert ok
        assert abs(b - a / 2) < 1e-9

    def test_unstable_lattice_not_in_domain(self):
        a, b, ok = reduce_rank2(Lattice.diagonal([2, F(1, 2)]))
        assert abs(a - 0.5) < 1e-12
        assert not ok

    def test_shear_reduces_to_standard(self):
        lat = Lattice.from_basis_columns([[1, 0], [7, 1]])
        a, b, ok = reduce_rank2(lat)
        assert abs(a - 1) < 1e-12 and abs(b) < 1e-12 and ok

    def test_requires_unit_covolume(self):
        with pytest.raises(InputError):
            reduce_rank2(Lattice.diagonal([2, 2]))


# frozen oracles (direct mpmath theta summation at 30 digits)
H0_L4 = 6.97466038941767e-6
H0_L4_DUAL = 0.693154155220335


class TestTheta:
    def test_worked_example(self):
        lat = Lattice.diagonal([2])
        t = theta_h0(lat, 1e-12)
        assert abs(t.value - H0_L4) < 1e-12
        assert t.tail_bound <= 1e-12

    def test_worked_example_dual(self):
        t = theta_h0(dual(Lattice.diagonal([2])), 1e-12)
        assert abs(t.value - H0_L4_DUAL) < 1e-12
        assert round(t.value, 7) == 0.6931542

    def test_unit_line(self):
        t = theta_h0(Lattice.standard(1), 1e-13)
        direct = math.log(1 + 2 * math.exp(-math.pi) + 2 * math.exp(-4 * math.pi)
                          + 2 * math.exp(-9 * math.pi))
        assert abs(t.value - direct) < 1e-12
        assert abs(t.value - 0.08290) < 5e-6

    def test_scaling_monotonicity(self):
        rng = random.Random(7)
        for _ in range(5):
            c = F(rng.randint(2, 5))
            lat = Lattice.diagonal([1, F(3, 2)])
            big = Lattice.diagonal([c, F(3, 2) * c])
            assert theta_h0(big, 1e-10).value < theta_h0(lat, 1e-10).value

    def test_large_shortest_vector_kills_theta(self):
        # only the zero vector survives as the minimum grows
        t = theta_h0(Lattice.diagonal([6]), 1e-14)
        assert 0 <= t.value < 1e-30


class TestRiemannRoch:
    def test_worked_t4(self):
        report = rr_check(Lattice.diagonal([2]), 1e-10)
        assert abs(report.residual) < 1e-10
        assert abs(report.degree + math.log(2)) < 1e-14

    def test_standard_self_dual(self):
        for n in (1, 2, 3):
            report = rr_check(Lattice.standard(n), 1e-12)
            assert report.residual == 0.0

    def test_random_rank2_rank3(self):
        rng = random.Random(31)
        done = 0
        while done < 12:
            n = rng.choice([2, 3])
            cols = [[F(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(n)]
                    for _ in range(n)]
            try:
                lat = Lattice.from_basis_columns(cols)
            except InputError:
                continue
            if not F(1, 16) <= lat.covolume2 <= 16:
                continue
            report = rr_check(lat, 1e-9)
            assert abs(report.residual) < 1e-9
            done += 1

    def test_config_error_on_impossible_tolerance(self):
        with pytest.raises(ConfigError):
            rr_check(Lattice.standard(2), 1e-15)


XI_HALF = -3.97696622550651   # pi^(-1/4) Gamma(1/4) zeta(1/2), mpmath 30 dps


class TestXiQ:
    def test_functional_equation(self):
        for s in (0.3 + 2j, 0.7 - 1.3j, 2.5 + 0.1j, -1.2 + 0.4j, 0.5 + 14j):
            assert abs(xi_q(s) - xi_q(1 - s)) < 1e-10

    def test_half_value_against_independent_route(self):
        assert abs(xi_q(0.5) - XI_HALF) < 1e-8
        with mpmath.workdps(25):
            indep = complex(mpmath.pi ** mpmath.mpf("-0.25")
                            * mpmath.gamma(mpmath.mpf(1) / 4)
                            * mpmath.zeta(mpmath.mpf(1) / 2))
        assert abs(xi_q(0.5) - indep) < 1e-10

    def test_residue_at_one(self):
        # k = 6 would graze the pole guard in floating point; 3..5 suffice
        vals = []
        for k in (3, 4, 5):
            s = 1 + 10.0 ** (-k)
            vals.append(((s - 1) * xi_q(s)).real)
        # Richardson extrapolation with step ratio 10
        extrap = (10 * vals[-1] - vals[-2]) / 9
        assert abs(extrap - 1) < 1e-4

    def test_pole_guard(self):
        with pytest.raises(InputError):
            xi_q(1e-9)
        with pytest.raises(InputError):
            xi_q(1 + 1e-8)

    def test_known_zero_location(self):
        # xi(1/2 + it) is real; it changes sign across the first zero
        lo = xi_q(0.5 + 14.0j)
        hi = xi_q(0.5 + 14.3j)
        assert abs(lo.imag) < 1e-12 and abs(hi.imag) < 1e-12
        assert lo.real * hi.real < 0
