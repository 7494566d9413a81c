import random
from fractions import Fraction

import numpy as np
import pytest

from zetalab.errors import InputError
from zetalab.exact import (
    Poly,
    RatFunc,
    Series,
    decimate,
    fe_transform_check,
    poly_from_power_sums,
    power_sums_from_poly,
    rf_from_series,
    series_exp_from_power_sums,
)


def longdiv_series(num, den, order):
    """Independent oracle: power series of num/den by explicit long division."""
    out = []
    rem = list(num) + [Fraction(0)] * order
    d0 = den[0]
    for k in range(order):
        c = Fraction(rem[k], 1) / d0
        out.append(c)
        for j, dj in enumerate(den):
            if k + j < len(rem):
                rem[k + j] -= c * dj
    return out


def rand_poly(rng, deg, bound=9):
    return Poly([Fraction(rng.randint(-bound, bound), rng.randint(1, 4))
                 for _ in range(deg + 1)])


class TestPolyPlumbing:
    def test_normalization_strips_trailing_zeros(self):
        assert Poly([1, 2, 0, 0]).coeffs == (Fraction(1), Fraction(2))
        assert Poly([0, 0]).is_zero()
        assert Poly().degree == -1

    def test_divmod_roundtrip(self):
        rng = random.Random(7)
        for _ in range(40):
            a = rand_poly(rng, rng.randint(0, 6))
            b = rand_poly(rng, rng.randint(0, 4))
            if b.is_zero():
                continue
            q, r = a.divmod(b)
            assert q * b + r == a
            assert r.is_zero() or r.degree < b.degree

    def test_gcd(self):
        a = Poly([1, 1])          # 1 + t
        b = Poly([1, 2, 1])       # (1+t)^2
        g = a.gcd(b)
        assert g == Poly([1, 1])
        assert Poly([1]).gcd(Poly([2, 3])) == Poly([1])

    def test_eval(self):
        p = Poly([1, 3, 5])
        assert p(Fraction(1, 5)) == Fraction(1) + Fraction(3, 5) + Fraction(5, 25)


class TestRatFuncPlumbing:
    def test_normalization_monic_and_coprime(self):
        # (2 + 2t) / (2 - 2t^2) = 1 / (1 - t)
        f = RatFunc(Poly([2, 2]), Poly([2, 0, -2]))
        assert f.den == Poly([1, -1]).monic() or f.den.coeffs[-1] == 1
        assert f.num.gcd(f.den).degree <= 0
        assert f(Fraction(1, 2)) == Fraction(2)

    def test_arithmetic(self):
        one_minus_t = RatFunc(Poly([1]), Poly([1, -1]))
        t = RatFunc.from_poly(Poly([0, 1]))
        s = one_minus_t * t
        assert s(Fraction(1, 3)) == Fraction(1, 3) / Fraction(2, 3)

    def test_series_matches_longdiv(self):
        rng = random.Random(11)
        for _ in range(25):
            num = rand_poly(rng, rng.randint(0, 4))
            den = rand_poly(rng, rng.randint(0, 4))
            if den.is_zero() or den[0] == 0:
                continue
            f = RatFunc(num, den)
            s = f.series(9)
            oracle = longdiv_series(list(f.num.coeffs) or [Fraction(0)],
                                    list(f.den.coeffs), 9)
            assert list(s.coeffs) == oracle


class TestSeriesPlumbing:
    def test_order_is_min_of_operands(self):
        a = Series([1, 2, 3], 3)
        b = Series([1, 1], 2)
        assert (a + b).order == 2
        assert (a * b).order == 2

    def test_log_exp_inverse_roundtrip(self):
        rng = random.Random(3)
        for _ in range(20):
            coeffs = [Fraction(1)] + [Fraction(rng.randint(-5, 5), rng.randint(1, 3))
                                      for _ in range(7)]
            s = Series(coeffs, 8)
            assert s.log().exp() == s
            assert (s * s.inverse()) == Series.one(8)

    def test_exp_needs_zero_constant(self):
        with pytest.raises(InputError):
            Series([1, 1], 2).exp()
        with pytest.raises(InputError):
            Series([2, 1], 2).log()


class TestSeriesExpFromPowerSums:
    def test_all_zero_counts(self):
        s = series_exp_from_power_sums([0, 0, 0, 0], 5)
        assert list(s.coeffs) == [1, 0, 0, 0, 0]

    def test_projective_line_over_f2(self):
        # counts 2^m + 1 give 1/((1-t)(1-2t))
        counts = [2 ** m + 1 for m in range(1, 4)]
        s = series_exp_from_power_sums(counts, 4)
        oracle = RatFunc(Poly([1]), Poly([1, -1]) * Poly([1, -2])).series(4)
        assert s == oracle
        assert list(s.coeffs) == [1, 3, 7, 15]

    def test_elliptic_counts_q5(self):
        s = series_exp_from_power_sums([9, 27, 108], 4)
        oracle = longdiv_series([Fraction(1), Fraction(3), Fraction(5)],
                                list((Poly([1, -1]) * Poly([1, -5])).coeffs), 4)
        assert list(s.coeffs) == oracle

    def test_insufficient_counts(self):
        with pytest.raises(InputError):
            series_exp_from_power_sums([1], 4)


class TestPowerSums:
    def test_constant_poly_has_no_roots(self):
        assert power_sums_from_poly(Poly([1]), 6) == [0] * 6

    def test_elliptic_numerator(self):
        p1, p2, p3 = power_sums_from_poly(Poly([1, 3, 5]), 3)
        assert (p1, p2, p3) == (-3, -1, 18)
        # numeric cross-check: reciprocal roots solve y^2 + 3y + 5 = 0
        roots = np.roots([1, 3, 5])
        for m, exact in ((1, p1), (2, p2), (3, p3)):
            assert abs(sum(r ** m for r in roots) - float(exact)) < 1e-12

    def test_split_quadratic(self):
        p = Poly([1, -2]) * Poly([1, -3])
        assert power_sums_from_poly(p, 2) == [5, 13]

    def test_requires_unit_constant(self):
        with pytest.raises(InputError):
            power_sums_from_poly(Poly([2, 1]), 2)

    def test_poly_from_power_sums_roundtrip(self):
        rng = random.Random(19)
        for _ in range(20):
            p = Poly([1] + [Fraction(rng.randint(-4, 4)) for _ in range(4)])
            ps = power_sums_from_poly(p, p.degree)
            assert poly_from_power_sums(ps, p.degree) == p


def fe_transform(p, q, rg):
    """q^rg * t^(2rg) * p(1/(qt)), as an exact polynomial (test oracle)."""
    out = [Fraction(0)] * (2 * rg + 1)
    for i, c in enumerate(p.coeffs):
        out[2 * rg - i] = c * Fraction(q) ** (rg - i)
    return Poly(out)


class TestFETransformCheck:
    def test_rank2_paper_numerator(self):
        q = 5
        p = Poly([1, q - 1, 2 * q - 4, q * q - q, q * q])
        assert fe_transform_check(p, q, 2)
        assert fe_transform(p, q, 2) == p

    def test_mismatch(self):
        assert not fe_transform_check(Poly([1, 1]), 5, 1)

    def test_elliptic(self):
        p = Poly([1, 3, 5])
        assert fe_transform_check(p, 5, 1)
        assert fe_transform(p, 5, 1) == p

    def test_involutive_consistency(self):
        rng = random.Random(5)
        for _ in range(20):
            rg = rng.randint(1, 3)
            q = rng.choice([2, 3, 5, 7])
            lower = [Fraction(rng.randint(-9, 9)) for _ in range(rg + 1)]
            lower[0] = Fraction(1)
            coeffs = lower + [lower[rg - 1 - j] * Fraction(q) ** (j + 1)
                              for j in range(rg)]
            p = Poly(coeffs)
            assert fe_transform_check(p, q, rg)
            assert fe_transform(p, q, rg) == p


class TestDecimate:
    def test_basic(self):
        assert list(decimate(Series([1, 2, 3, 4, 5], 5), 2).coeffs) == [1, 3, 5]

    def test_identity(self):
        s = Series([1, 2, 3], 3)
        assert decimate(s, 1) == s

    def test_even_coefficients_of_projective_line(self):
        s = RatFunc(Poly([1]), Poly([1, -1]) * Poly([1, -2])).series(6)
        assert list(decimate(s, 2).coeffs) == [1, 7, 31]

    def test_product_with_sparse_factor(self):
        rng = random.Random(23)
        for _ in range(20):
            n = rng.randint(2, 3)
            order = 12
            a = Series([Fraction(rng.randint(-5, 5)) for _ in range(order)], order)
            sparse = [Fraction(0)] * order
            for k in range(0, order, n):
                sparse[k] = Fraction(rng.randint(-5, 5))
            b = Series(sparse, order)
            b_compressed = decimate(b, n)
            assert decimate(a * b, n) == decimate(a, n) * b_compressed


class TestRfFromSeries:
    def test_roundtrip(self):
        f = RatFunc(Poly([1, 3, 5]), Poly([1, -1]) * Poly([1, -5]))
        s = f.series(12)
        g = rf_from_series(s, f.den, 2)
        assert g == f

    def test_rejects_wrong_shape(self):
        s = RatFunc(Poly([1, 0, 0, 7]), Poly([1, -1])).series(12)
        with pytest.raises(InputError):
            rf_from_series(s, Poly([1, -1]), 2)


class TestRoundTripInvariant:
    def test_counts_to_series_roundtrip(self):
        # N_m = q^m + 1 - p_m reproduces P/((1-t)(1-qt)) exactly
        rng = random.Random(31)
        for _ in range(15):
            q = rng.choice([2, 3, 5, 7, 11])
            g = rng.randint(1, 3)
            # build a degree-2g P with P(0)=1 satisfying the FE constraint
            lower = [Fraction(1)] + [Fraction(rng.randint(-6, 6)) for _ in range(g)]
            coeffs = lower + [lower[g - 1 - j] * Fraction(q) ** (j + 1)
                              for j in range(g)]
            p = Poly(coeffs)
            order = 10
            psums = power_sums_from_poly(p, order)
            counts = [Fraction(q) ** m + 1 - psums[m - 1] for m in range(1, order + 1)]
            s = series_exp_from_power_sums(counts, order)
            oracle = RatFunc(p, Poly([1, -1]) * Poly([1, -q])).series(order)
            assert s == oracle

    def test_referential_transparency(self):
        a = series_exp_from_power_sums([9, 27, 108], 4)
        b = series_exp_from_power_sums([9, 27, 108], 4)
        assert a == b and a.coeffs == b.coeffs
