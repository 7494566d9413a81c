"""Artin zeta functions of curves over finite fields.

A `ZetaCurve` packages (q, g, P) with Z(t) = P(t)/((1-t)(1-qt)).  All
identity-level operations (functional equation, base extension, the
roots-of-unity reciprocity law, point-count recovery) run through exact
power sums of the numerator's reciprocal roots; no root is ever
extracted on the exact path.  Only the genus >= 2 Riemann-hypothesis
modulus check is numeric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from zetalab.errors import InputError, NumericError
from zetalab.exact import (
    Poly,
    RatFunc,
    Series,
    decimate,
    fe_transform_check,
    poly_from_power_sums,
    power_sums_from_poly,
    rat,
    series_exp_from_power_sums,
)


@dataclass(frozen=True)
class ZetaCurve:
    """Zeta datum of a curve: base size q, genus g, numerator polynomial."""

    q: int
    g: int
    P: Poly = field(default_factory=Poly.one)

    def __post_init__(self):
        if self.q < 2:
            raise InputError("q must be a prime power >= 2")
        if self.g < 0:
            raise InputError("genus must be >= 0")
        if self.P[0] != 1:
            raise InputError("numerator must have constant term 1")
        if self.P.degree != (2 * self.g if self.g else -1) and not (
                self.g == 0 and self.P == Poly.one()):
            raise InputError(f"numerator degree must be 2g = {2 * self.g}")
        for c in self.P.coeffs:
            if c.denominator != 1:
                raise InputError("numerator coefficients must be integers")
        if not fe_transform_check(self.P, self.q, self.g):
            raise InputError("numerator violates the functional equation")
        if self.g == 1:
            a = self.q + 1 - (self.q + 1 + int(self.P[1]))
            if a * a > 4 * self.q:
                raise InputError("counts violate the Hasse bound")

    @property
    def zfunc(self) -> RatFunc:
        return RatFunc(self.P, Poly([1, -1]) * Poly([1, -self.q]))

    def zseries(self, order: int) -> Series:
        return self.zfunc.series(order)

    def power_sums(self, m_max: int) -> list[Fraction]:
        return power_sums_from_poly(self.P, m_max)


def artin_zeta_from_counts(q: int, g: int, counts: Sequence[int]) -> ZetaCurve:
    """Build the zeta datum from N_1..N_g (extra counts are cross-checked).

    The lower numerator coefficients are forced by the counts through
    exp(sum N_m t^m/m) * (1-t)(1-qt); the upper half is forced by
    a(2g-i) = a(i) * q^(g-i).
    """
    if g < 1:
        raise InputError("use genus >= 1 (genus 0 has an empty numerator)")
    if len(counts) < g:
        raise InputError(f"need at least N_1..N_{g}")
    order = g + 1
    zser = series_exp_from_power_sums([rat(c) for c in counts[:g]], order)
    pser = zser * Series.from_poly(Poly([1, -1]) * Poly([1, -q]), order)
    lower = list(pser.coeffs)
    coeffs = lower + [lower[g - 1 - j] * rat(q) ** (j + 1) for j in range(g)]
    for c in coeffs:
        if c.denominator != 1:
            raise InputError("counts do not come from a curve (non-integral P)")
    zc = ZetaCurve(q, g, Poly(coeffs))
    for m, n_claimed in enumerate(counts, start=1):
        if nm(zc, m) != n_claimed:
            raise InputError(
                f"over-determined counts are inconsistent: N_{m} should be "
                f"{nm(zc, m)}, got {n_claimed}")
    return zc


def elliptic_zeta(q: int, n1: int) -> ZetaCurve:
    """Genus-1 shortcut: P = 1 - a t + q t^2 with a = q + 1 - N_1."""
    return artin_zeta_from_counts(q, 1, [n1])


def nm(zc: ZetaCurve, m: int) -> int:
    """N_m = q^m + 1 - (sum of m-th powers of reciprocal roots)."""
    if m < 1:
        raise InputError("m must be >= 1")
    p_m = zc.power_sums(m)[m - 1]
    val = rat(zc.q) ** m + 1 - p_m
    if val.denominator != 1 or val < 0:
        raise InputError(f"invalid zeta datum: N_{m} = {val}")
    return int(val)


def base_extend(zc: ZetaCurve, n: int) -> ZetaCurve:
    """The zeta datum over F_{q^n}: reciprocal roots taken to the n-th power."""
    if n < 1:
        raise InputError("n must be >= 1")
    if n == 1:
        return zc
    if zc.g == 0:
        return ZetaCurve(zc.q ** n, 0, Poly.one())
    psums = zc.power_sums(2 * zc.g * n)
    extended = [psums[n * k - 1] for k in range(1, 2 * zc.g + 1)]
    return ZetaCurve(zc.q ** n, zc.g, poly_from_power_sums(extended, 2 * zc.g))


def reciprocity_check(zc: ZetaCurve, n: int, order: int) -> bool:
    """Roots-of-unity product law, checked through log-series decimation.

    The product of Z over the n-th root-of-unity twists has logarithm
    n * (every n-th coefficient of log Z), so the law holds iff that
    decimation matches log of the base-extended Z.  Exact, and no root of
    unity is ever materialized.
    """
    if n < 1 or order < 1:
        raise InputError("n and order must be >= 1")
    big = zc.zseries(order * n + 1).log()
    left = decimate(big, n).scale(n)          # coefficient k is n*N_{nk}/(nk)
    right = base_extend(zc, n).zseries(order + 1).log()
    common = min(left.order, right.order)
    return left.truncate(common) == right.truncate(common)


def rh_check(zc: ZetaCurve, tol: float = 1e-9) -> bool:
    """Riemann hypothesis for the curve: all reciprocal roots have |w|^2 = q.

    Genus 1 is decided exactly by the integer inequality (q+1-N_1)^2 <= 4q;
    higher genus locates the roots numerically (companion matrix) and
    checks | |w|^2 - q | <= tol.
    """
    if tol <= 0:
        raise InputError("tolerance must be positive")
    if zc.g == 0:
        return True
    if zc.g == 1:
        a = -int(zc.P[1])
        return a * a <= 4 * zc.q
    # deflate multiplicities exactly first: companion eigenvalues only reach
    # sqrt(eps) accuracy at a multiple root, which would defeat the tolerance
    squarefree = zc.P // zc.P.gcd(zc.P.derivative())
    # np.roots wants descending powers; the roots of P are 1/w_i
    roots = np.roots([float(c) for c in reversed(squarefree.coeffs)])
    if len(roots) != squarefree.degree:
        raise NumericError("root finder lost roots")
    if any(abs(r) < 1e-300 for r in roots):
        raise NumericError("spurious zero root")
    return all(abs(abs(1 / r) ** 2 - zc.q) <= tol for r in roots)


def fe_check_zeta(zc: ZetaCurve) -> bool:
    """Functional-equation check in the zeta normalization (N(K) = q^(2g-2))."""
    return fe_transform_check(zc.P, zc.q, zc.g)
