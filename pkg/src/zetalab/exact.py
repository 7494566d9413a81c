"""Exact rational substrate: dense polynomials, rational functions, truncated series.

All coefficients are `fractions.Fraction`; nothing here ever rounds.  A
polynomial is a dense ascending coefficient tuple with the trailing zero
coefficients stripped, a rational function keeps its denominator monic and
coprime to the numerator, and a truncated power series carries its
truncation order as explicit state (mixing orders takes the minimum).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from zetalab.errors import InputError

Rat = Fraction
RatLike = Union[int, Fraction]


def rat(x: RatLike) -> Fraction:
    """Coerce an int/Fraction (or exact decimal string) to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InputError(f"not an exact rational: {x!r}")


def _strip(coeffs: Sequence[Fraction]) -> tuple[Fraction, ...]:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class Poly:
    """Dense univariate polynomial over Q, ascending coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RatLike] = ()):
        self.coeffs: tuple[Fraction, ...] = _strip([rat(c) for c in coeffs])

    @staticmethod
    def zero() -> "Poly":
        return Poly()

    @staticmethod
    def one() -> "Poly":
        return Poly([1])

    @staticmethod
    def x(power: int = 1, coeff: RatLike = 1) -> "Poly":
        return Poly([0] * power + [coeff])

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports -1."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ci in enumerate(a):
            if ci:
                for j, cj in enumerate(b):
                    out[i + j] += ci * cj
        return Poly(out)

    def scale(self, c: RatLike) -> "Poly":
        c = rat(c)
        return Poly([c * ci for ci in self.coeffs])

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise InputError("negative polynomial power")
        result = Poly.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, x: RatLike) -> Fraction:
        x = rat(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise InputError("polynomial division by zero")
        num = list(self.coeffs)
        d = other.degree
        lead = other.coeffs[-1]
        if len(num) <= d:
            return Poly(), self
        quot = [Fraction(0)] * (len(num) - d)
        for i in range(len(num) - d - 1, -1, -1):
            c = num[i + d] / lead
            quot[i] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    num[i + j] -= c * oc
        return Poly(quot), Poly(num[:d])

    def __floordiv__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[0]

    def __mod__(self, other: "Poly") -> "Poly":
        return self.divmod(other)[1]

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return Poly([c / lead for c in self.coeffs])

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    def derivative(self) -> "Poly":
        return Poly([i * c for i, c in enumerate(self.coeffs)][1:])

    def compose_scale(self, c: RatLike) -> "Poly":
        """Return p(c*t)."""
        c = rat(c)
        power = Fraction(1)
        out = []
        for coeff in self.coeffs:
            out.append(coeff * power)
            power *= c
        return Poly(out)

    def __repr__(self) -> str:
        return f"Poly({[str(c) for c in self.coeffs]})"


class RatFunc:
    """Rational function num/den, den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise InputError("rational function with zero denominator")
        g = num.gcd(den)
        if not g.is_zero() and g.degree > 0:
            num = num // g
            den = den // g
        lead = den.coeffs[-1]
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        self.num = num
        self.den = den

    @staticmethod
    def from_poly(p: Poly) -> "RatFunc":
        return RatFunc(p, Poly.one())

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __add__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.num.is_zero():
            raise InputError("division by the zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def scale(self, c: RatLike) -> "RatFunc":
        return RatFunc(self.num.scale(c), self.den)

    def __call__(self, x: RatLike) -> Fraction:
        x = rat(x)
        d = self.den(x)
        if d == 0:
            raise InputError(f"pole of rational function at {x}")
        return self.num(x) / d

    def eval_complex(self, z: complex) -> complex:
        return self.num.eval_complex(z) / self.den.eval_complex(z)

    def series(self, order: int) -> "Series":
        """Power-series expansion at t=0 to the given truncation order."""
        if self.den[0] == 0:
            raise InputError("rational function has a pole at t=0")
        return Series.from_poly(self.num, order) * Series.from_poly(self.den, order).inverse()

    def __repr__(self) -> str:
        return f"RatFunc({self.num!r}, {self.den!r})"


class Series:
    """Truncated power series: `order` coefficients, order is exclusive."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[RatLike], order: int | None = None):
        cs = [rat(c) for c in coeffs]
        if order is None:
            order = len(cs)
        if order < 1:
            raise InputError("series order must be >= 1")
        if len(cs) < order:
            cs = cs + [Fraction(0)] * (order - len(cs))
        self.coeffs = tuple(cs[:order])
        self.order = order

    @staticmethod
    def from_poly(p: Poly, order: int) -> "Series":
        return Series(p.coeffs, order)

    @staticmethod
    def zero(order: int) -> "Series":
        return Series([], order)

    @staticmethod
    def one(order: int) -> "Series":
        return Series([1], order)

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Series):
            return self.coeffs == other.coeffs and self.order == other.order
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.coeffs, self.order))

    def truncate(self, order: int) -> "Series":
        if order > self.order:
            raise InputError("cannot extend a truncated series")
        return Series(self.coeffs[:order], order)

    def _common(self, other: "Series") -> int:
        return min(self.order, other.order)

    def __add__(self, other: "Series") -> "Series":
        n = self._common(other)
        return Series([self.coeffs[i] + other.coeffs[i] for i in range(n)], n)

    def __sub__(self, other: "Series") -> "Series":
        n = self._common(other)
        return Series([self.coeffs[i] - other.coeffs[i] for i in range(n)], n)

    def __neg__(self) -> "Series":
        return Series([-c for c in self.coeffs], self.order)

    def __mul__(self, other: "Series") -> "Series":
        n = self._common(other)
        out = [Fraction(0)] * n
        for i in range(n):
            ci = self.coeffs[i]
            if ci:
                for j in range(n - i):
                    out[i + j] += ci * other.coeffs[j]
        return Series(out, n)

    def scale(self, c: RatLike) -> "Series":
        c = rat(c)
        return Series([c * ci for ci in self.coeffs], self.order)

    def inverse(self) -> "Series":
        """Multiplicative inverse; requires a unit constant term."""
        if self.coeffs[0] == 0:
            raise InputError("series inverse needs nonzero constant term")
        n = self.order
        inv = [Fraction(0)] * n
        inv[0] = 1 / self.coeffs[0]
        for k in range(1, n):
            acc = Fraction(0)
            for j in range(1, k + 1):
                acc += self.coeffs[j] * inv[k - j]
            inv[k] = -acc / self.coeffs[0]
        return Series(inv, n)

    def log(self) -> "Series":
        """log of a series with constant term 1."""
        if self.coeffs[0] != 1:
            raise InputError("series log needs constant term 1")
        n = self.order
        lg = [Fraction(0)] * n
        # k*S_k = sum_{j=1..k} j*L_j*S_{k-j}, solved for L_k
        for k in range(1, n):
            acc = Fraction(k) * self.coeffs[k]
            for j in range(1, k):
                acc -= j * lg[j] * self.coeffs[k - j]
            lg[k] = acc / k
        return Series(lg, n)

    def exp(self) -> "Series":
        """exp of a series with constant term 0."""
        if self.coeffs[0] != 0:
            raise InputError("series exp needs zero constant term")
        n = self.order
        ex = [Fraction(0)] * n
        ex[0] = Fraction(1)
        for k in range(1, n):
            acc = Fraction(0)
            for j in range(1, k + 1):
                acc += j * self.coeffs[j] * ex[k - j]
            ex[k] = acc / k
        return Series(ex, n)

    def __repr__(self) -> str:
        return f"Series({[str(c) for c in self.coeffs]}, order={self.order})"


def decimate(s: Series, n: int) -> Series:
    """Keep every n-th coefficient: result[k] = s[n*k]; order = floor(order/n)."""
    if n < 1:
        raise InputError("decimation step must be >= 1")
    if n == 1:
        return s
    out = [s.coeffs[i] for i in range(0, s.order, n)]
    return Series(out, len(out))


def series_exp_from_power_sums(counts: Sequence[RatLike], order: int) -> Series:
    """exp(sum_{m=1}^{order-1} counts[m-1] * t^m / m), truncated to `order`.

    This is the generating identity turning point counts into a zeta
    series; the constant term is always 1.
    """
    if order < 1:
        raise InputError("order must be >= 1")
    if len(counts) < order - 1:
        raise InputError(
            f"need at least {order - 1} power sums, got {len(counts)}")
    lg = [Fraction(0)] * order
    for m in range(1, order):
        lg[m] = rat(counts[m - 1]) / m
    return Series(lg, order).exp()


def power_sums_from_poly(p: Poly, m_max: int) -> list[Fraction]:
    """Power sums of the reciprocal roots of p, for m = 1..m_max.

    p must be normalized with p(0) = 1, i.e. p(t) = prod_i (1 - w_i t);
    returns [sum_i w_i^m for m in 1..m_max] without any root extraction
    (Newton's identities via the log derivative).
    """
    if p[0] != 1:
        raise InputError("power sums require p(0) = 1")
    lg = Series.from_poly(p, m_max + 1).log()
    return [-m * lg[m] for m in range(1, m_max + 1)]


def poly_from_power_sums(psums: Sequence[RatLike], degree: int) -> Poly:
    """Inverse of power_sums_from_poly: the unique p with p(0)=1, deg <= degree.

    Needs power sums for m = 1..degree.
    """
    if len(psums) < degree:
        raise InputError(f"need {degree} power sums, got {len(psums)}")
    lg = [Fraction(0)] * (degree + 1)
    for m in range(1, degree + 1):
        lg[m] = -rat(psums[m - 1]) / m
    return Poly(Series(lg, degree + 1).exp().coeffs)


def fe_transform_check(p: Poly, q: RatLike, rg: int) -> bool:
    """True iff p(t) = q^rg * t^(2rg) * p(1/(qt)) as an exact identity.

    Coefficientwise this is a(2rg-i) = a(i) * q^(rg-i) for 0 <= i <= rg,
    with coefficients beyond deg p read as zero.
    """
    q = rat(q)
    if p.degree > 2 * rg:
        raise InputError("degree exceeds 2*rg")
    for i in range(rg + 1):
        if p[2 * rg - i] != p[i] * q ** (rg - i):
            return False
    return True


def rf_from_series(s: Series, den: Poly, num_degree_bound: int) -> RatFunc:
    """Reconstruct the rational function num/den matching a series.

    The numerator is s*den truncated; it must have degree within the bound
    and the product's remaining coefficients must vanish through the
    series order, otherwise the series is not of the claimed shape.
    """
    prod = s * Series.from_poly(den, s.order)
    if num_degree_bound >= s.order:
        raise InputError("series too short to certify the numerator degree")
    for i in range(num_degree_bound + 1, prod.order):
        if prod[i] != 0:
            raise InputError(
                f"series is not P/den with deg P <= {num_degree_bound}: "
                f"residual at t^{i}")
    num = Poly(prod.coeffs[:num_degree_bound + 1])
    return RatFunc(num, den)
