"""Lattices over the rationals: stability, filtrations, theta cohomology.

A lattice is held by its exact rational Gram matrix (a basis matrix, when
one is supplied, stays available for duals and reduction).  Stability
comparisons never leave exact arithmetic: they compare squared covolumes
raised to integer powers.  The analytic layer on top -- theta sums with
certified tail bounds, the Riemann-Roch residual over Q, and the
completed zeta evaluation -- is the only place floating point appears.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as iproduct
from typing import Sequence

import mpmath
import numpy as np

from zetalab.errors import CapabilityError, ConfigError, InputError, NumericError
from zetalab.exact import rat

Matrix = tuple[tuple[Fraction, ...], ...]


def _mat(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(rat(x) for x in row) for row in rows)


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k, m = len(a), len(b), len(b[0])
    return tuple(tuple(sum(a[i][l] * b[l][j] for l in range(k))
                       for j in range(m)) for i in range(n))


def _transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def _identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def _det(a: Matrix) -> Fraction:
    n = len(a)
    m = [list(row) for row in a]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def _inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(row) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise InputError("singular matrix")
        m[col], m[pivot] = m[pivot], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(tuple(row[n:]) for row in m)


def _log_fraction(x: Fraction) -> float:
    # avoids overflow for very large numerators/denominators
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class Lattice:
    """Full-rank lattice with exact rational Gram data.

    `basis` columns are basis vectors when present; Gram-only lattices
    (e.g. integral Gram inputs) support every operation except recovering
    explicit coordinates.
    """

    gram: Matrix
    basis: Matrix | None = None

    def __post_init__(self):
        n = len(self.gram)
        if n < 1 or n > 4:
            raise CapabilityError("rank must be between 1 and 4")
        if any(len(row) != n for row in self.gram):
            raise InputError("Gram matrix must be square")
        if self.gram != _transpose(self.gram):
            raise InputError("Gram matrix must be symmetric")
        for k in range(1, n + 1):
            minor = tuple(row[:k] for row in self.gram[:k])
            if _det(minor) <= 0:
                raise InputError("Gram matrix must be positive definite")
        if self.basis is not None and _det(self.basis) == 0:
            raise InputError("basis must be nonsingular")

    @staticmethod
    def from_basis_columns(cols: Sequence[Sequence]) -> "Lattice":
        basis = _transpose(_mat(cols))      # store as matrix with these columns
        gram = _mat_mul(_transpose(basis), basis)
        return Lattice(gram, basis)

    @staticmethod
    def from_gram(gram: Sequence[Sequence]) -> "Lattice":
        return Lattice(_mat(gram))

    @staticmethod
    def standard(n: int) -> "Lattice":
        return Lattice(_identity(n), _identity(n))

    @staticmethod
    def diagonal(entries: Sequence) -> "Lattice":
        entries = [rat(e) for e in entries]
        n = len(entries)
        basis = tuple(tuple(entries[i] if i == j else Fraction(0)
                            for j in range(n)) for i in range(n))
        return Lattice(_mat_mul(basis, basis), basis)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def covolume2(self) -> Fraction:
        return _det(self.gram)

    @property
    def covolume(self) -> float:
        return math.exp(0.5 * _log_fraction(self.covolume2))

    def norm2(self, coeffs: Sequence[int]) -> Fraction:
        g = self.gram
        n = self.rank
        return sum(g[i][j] * coeffs[i] * coeffs[j]
                   for i in range(n) for j in range(n))


def deg(lat: Lattice) -> float:
    """Degree of the lattice, deg = -log covolume (exact covolume^2 input)."""
    return -0.5 * _log_fraction(lat.covolume2)


def dual(lat: Lattice) -> Lattice:
    """Dual lattice: Gram inverts exactly; the basis (when present) maps to
    its inverse transpose, so dual(dual(L)) == L on the nose."""
    gram = _inverse(lat.gram)
    basis = _transpose(_inverse(lat.basis)) if lat.basis is not None else None
    return Lattice(gram, basis)


# ---------------------------------------------------------------------------
# shortest vectors and stability

def _enumeration_box(gram: Matrix, bound: Fraction) -> list[int]:
    ginv = _inverse(gram)
    out = []
    for i in range(len(gram)):
        # |x_i| <= sqrt(bound * (G^-1)_ii)
        val = bound * ginv[i][i]
        out.append(math.isqrt(val.numerator // val.denominator) + 1)
    return out


def shortest_vector(lat: Lattice) -> tuple[Fraction, tuple[int, ...]]:
    """Minimal nonzero squared length and a coefficient vector achieving it.

    Box enumeration with exact norms; the initial bound is the smallest
    Gram diagonal entry.
    """
    g = lat.gram
    n = lat.rank
    best = min(g[i][i] for i in range(n))
    best_x = tuple(1 if j == min(range(n), key=lambda i: g[i][i]) else 0
                   for j in range(n))
    box = _enumeration_box(g, best)
    for x in iproduct(*(range(-b, b + 1) for b in box)):
        if all(c == 0 for c in x):
            continue
        if x < tuple(-c for c in x):   # one representative per +-pair
            continue
        norm = lat.norm2(x)
        if norm < best or (norm == best and x < best_x):
            best, best_x = norm, x
    return best, best_x


def is_semistable(lat: Lattice) -> bool:
    """Semistability: every proper sublattice has covol' ^ (2 rank) >=
    covol ^ (2 rank'), decided exactly on squared covolumes.

    Only rank-1 sublattices matter at rank 2; at rank 3 rank-2
    sublattices are tested through the dual's shortest vector
    (covol_sub^2 = covol^2 * |w_dual|^2).
    """
    n = lat.rank
    if n == 1:
        return True
    if n > 3:
        raise CapabilityError("stability decided for rank <= 3")
    lam2, _ = shortest_vector(lat)
    c2 = lat.covolume2
    if lam2 ** n < c2:
        return False
    if n == 3:
        dlam2, _ = shortest_vector(dual(lat))
        sub2 = c2 * dlam2               # minimal rank-2 squared covolume
        if sub2 ** 3 < c2 ** 2:
            return False
    return True


# -- integer basis completion utilities

def _column_reduce_to_e1(x: Sequence[int]) -> list[list[int]]:
    """Unimodular integer V with V x = e1 (x must be primitive)."""
    n = len(x)
    v = [[int(i == j) for j in range(n)] for i in range(n)]
    cur = list(x)

    def apply_rows(i, j, a, b, c, d):
        # rows i,j <- (a*row_i + b*row_j, c*row_i + d*row_j)
        for col in range(n):
            ri, rj = v[i][col], v[j][col]
            v[i][col] = a * ri + b * rj
            v[j][col] = c * ri + d * rj
        cur[i], cur[j] = a * cur[i] + b * cur[j], c * cur[i] + d * cur[j]

    pivot = 0
    for j in range(1, n):
        if cur[j] == 0:
            continue
        if cur[pivot] == 0:
            apply_rows(pivot, j, 0, 1, -1, 0)
            continue
        g, s, t = _xgcd(cur[pivot], cur[j])
        a, b = cur[pivot] // g, cur[j] // g
        apply_rows(pivot, j, s, t, -b, a)
    if cur[0] == 0:
        raise InputError("zero vector cannot be completed")
    if cur[0] == -1:
        v[0] = [-c for c in v[0]]
        cur[0] = 1
    if cur[0] != 1:
        raise InputError("vector is not primitive")
    return v


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def _primitive(x: Sequence[int]) -> tuple[int, ...]:
    g = 0
    for c in x:
        g = math.gcd(g, abs(c))
    if g == 0:
        raise InputError("zero vector")
    return tuple(c // g for c in x)


def _sub_quotient_grams(gram: Matrix, x: Sequence[int]) -> tuple[Fraction, Matrix]:
    """Split off the rank-1 sublattice Z*x: its squared covolume and the
    Gram of the quotient (Schur complement in an x-completed basis)."""
    n = len(gram)
    v = _column_reduce_to_e1(list(x))
    u = _inverse(_mat(v))               # integer unimodular, U e1 = x
    gp = _mat_mul(_transpose(u), _mat_mul(gram, u))
    g11 = gp[0][0]
    if n == 1:
        return g11, ()
    quot = tuple(tuple(gp[i][j] - gp[i][0] * gp[0][j] / g11
                       for j in range(1, n)) for i in range(1, n))
    return g11, quot


def _rank2_sub_gram(gram: Matrix, w: Sequence[int]) -> Matrix:
    """Gram of the rank-2 sublattice {y : <y, w>_coeff = 0} of a rank-3
    lattice, where w is a primitive dual coefficient vector."""
    v = _column_reduce_to_e1(list(w))
    vt = _transpose(_mat(v))
    kernel = tuple(tuple(vt[i][j] for j in (1, 2)) for i in range(3))
    return _mat_mul(_transpose(kernel), _mat_mul(gram, kernel))


@dataclass(frozen=True)
class HNStep:
    rank: int
    covol2: Fraction
    slope: float


@dataclass(frozen=True)
class HNFiltration:
    steps: tuple[HNStep, ...]

    @property
    def is_single(self) -> bool:
        return len(self.steps) == 1


def _slope(rank: int, covol2: Fraction) -> float:
    return -_log_fraction(covol2) / (2 * rank)


def _hn_steps(gram: Matrix) -> list[tuple[int, Fraction]]:
    n = len(gram)
    lat = Lattice(gram)
    if is_semistable(lat):
        return [(n, _det(gram))]
    lam2, x = shortest_vector(lat)
    if n == 2:
        sub_cov2, quot = _sub_quotient_grams(gram, _primitive(x))
        return [(1, sub_cov2)] + _hn_steps(quot)
    # rank 3: compare the best rank-1 slope with the best rank-2 slope;
    # mu_1 > mu_2  iff  (rank-2 covol^2) > (rank-1 covol^2)^2, exactly.
    # Ties go to the larger rank (the maximal destabilizer convention).
    dlam2, w = shortest_vector(dual(lat))
    c2 = _det(gram)
    sub2_cov2 = c2 * dlam2
    if sub2_cov2 > lam2 * lam2:
        sub_cov2, quot = _sub_quotient_grams(gram, _primitive(x))
        return [(1, sub_cov2)] + _hn_steps(quot)
    sub_gram = _rank2_sub_gram(gram, _primitive(w))
    if not is_semistable(Lattice(sub_gram)):
        raise NumericError("rank-2 destabilizer unexpectedly unstable")
    sub_det = _det(sub_gram)
    return [(2, sub_det), (1, c2 / sub_det)]


def hn_filtration(lat: Lattice) -> HNFiltration:
    """The canonical filtration: successive maximal-slope sublattices.

    Steps list the semistable quotients top-down (first step is the
    maximal destabilizing sublattice).  Slopes strictly decrease, which is
    asserted exactly on squared covolumes before returning.
    """
    if lat.rank > 3:
        raise CapabilityError("filtration computed for rank <= 3")
    steps = _hn_steps(lat.gram)
    for (r1, c1), (r2, c2) in zip(steps, steps[1:]):
        # mu_1 > mu_2  iff  c1^r2 < c2^r1
        if not c1 ** r2 < c2 ** r1:
            raise NumericError("filtration slopes fail to decrease strictly")
    total = Fraction(1)
    for _, c in steps:
        total *= c
    if total != lat.covolume2:
        raise NumericError("filtration does not reconstruct the covolume")
    return HNFiltration(tuple(HNStep(r, c, _slope(r, c)) for r, c in steps))


def unimodular_semistable_check(lat: Lattice) -> tuple[bool, bool]:
    """(semistable, stable) for an integral lattice of covolume 1.

    Unimodular lattices are always semistable; stability fails exactly
    when a proper unimodular sublattice exists, i.e. a norm-1 vector
    (rank-1) or, at rank 3, a norm-1 dual vector (rank-2 sublattice).
    """
    for row in lat.gram:
        for x in row:
            if x.denominator != 1:
                raise InputError("unimodular check needs an integral Gram")
    if lat.covolume2 != 1:
        raise InputError("unimodular check needs covolume 1")
    if not is_semistable(lat):
        raise NumericError("unimodular lattice failed semistability")
    lam2, _ = shortest_vector(lat)
    stable = lam2 > 1
    if lat.rank == 3 and stable:
        dlam2, _ = shortest_vector(dual(lat))
        stable = dlam2 > 1
    if lat.rank == 1:
        stable = True
    return True, stable


# ---------------------------------------------------------------------------
# rank-2 reduction to the fundamental domain

def _round_frac(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def reduce_rank2(lat: Lattice, tol: float = 1e-12) -> tuple[float, float, bool]:
    """Gauss-reduce a covolume-1 rank-2 lattice to (a, b, in_domain).

    The representative is the lower-triangular basis [[a, 0], [b, 1/a]]
    modulo rotation: a is the shortest length, b the normalized inner
    product.  in_domain reports membership of the moduli fundamental
    domain 1 <= a <= sqrt(2/sqrt(3)), sqrt(a^2 - a^-2) <= b <= a -
    sqrt(a^2 - a^-2); unstable lattices (a < 1) are not in the domain.
    """
    if lat.rank != 2:
        raise InputError("reduction needs rank 2")
    if lat.covolume2 != 1:
        raise InputError("reduction needs covolume exactly 1")
    g11, g12, g22 = lat.gram[0][0], lat.gram[0][1], lat.gram[1][1]
    while True:
        if g22 < g11:
            g11, g22 = g22, g11
        mu = _round_frac(g12 / g11)
        if mu:
            # b2 <- b2 - mu b1
            g22 = g22 - 2 * mu * g12 + mu * mu * g11
            g12 = g12 - mu * g11
        if g22 >= g11 and abs(g12 / g11) <= Fraction(1, 2):
            break
    if g12 < 0:
        g12 = -g12
    a = math.sqrt(float(g11))
    b = float(g12) / a
    lower = math.sqrt(max(float(g11) - 1 / float(g11), 0.0))
    in_domain = (1 - tol <= a <= math.sqrt(2 / math.sqrt(3)) + tol
                 and lower - tol <= b <= a - lower + tol)
    return a, b, in_domain


# ---------------------------------------------------------------------------
# theta cohomology

@dataclass(frozen=True)
class ThetaValue:
    """h^0 in nats with a certified truncation tail bound."""

    value: float
    tail_bound: float
    radius: float


def _lambda1_lower_bound(lat: Lattice) -> float:
    # lambda_1^2 >= 1/trace(G^-1), exactly computable
    ginv = _inverse(lat.gram)
    trace = sum(ginv[i][i] for i in range(lat.rank))
    return math.sqrt(1.0 / float(trace))


def _tail_bound(radius: float, lam1: float, n: int) -> float:
    """sum over |v| > R of exp(-pi |v|^2), by shells of width 1 with the
    packing bound #(|v| <= T) <= (2T/lam1 + 1)^n."""
    total = 0.0
    k = 0
    while True:
        r_lo = radius + k
        term = (2 * (r_lo + 1) / lam1 + 1) ** n * math.exp(-math.pi * r_lo * r_lo)
        total += term
        if term < 1e-3 * total or term == 0.0:
            break
        k += 1
        if k > 10000:
            raise NumericError("tail bound failed to converge")
    return total * (1 + 1e-2)


def theta_h0(lat: Lattice, eps: float = 1e-12) -> ThetaValue:
    """h^0 = log sum_{v in L} exp(-pi |v|^2), zero vector included.

    The radius is grown until the proven tail bound drops below eps; the
    partial sum is at least 1, so the bound also controls the error of
    the logarithm.
    """
    if eps <= 0:
        raise InputError("eps must be positive")
    lam1 = _lambda1_lower_bound(lat)
    radius = max(1.5, math.sqrt(math.log(2.0 / eps) / math.pi))
    while True:
        bound = _tail_bound(radius, lam1, lat.rank)
        if bound <= eps:
            break
        radius *= 1.5
        if radius > 1e6:
            raise NumericError("theta radius blow-up")
    bound_norm = Fraction(radius ** 2).limit_denominator(10 ** 12) + 1
    box = _enumeration_box(lat.gram, bound_norm)
    # vectorized norms; the sum is a float quantity and the certification
    # lives entirely in the tail bound at `radius`, so float norms with a
    # tiny slack on the cut are sound (extra boundary points only help)
    g = np.array([[float(x) for x in row] for row in lat.gram])
    cut = float(bound_norm) * (1 + 1e-9)
    n = lat.rank
    tail_axes = [np.arange(-b, b + 1, dtype=float) for b in box[1:]]
    if tail_axes:
        mesh = np.meshgrid(*tail_axes, indexing="ij")
        rest = np.stack([m.ravel() for m in mesh])          # (n-1, M)
    else:
        rest = np.zeros((0, 1))
    quad_rest = (rest * (g[1:, 1:] @ rest)).sum(axis=0) if n > 1 else np.zeros(1)
    lin_rest = (g[0, 1:] @ rest) if n > 1 else np.zeros(1)
    terms: list[float] = []
    for x0 in range(-box[0], box[0] + 1):
        norms = g[0, 0] * x0 * x0 + 2 * x0 * lin_rest + quad_rest
        chunk = norms[norms <= cut]
        if chunk.size:
            terms.extend(np.exp(-math.pi * chunk).tolist())
    total = math.fsum(sorted(terms))
    return ThetaValue(math.log(total), bound, radius)


def h1(lat: Lattice, eps: float = 1e-12) -> ThetaValue:
    """h^1(L) = h^0 of the dual lattice (the dualizing object of Q is
    trivial)."""
    return theta_h0(dual(lat), eps)


@dataclass(frozen=True)
class RRReport:
    h0: float
    h1: float
    degree: float
    residual: float
    tail_total: float

    @property
    def ok(self) -> bool:
        return abs(self.residual) <= max(self.tail_total * 4, 1e-12)


def rr_check(lat: Lattice, tol: float = 1e-9) -> RRReport:
    """Riemann-Roch over Q: h^0(L) - h^0(L*) = deg(L), within tol.

    The theta tails are requested well below tol; if that cannot be
    certified the configuration is refused rather than silently loosened.
    """
    if tol < 1e-13:
        raise ConfigError("tolerance below certifiable floor (1e-13)")
    eps = tol / 100
    t0 = theta_h0(lat, eps)
    t1 = theta_h0(dual(lat), eps)
    if t0.tail_bound + t1.tail_bound >= tol:
        raise ConfigError("certified tails exceed the requested tolerance")
    degree = deg(lat)
    residual = t0.value - t1.value - degree
    report = RRReport(t0.value, t1.value, degree, residual,
                      t0.tail_bound + t1.tail_bound)
    if abs(residual) > tol:
        raise NumericError(f"Riemann-Roch residual {residual} exceeds {tol}")
    return report


# ---------------------------------------------------------------------------
# the completed zeta function of the rationals

def xi_q(s: complex, eps: float = 1e-14) -> complex:
    """Completed zeta xi(s) = pi^(-s/2) Gamma(s/2) zeta(s), via the
    incomplete-theta representation split at x = 1:

        xi(s) = 1/(s(s-1))
              + sum_{n>=1} [ G(s/2, pi n^2) + G((1-s)/2, pi n^2) ],

    with G(a, y) = y^(-a) Gamma(a, y).  The representation is manifestly
    symmetric under s -> 1-s; the theta tail is truncated below eps.
    """
    s = complex(s)
    if abs(s) < 1e-6 or abs(s - 1) < 1e-6:
        raise InputError("evaluation too close to the poles s = 0, 1")
    if eps <= 0:
        raise InputError("eps must be positive")
    n_terms = max(3, math.ceil(math.sqrt((math.log(1 / eps) + 5) / math.pi)))
    with mpmath.workdps(30):
        ms = mpmath.mpc(s)
        total = 1 / (ms * (ms - 1))
        for n in range(1, n_terms + 1):
            y = mpmath.pi * n * n
            for a in (ms / 2, (1 - ms) / 2):
                total += mpmath.power(y, -a) * mpmath.gammainc(a, y)
        return complex(total)
