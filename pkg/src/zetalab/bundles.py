"""Degree-zero semistable bundles on an elliptic curve: censuses and masses.

Everything is bookkeeping over the Atiyah classification: S-equivalence
classes of degree-0 semistable bundles are indexed by the multiset of
line-bundle pieces of the graded object, a class's contents are the
Jordan-block regroupings of those pieces, and each bundle contributes
1/#Aut (mass) or (q^h0 - 1)/#Aut (gamma mass).

Two counting conventions are first-class citizens and never silently
merged.  `PAPER_SPLIT` reproduces the printed stratum counts, which treat
all needed torsion points and roots as rational and all classes as split.
`GALOIS_DESCENT` counts classes actually defined over F_q: torsion counts
come from the group structure, non-rational pieces enter as Galois orbits
with extension-field unit groups as automorphisms.  The descent census is
cross-checked against the Harder-Narasimhan / Desale-Ramanan mass
recursion, which closes the unstable-strata sums as geometric series in
exact arithmetic.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Literal, Sequence

from zetalab.artin import ZetaCurve, elliptic_zeta, nm
from zetalab.errors import CapabilityError, InputError
from zetalab.ffield import GroupStructure, WeierstrassCurve, count_points, group_structure, torsion_count


class Convention(Enum):
    PAPER_SPLIT = "paper"
    GALOIS_DESCENT = "descent"


@dataclass(frozen=True)
class CurveData:
    """Elliptic curve context for bundle counting: (q, N_1, group structure)."""

    q: int
    n1: int
    group: GroupStructure

    def __post_init__(self):
        if self.group.order != self.n1:
            raise InputError("group order must equal N_1")
        if (self.q + 1 - self.n1) ** 2 > 4 * self.q:
            raise InputError("N_1 violates the Hasse bound")

    @staticmethod
    def from_curve(curve: WeierstrassCurve) -> "CurveData":
        return CurveData(curve.p, count_points(curve, 1), group_structure(curve))

    @property
    def zeta(self) -> ZetaCurve:
        return elliptic_zeta(self.q, self.n1)

    def point_count(self, m: int) -> int:
        return nm(self.zeta, m)

    def torsion(self, m: int) -> int:
        return torsion_count(self.group, m)


# ---------------------------------------------------------------------------
# bundle descriptors

@dataclass(frozen=True)
class LineOrbit:
    """A degree-0 line-bundle piece: the trivial bundle, a rational bundle,
    or a full Galois orbit of non-rational bundles (size = orbit length)."""

    kind: Literal["trivial", "rational", "conjugate"]
    size: int = 1
    index: int = 0   # distinguishes different bundles sharing a kind

    def __post_init__(self):
        if self.kind == "trivial" and (self.size != 1 or self.index != 0):
            raise InputError("the trivial bundle is unique")
        if self.kind == "rational" and self.size != 1:
            raise InputError("a rational bundle has orbit size 1")
        if self.kind == "conjugate" and self.size < 2:
            raise InputError("a conjugate orbit has size >= 2")

    @staticmethod
    def trivial() -> "LineOrbit":
        return LineOrbit("trivial")

    @staticmethod
    def rational(index: int = 0) -> "LineOrbit":
        return LineOrbit("rational", 1, index)

    @staticmethod
    def conjugate(size: int, index: int = 0) -> "LineOrbit":
        return LineOrbit("conjugate", size, index)


@dataclass(frozen=True)
class BundleDescriptor:
    """V = (+)_j I_{r_j} (x) L_j with every summand of degree 0."""

    summands: tuple[tuple[int, LineOrbit], ...]

    def __post_init__(self):
        for r_j, orbit in self.summands:
            if r_j < 1:
                raise InputError("Jordan size must be >= 1")
            if not isinstance(orbit, LineOrbit):
                raise InputError("summand needs a LineOrbit")

    @property
    def rank(self) -> int:
        return sum(r_j * orbit.size for r_j, orbit in self.summands)

    @staticmethod
    def of(*summands: tuple[int, LineOrbit]) -> "BundleDescriptor":
        return BundleDescriptor(tuple(summands))


def _module_aut_count(partition: Sequence[int], q: int) -> Fraction:
    """#Aut of (+)_i I_{r_i} (x) L for a fixed line bundle L over F_q.

    This is the automorphism count of a finite module of type `partition`
    over a discrete valuation ring with residue field F_q:
    q^(sum_{i,j} min(r_i, r_j)) * prod_k prod_{i=1}^{m_k} (1 - q^-i),
    where m_k is the multiplicity of the part k.
    """
    s = sum(min(a, b) for a in partition for b in partition)
    val = Fraction(q) ** s
    for _, mult in Counter(partition).items():
        for i in range(1, mult + 1):
            val *= 1 - Fraction(1, q ** i)
    return val


def aut_order(b: BundleDescriptor, q: int) -> int:
    """#Aut(V) over F_q; distinct line orbits contribute independent blocks.

    Hom(I_r (x) L, I_s (x) M) is min(r,s)-dimensional when L = M and zero
    otherwise, so the automorphism group is the product over distinct
    orbits of the block group; a conjugate orbit of size e is a single
    block over the extension field F_{q^e}.
    """
    if b.rank > 4:
        raise CapabilityError("automorphism counts implemented for rank <= 4")
    blocks: dict[LineOrbit, list[int]] = {}
    for r_j, orbit in b.summands:
        blocks.setdefault(orbit, []).append(r_j)
    total = Fraction(1)
    for orbit, partition in blocks.items():
        total *= _module_aut_count(partition, q ** orbit.size)
    if total.denominator != 1:
        raise InputError("non-integral automorphism count")
    return int(total)


def h0_of_bundle(b: BundleDescriptor) -> int:
    """h^0 of a degree-0 descriptor: one section per Jordan block of the
    trivial bundle, nothing from any other piece."""
    return sum(1 for _, orbit in b.summands if orbit.kind == "trivial")


def _partitions(n: int) -> list[tuple[int, ...]]:
    if n == 0:
        return [()]
    out = []

    def rec(remaining, max_part, acc):
        if remaining == 0:
            out.append(tuple(acc))
            return
        for part in range(min(remaining, max_part), 0, -1):
            rec(remaining - part, part, acc + [part])

    rec(n, n, [])
    return out


def class_contents(gr: BundleDescriptor) -> list[BundleDescriptor]:
    """All bundles in the S-equivalence class with the given graded object.

    The input lists the graded line-bundle pieces (all Jordan sizes 1);
    the class contents are one descriptor per choice of partition of each
    piece's multiplicity into Jordan blocks.
    """
    mult: dict[LineOrbit, int] = {}
    for r_j, orbit in gr.summands:
        if r_j != 1:
            raise InputError("graded pieces must have Jordan size 1")
        mult[orbit] = mult.get(orbit, 0) + 1
    orbits = sorted(mult, key=lambda o: (o.kind, o.size, o.index))
    per_orbit = [
        [(orbit, p) for p in _partitions(mult[orbit])] for orbit in orbits
    ]
    out = []
    for combo in itertools.product(*per_orbit):
        summands = []
        for orbit, partition in combo:
            summands.extend((part, orbit) for part in partition)
        out.append(BundleDescriptor(tuple(summands)))
    return out


# ---------------------------------------------------------------------------
# strata census

@dataclass(frozen=True)
class StratumKey:
    """Multiplicity pattern (a0; a1,...,ak): a0 trivial pieces, then the
    multiplicities of the distinct nontrivial pieces."""

    a0: int
    parts: tuple[int, ...] = ()

    def __post_init__(self):
        if self.a0 < 0 or any(a < 1 for a in self.parts):
            raise InputError("invalid stratum key")

    @property
    def rank(self) -> int:
        return self.a0 + sum(self.parts)

    def label(self) -> str:
        inner = ",".join(str(a) for a in self.parts) if self.parts else "0"
        return f"({self.a0};{inner})"


@dataclass(frozen=True)
class Stratum:
    """One census row: a stratum, how many classes it holds, and the
    per-class mass sums (all bundles of one class together)."""

    key: StratumKey
    label: str
    classes: Fraction
    bundles_per_class: int
    mass_per_class: Fraction
    gamma_per_class: Fraction

    @property
    def mass(self) -> Fraction:
        return self.classes * self.mass_per_class

    @property
    def gamma(self) -> Fraction:
        return self.classes * self.gamma_per_class


@dataclass(frozen=True)
class CensusResult:
    rank: int
    convention: Convention
    slice_note: str
    rows: tuple[Stratum, ...]

    @property
    def total_classes(self) -> Fraction:
        return sum((row.classes for row in self.rows), Fraction(0))

    @property
    def mass(self) -> Fraction:
        return sum((row.mass for row in self.rows), Fraction(0))

    @property
    def gamma(self) -> Fraction:
        return sum((row.gamma for row in self.rows), Fraction(0))


def _class_row(key: StratumKey, label: str, classes, gr: BundleDescriptor,
               q: int) -> Stratum:
    contents = class_contents(gr)
    mass = sum(Fraction(1, aut_order(v, q)) for v in contents)
    gamma = sum(Fraction(q ** h0_of_bundle(v) - 1, aut_order(v, q))
                for v in contents)
    return Stratum(key, label, Fraction(classes), len(contents), mass, gamma)


_O = LineOrbit.trivial()


def strata_census(r: int, curve: CurveData, conv: Convention) -> CensusResult:
    """Complete disjoint census of degree-0 S-classes for one determinant slice.

    Rank 1 reports the full degree-0 picture (N_1 line-bundle classes).
    For rank 2 the slice is determinant = O; for rank 3 under PAPER_SPLIT
    it is the generic determinant slice the printed counts describe, and
    under GALOIS_DESCENT the determinant = O slice.  Descent totals are
    checked against #P^(r-1)(F_q).
    """
    if r not in (1, 2, 3):
        raise CapabilityError("census implemented for rank <= 3")
    q, n1 = curve.q, curve.n1
    if r == 1:
        rows = (
            _class_row(StratumKey(1), "(1;0)", 1, BundleDescriptor.of((1, _O)), q),
            _class_row(StratumKey(0, (1,)), "(0;1)", n1 - 1,
                       BundleDescriptor.of((1, LineOrbit.rational())), q),
        )
        return CensusResult(1, conv, "all determinants, degree 0", rows)
    if conv is Convention.PAPER_SPLIT:
        census = _census_paper(r, curve)
    else:
        census = _census_descent(r, curve)
    expected = Fraction((q ** r - 1) // (q - 1))
    if census.total_classes != expected:
        raise InputError(
            f"census total {census.total_classes} != #P^{r - 1}(F_q) = {expected}")
    return census


def _census_paper(r: int, curve: CurveData) -> CensusResult:
    q = curve.q
    n1 = curve.n1
    L = LineOrbit.rational(1)
    Linv = LineOrbit.rational(2)
    T = LineOrbit.rational(3)      # a torsion point; only distinctness matters
    lam = LineOrbit.rational(4)    # the fixed determinant, rank 3

    if r == 2:
        rows = (
            _class_row(StratumKey(2), "(2;0)", 1,
                       BundleDescriptor.of((1, _O), (1, _O)), q),
            _class_row(StratumKey(0, (2,)), "(0;2)", 3,
                       BundleDescriptor.of((1, T), (1, T)), q),
            _class_row(StratumKey(0, (1, 1)), "(0;1,1)", q + 1 - 4,
                       BundleDescriptor.of((1, L), (1, Linv)), q),
        )
        return CensusResult(2, Convention.PAPER_SPLIT,
                            "determinant O, split counts as printed", rows)

    rows = (
        _class_row(StratumKey(2, (1,)), "(2;1)", 1,
                   BundleDescriptor.of((1, _O), (1, _O), (1, lam)), q),
        _class_row(StratumKey(1, (2,)), "(1;2)", 4,
                   BundleDescriptor.of((1, _O), (1, T), (1, T)), q),
        _class_row(StratumKey(1, (1, 1)), "(1;1,1)", q - 4,
                   BundleDescriptor.of((1, _O), (1, L), (1, Linv)), q),
        _class_row(StratumKey(0, (3,)), "(0;3)", 9,
                   BundleDescriptor.of((1, T), (1, T), (1, T)), q),
        _class_row(StratumKey(0, (2, 1)), "(0;2,1)", n1 - (9 + 4 + 1),
                   BundleDescriptor.of((1, L), (1, L), (1, Linv)), q),
        _class_row(StratumKey(0, (1, 1, 1)), "(0;1,1,1)", q * q - (n1 - 4 - 1),
                   BundleDescriptor.of((1, L), (1, Linv), (1, lam)), q),
    )
    return CensusResult(3, Convention.PAPER_SPLIT,
                        "generic determinant, split counts as printed", rows)


def _group_elements(gs: GroupStructure) -> list[tuple[int, int]]:
    return [(i, j) for i in range(gs.n1) for j in range(gs.n2)]


def _triple_count(gs: GroupStructure) -> int:
    """Unordered triples of distinct nonzero group elements summing to zero."""
    n1, n2 = gs.n1, gs.n2
    zero = (0, 0)
    ordered = 0
    for a in _group_elements(gs):
        if a == zero:
            continue
        for b in _group_elements(gs):
            if b == zero or b == a:
                continue
            c = ((-a[0] - b[0]) % n1, (-a[1] - b[1]) % n2)
            if c != zero and c != a and c != b:
                ordered += 1
    assert ordered % 6 == 0
    return ordered // 6


def _census_descent(r: int, curve: CurveData) -> CensusResult:
    q, n1, gs = curve.q, curve.n1, curve.group
    eps2 = curve.torsion(2)
    n2 = curve.point_count(2)
    if n2 % n1:
        raise InputError("N_2 not divisible by N_1; inconsistent curve data")
    k2 = n2 // n1         # norm-one subgroup of Pic^0(F_{q^2})
    L = LineOrbit.rational(1)
    Linv = LineOrbit.rational(2)
    T = LineOrbit.rational(3)
    C2 = LineOrbit.conjugate(2)

    if r == 2:
        rows = (
            _class_row(StratumKey(2), "(2;0)", 1,
                       BundleDescriptor.of((1, _O), (1, _O)), q),
            _class_row(StratumKey(0, (2,)), "(0;2)", eps2 - 1,
                       BundleDescriptor.of((1, T), (1, T)), q),
            _class_row(StratumKey(0, (1, 1)), "(0;1,1)", Fraction(n1 - eps2, 2),
                       BundleDescriptor.of((1, L), (1, Linv)), q),
            _class_row(StratumKey(0, ()), "(0;conj-pair)", Fraction(k2 - eps2, 2),
                       BundleDescriptor.of((1, C2)), q),
        )
        return CensusResult(2, Convention.GALOIS_DESCENT, "determinant O", rows)

    eps3 = curve.torsion(3)
    n3 = curve.point_count(3)
    if n3 % n1:
        raise InputError("N_3 not divisible by N_1; inconsistent curve data")
    k3 = n3 // n1
    C3 = LineOrbit.conjugate(3)
    rows = (
        _class_row(StratumKey(3), "(3;0)", 1,
                   BundleDescriptor.of((1, _O), (1, _O), (1, _O)), q),
        _class_row(StratumKey(1, (2,)), "(1;2)", eps2 - 1,
                   BundleDescriptor.of((1, _O), (1, T), (1, T)), q),
        _class_row(StratumKey(1, (1, 1)), "(1;1,1)", Fraction(n1 - eps2, 2),
                   BundleDescriptor.of((1, _O), (1, L), (1, Linv)), q),
        _class_row(StratumKey(1, ()), "(1;conj-pair)", Fraction(k2 - eps2, 2),
                   BundleDescriptor.of((1, _O), (1, C2)), q),
        _class_row(StratumKey(0, (3,)), "(0;3)", eps3 - 1,
                   BundleDescriptor.of((1, T), (1, T), (1, T)), q),
        _class_row(StratumKey(0, (2, 1)), "(0;2,1)",
                   n1 - (eps2 + eps3 - 1),
                   BundleDescriptor.of((1, L), (1, L), (1, Linv)), q),
        _class_row(StratumKey(0, (1, 1, 1)), "(0;1,1,1)", _triple_count(gs),
                   BundleDescriptor.of((1, L), (1, Linv),
                                       (1, LineOrbit.rational(4))), q),
        _class_row(StratumKey(0, (1,)), "(0;1,conj-pair)",
                   Fraction(n2 - n1 - (k2 - eps2), 2),
                   BundleDescriptor.of((1, L), (1, C2)), q),
        _class_row(StratumKey(0, ()), "(0;conj-triple)",
                   Fraction(k3 - eps3, 3),
                   BundleDescriptor.of((1, C3)), q),
    )
    return CensusResult(3, Convention.GALOIS_DESCENT, "determinant O", rows)


# ---------------------------------------------------------------------------
# mass invariants

def _beta_degree_zero(r: int, curve: CurveData, conv: Convention) -> Fraction:
    q, n1 = curve.q, curve.n1
    if r == 1:
        return Fraction(n1, q - 1)
    if conv is Convention.PAPER_SPLIT and r == 2:
        return Fraction(n1 * (q + 3), q * q - 1)
    return n1 * strata_census(r, curve, conv).mass


def _gamma_degree_zero(r: int, curve: CurveData, conv: Convention) -> Fraction:
    # classes with sections are O + (rank r-1 piece); the gamma mass
    # telescopes to the lower-rank beta mass
    if r == 1:
        return Fraction(1)
    return _beta_degree_zero(r - 1, curve, conv)


def invariant(kind: str, r: int, d: int, curve: CurveData,
              conv: Convention) -> Fraction:
    """alpha/beta/gamma mass of rank r, degree d (all determinants).

    beta is periodic in d with period r (twist by a rational degree-1
    bundle); for d not divisible by r every semistable class is stable
    with automorphisms F_q^*, for positive degree h^0 = d, and for
    negative degree h^0 = 0.
    """
    if kind not in ("alpha", "beta", "gamma"):
        raise InputError("kind must be alpha, beta or gamma")
    if r not in (1, 2, 3):
        raise CapabilityError("invariants implemented for rank <= 3")
    q, n1 = curve.q, curve.n1
    if d % r:
        beta = Fraction(n1, q - 1)
    else:
        beta = _beta_degree_zero(r, curve, conv)
    if kind == "beta":
        return beta
    if d > 0:
        gamma = (Fraction(q) ** d - 1) * beta
    elif d < 0:
        gamma = Fraction(0)
    else:
        gamma = _gamma_degree_zero(r, curve, conv)
    if kind == "gamma":
        return gamma
    return beta + gamma


@dataclass
class InvariantTable:
    """Exact alpha/beta/gamma masses indexed by (kind, rank, degree)."""

    curve: CurveData
    convention: Convention
    entries: dict[tuple[str, int, int], Fraction] = field(default_factory=dict)

    @staticmethod
    def build(curve: CurveData, conv: Convention, r_max: int = 3,
              d_range: Sequence[int] = range(-2, 5)) -> "InvariantTable":
        table = InvariantTable(curve, conv)
        for r in range(1, r_max + 1):
            for d in d_range:
                for kind in ("alpha", "beta", "gamma"):
                    table.entries[(kind, r, d)] = invariant(kind, r, d, curve, conv)
        table.validate()
        return table

    def validate(self):
        for (kind, r, d), value in self.entries.items():
            if value < 0:
                raise InputError(f"negative mass at {(kind, r, d)}")
            if kind == "gamma":
                a = self.entries.get(("alpha", r, d))
                b = self.entries.get(("beta", r, d))
                if a is not None and b is not None and value != a - b:
                    raise InputError(f"gamma != alpha - beta at {(r, d)}")


# ---------------------------------------------------------------------------
# Harder-Narasimhan / Desale-Ramanan mass recursion

def _zeta_value(zc: ZetaCurve, i: int) -> Fraction:
    return zc.zfunc(Fraction(1, zc.q ** i))


def _beta2_parity(zc: ZetaCurve, parity: int) -> Fraction:
    b1 = Fraction(nm(zc, 1), zc.q - 1)
    s = Fraction(zc.q, zc.q ** 2 - 1) if parity else Fraction(1, zc.q ** 2 - 1)
    return b1 * _zeta_value(zc, 2) - b1 * b1 * s


def _t12_closed(zc: ZetaCurve, d: int, m_start: int | None = None) -> Fraction:
    # sum over d1 = m (rank 1) > (d - m)/2 of B1 * beta2(d-m) / q^(3m-d)
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    m0 = d // 3 + 1 if m_start is None else m_start
    e0 = 3 * m0 - d
    ratio = Fraction(1, q ** 6)
    first = _beta2_parity(zc, (d - m0) % 2)
    second = _beta2_parity(zc, (d - m0 - 1) % 2)
    return b1 * Fraction(1, q ** e0) * (first + second * Fraction(1, q ** 3)) / (1 - ratio)


def _t21_closed(zc: ZetaCurve, d: int, m_start: int | None = None) -> Fraction:
    # sum over d1 = m (rank 2) with m/2 > d - m of beta2(m) * B1 / q^(3m-2d)
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    m0 = (2 * d) // 3 + 1 if m_start is None else m_start
    e0 = 3 * m0 - 2 * d
    ratio = Fraction(1, q ** 6)
    first = _beta2_parity(zc, m0 % 2)
    second = _beta2_parity(zc, (m0 + 1) % 2)
    return b1 * Fraction(1, q ** e0) * (first + second * Fraction(1, q ** 3)) / (1 - ratio)


def _t111_closed(zc: ZetaCurve, d: int) -> Fraction:
    # sum over d1 > d2 > d3, sum d: gaps u = d1-d2 >= 1, v = d2-d3 >= 1 with
    # u - v = d (mod 3); weight q^(-2(u+v))
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    ratio = Fraction(1, q ** 6)
    total = Fraction(0)
    for u0 in (1, 2, 3):
        v0 = ((u0 - d - 1) % 3) + 1
        total += (Fraction(1, q ** (2 * u0)) / (1 - ratio)) * \
                 (Fraction(1, q ** (2 * v0)) / (1 - ratio))
    return b1 ** 3 * total


def hn_correction_truncated(r: int, d: int, zc: ZetaCurve, terms: int) -> Fraction:
    """Plain truncated loops over unstable HN types (the oracle for the
    closed geometric forms).  `terms` bounds each gap/degree variable."""
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    if r == 2:
        m0 = d // 2 + 1
        return sum(b1 * b1 * Fraction(1, q ** (2 * m - d))
                   for m in range(m0, m0 + terms))
    if r != 3:
        raise CapabilityError("recursion implemented for rank <= 3")
    t12 = sum(b1 * _beta2_parity(zc, (d - m) % 2) * Fraction(1, q ** (3 * m - d))
              for m in range(d // 3 + 1, d // 3 + 1 + terms))
    t21 = sum(_beta2_parity(zc, m % 2) * b1 * Fraction(1, q ** (3 * m - 2 * d))
              for m in range((2 * d) // 3 + 1, (2 * d) // 3 + 1 + terms))
    t111 = Fraction(0)
    for u in range(1, terms + 1):
        for v in range(1, terms + 1):
            if (u - v - d) % 3 == 0:
                t111 += b1 ** 3 * Fraction(1, q ** (2 * (u + v)))
    return t12 + t21 + t111


def mass_recursion_beta(r: int, d: int, zc: ZetaCurve) -> Fraction:
    """beta_r(d) from the mass recursion: the total rank-r mass is
    (N_1/(q-1)) * prod_{i=2}^r zeta(q^-i), and the unstable strata are
    subtracted as exactly-summed geometric series.
    """
    if zc.g != 1:
        raise InputError("mass recursion requires an elliptic zeta datum")
    if r not in (1, 2, 3):
        raise CapabilityError("recursion implemented for rank <= 3")
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    if r == 1:
        return b1
    if r == 2:
        return _beta2_parity(zc, d % 2)
    total = b1 * _zeta_value(zc, 2) * _zeta_value(zc, 3)
    return total - _t12_closed(zc, d) - _t21_closed(zc, d) - _t111_closed(zc, d)


def hn_tail_closed(r: int, d: int, zc: ZetaCurve, terms: int) -> Fraction:
    """Exact tail of the truncated HN sums beyond `terms` leading entries.

    Together with hn_correction_truncated this reconstitutes the full
    correction, so closed forms can be pinned exactly against plain loops.
    """
    q = zc.q
    b1 = Fraction(nm(zc, 1), q - 1)
    if r == 2:
        m0 = d // 2 + 1 + terms
        return b1 * b1 * Fraction(1, q ** (2 * m0 - d)) / (1 - Fraction(1, q * q))
    if r != 3:
        raise CapabilityError("recursion implemented for rank <= 3")
    t12 = _t12_closed(zc, d, m_start=d // 3 + 1 + terms)
    t21 = _t21_closed(zc, d, m_start=(2 * d) // 3 + 1 + terms)
    # t111 tail: complement of the truncated box, summed exactly
    ratio = Fraction(1, q ** 6)
    full_u = {u0: Fraction(1, q ** (2 * u0)) / (1 - ratio) for u0 in (1, 2, 3)}
    box_u = {u0: sum(Fraction(1, q ** (2 * u)) for u in range(1, terms + 1)
                     if (u - 1) % 3 == u0 - 1) for u0 in (1, 2, 3)}
    t111_tail = Fraction(0)
    for u0 in (1, 2, 3):
        v0 = ((u0 - d - 1) % 3) + 1
        full_v = Fraction(1, q ** (2 * v0)) / (1 - ratio)
        box_v = sum(Fraction(1, q ** (2 * v)) for v in range(1, terms + 1)
                    if (v - 1) % 3 == v0 - 1)
        t111_tail += full_u[u0] * full_v - box_u[u0] * box_v
    return t12 + t21 + b1 ** 3 * t111_tail


# ---------------------------------------------------------------------------
# refined Brill-Noether stratum shapes

@dataclass(frozen=True)
class StratumShape:
    """Regrouped key plus the product-of-spaces shape of the stratum closure
    in the fixed-determinant slice."""

    a0: int
    regrouped: tuple[tuple[int, int], ...]   # (part value b_i, multiplicity s_i)
    components: int                          # b_l^2 torsion choices if b_l > 1
    bundle_factors: tuple[int, ...]          # P^m-bundles over E, exponents m
    projective_factor: int                   # trailing P^m factor, -1 if none

    def describe(self) -> str:
        pieces = [f"P^{m}-bundle over E" for m in self.bundle_factors if m > 0]
        pieces += ["E" for m in self.bundle_factors if m == 0]
        if self.projective_factor > 0:
            pieces.append(f"P^{self.projective_factor}")
        if not pieces:
            body = "point"
        else:
            body = " x ".join(pieces)
        if self.components > 1:
            return f"{self.components} components, each {body}"
        return body


def bn_stratum_shape(key: StratumKey) -> StratumShape:
    """Shape of the stratum closure for a fixed determinant.

    Regroup the nontrivial multiplicities as b_1^(s_1) > ... > b_l^(s_l).
    The determinant constraint removes one degree of freedom: if b_l = 1 it
    does so canonically (one piece is solved for), otherwise it leaves
    b_l^2 torsion-translate components.
    """
    if not key.parts:
        return StratumShape(key.a0, (), 1, (), -1)
    counter = Counter(key.parts)
    regrouped = tuple(sorted(counter.items(), key=lambda kv: -kv[0]))
    b_last, s_last = regrouped[-1]
    bundle_factors = tuple(s - 1 for _, s in regrouped[:-1])
    components = 1 if b_last == 1 else b_last ** 2
    return StratumShape(key.a0, regrouped, components, bundle_factors, s_last - 1)
