"""Finite adelic curves with trivially valued places, and diagonal adelic bundles.

Every place carries the trivial absolute value on Q, so the product formula
holds automatically and the curve is proper.  A diagonal bundle is
orthogonal in one common basis at every place; its Harder–Narasimhan
filtration is obtained by sorting the per-vector degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from . import filtration as flt
from . import linalg
from .errors import InputError
from .rational import as_fraction


@dataclass(frozen=True)
class AdelicCurveSpec:
    """Places ``(label, ν(ω))`` with positive rational weights; no archimedean mass."""

    places: tuple

    archimedean_mass = Fraction(0)

    def __post_init__(self):
        places = tuple((str(label), as_fraction(w)) for label, w in self.places)
        labels = [p[0] for p in places]
        if len(set(labels)) != len(labels):
            raise InputError("place labels must be unique")
        if any(w <= 0 for _, w in places):
            raise InputError("place weights must be positive")
        object.__setattr__(self, "places", places)

    @classmethod
    def single(cls, label: str = "w1", weight=1) -> "AdelicCurveSpec":
        return cls(((label, weight),))

    @property
    def labels(self) -> list:
        return [p[0] for p in self.places]

    def weight(self, label) -> Fraction:
        for name, w in self.places:
            if name == label:
                return w
        raise InputError(f"unknown place {label!r}")

    def absolute_value(self, label, alpha) -> Fraction:
        """|α|_ω for the trivial absolute value."""
        self.weight(label)
        return Fraction(0) if Fraction(alpha) == 0 else Fraction(1)

    def integral(self, f: Mapping) -> Fraction:
        """∫ f dν for a function given on (a subset of) the places; missing places count as 0."""
        return sum((w * Fraction(f.get(label, 0)) for label, w in self.places), Fraction(0))


def properness_defect(curve: AdelicCurveSpec, alpha) -> float:
    """Σ_ω ν(ω) ln|α|_ω for a non-zero scalar; vanishes on a proper curve."""
    if Fraction(alpha) == 0:
        raise InputError("properness is tested on non-zero scalars")
    return math.fsum(float(w) * math.log(curve.absolute_value(label, alpha)) for label, w in curve.places)


@dataclass(frozen=True)
class DiagonalAdelicBundle:
    """Rank-r bundle with λ_{ω,i} = -ln‖e_i‖_ω at each place, orthogonal in the basis e_i."""

    curve: AdelicCurveSpec
    labels: tuple
    lam: tuple  # ((place label, (λ_ω,1, ..., λ_ω,r)), ...) in curve order

    def __post_init__(self):
        labels = tuple(self.labels)
        table = dict(self.lam)
        if set(table) != set(self.curve.labels):
            raise InputError("every place of the curve needs λ-values")
        rows = []
        for place in self.curve.labels:
            values = tuple(as_fraction(v) if not isinstance(v, Fraction) else v for v in table[place])
            if len(values) != len(labels):
                raise InputError(f"place {place} has {len(values)} λ-values for rank {len(labels)}")
            rows.append((place, values))
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "lam", tuple(rows))

    @classmethod
    def build(cls, curve, labels, lam: Mapping) -> "DiagonalAdelicBundle":
        return cls(curve, tuple(labels), tuple(lam.items()))

    @property
    def rank(self) -> int:
        return len(self.labels)

    def values(self, place) -> tuple:
        return dict(self.lam)[place]

    @cached_property
    def vector_degrees(self) -> tuple:
        """deg(e_i) = Σ_ω ν(ω) λ_{ω,i}."""
        return tuple(
            sum((self.curve.weight(p) * vals[i] for p, vals in self.lam), Fraction(0))
            for i in range(self.rank)
        )

    def place_space(self, place) -> flt.FilteredSpace:
        """The filtration at one place, on the standard coordinates of the basis e_i."""
        vals = self.values(place)
        order = sorted(range(self.rank), key=lambda i: -vals[i])
        basis = tuple(linalg.unit_vector(self.rank, i) for i in order)
        return flt.FilteredSpace(basis, tuple(vals[i] for i in order))


def total_degree(B: DiagonalAdelicBundle) -> Fraction:
    return sum(B.vector_degrees, Fraction(0))


def twist(B: DiagonalAdelicBundle, f: Mapping) -> DiagonalAdelicBundle:
    """E(f): λ_{ω,i} + f(ω) at every place."""
    unknown = set(f) - set(B.curve.labels)
    if unknown:
        raise InputError(f"twist given for unknown places {sorted(unknown)}")
    lam = {p: tuple(v + Fraction(f.get(p, 0)) for v in vals) for p, vals in B.lam}
    return DiagonalAdelicBundle.build(B.curve, B.labels, lam)


@dataclass(frozen=True)
class HNData:
    slopes: tuple  # sorted per-vector degrees, non-increasing
    order: tuple  # basis indices in slope order
    flag: tuple  # ((slope, indices spanning the step), ...) one entry per distinct slope

    @property
    def mu_max(self):
        return self.slopes[0] if self.slopes else -math.inf

    @property
    def mu_min(self):
        return self.slopes[-1] if self.slopes else math.inf


def hn_sorted(B: DiagonalAdelicBundle) -> HNData:
    degs = B.vector_degrees
    order = tuple(sorted(range(B.rank), key=lambda i: (-degs[i], i)))
    slopes = tuple(degs[i] for i in order)
    flag = []
    for k, i in enumerate(order):
        if k + 1 == len(order) or slopes[k + 1] != slopes[k]:
            flag.append((slopes[k], tuple(order[: k + 1])))
    return HNData(slopes, order, tuple(flag))


def line_degree(B: DiagonalAdelicBundle, v: Sequence) -> Fraction:
    """Degree of the line spanned by v: Σ_ω ν(ω) min_{i in supp v} λ_{ω,i}."""
    support = [i for i, c in enumerate(v) if Fraction(c) != 0]
    if not support:
        raise InputError("the zero vector spans no line")
    return sum(
        (B.curve.weight(p) * min(vals[i] for i in support) for p, vals in B.lam),
        Fraction(0),
    )


def subquotient_degree(B: DiagonalAdelicBundle, flag: Sequence[Sequence]) -> list:
    """Degrees of the successive quotients of a flag, computed place by place."""
    per_place = {p: flt.flag_pieces(B.place_space(p), flag) for p in B.curve.labels}
    degrees = []
    for k in range(len(flag)):
        degrees.append(sum(
            (B.curve.weight(p) * flt.slope_profile(pieces[k]).degree for p, pieces in per_place.items()),
            Fraction(0),
        ))
    return degrees


@dataclass(frozen=True)
class FlagReport:
    piece_degrees: tuple
    total: Fraction
    slack: Fraction

    @property
    def ok(self) -> bool:
        return self.slack == 0


def flag_degree_check(B: DiagonalAdelicBundle, flag: Sequence[Sequence]) -> FlagReport:
    """Σ deg(E_i/E_{i-1}) against deg(E); the slack is exactly 0 without archimedean places."""
    if B.rank == 0:
        if flag:
            raise InputError("a rank-0 bundle only has the empty flag")
        return FlagReport((), Fraction(0), Fraction(0))
    pieces = subquotient_degree(B, flag)
    total = total_degree(B)
    return FlagReport(tuple(pieces), total, total - sum(pieces, Fraction(0)))


def pushforward_toric(Dbar, n: int) -> DiagonalAdelicBundle:
    """π_*(n·D̄) for a toric adelic divisor: monomial basis, λ_{ω,m} = n·g_ω(m/n)."""
    from .toric import lattice_points

    if n < 0:
        raise InputError("n must be non-negative")
    points = lattice_points(Dbar.polytope, n)
    lam = {}
    for label, g in Dbar.greens:
        if n == 0:
            lam[label] = tuple(Fraction(0) for _ in points)
        else:
            lam[label] = tuple(g.scaled_value(m, n) for m in points)
    return DiagonalAdelicBundle.build(Dbar.curve, tuple(points), lam)
