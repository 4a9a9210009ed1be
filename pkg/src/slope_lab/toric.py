"""Exact toric model: polytopes, concave piecewise-linear Green functions, χ-volume oracles.

A toric adelic divisor over a finite trivially valued adelic curve is a
rational polytope P together with one concave PL function g_ω on P per
place.  The pushforward of n·D̄ is diagonal in the monomial basis with
λ(χ^m) = n Σ_ω ν(ω) g_ω(m/n), and the χ-volume oracle is
(d+1)! Σ_ω ν(ω) ∫_P g_ω.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Mapping, Sequence

import numpy as np

from . import geometry, linalg
from .adelic import AdelicCurveSpec
from .errors import ContractError, DomainError, InputError
from .rational import as_fraction
from .series import MonomialSeries, PieceStats, chi_volume_sequence


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class LatticePolytope:
    """Rational polytope in dimension 1 or 2, stored by its exact hull vertices.

    Dimension 1 vertices are ``[(lo,), (hi,)]``; dimension 2 vertices are CCW.
    Must be full-dimensional or a single point.
    """

    vertices: tuple

    def __post_init__(self):
        verts = tuple(tuple(Fraction(c) for c in v) for v in self.vertices)
        if not verts:
            raise InputError("polytope needs at least one vertex")
        d = len(verts[0])
        if d not in (1, 2) or any(len(v) != d for v in verts):
            raise InputError("only ambient dimension 1 or 2 is supported")
        hull = tuple(geometry.convex_hull(verts))
        if len(hull) != len(verts) or set(hull) != set(verts):
            raise InputError("vertex list is not the exact hull of its points")
        if d == 2 and len(hull) == 2:
            raise InputError("polytope must be full-dimensional or a point")
        object.__setattr__(self, "vertices", hull)

    @classmethod
    def hull_of(cls, points) -> "LatticePolytope":
        return cls(tuple(geometry.convex_hull(points)))

    @classmethod
    def interval(cls, lo, hi) -> "LatticePolytope":
        lo, hi = as_fraction(lo), as_fraction(hi)
        return cls(((lo,),) if lo == hi else ((lo,), (hi,)))

    @classmethod
    def point(cls, p) -> "LatticePolytope":
        return cls((tuple(as_fraction(c) for c in p),))

    @property
    def dim(self) -> int:
        return len(self.vertices[0])

    @property
    def is_point(self) -> bool:
        return len(self.vertices) == 1

    @cached_property
    def facets(self) -> list:
        if self.is_point:
            return []
        return geometry.facets(self.vertices)

    def volume(self) -> Fraction:
        """d-dimensional Euclidean volume."""
        if self.is_point:
            return Fraction(0)
        if self.dim == 1:
            return self.vertices[1][0] - self.vertices[0][0]
        return geometry.polygon_area(self.vertices)

    def contains(self, x) -> bool:
        return geometry.contains(self.vertices, x)

    def scaled(self, alpha) -> "LatticePolytope":
        alpha = Fraction(alpha)
        if alpha == 0:
            return LatticePolytope.point((0,) * self.dim)
        return LatticePolytope(tuple(linalg.scale(alpha, v) for v in self.vertices))

    def __add__(self, other: "LatticePolytope") -> "LatticePolytope":
        if self.dim != other.dim:
            raise InputError("Minkowski sum of polytopes in different dimensions")
        return LatticePolytope(tuple(geometry.minkowski_sum(self.vertices, other.vertices)))


def _floor(q: Fraction) -> int:
    return q.numerator // q.denominator


def _ceil(q: Fraction) -> int:
    return -((-q.numerator) // q.denominator)


def _rows(P: LatticePolytope, n: int):
    """Yield (x, ylo, yhi) integer row ranges of n·P in dimension 2, or (lo, hi) in dimension 1."""
    if P.dim == 1:
        lo, hi = _ceil(n * P.vertices[0][0]), _floor(n * P.vertices[-1][0])
        if lo <= hi:
            yield lo, hi
        return
    xs = [v[0] for v in P.vertices]
    for x in range(_ceil(n * min(xs)), _floor(n * max(xs)) + 1):
        ylo, yhi = -math.inf, math.inf
        for (a0, a1), b in P.facets:
            rhs = n * b - a0 * x
            if a1 > 0:
                yhi = min(yhi, _floor(rhs / a1))
            elif a1 < 0:
                ylo = max(ylo, _ceil(rhs / a1))
            elif rhs < 0:
                ylo, yhi = 1, 0
        if ylo <= yhi:
            yield x, ylo, yhi


def lattice_points(P: LatticePolytope, n: int) -> list:
    """Integer points of n·P, sorted lexicographically."""
    if n < 0:
        raise InputError("n must be non-negative")
    if n == 0:
        return [(0,) * P.dim]
    if P.is_point:
        v = tuple(n * c for c in P.vertices[0])
        return [tuple(int(c) for c in v)] if all(c.denominator == 1 for c in v) else []
    if P.dim == 1:
        return [(x,) for lo, hi in _rows(P, n) for x in range(lo, hi + 1)]
    return [(x, y) for x, lo, hi in _rows(P, n) for y in range(lo, hi + 1)]


# ---------------------------------------------------------------------------
# concave piecewise-linear functions


def _piece(a, b) -> tuple:
    return (tuple(Fraction(c) for c in a), Fraction(b))


@dataclass(frozen=True)
class ConcavePLFunction:
    """min over affine pieces a·x + b on a polytope; pieces are kept irredundant.

    Pieces that are duplicates or active only on a null set of the domain are
    dropped at construction.
    """

    domain: LatticePolytope
    pieces: tuple

    def __post_init__(self):
        pieces = sorted(set(_piece(a, b) for a, b in self.pieces))
        if not pieces:
            raise InputError("a PL function needs at least one piece")
        if any(len(a) != self.domain.dim for a, _ in pieces):
            raise InputError("piece dimension does not match the domain")
        if self.domain.is_point:
            x = self.domain.vertices[0]
            value = min(_affine(p, x) for p in pieces)
            pieces = [((Fraction(0),) * self.domain.dim, value)]
        else:
            pieces = [p for p in pieces if _region_measure(self.domain, pieces, p) > 0]
        object.__setattr__(self, "pieces", tuple(pieces))

    @classmethod
    def constant(cls, domain: LatticePolytope, c) -> "ConcavePLFunction":
        return cls(domain, (((0,) * domain.dim, Fraction(c)),))

    def __call__(self, x) -> Fraction:
        return evaluate_green(self, x)

    def region(self, piece) -> list:
        """Vertices of the closed activity region of ``piece``."""
        return _region(self.domain, self.pieces, piece)

    @cached_property
    def breakpoints(self) -> list:
        """Vertices of all activity regions; g is the upper concave envelope of its values there."""
        pts = set()
        for p in self.pieces:
            pts.update(self.region(p))
        return sorted(pts)

    @cached_property
    def integer_pieces(self):
        """(A, B, D) with D·(a·x + b) = A·x + B in integers, for fast scaled evaluation."""
        den = 1
        for a, b in self.pieces:
            for c in a + (b,):
                den = math.lcm(den, c.denominator)
        pieces = [(tuple(int(c * den) for c in a), int(b * den)) for a, b in self.pieces]
        return pieces, den

    def scaled_value(self, m, n: int) -> Fraction:
        """n·g(m/n) without dividing by n (n >= 1)."""
        pieces, den = self.integer_pieces
        return Fraction(min(sum(A * c for A, c in zip(a, m)) + n * b for a, b in pieces), den)

    def minimum(self) -> Fraction:
        return min(self(x) for x in self.breakpoints)

    def maximum(self) -> Fraction:
        return max(self(x) for x in self.breakpoints)

    def abs_max(self) -> Fraction:
        return max(abs(self(x)) for x in self.breakpoints)


def _affine(piece, x) -> Fraction:
    a, b = piece
    return sum((c * xi for c, xi in zip(a, x)), Fraction(0)) + b


def _region(P: LatticePolytope, pieces, piece) -> list:
    a_k, b_k = piece
    if P.is_point:
        return [P.vertices[0]]
    if P.dim == 1:
        span = (P.vertices[0][0], P.vertices[-1][0])
        for a_j, b_j in pieces:
            if (a_j, b_j) == piece:
                continue
            span = geometry.clip_interval(span[0], span[1], a_k[0] - a_j[0], b_j - b_k)
            if span is None:
                return []
        return sorted({(span[0],), (span[1],)})
    poly = list(P.vertices)
    for a_j, b_j in pieces:
        if (a_j, b_j) == piece:
            continue
        poly = geometry.clip(poly, (a_k[0] - a_j[0], a_k[1] - a_j[1]), b_j - b_k)
        if not poly:
            return []
    return poly


def _region_measure(P: LatticePolytope, pieces, piece) -> Fraction:
    reg = _region(P, pieces, piece)
    if not reg:
        return Fraction(0)
    if P.dim == 1:
        return reg[-1][0] - reg[0][0]
    return geometry.polygon_area(reg)


def evaluate_green(g: ConcavePLFunction, x) -> Fraction:
    x = tuple(as_fraction(c) if not isinstance(c, Fraction) else c for c in x)
    if len(x) != g.domain.dim:
        raise InputError("point dimension does not match the domain")
    if not g.domain.contains(x):
        raise DomainError(f"{x} is outside the domain")
    return min(_affine(p, x) for p in g.pieces)


def add_greens(g: ConcavePLFunction, h: ConcavePLFunction, weight_g=1, weight_h=1) -> ConcavePLFunction:
    """Pointwise weighted sum of two concave PL functions on the same domain."""
    if g.domain != h.domain:
        raise InputError("greens live on different polytopes")
    wg, wh = Fraction(weight_g), Fraction(weight_h)
    pieces = [
        (tuple(wg * x + wh * y for x, y in zip(a, c)), wg * b + wh * e)
        for a, b in g.pieces
        for c, e in h.pieces
    ]
    return ConcavePLFunction(g.domain, tuple(pieces))


def shift_green(g: ConcavePLFunction, c) -> ConcavePLFunction:
    c = Fraction(c)
    return ConcavePLFunction(g.domain, tuple((a, b + c) for a, b in g.pieces))


def scale_green(g: ConcavePLFunction, alpha) -> ConcavePLFunction:
    """x ↦ α·g(x/α) on α·P (the green of α·D); α = 0 gives 0 on the origin."""
    alpha = Fraction(alpha)
    if alpha < 0:
        raise InputError("scale factor must be non-negative")
    domain = g.domain.scaled(alpha)
    if alpha == 0:
        return ConcavePLFunction.constant(domain, 0)
    return ConcavePLFunction(domain, tuple((a, alpha * b) for a, b in g.pieces))


def sup_convolve(g1: ConcavePLFunction, g2: ConcavePLFunction) -> ConcavePLFunction:
    """(g1 □ g2)(m) = max{g1(x) + g2(y) : x + y = m} on P1 + P2.

    Computed as the upper concave envelope of the Minkowski sum of the lifted
    breakpoint sets.
    """
    if g1.domain.dim != g2.domain.dim:
        raise InputError("sup-convolution of functions in different dimensions")
    domain = g1.domain + g2.domain
    lifted = [
        (linalg.add(x, y), g1(x) + g2(y)) for x in g1.breakpoints for y in g2.breakpoints
    ]
    if domain.is_point:
        return ConcavePLFunction.constant(domain, max(h for _, h in lifted))
    if domain.dim == 1:
        chain = geometry.upper_hull_2d((x[0], h) for x, h in lifted)
        pieces = []
        for (x1, h1), (x2, h2) in zip(chain, chain[1:]):
            slope = (h2 - h1) / (x2 - x1)
            pieces.append(((slope,), h1 - slope * x1))
        return ConcavePLFunction(domain, tuple(pieces))
    return ConcavePLFunction(domain, tuple(geometry.upper_planes(lifted)))


def integrate_pl(g: ConcavePLFunction, region: Sequence | None = None) -> Fraction:
    """Exact ∫ g over its domain, or over a sub-polytope given by hull vertices.

    Each piece is integrated over its activity region: simplex volume times
    the value at the centroid.
    """
    P = g.domain
    if P.is_point:
        return Fraction(0)
    total = Fraction(0)
    for piece in g.pieces:
        reg = g.region(piece)
        if region is not None:
            reg = _intersect_region(P.dim, reg, region)
        if len(reg) < 2 or (P.dim == 2 and len(reg) < 3):
            continue
        if P.dim == 1:
            lo, hi = reg[0][0], reg[-1][0]
            total += (hi - lo) * _affine(piece, ((lo + hi) / 2,))
        else:
            for tri in geometry.triangulate(reg):
                area = geometry.polygon_area(tri)
                centroid = tuple(sum(v[i] for v in tri) / 3 for i in range(2))
                total += area * _affine(piece, centroid)
    return total


def _intersect_region(dim: int, reg: list, region: Sequence) -> list:
    if not reg or not region:
        return []
    if dim == 1:
        lo = max(reg[0][0], region[0][0])
        hi = min(reg[-1][0], region[-1][0])
        return [(lo,), (hi,)] if lo < hi else []
    if len(region) < 3:
        return []
    poly = reg
    for a, b in geometry.facets(list(region)):
        poly = geometry.clip(poly, a, b)
        if not poly:
            return []
    return poly


def superlevel_region(g: ConcavePLFunction, t) -> list:
    """Hull vertices of {x in P : g(x) >= t} (convex since g is concave)."""
    t = Fraction(t)
    P = g.domain
    if P.dim == 1:
        span = (P.vertices[0][0], P.vertices[-1][0])
        for (a,), b in g.pieces:
            span = geometry.clip_interval(span[0], span[1], -a, b - t)
            if span is None:
                return []
        return [(span[0],), (span[1],)]
    poly = list(P.vertices)
    for a, b in g.pieces:
        poly = geometry.clip(poly, (-a[0], -a[1]), b - t)
        if not poly:
            return []
    return poly


def integrate_positive_part(g: ConcavePLFunction, t=0) -> Fraction:
    """∫_P max(g - t, 0)."""
    t = Fraction(t)
    reg = superlevel_region(g, t)
    if not reg:
        return Fraction(0)
    return integrate_pl(shift_green(g, -t), reg)


# ---------------------------------------------------------------------------
# toric adelic divisors


@dataclass(frozen=True)
class ToricAdelicDivisor:
    polytope: LatticePolytope
    greens: tuple  # ((place label, ConcavePLFunction), ...) in curve order
    curve: AdelicCurveSpec

    def __post_init__(self):
        greens = dict(self.greens)
        unknown = set(greens) - set(self.curve.labels)
        if unknown:
            raise InputError(f"greens given for unknown places {sorted(unknown)}")
        full = []
        for label in self.curve.labels:
            g = greens.get(label)
            if g is None:
                g = ConcavePLFunction.constant(self.polytope, 0)
            elif g.domain != self.polytope:
                raise InputError(f"green at {label} lives on a different polytope")
            full.append((label, g))
        object.__setattr__(self, "greens", tuple(full))

    @classmethod
    def build(cls, polytope, greens: Mapping, curve) -> "ToricAdelicDivisor":
        return cls(polytope, tuple(greens.items()), curve)

    @property
    def dim(self) -> int:
        return self.polytope.dim

    def green(self, label) -> ConcavePLFunction:
        return dict(self.greens)[label]

    def weighted(self):
        """((ν(ω), g_ω), ...) in curve order."""
        return [(self.curve.weight(label), g) for label, g in self.greens]

    @cached_property
    def total_green(self) -> ConcavePLFunction:
        """Σ_ω ν(ω)·g_ω as one concave PL function."""
        weighted = self.weighted()
        total = scale_values(weighted[0][1], weighted[0][0])
        for w, g in weighted[1:]:
            total = add_greens(total, g, 1, w)
        return total

    def lam(self, m, n: int) -> Fraction:
        """λ(χ^m) in degree n: n·Σ ν(ω) g_ω(m/n)."""
        if n == 0:
            return Fraction(0)
        return sum((w * g.scaled_value(m, n) for w, g in self.weighted()), Fraction(0))


def scale_values(g: ConcavePLFunction, c) -> ConcavePLFunction:
    """x ↦ c·g(x) for c >= 0."""
    c = Fraction(c)
    if c < 0:
        raise InputError("value scaling must be non-negative to stay concave")
    if c == 0:
        return ConcavePLFunction.constant(g.domain, 0)
    return ConcavePLFunction(g.domain, tuple((linalg.scale(c, a), c * b) for a, b in g.pieces))


def vol_geometric(D: ToricAdelicDivisor) -> Fraction:
    """vol(D) = d!·vol_d(P)."""
    return math.factorial(D.dim) * D.polytope.volume()


def chi_volume_oracle(D: ToricAdelicDivisor) -> Fraction:
    """(d+1)! Σ_ω ν(ω) ∫_P g_ω."""
    total = sum((w * integrate_pl(g) for w, g in D.weighted()), Fraction(0))
    return math.factorial(D.dim + 1) * total


def twist_divisor(D: ToricAdelicDivisor, c: Mapping) -> ToricAdelicDivisor:
    """Add the constant c(ω) to every green (the twist by a function on the places)."""
    unknown = set(c) - set(D.curve.labels)
    if unknown:
        raise InputError(f"twist given for unknown places {sorted(unknown)}")
    greens = {label: shift_green(g, c.get(label, 0)) for label, g in D.greens}
    return ToricAdelicDivisor.build(D.polytope, greens, D.curve)


def scale_divisor(D: ToricAdelicDivisor, alpha) -> ToricAdelicDivisor:
    """α·D̄: polytope αP and greens x ↦ α g(x/α)."""
    alpha = as_fraction(alpha) if not isinstance(alpha, Fraction) else alpha
    if alpha <= 0:
        raise InputError("scale factor must be positive")
    return _scale(D, alpha)


def _scale(D: ToricAdelicDivisor, alpha: Fraction) -> ToricAdelicDivisor:
    greens = {label: scale_green(g, alpha) for label, g in D.greens}
    return ToricAdelicDivisor.build(D.polytope.scaled(alpha), greens, D.curve)


def combine_divisors(Dbars: Sequence[ToricAdelicDivisor], weights: Sequence) -> ToricAdelicDivisor:
    """Σ a_i D̄_i: weighted Minkowski sum of polytopes, place-wise sup-convolution of greens."""
    if not Dbars or len(Dbars) != len(weights):
        raise InputError("need one weight per divisor")
    curve = Dbars[0].curve
    dim = Dbars[0].dim
    for D in Dbars:
        if D.curve != curve:
            raise InputError("divisors live over different adelic curves")
        if D.dim != dim:
            raise InputError("divisors have different ambient dimensions")
    weights = [Fraction(w) for w in weights]
    if any(w < 0 for w in weights):
        raise InputError("cone weights must be non-negative")
    scaled = [_scale(D, w) for D, w in zip(Dbars, weights)]
    polytope = reduce(lambda P, Q: P + Q, (D.polytope for D in scaled))
    greens = {}
    for label in curve.labels:
        greens[label] = reduce(sup_convolve, (D.green(label) for D in scaled))
    return ToricAdelicDivisor.build(polytope, greens, curve)


# ---------------------------------------------------------------------------
# series materialization


def _piece_arrays(P: LatticePolytope, n: int):
    """Integer coordinate arrays (one per axis) of the lattice points of n·P."""
    if n == 0:
        return [np.zeros(1, dtype=object)] * P.dim
    if P.is_point:
        pts = lattice_points(P, n)
        return [np.array([p[i] for p in pts], dtype=object) for i in range(P.dim)]
    if P.dim == 1:
        rows = list(_rows(P, n))
        if not rows:
            return [np.zeros(0, dtype=np.int64)]
        lo, hi = rows[0]
        return [np.arange(lo, hi + 1, dtype=np.int64)]
    rows = list(_rows(P, n))
    if not rows:
        return [np.zeros(0, dtype=np.int64)] * 2
    xs = np.concatenate([np.full(hi - lo + 1, x, dtype=np.int64) for x, lo, hi in rows])
    ys = np.concatenate([np.arange(lo, hi + 1, dtype=np.int64) for x, lo, hi in rows])
    return [xs, ys]


def lambda_numerators(D: ToricAdelicDivisor, n: int):
    """(numerators, L): integer array with λ(m; n) = numerators / L over the lattice points of n·P.

    Vectorized route used by the statistics fast path; the exact per-point
    route is :meth:`ToricAdelicDivisor.lam`.
    """
    coords = _piece_arrays(D.polytope, n)
    weights = D.weighted()
    L = 1
    for w, g in weights:
        L = math.lcm(L, w.denominator * g.integer_pieces[1])
    count = len(coords[0])
    if n == 0 or count == 0:
        return np.zeros(count, dtype=object), L
    bound = max(abs(int(c.max())) + abs(int(c.min())) for c in coords) + n + 1
    worst = 0
    for w, g in weights:
        pieces, den = g.integer_pieces
        scale_w = abs(w * L / den)
        worst += int(scale_w) * max(sum(abs(A) for A in a) + abs(b) for a, b in pieces) * bound
    # the guard also covers sums over the whole piece
    dtype = np.int64 if worst * 4 * count < 2**62 else object
    coords = [c.astype(dtype) for c in coords]
    total = np.zeros(count, dtype=dtype)
    for w, g in weights:
        pieces, den = g.integer_pieces
        mult = int(w * L / den)
        vals = None
        for a, b in pieces:
            v = sum(A * c for A, c in zip(a, coords)) + n * b
            vals = v if vals is None else np.minimum(vals, v)
        total = total + mult * vals
    return total, L


def _stats_from_numerators(nums, L: int) -> PieceStats:
    if len(nums) == 0:
        return PieceStats.from_values(())
    positive = nums[nums > 0]
    return PieceStats(
        len(nums),
        Fraction(int(nums.sum()), L),
        Fraction(int(positive.sum()) if len(positive) else 0, L),
        Fraction(int(nums.min()), L),
        Fraction(int(nums.max()), L),
    )


def to_series(D: ToricAdelicDivisor) -> MonomialSeries:
    """The graded series of D̄: lattice points of nP with λ(m; n) = n Σ ν(ω) g_ω(m/n)."""

    def provider(n):
        return [(m, D.lam(m, n)) for m in lattice_points(D.polytope, n)]

    def evaluator(n, m):
        if n == 0:
            return Fraction(0) if not any(m) else None
        if not D.polytope.contains(tuple(Fraction(c, n) for c in m)):
            return None
        return D.lam(m, n)

    def summarizer(n):
        return _stats_from_numerators(*lambda_numerators(D, n))

    return MonomialSeries(D.dim, provider, evaluator=evaluator, summarizer=summarizer, name="toric")


def to_multigraded_series(Dbars: Sequence[ToricAdelicDivisor]) -> MonomialSeries:
    """N^r-graded series with E_a the series piece of Σ a_i D̄_i in degree 1."""
    if not Dbars:
        raise InputError("need at least one divisor")
    dims = {D.dim for D in Dbars}
    if len(dims) != 1:
        raise InputError("divisors have different ambient dimensions")
    r = len(Dbars)
    cache: dict = {}

    def combined(a):
        if a not in cache:
            cache[a] = combine_divisors(Dbars, a)
        return cache[a]

    def provider(a):
        D = combined(a)
        return [(m, D.lam(m, 1)) for m in lattice_points(D.polytope, 1)]

    def evaluator(a, m):
        if not any(a):
            return Fraction(0) if not any(m) else None
        D = combined(a)
        return D.lam(m, 1) if D.polytope.contains(m) else None

    def summarizer(a):
        if not any(a):
            return PieceStats.from_values((Fraction(0),))
        return _stats_from_numerators(*lambda_numerators(combined(a), 1))

    return MonomialSeries(dims.pop(), provider, grading_rank=r, evaluator=evaluator,
                          summarizer=summarizer, name=f"toric^{r}")


# ---------------------------------------------------------------------------
# experiment drivers


@dataclass(frozen=True)
class ChiVolumeReport:
    oracle: Fraction
    estimates: tuple  # ChiRow per n
    gaps: tuple  # |chi_est(n) - oracle| per n
    max_gap_tail: Fraction
    tail_start: int
    tolerance: Fraction
    verdict: bool


def hilbert_samuel_check(D: ToricAdelicDivisor, n_max: int, tol=0, n_list=None,
                         tail_start: int | None = None) -> ChiVolumeReport:
    """Compare normalized slope sums of π_*(nD̄) with the χ-volume oracle.

    Passes when the gap at the last n is at most ``tol``.
    """
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    tol = Fraction(tol)
    if tol < 0:
        raise InputError("tolerance must be non-negative")
    ns = list(n_list) if n_list is not None else list(range(1, n_max + 1))
    if tail_start is None:
        tail_start = (n_max + 1) // 2
    oracle = chi_volume_oracle(D)
    rows = chi_volume_sequence(to_series(D), D.dim, ns)
    gaps = tuple(abs(r.chi_est - oracle) for r in rows)
    tail = [g for r, g in zip(rows, gaps) if r.n >= tail_start] or list(gaps)
    return ChiVolumeReport(oracle, tuple(rows), gaps, max(tail), tail_start, tol, gaps[-1] <= tol)


@dataclass(frozen=True)
class ConeRow:
    weights: tuple
    vol: Fraction
    oracle: Fraction
    ratio: Fraction | None
    chi_est: Fraction | None
    n: int
    flagged: bool


def cone_row(Dbars: Sequence[ToricAdelicDivisor], weights, n_est: int = 0) -> ConeRow:
    """vol, χ-volume oracle, their ratio and (if n_est > 0) a truncated estimate at Σ a_i D̄_i."""
    weights = tuple(Fraction(w) for w in weights)
    D = combine_divisors(Dbars, weights)
    vol = vol_geometric(D)
    oracle = chi_volume_oracle(D)
    ratio = oracle / vol if vol else None
    chi = None
    if n_est > 0:
        chi = chi_volume_sequence(to_series(D), D.dim, [n_est])[0].chi_est
    return ConeRow(weights, vol, oracle, ratio, chi, n_est, ratio is None)


def cone_scan(Dbars: Sequence[ToricAdelicDivisor], grid: Sequence, n_est: int = 0, jobs: int = 1) -> list:
    """One :class:`ConeRow` per weight vector, in grid order; rows with vol = 0 are flagged."""
    grid = [tuple(Fraction(w) for w in a) for a in grid]
    for a in grid:
        if len(a) != len(Dbars):
            raise InputError("weight vector length does not match the divisor list")
        if any(w < 0 for w in a):
            raise InputError("cone weights must be non-negative")
    if jobs > 1 and len(grid) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(cone_row, [Dbars] * len(grid), grid, [n_est] * len(grid)))
    return [cone_row(Dbars, a, n_est) for a in grid]


def vol_I_extension(Dbars: Sequence[ToricAdelicDivisor], weights, lambda_bound) -> Fraction:
    """(d+1)!·∫_P max(g_tot - λ, 0) + (d+1)·vol(D)·λ at Σ a_i D̄_i.

    λ must not exceed the minimal asymptotic slope min_P g_tot of the
    combination; a larger λ raises :class:`ContractError`.
    """
    weights = tuple(Fraction(w) for w in weights)
    if not any(weights):
        raise InputError("the zero weight vector is excluded")
    lam = Fraction(lambda_bound)
    D = combine_divisors(Dbars, weights)
    g = D.total_green
    if lam > g.minimum():
        raise ContractError(f"bound {lam} exceeds the minimal slope {g.minimum()} at {weights}")
    d = D.dim
    return math.factorial(d + 1) * integrate_positive_part(g, lam) + (d + 1) * vol_geometric(D) * lam


def continuity_modulus(Dbars: Sequence[ToricAdelicDivisor], a, b) -> Fraction:
    """Upper bound of |oracle(a) - oracle(b)| on the cone of one-dimensional divisors.

    With c = max(a, b) componentwise, M_i = Σ ν max|g_i| and ℓ_i the length
    of P_i, the bound is 2·Σ_i |a_i - b_i|·(ℓ(P_c)·M_i + ℓ_i·Σ_j c_j M_j).
    It follows from writing the combined green as the slope-sorted merge of
    the scaled pieces.
    """
    if any(D.dim != 1 for D in Dbars):
        raise InputError("the continuity modulus is implemented for d = 1")
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    if len(a) != len(Dbars) or len(b) != len(Dbars):
        raise InputError("weight vector length does not match the divisor list")
    c = [max(x, y) for x, y in zip(a, b)]
    M = [sum((w * g.abs_max() for w, g in D.weighted()), Fraction(0)) for D in Dbars]
    ell = [D.polytope.volume() for D in Dbars]
    length_c = sum((ci * li for ci, li in zip(c, ell)), Fraction(0))
    spread = sum((ci * Mi for ci, Mi in zip(c, M)), Fraction(0))
    return 2 * sum((abs(x - y) * (length_c * Mi + li * spread) for x, y, Mi, li in zip(a, b, M, ell)), Fraction(0))
