"""Filtered graded (and N^r-multigraded) monomial linear series.

A :class:`MonomialSeries` hands out, for each degree, the lattice points of
its monomial basis with their λ-values.  The monomial basis is orthogonal
for the filtration of every piece, and multiplication adds lattice points,
which makes superadditivity, Fekete limits and Okounkov bodies exact to
compute.
"""

from __future__ import annotations

import bisect
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from . import geometry, linalg
from .errors import DomainError, InputError
from .filtration import FilteredSpace
from .rational import Extended, ln_upper

Degree = "int | tuple[int, ...]"


@dataclass(frozen=True)
class PieceStats:
    count: int
    total: Fraction
    positive_total: Fraction
    lam_min: Extended
    lam_max: Extended

    @classmethod
    def from_values(cls, values: Iterable[Fraction]) -> "PieceStats":
        values = list(values)
        if not values:
            return cls(0, Fraction(0), Fraction(0), math.inf, -math.inf)
        return cls(
            len(values),
            sum(values, Fraction(0)),
            sum((v for v in values if v > 0), Fraction(0)),
            min(values),
            max(values),
        )

    @classmethod
    def merge(cls, parts: Sequence["PieceStats"]) -> "PieceStats":
        parts = [p for p in parts if p.count]
        if not parts:
            return cls.from_values(())
        return cls(
            sum(p.count for p in parts),
            sum((p.total for p in parts), Fraction(0)),
            sum((p.positive_total for p in parts), Fraction(0)),
            min(p.lam_min for p in parts),
            max(p.lam_max for p in parts),
        )


@dataclass(frozen=True, eq=False)
class MonomialSeries:
    """A graded monomial linear series with filtration values.

    ``provider(a)`` returns the basis of the degree-a piece as ``(point, λ)``
    pairs; ``a`` is an int when ``grading_rank == 1`` and a tuple otherwise.
    ``evaluator(a, point)`` (optional) returns λ of one monomial or None when
    the point is not in the piece; ``summarizer(a)`` (optional) returns
    :class:`PieceStats` without materializing the piece.  ``C`` is the level
    of the minimal slope property entering δ(n) = C ln dim E_n.
    """

    ambient_dim: int
    provider: Callable
    C: Fraction = Fraction(0)
    grading_rank: int = 1
    evaluator: Callable | None = None
    summarizer: Callable | None = None
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "C", Fraction(self.C))
        if self.C < 0:
            raise InputError("C must be non-negative")
        if self.grading_rank < 1:
            raise InputError("grading rank must be at least 1")

    def degree(self, a) -> Degree:
        """Normalize a degree: int for rank 1, tuple otherwise."""
        if self.grading_rank == 1:
            if isinstance(a, tuple):
                if len(a) != 1:
                    raise InputError(f"degree {a} has the wrong rank")
                a = a[0]
            a = int(a)
            if a < 0:
                raise InputError("degrees must be non-negative")
            return a
        a = tuple(int(x) for x in a)
        if len(a) != self.grading_rank or any(x < 0 for x in a):
            raise InputError(f"multidegree {a} must lie in N^{self.grading_rank}")
        return a

    def zero_degree(self):
        return 0 if self.grading_rank == 1 else (0,) * self.grading_rank

    def piece(self, a) -> tuple:
        """Sorted ``(point, λ)`` basis of the degree-a piece."""
        a = self.degree(a)
        key = ("piece", a)
        if key not in self._cache:
            items = sorted((tuple(int(c) for c in p), Fraction(v)) for p, v in self.provider(a))
            points = [p for p, _ in items]
            if len(set(points)) != len(points):
                raise InputError(f"repeated lattice point in degree {a}")
            if any(len(p) != self.ambient_dim for p in points):
                raise InputError(f"lattice point of wrong dimension in degree {a}")
            if a == self.zero_degree() and items != [((0,) * self.ambient_dim, Fraction(0))]:
                raise InputError("the degree-0 piece must be the unit with λ = 0")
            self._cache[key] = tuple(items)
        return self._cache[key]

    def lam(self, a, point) -> Fraction | None:
        """λ of one basis monomial, or None when ``point`` is not in the piece."""
        a = self.degree(a)
        point = tuple(int(c) for c in point)
        if self.evaluator is not None:
            value = self.evaluator(a, point)
            return None if value is None else Fraction(value)
        key = ("index", a)
        if key not in self._cache:
            self._cache[key] = dict(self.piece(a))
        return self._cache[key].get(point)

    def stats(self, a) -> PieceStats:
        a = self.degree(a)
        key = ("stats", a)
        if key not in self._cache:
            if self.summarizer is not None:
                self._cache[key] = self.summarizer(a)
            else:
                self._cache[key] = PieceStats.from_values(v for _, v in self.piece(a))
        return self._cache[key]

    def dim(self, a) -> int:
        return self.stats(a).count


def _add_deg(a, b):
    if isinstance(a, tuple):
        return tuple(x + y for x, y in zip(a, b))
    return a + b


def _scale_deg(a, m: int):
    if isinstance(a, tuple):
        return tuple(m * x for x in a)
    return a * m


def _total(a) -> int:
    return sum(a) if isinstance(a, tuple) else a


def delta(S: MonomialSeries, a, precision: int = 12) -> Fraction:
    """Rational upper bound of δ(a) = C ln dim E_a (0 when C = 0 or the piece is empty)."""
    if S.C == 0:
        return Fraction(0)
    d = S.dim(a)
    return S.C * ln_upper(d, precision) if d > 1 else Fraction(0)


def table_series(ambient_dim: int, table: Mapping, C=0, name: str = "table") -> MonomialSeries:
    """Series from an explicit ``{degree: [(point, λ), ...]}`` table.

    Degrees missing from the table have empty pieces; the unit piece is added
    when absent.
    """
    data = {}
    for deg, items in table.items():
        data[int(deg)] = [(tuple(int(c) for c in p), Fraction(v)) for p, v in items]
    data.setdefault(0, [((0,) * ambient_dim, Fraction(0))])
    return MonomialSeries(ambient_dim, lambda n: data.get(n, []), C=C, name=name)


# ---------------------------------------------------------------------------
# pieces as filtered spaces


def series_space(S: MonomialSeries, a) -> FilteredSpace:
    """E_a as a FilteredSpace whose adapted basis is the monomial basis (lex order coordinates)."""
    items = S.piece(a)
    n = len(items)
    order = sorted(range(n), key=lambda i: -items[i][1])
    basis = tuple(linalg.unit_vector(n, i) for i in order)
    return FilteredSpace(basis, tuple(items[i][1] for i in order))


# ---------------------------------------------------------------------------
# superadditivity


@dataclass(frozen=True)
class Violation:
    inequality: str
    degrees: tuple
    monomials: tuple
    lhs: Fraction | None
    rhs: Fraction


@dataclass(frozen=True)
class SuperadditivityReport:
    checked_range: int
    factor_count_max: int
    checks: int
    violations: tuple
    worst_slack: Fraction | None

    @property
    def ok(self) -> bool:
        return not self.violations


def _degrees_up_to(S: MonomialSeries, n_max: int) -> list:
    if S.grading_rank == 1:
        return list(range(1, n_max + 1))
    out = []
    for total in range(1, n_max + 1):
        for cut in itertools.combinations(range(total + S.grading_rank - 1), S.grading_rank - 1):
            parts, prev = [], -1
            for c in cut + (total + S.grading_rank - 1,):
                parts.append(c - prev - 1)
                prev = c
            out.append(tuple(parts))
    return out


def check_superadditivity(S: MonomialSeries, n_max: int, factor_count_max: int = 2,
                          precision: int = 12) -> SuperadditivityReport:
    """Check λ(Π s_i) >= Σ λ(s_i) - Σ δ(n_i) on all monomial tuples with Σ|n_i| <= n_max.

    Degree-0 factors are units and are skipped.  A product landing outside
    the target piece is reported as a closure violation.  With C > 0 the
    δ-terms use rational upper bounds of ln, so only certain violations are
    reported.
    """
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    if factor_count_max < 2:
        raise InputError("superadditivity needs at least two factors")
    degrees = _degrees_up_to(S, n_max)
    violations = []
    worst = None
    checks = 0
    for k in range(2, factor_count_max + 1):
        for combo in itertools.combinations_with_replacement(range(len(degrees)), k):
            degs = tuple(degrees[i] for i in combo)
            if sum(_total(d) for d in degs) > n_max:
                continue
            target = degs[0]
            for d in degs[1:]:
                target = _add_deg(target, d)
            correction = sum((delta(S, d, precision) for d in degs), Fraction(0))
            for monos in itertools.product(*(S.piece(d) for d in degs)):
                checks += 1
                point = tuple(map(sum, zip(*(p for p, _ in monos))))
                rhs = sum((v for _, v in monos), Fraction(0)) - correction
                lhs = S.lam(target, point)
                witness = tuple(p for p, _ in monos)
                if lhs is None:
                    violations.append(Violation("closure", degs, witness, None, rhs))
                    continue
                slack = lhs - rhs
                worst = slack if worst is None else min(worst, slack)
                if slack < 0:
                    violations.append(Violation("delta-superadditivity", degs, witness, lhs, rhs))
    return SuperadditivityReport(n_max, factor_count_max, checks, tuple(violations), worst)


# ---------------------------------------------------------------------------
# asymptotic norms


@dataclass(frozen=True)
class FeketeResult:
    estimate: Fraction
    lower_bounds: tuple  # running maxima of (λ(s^m) - δ(nm)) / m
    ratios: tuple  # raw λ(s^m) / m
    upper_info: Fraction  # λ(s^{m_max}) / m_max

    @property
    def bracket(self) -> tuple:
        return (self.estimate, max(self.estimate, self.upper_info))


def _as_polynomial(s) -> dict:
    if isinstance(s, Mapping):
        poly = {tuple(int(c) for c in p): Fraction(v) for p, v in s.items() if Fraction(v) != 0}
    else:
        poly = {tuple(int(c) for c in s): Fraction(1)}
    if not poly:
        raise InputError("the zero section has no asymptotic norm")
    return poly


def _poly_mul(f: dict, g: dict) -> dict:
    out: dict = {}
    for p, a in f.items():
        for q, b in g.items():
            r = tuple(x + y for x, y in zip(p, q))
            out[r] = out.get(r, Fraction(0)) + a * b
    return {p: c for p, c in out.items() if c != 0}


def section_lambda(S: MonomialSeries, a, s) -> Fraction:
    """λ of a section given as a monomial point or a ``{point: coefficient}`` combination."""
    poly = _as_polynomial(s)
    values = []
    for p in poly:
        v = S.lam(a, p)
        if v is None:
            raise InputError(f"monomial {p} is not in the degree-{a} piece")
        values.append(v)
    return min(values)


def fekete_lambda(S: MonomialSeries, n, s, m_max: int, precision: int = 12) -> FeketeResult:
    """Estimate λ'(s) = lim λ(s^m)/m from below.

    The superadditive bound λ(s^{km}) >= k(λ(s^m) - δ(nm)) makes every
    (λ(s^m) - δ(nm))/m a lower bound of the limit; the estimate is their
    maximum over m <= m_max.
    """
    if m_max < 1:
        raise InputError("m_max must be at least 1")
    n = S.degree(n)
    base = _as_polynomial(s)
    monomial = len(base) == 1 and next(iter(base.values())) != 0
    ratios, lowers = [], []
    best = None
    power = base
    for m in range(1, m_max + 1):
        deg = _scale_deg(n, m)
        if monomial:
            point = next(iter(base))
            lam = S.lam(deg, tuple(m * c for c in point))
            if lam is None:
                raise InputError(f"power {m} of {point} leaves the algebra")
        else:
            if m > 1:
                power = _poly_mul(power, base)
            lam = section_lambda(S, deg, power)
        ratios.append(lam / m)
        bound = (lam - delta(S, deg, precision)) / m
        best = bound if best is None else max(best, bound)
        lowers.append(best)
    return FeketeResult(best, tuple(lowers), tuple(ratios), ratios[-1])


# ---------------------------------------------------------------------------
# asymptotic invariants and volumes


@dataclass(frozen=True)
class AsymptoticInvariants:
    mu_max_trace: tuple  # (n, μ_max(E_n)/n)
    mu_min_trace: tuple  # (n, μ_min(E_n)/n)
    mu_max_asy: Extended
    mu_min_inf: Extended
    mu_min_sup: Extended
    tail_start: int
    oscillation_max: Extended
    oscillation_min: Extended
    converged: bool


def asymptotic_invariants(S: MonomialSeries, n_max: int, tolerance=None,
                          tail_start: int | None = None) -> AsymptoticInvariants:
    """Traces μ_max(E_n)/n and μ_min(E_n)/n for 1 <= n <= n_max with tail-window summaries.

    limsup/liminf are replaced by max/min over the tail n >= tail_start
    (default ceil(n_max / 2)).  ``converged`` is False when a trace oscillates
    by more than ``tolerance`` on the tail.
    """
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    if S.grading_rank != 1:
        raise InputError("asymptotic invariants are defined for singly graded series")
    if tail_start is None:
        tail_start = (n_max + 1) // 2
    tail_start = max(1, min(tail_start, n_max))
    max_trace, min_trace = [], []
    for n in range(1, n_max + 1):
        st = S.stats(n)
        max_trace.append((n, st.lam_max / n if st.count else -math.inf))
        min_trace.append((n, st.lam_min / n if st.count else math.inf))
    tail_max = [v for n, v in max_trace if n >= tail_start]
    tail_min = [v for n, v in min_trace if n >= tail_start]
    osc_max = max(tail_max) - min(tail_max) if all(math.isfinite(v) for v in tail_max) else math.inf
    osc_min = max(tail_min) - min(tail_min) if all(math.isfinite(v) for v in tail_min) else math.inf
    converged = True
    if tolerance is not None:
        tol = Fraction(tolerance)
        converged = osc_max <= tol and osc_min <= tol
    return AsymptoticInvariants(
        tuple(max_trace), tuple(min_trace),
        max(tail_max), min(tail_min), max(tail_min),
        tail_start, osc_max, osc_min, converged,
    )


@dataclass(frozen=True)
class ChiRow:
    n: int
    chi_est: Fraction
    vol_hat_est: Fraction
    vol_est: Fraction


def chi_volume_sequence(S: MonomialSeries, d: int, n_list: Iterable[int]) -> list:
    """Normalized slope sums Σμ_i(E_n) / (n^{d+1}/(d+1)!), Σmax(μ_i,0) likewise, dim E_n/(n^d/d!)."""
    n_list = list(n_list)
    if not n_list:
        raise InputError("n_list must be non-empty")
    if d < 0:
        raise InputError("Kodaira dimension must be non-negative")
    rows = []
    for n in n_list:
        if n < 1:
            raise InputError("volume estimates need n >= 1")
        st = S.stats(n)
        arith = Fraction(n ** (d + 1), math.factorial(d + 1))
        geo = Fraction(n**d, math.factorial(d))
        rows.append(ChiRow(n, st.total / arith, st.positive_total / arith, st.count / geo))
    return rows


# ---------------------------------------------------------------------------
# Okounkov bodies and the concave transform


@dataclass(frozen=True)
class OkounkovEstimate:
    n_max: int
    vertices: tuple  # hull of {m/n : n <= n_max}
    thresholds: tuple  # ((t, hull vertices of Δ^t), ...) in t_grid order
    samples: tuple  # ((m/n, λ'(m)/n), ...), one entry per distinct point, best value kept


def _normalized_points(S: MonomialSeries, n_max: int):
    for n in range(1, n_max + 1):
        for p, _ in S.piece(n):
            yield n, p


def okounkov_body(S: MonomialSeries, n_max: int, t_grid: Sequence = (), m_max: int = 1,
                  precision: int = 12) -> OkounkovEstimate:
    """Truncated Okounkov body and superlevel bodies Δ^t.

    The valuation is the lattice label of a monomial.  λ' is the Fekete
    estimate at truncation ``m_max``; since it is a lower bound, every Δ^t is
    an inner approximation.  λ' is only evaluated when ``t_grid`` is given or
    samples are requested through :func:`concave_transform`.
    """
    if S.grading_rank != 1:
        raise InputError("Okounkov bodies are built for singly graded series")
    if n_max < 1:
        raise InputError("n_max must be at least 1")
    points = {}
    for n, p in _normalized_points(S, n_max):
        x = tuple(Fraction(c, n) for c in p)
        points.setdefault(x, []).append((n, p))
    vertices = tuple(geometry.convex_hull(points))
    samples = ()
    thresholds = ()
    if t_grid is not None and len(t_grid):
        samples = _samples(S, points, m_max, precision)
        thresholds = tuple(
            (Fraction(t), tuple(geometry.convex_hull(x for x, v in samples if v >= Fraction(t))))
            for t in t_grid
        )
    return OkounkovEstimate(n_max, vertices, thresholds, samples)


def _samples(S, points: dict, m_max: int, precision: int) -> tuple:
    out = []
    for x, reps in points.items():
        best = max(fekete_lambda(S, n, p, m_max, precision).estimate / n for n, p in reps)
        out.append((x, best))
    return tuple(sorted(out))


def with_samples(S: MonomialSeries, est: OkounkovEstimate, m_max: int = 1,
                 precision: int = 12) -> OkounkovEstimate:
    """Attach λ' samples to an estimate built without them."""
    if est.samples:
        return est
    points = {}
    for n, p in _normalized_points(S, est.n_max):
        points.setdefault(tuple(Fraction(c, n) for c in p), []).append((n, p))
    return OkounkovEstimate(est.n_max, est.vertices, est.thresholds, _samples(S, points, m_max, precision))


class ConcaveTransform:
    """G_est(x) = max{t : x ∈ Δ^t} over the thresholds attained by the samples.

    Built once from an :class:`OkounkovEstimate` with samples; queries are a
    binary search over thresholds with one hull membership test per step.
    """

    def __init__(self, est: OkounkovEstimate, t_grid: Sequence | None = None):
        if not est.samples:
            raise InputError("the Okounkov estimate carries no λ' samples")
        self.vertices = est.vertices
        ordered = sorted(est.samples, key=lambda s: -s[1])
        self._points = [x for x, _ in ordered]
        self._values = [v for _, v in ordered]
        if t_grid is None:
            levels = sorted(set(self._values), reverse=True)
        else:
            levels = sorted({Fraction(t) for t in t_grid}, reverse=True)
        self.levels = levels
        self._neg = [-v for v in self._values]
        self._hulls = {0: []}  # prefix length -> hull of the first k samples
        self._dim = len(self._points[0])
        if self._dim == 1:
            lo, hi = [], []
            cur_lo = cur_hi = None
            for (x,) in self._points:
                cur_lo = x if cur_lo is None else min(cur_lo, x)
                cur_hi = x if cur_hi is None else max(cur_hi, x)
                lo.append(cur_lo)
                hi.append(cur_hi)
            self._prefix = (lo, hi)

    def _count_at(self, t) -> int:
        # number of samples with value >= t (values sorted descending)
        return bisect.bisect_right(self._neg, -t)

    def _hull(self, k: int) -> list:
        if k not in self._hulls:
            keys = sorted(self._hulls)
            base = keys[bisect.bisect_right(keys, k) - 1]
            self._hulls[k] = geometry.convex_hull(list(self._hulls[base]) + self._points[base:k])
        return self._hulls[k]

    def _inside(self, x, t) -> bool:
        k = self._count_at(t)
        if k == 0:
            return False
        if self._dim == 1:
            lo, hi = self._prefix
            return lo[k - 1] <= x[0] <= hi[k - 1]
        return geometry.contains(self._hull(k), x)

    def __call__(self, x) -> Extended:
        x = tuple(Fraction(c) for c in x)
        if not geometry.contains(self.vertices, x):
            raise DomainError(f"{x} lies outside the Okounkov body estimate")
        lo, hi = 0, len(self.levels) - 1
        if hi < 0 or not self._inside(x, self.levels[hi]):
            return -math.inf
        while lo < hi:
            mid = (lo + hi) // 2
            if self._inside(x, self.levels[mid]):
                hi = mid
            else:
                lo = mid + 1
        return self.levels[lo]


def concave_transform(S: MonomialSeries, x, n_max: int, m_max: int = 1,
                      t_grid: Sequence | None = None) -> Extended:
    """Inner estimate of the concave transform G at x from the truncation n <= n_max."""
    est = okounkov_body(S, n_max)
    est = with_samples(S, est, m_max)
    return ConcaveTransform(est, t_grid)(x)


# ---------------------------------------------------------------------------
# slope certificates


@dataclass(frozen=True)
class SlopeCertificate:
    S: Fraction
    T: Fraction
    generator_degree: int
    verified_up_to: int
    n_check: int
    valid: bool
    failures: tuple  # ((n, μ_min(E_n), S n + T), ...)


def slope_certificate(S: MonomialSeries, N: int, n_check: int, offset=0,
                      precision: int = 12) -> SlopeCertificate:
    """Homogeneous lower bound μ_min(E_n) >= S·n + T from generators of degree <= N.

    S = min_{1<=l<=N} (μ_min(E_l) - δ(l)) / l; T is the caller's offset (0 by
    default).  The bound is then verified for 1 <= n <= n_check; a failure
    means the series is not generated in degrees <= N.
    """
    if N < 1:
        raise InputError("generator degree must be at least 1")
    if S.grading_rank != 1:
        raise InputError("certificates are computed on singly graded series; bundle first")
    candidates = []
    for l in range(1, N + 1):
        st = S.stats(l)
        if st.count:
            candidates.append((st.lam_min - delta(S, l, precision)) / l)
    if not candidates:
        raise InputError("no non-empty piece in degrees 1..N")
    slope = min(candidates)
    T = Fraction(offset)
    failures = []
    verified = 0
    for n in range(1, n_check + 1):
        st = S.stats(n)
        if st.count and st.lam_min < slope * n + T:
            failures.append((n, st.lam_min, slope * n + T))
        elif not failures:
            verified = n
    return SlopeCertificate(slope, T, N, verified, n_check, not failures, tuple(failures))


def check_multigraded_bound(multi: MonomialSeries, cert: SlopeCertificate, total_max: int) -> list:
    """Multidegrees a with |a| <= total_max where μ_min(E_a) < S|a| + T (empty list = bound holds)."""
    failures = []
    for a in [multi.zero_degree()] + _degrees_up_to(multi, total_max):
        st = multi.stats(a)
        bound = cert.S * _total(a) + cert.T
        if st.count and st.lam_min < bound:
            failures.append((a, st.lam_min, bound))
    return failures


# ---------------------------------------------------------------------------
# projective-bundle direct sums


def bundle_sum_series(multi: MonomialSeries) -> MonomialSeries:
    """Series of P(L_1 ⊕ ... ⊕ L_r): degree m is ⊕_{|a|=m} E_a, orthogonally.

    Lattice labels become (a, m) ∈ Z^{r+d}, so products add multidegrees and
    points at once.  A rank-1 input is returned unchanged.
    """
    r = multi.grading_rank
    if r == 1:
        return multi
    d = multi.ambient_dim

    def multidegrees(m):
        return [a for a in _degrees_up_to(multi, m) if sum(a) == m] if m else [(0,) * r]

    def provider(m):
        out = []
        for a in multidegrees(m):
            out.extend((a + p, v) for p, v in multi.piece(a))
        return out

    def evaluator(m, point):
        a, p = point[:r], point[r:]
        if sum(a) != m or any(x < 0 for x in a):
            return None
        return multi.lam(a, p)

    def summarizer(m):
        return PieceStats.merge([multi.stats(a) for a in multidegrees(m)])

    return MonomialSeries(r + d, provider, C=multi.C, evaluator=evaluator,
                          summarizer=summarizer, name=f"bundle({multi.name})")
