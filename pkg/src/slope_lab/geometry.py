"""Exact convex geometry in dimension <= 3 over the rationals.

Points are tuples of Fractions.  Polygons are CCW vertex lists without
repeated or collinear vertices.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Sequence

from . import linalg


def cross(o, a, b) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable) -> list:
    """Exact hull vertices of a finite point set in dimension 1 or 2.

    Dimension 1 returns ``[lo, hi]`` (or one point); dimension 2 returns the
    CCW polygon via Andrew's monotone chain, or the two endpoints of a
    collinear set.
    """
    pts = sorted(set(tuple(Fraction(c) for c in p) for p in points))
    if not pts:
        return []
    if len(pts[0]) == 1:
        return [pts[0]] if pts[0] == pts[-1] else [pts[0], pts[-1]]
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain = []
        for p in seq:
            while len(chain) >= 2 and cross(chain[-2], chain[-1], p) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    if len(hull) == 2 and hull[0] == hull[1]:
        return hull[:1]
    return hull


def polygon_area(poly: Sequence) -> Fraction:
    """Signed shoelace area (positive for CCW)."""
    n = len(poly)
    if n < 3:
        return Fraction(0)
    s = Fraction(0)
    for i in range(n):
        x1, y1 = poly[i]
        x2, y2 = poly[(i + 1) % n]
        s += x1 * y2 - x2 * y1
    return s / 2


def facets(poly: Sequence) -> list:
    """Inequalities (a, b) with a·x <= b describing a CCW polygon or an interval."""
    if len(poly[0]) == 1:
        lo, hi = poly[0][0], poly[-1][0]
        return [((Fraction(-1),), -lo), ((Fraction(1),), hi)]
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        a = (q[1] - p[1], p[0] - q[0])
        out.append((a, a[0] * p[0] + a[1] * p[1]))
    return out


def contains(poly: Sequence, x: Sequence) -> bool:
    """Closed membership test for a hull returned by :func:`convex_hull`."""
    x = tuple(Fraction(c) for c in x)
    if len(poly) == 1:
        return tuple(poly[0]) == x
    if len(poly[0]) == 1:
        return poly[0][0] <= x[0] <= poly[-1][0]
    if len(poly) == 2:
        p, q = poly
        if cross(p, q, x) != 0:
            return False
        return min(p[0], q[0]) <= x[0] <= max(p[0], q[0]) and min(p[1], q[1]) <= x[1] <= max(p[1], q[1])
    return all(cross(poly[i], poly[(i + 1) % len(poly)], x) >= 0 for i in range(len(poly)))


def clip(poly: Sequence, a: Sequence, b) -> list:
    """Intersect a CCW polygon with the half-plane a·x <= b (Sutherland–Hodgman)."""
    if not poly:
        return []

    def val(p):
        return a[0] * p[0] + a[1] * p[1] - b

    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        vp, vq = val(p), val(q)
        if vp <= 0:
            out.append(p)
        if (vp < 0 < vq) or (vq < 0 < vp):
            s = vp / (vp - vq)
            out.append((p[0] + s * (q[0] - p[0]), p[1] + s * (q[1] - p[1])))
    return _dedupe_cycle(out)


def _dedupe_cycle(pts: list) -> list:
    out = []
    for p in pts:
        if not out or out[-1] != p:
            out.append(p)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def clip_interval(lo, hi, a, b):
    """Intersect [lo, hi] with a·x <= b in dimension 1; None when empty."""
    if a > 0:
        hi = min(hi, b / a)
    elif a < 0:
        lo = max(lo, b / a)
    elif b < 0:
        return None
    return (lo, hi) if lo <= hi else None


def minkowski_sum(P: Sequence, Q: Sequence) -> list:
    return convex_hull(linalg.add(p, q) for p in P for q in Q)


def triangulate(poly: Sequence) -> list:
    """Fan triangulation of a convex polygon."""
    return [(poly[0], poly[i], poly[i + 1]) for i in range(1, len(poly) - 1)]


def upper_hull_2d(points: Iterable) -> list:
    """Upper hull of planar points (x, h), left to right, collinear points dropped."""
    best: dict = {}
    for x, h in points:
        if x not in best or h > best[x]:
            best[x] = h
    pts = sorted(best.items())
    chain: list = []
    for p in pts:
        while len(chain) >= 2 and cross(chain[-2], chain[-1], p) >= 0:
            chain.pop()
        chain.append(p)
    return chain


def upper_planes(points: Sequence) -> list:
    """Non-vertical supporting planes h = a·x + b lying above every lifted point.

    ``points`` are ``(x, h)`` with x in Q^2.  Every basic solution of the
    small LP min{a·x + b : a·x_k + b >= h_k} is enumerated: planes through
    three affinely independent points that dominate the whole set.
    """
    best: dict = {}
    for x, h in points:
        x = tuple(x)
        if x not in best or h > best[x]:
            best[x] = h
    pts = list(best.items())
    planes = set()
    for (p, hp), (q, hq), (r, hr) in itertools.combinations(pts, 3):
        det = cross(p, q, r)
        if det == 0:
            continue
        # solve a0*x + a1*y + b = h through the three points (Cramer)
        rows = [(p[0], p[1], Fraction(1), hp), (q[0], q[1], Fraction(1), hq), (r[0], r[1], Fraction(1), hr)]
        reduced, pivots = linalg.rref(rows)
        a0, a1, b = reduced[0][3], reduced[1][3], reduced[2][3]
        if all(a0 * s[0] + a1 * s[1] + b >= hs for s, hs in pts):
            planes.add(((a0, a1), b))
    return sorted(planes)
