"""Small exact linear algebra over the rationals.

Vectors are tuples of Fractions; a matrix is a sequence of row vectors.
Nothing here is fast, all of it is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .errors import InputError

Vector = tuple
Matrix = Sequence[Sequence[Fraction]]


def vec(values) -> Vector:
    return tuple(Fraction(v) for v in values)


def zero_vector(n: int) -> Vector:
    return (Fraction(0),) * n


def unit_vector(n: int, i: int) -> Vector:
    return tuple(Fraction(1 if j == i else 0) for j in range(n))


def identity(n: int) -> list[Vector]:
    return [unit_vector(n, i) for i in range(n)]


def add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def combine(coeffs, rows: Matrix) -> Vector:
    """Return sum_i coeffs[i] * rows[i]; ``rows`` must be non-empty."""
    n = len(rows[0])
    out = [Fraction(0)] * n
    for c, row in zip(coeffs, rows):
        if c:
            for j, a in enumerate(row):
                if a:
                    out[j] += c * a
    return tuple(out)


def transpose(m: Matrix, ncols: int | None = None) -> list[Vector]:
    if not m:
        return [()] * (ncols or 0)
    return [tuple(row[j] for row in m) for j in range(len(m[0]))]


def rref(rows: Matrix) -> tuple[list[Vector], list[int]]:
    """Reduced row echelon form; returns the non-zero rows and their pivot columns."""
    work = [list(map(Fraction, r)) for r in rows]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        inv = 1 / work[r][c]
        work[r] = [a * inv for a in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [a - f * b for a, b in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return [tuple(row) for row in work[:r]], pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def is_independent(rows: Matrix) -> bool:
    return rank(rows) == len(rows)


def span_key(rows: Matrix, ambient: int) -> tuple:
    """Canonical hashable form of span(rows): its RREF (empty tuple for the zero space)."""
    if not rows:
        return (ambient,)
    return (ambient,) + tuple(rref(rows)[0])


def kernel(m: Matrix, ncols: int) -> list[Vector]:
    """Basis of {x : m x = 0} for an (rows x ncols) matrix."""
    if not m:
        return identity(ncols)
    reduced, pivots = rref(m)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def inverse(m: Matrix) -> list[Vector]:
    n = len(m)
    if n == 0:
        return []
    aug = [tuple(row) + unit_vector(n, i) for i, row in enumerate(m)]
    reduced, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(reduced) < n:
        raise InputError("matrix is singular")
    return [row[n:] for row in reduced]


def solve_row_combination(rows: Matrix, v: Vector) -> Vector:
    """Coefficients c with sum_i c_i rows[i] = v, for independent ``rows``.

    Raises InputError when v is outside the span.
    """
    k = len(rows)
    if k == 0:
        if any(v):
            raise InputError("vector not in the span of the generators")
        return ()
    # columns of the system are the generators
    aug = [tuple(rows[i][j] for i in range(k)) + (v[j],) for j in range(len(v))]
    reduced, pivots = rref(aug)
    if k in pivots:
        raise InputError("vector not in the span of the generators")
    c = [Fraction(0)] * k
    for row, p in zip(reduced, pivots):
        c[p] = row[k]
    return tuple(c)


def extend_to_basis(rows: Matrix, ambient: int) -> list[Vector]:
    """Standard unit vectors completing independent ``rows`` to a basis, first-pivot order."""
    current = list(rows)
    extra = []
    r = rank(current) if current else 0
    for i in range(ambient):
        e = unit_vector(ambient, i)
        if rank(current + [e]) > r:
            current.append(e)
            extra.append(e)
            r += 1
            if r == ambient:
                break
    return extra


def kron(u: Vector, v: Vector) -> Vector:
    return tuple(a * b for a in u for b in v)
