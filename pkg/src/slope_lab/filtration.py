"""R-filtered vector spaces over the trivially valued field Q.

An ultrametric norm over a trivially valued field is the same thing as a
decreasing R-filtration, and every such filtration on a finite-dimensional
space admits an orthogonal adapted basis.  A :class:`FilteredSpace` stores
exactly that basis together with the jump value of each basis vector, so that
norms, slopes, sub/quotient norms, duals, sums and tensor products all reduce
to exact rational linear algebra.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from . import linalg
from .errors import InputError
from .rational import Extended

__all__ = [
    "FilteredSpace",
    "SlopeProfile",
    "lambda_value",
    "slope_profile",
    "restrict",
    "quotient",
    "project_to_quotient",
    "dual",
    "direct_sum",
    "tensor",
    "hn_filtration",
    "hn_filtration_bruteforce",
    "filtration_piece",
    "same_filtration",
    "flag_pieces",
    "from_chain",
]


@dataclass(frozen=True)
class FilteredSpace:
    """Coordinate space Q^dim with an orthogonal adapted basis and jump values.

    ``basis[i]`` has λ equal to ``jumps[i]``; jumps are sorted non-increasing.
    The filtration is F^t = span{basis[i] : jumps[i] >= t}.
    """

    basis: tuple
    jumps: tuple

    def __post_init__(self):
        basis = tuple(linalg.vec(b) for b in self.basis)
        jumps = tuple(Fraction(j) for j in self.jumps)
        if len(basis) != len(jumps):
            raise InputError("basis and jumps must have the same length")
        if any(len(b) != len(basis) for b in basis):
            raise InputError("basis must be a square matrix")
        if any(jumps[i] < jumps[i + 1] for i in range(len(jumps) - 1)):
            raise InputError("jumps must be sorted non-increasing")
        if basis and not _is_permutation(basis) and not linalg.is_independent(basis):
            raise InputError("basis matrix is singular")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "jumps", jumps)

    @property
    def dim(self) -> int:
        return len(self.jumps)

    @classmethod
    def from_jumps(cls, jumps: Iterable) -> "FilteredSpace":
        """Standard basis carrying the given jumps (re-sorted non-increasing)."""
        js = sorted((Fraction(j) for j in jumps), reverse=True)
        return cls(tuple(linalg.identity(len(js))), tuple(js))

    @classmethod
    def zero(cls) -> "FilteredSpace":
        return cls((), ())

    @cached_property
    def _coordinates(self):
        # columns of the inverse read off coefficients in the adapted basis
        return linalg.inverse(self.basis)

    def coefficients(self, v: Sequence) -> tuple:
        """Coefficients of ``v`` in the adapted basis."""
        if len(v) != self.dim:
            raise InputError(f"vector of length {len(v)} in a space of dimension {self.dim}")
        if self.dim == 0:
            return ()
        return linalg.combine(linalg.vec(v), self._coordinates)


def _is_permutation(basis) -> bool:
    # monomial bases are permuted unit vectors; skip elimination for them
    seen = set()
    for row in basis:
        nz = [i for i, c in enumerate(row) if c]
        if len(nz) != 1 or row[nz[0]] != 1 or nz[0] in seen:
            return False
        seen.add(nz[0])
    return True


@dataclass(frozen=True)
class SlopeProfile:
    slopes: tuple
    degree: Fraction
    positive_degree: Fraction
    mu_min: Extended
    mu_max: Extended

    @property
    def rank(self) -> int:
        return len(self.slopes)


def lambda_value(V: FilteredSpace, v: Sequence) -> Extended:
    """λ(v) = sup{t : v ∈ F^t}; +inf for the zero vector."""
    coeffs = V.coefficients(v)
    values = [j for c, j in zip(coeffs, V.jumps) if c != 0]
    return min(values) if values else math.inf


def slope_profile(V: FilteredSpace) -> SlopeProfile:
    slopes = tuple(sorted(V.jumps, reverse=True))
    degree = sum(slopes, Fraction(0))
    positive = sum((max(s, Fraction(0)) for s in slopes), Fraction(0))
    if slopes:
        return SlopeProfile(slopes, degree, positive, slopes[-1], slopes[0])
    return SlopeProfile((), Fraction(0), Fraction(0), math.inf, -math.inf)


def filtration_piece(V: FilteredSpace, t) -> list:
    """Generators of F^t(V)."""
    return [b for b, j in zip(V.basis, V.jumps) if j >= t]


def from_chain(dim: int, chain: Sequence[tuple]) -> FilteredSpace:
    """Build a FilteredSpace from a decreasing chain of subspaces.

    ``chain`` lists ``(t, generators)`` with t strictly decreasing and nested
    subspaces; the last subspace must be the whole space.  Generators of each
    step are scanned in order and kept when they enlarge the current span.
    """
    basis: list = []
    jumps: list = []
    r = 0
    for t, gens in chain:
        for g in gens:
            g = linalg.vec(g)
            if linalg.rank(basis + [g]) > r:
                basis.append(g)
                jumps.append(Fraction(t))
                r += 1
    if r != dim:
        raise InputError("filtration chain does not exhaust the space")
    return FilteredSpace(tuple(basis), tuple(jumps))


def _distinct_jumps(V: FilteredSpace) -> list:
    return sorted(set(V.jumps), reverse=True)


def _check_generators(V: FilteredSpace, gens: Sequence) -> list:
    gens = [linalg.vec(g) for g in gens]
    if any(len(g) != V.dim for g in gens):
        raise InputError("generator dimension does not match the space")
    if gens and not linalg.is_independent(gens):
        raise InputError("generators are linearly dependent")
    return gens


def restrict(V: FilteredSpace, F: Sequence) -> FilteredSpace:
    """Restricted filtration t ↦ F ∩ F^t(V), in coordinates relative to the generators of F."""
    gens = _check_generators(V, F)
    k = len(gens)
    if k == 0:
        return FilteredSpace.zero()
    # row j: generator j expressed in the adapted basis of V
    coords = [V.coefficients(g) for g in gens]
    chain = []
    for t in _distinct_jumps(V):
        low = [i for i, j in enumerate(V.jumps) if j < t]
        if low:
            # c with sum_j c_j coords[j][i] = 0 for every low index i
            system = [tuple(coords[j][i] for j in range(k)) for i in low]
            piece = linalg.kernel(system, k)
        else:
            piece = linalg.identity(k)
        chain.append((t, piece))
    return from_chain(k, chain)


def _quotient_frame(V: FilteredSpace, gens: list):
    complement = linalg.extend_to_basis(gens, V.dim)
    frame = gens + complement
    k = len(gens)

    def project(v):
        c = linalg.solve_row_combination(frame, linalg.vec(v))
        return c[k:]

    return complement, project


def project_to_quotient(V: FilteredSpace, F: Sequence, v: Sequence) -> tuple:
    """Coordinates of the class of ``v`` in V/F, matching :func:`quotient`."""
    gens = _check_generators(V, F)
    _, project = _quotient_frame(V, gens)
    return project(v)


def quotient(V: FilteredSpace, F: Sequence) -> FilteredSpace:
    """Quotient filtration t ↦ image of F^t(V) in V/F.

    Quotient coordinates are the coefficients on the unit vectors completing
    F to a basis of the ambient space (see :func:`project_to_quotient`).
    """
    gens = _check_generators(V, F)
    complement, project = _quotient_frame(V, gens)
    q = len(complement)
    if q == 0:
        return FilteredSpace.zero()
    images = [project(b) for b in V.basis]
    chain = [(t, [im for im, j in zip(images, V.jumps) if j >= t]) for t in _distinct_jumps(V)]
    return from_chain(q, chain)


def dual(V: FilteredSpace) -> FilteredSpace:
    """Dual basis with negated jumps; an involution."""
    if V.dim == 0:
        return V
    dual_basis = linalg.transpose(linalg.inverse(V.basis))
    return FilteredSpace(tuple(reversed(dual_basis)), tuple(-j for j in reversed(V.jumps)))


def _sorted_space(basis: list, jumps: list) -> FilteredSpace:
    order = sorted(range(len(jumps)), key=lambda i: -jumps[i])
    return FilteredSpace(tuple(basis[i] for i in order), tuple(jumps[i] for i in order))


def direct_sum(Vs: Sequence[FilteredSpace]) -> FilteredSpace:
    """Orthogonal direct sum: block-diagonal basis, merged jump multiset."""
    total = sum(V.dim for V in Vs)
    basis, jumps = [], []
    offset = 0
    for V in Vs:
        for b, j in zip(V.basis, V.jumps):
            row = [Fraction(0)] * total
            row[offset:offset + V.dim] = b
            basis.append(tuple(row))
            jumps.append(j)
        offset += V.dim
    return _sorted_space(basis, jumps)


def tensor(V: FilteredSpace, W: FilteredSpace) -> FilteredSpace:
    """Tensor product; e_i ⊗ f_j carries jumps_V[i] + jumps_W[j].

    Coordinates of V ⊗ W are ordered (i, j) -> i * W.dim + j.
    """
    basis, jumps = [], []
    for b, s in zip(V.basis, V.jumps):
        for c, t in zip(W.basis, W.jumps):
            basis.append(linalg.kron(b, c))
            jumps.append(s + t)
    return _sorted_space(basis, jumps)


def hn_filtration(V: FilteredSpace) -> FilteredSpace:
    """Harder–Narasimhan filtration, via F_hn^t = {s : λ(s) >= t}.

    Each step is recomputed as the common kernel of the adapted coordinate
    functionals of the jumps below t, so the returned basis is canonical
    (kernel-derived) rather than a copy of the input basis.
    """
    if V.dim == 0:
        return V
    coord_cols = linalg.transpose(V._coordinates)  # functional i: v ↦ coefficient i
    chain = []
    for t in _distinct_jumps(V):
        low = [coord_cols[i] for i, j in enumerate(V.jumps) if j < t]
        chain.append((t, linalg.kernel(low, V.dim)))
    return from_chain(V.dim, chain)


def _default_pool(V: FilteredSpace) -> list:
    pool = list(V.basis)
    pool += [linalg.add(a, b) for a, b in itertools.combinations(V.basis, 2)]
    return pool


def hn_filtration_bruteforce(V: FilteredSpace, pool: Sequence | None = None,
                             max_subset: int = 2) -> FilteredSpace:
    """HN filtration by maximizing μ_min over sampled subspaces.

    For every jump threshold t, sums all subspaces spanned by subsets (size
    <= ``max_subset``) of the test-vector pool whose restricted minimal slope
    is >= t.  A falsifier for :func:`hn_filtration`, not a proof.
    """
    if V.dim == 0:
        return V
    pool = [linalg.vec(p) for p in (pool if pool is not None else _default_pool(V))]
    candidates = []
    for size in range(1, max_subset + 1):
        for subset in itertools.combinations(pool, size):
            subset = list(subset)
            if not linalg.is_independent(subset):
                continue
            candidates.append((slope_profile(restrict(V, subset)).mu_min, subset))
    chain = []
    for t in _distinct_jumps(V):
        gens = [g for mu, subset in candidates if mu >= t for g in subset]
        chain.append((t, gens))
    return from_chain(V.dim, chain)


def same_filtration(V: FilteredSpace, W: FilteredSpace) -> bool:
    """True when V and W define the same map t ↦ F^t on the same ambient space."""
    if V.dim != W.dim:
        return False
    for t in set(V.jumps) | set(W.jumps):
        a = linalg.span_key(filtration_piece(V, t), V.dim)
        b = linalg.span_key(filtration_piece(W, t), W.dim)
        if a != b:
            return False
    return True


def flag_pieces(V: FilteredSpace, flag: Sequence[Sequence]) -> list:
    """Subquotients E_i / E_{i-1} of a flag 0 = E_0 ⊂ E_1 ⊂ ... ⊂ E_n = V.

    ``flag`` lists generator sets for E_1, ..., E_n.  Each piece carries the
    quotient of the restricted filtration.
    """
    if not flag:
        raise InputError("empty flag")
    previous: list = []
    pieces = []
    last_rank = 0
    for gens in flag:
        gens = _check_generators(V, gens)
        if len(gens) <= last_rank:
            raise InputError("flag must be strictly increasing")
        try:
            lower = [linalg.solve_row_combination(gens, p) for p in previous]
        except InputError:
            raise InputError("flag is not nested") from None
        pieces.append(quotient(restrict(V, gens), lower))
        previous = gens
        last_rank = len(gens)
    if last_rank != V.dim:
        raise InputError("flag must end at the whole space")
    return pieces
