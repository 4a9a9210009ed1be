"""Seeded random filtered spaces and the exact identities of the slope calculus.

Used by the ``check-axioms`` experiment and the acceptance suite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import filtration as flt
from . import linalg

AXIOMS = (
    "exact-sequence-mu-min",
    "flag-degree-additivity",
    "degree-equals-positive-degree",
    "hn-fixed-point",
    "tensor-mu-min-additivity",
    "dual-involution",
    "subspace-monotonicity",
)


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 3) -> list:
    return [tuple(Fraction(rng.randint(-bound, bound)) for _ in range(cols)) for _ in range(rows)]


def random_invertible(rng: random.Random, n: int) -> list:
    while True:
        m = random_matrix(rng, n, n)
        if linalg.is_independent(m):
            return m


def random_jumps(rng: random.Random, n: int) -> list:
    # small pool so ties (repeated jumps) are common
    pool = [Fraction(rng.randint(-6, 6), rng.choice((1, 2, 3))) for _ in range(max(1, n // 2 + 1))]
    return sorted((rng.choice(pool) for _ in range(n)), reverse=True)


def random_space(rng: random.Random, dim_max: int = 6, nonnegative: bool = False) -> flt.FilteredSpace:
    n = rng.randint(1, dim_max)
    jumps = random_jumps(rng, n)
    if nonnegative:
        jumps = [abs(j) for j in jumps]
        jumps.sort(reverse=True)
    return flt.FilteredSpace(tuple(random_invertible(rng, n)), tuple(jumps))


def random_subspace(rng: random.Random, n: int, k: int) -> list:
    while True:
        gens = random_matrix(rng, k, n)
        if linalg.is_independent(gens):
            return gens


def random_flag(rng: random.Random, n: int) -> list:
    """Nested generator lists ending at the whole space."""
    frame = random_invertible(rng, n)
    cuts = sorted(rng.sample(range(1, n), rng.randint(0, n - 1))) + [n]
    return [frame[:c] for c in cuts]


@dataclass(frozen=True)
class AxiomOutcome:
    axiom: str
    trial: int
    ok: bool
    detail: str


def check_space(rng: random.Random, V: flt.FilteredSpace, trial: int) -> list:
    """Run every identity on one space; subspaces and flags are drawn from ``rng``."""
    out = []
    n = V.dim
    prof = flt.slope_profile(V)

    F = random_subspace(rng, n, rng.randint(1, n))
    sub = flt.slope_profile(flt.restrict(V, F))
    quo = flt.slope_profile(flt.quotient(V, F))
    ok = prof.mu_min == min(sub.mu_min, quo.mu_min)
    out.append(AxiomOutcome(AXIOMS[0], trial, ok, f"{prof.mu_min} vs {sub.mu_min}, {quo.mu_min}"))

    flag = random_flag(rng, n)
    pieces = flt.flag_pieces(V, flag)
    total = sum((flt.slope_profile(p).degree for p in pieces), Fraction(0))
    out.append(AxiomOutcome(AXIOMS[1], trial, total == prof.degree, f"{total} vs {prof.degree}"))

    if prof.mu_min >= 0:
        ok = prof.degree == prof.positive_degree
    else:
        ok = prof.positive_degree >= prof.degree
    out.append(AxiomOutcome(AXIOMS[2], trial, ok, f"{prof.degree} vs {prof.positive_degree}"))

    out.append(AxiomOutcome(AXIOMS[3], trial, flt.same_filtration(flt.hn_filtration(V), V), ""))

    W = random_space(rng, 3)
    mu = flt.slope_profile(flt.tensor(V, W)).mu_min
    expected = prof.mu_min + flt.slope_profile(W).mu_min
    out.append(AxiomOutcome(AXIOMS[4], trial, mu == expected, f"{mu} vs {expected}"))

    dd = flt.dual(flt.dual(V))
    ok = flt.same_filtration(dd, V) and flt.slope_profile(flt.dual(V)).slopes == tuple(
        -s for s in reversed(prof.slopes))
    out.append(AxiomOutcome(AXIOMS[5], trial, ok, ""))

    out.append(AxiomOutcome(AXIOMS[6], trial, sub.mu_min >= prof.mu_min, f"{sub.mu_min} vs {prof.mu_min}"))
    return out


def run_axioms(seed: int, trials: int, dim_max: int = 6) -> list:
    """Outcomes for ``trials`` random spaces; every third space has non-negative jumps."""
    rng = random.Random(seed)
    outcomes = []
    for trial in range(trials):
        V = random_space(rng, dim_max, nonnegative=trial % 3 == 0)
        outcomes.extend(check_space(rng, V, trial))
    return outcomes
