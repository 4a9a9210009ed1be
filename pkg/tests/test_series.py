import math
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import divisor, green, interval, simplex, tent
from slope_lab import filtration as flt
from slope_lab.errors import DomainError, InputError
from slope_lab.series import (
    ConcaveTransform,
    MonomialSeries,
    asymptotic_invariants,
    bundle_sum_series,
    check_multigraded_bound,
    check_superadditivity,
    chi_volume_sequence,
    concave_transform,
    fekete_lambda,
    okounkov_body,
    series_space,
    slope_certificate,
    table_series,
    with_samples,
)
from slope_lab.toric import ConcavePLFunction, combine_divisors, to_multigraded_series, to_series


def zero_series(d=1):
    P = interval(0, 1) if d == 1 else simplex()
    return to_series(divisor(P, {"w1": ConcavePLFunction.constant(P, 0)}))


def floor_series(c: F, n_max: int = 40):
    """One monomial x^n per degree with λ = floor(n c): superadditive, limit c."""
    return table_series(1, {n: [((n,), F(math.floor(n * c)))] for n in range(1, n_max + 1)})


PLANTED = table_series(1, {1: [((1,), -1)], 2: [((2,), -4)]})


# --- construction -----------------------------------------------------------


def test_degree_zero_must_be_unit():
    bad = MonomialSeries(1, lambda n: [((0,), F(1))] if n == 0 else [])
    with pytest.raises(InputError):
        bad.piece(0)
    with pytest.raises(InputError):
        table_series(1, {0: [((1,), 0)]}).piece(0)


def test_repeated_points_rejected():
    S = table_series(1, {1: [((1,), 0), ((1,), 1)]})
    with pytest.raises(InputError):
        S.piece(1)


def test_multidegree_validation(tent_divisor, wide_divisor):
    M = to_multigraded_series([tent_divisor, wide_divisor])
    with pytest.raises(InputError):
        M.piece((1,))
    with pytest.raises(InputError):
        M.piece((-1, 2))


# --- series_space -----------------------------------------------------------


def test_series_space_examples(tent_divisor):
    S = to_series(tent_divisor)
    V0 = series_space(S, 0)
    assert V0.dim == 1 and V0.jumps == (0,)
    assert series_space(S, 4).jumps == (2, 1, 1, 0, 0)
    assert series_space(PLANTED, 3).dim == 0


def test_series_space_basis_is_monomial(tent_divisor):
    S = to_series(tent_divisor)
    V = series_space(S, 6)
    for k, (m, lam) in enumerate(S.piece(6)):
        e = tuple(F(int(i == k)) for i in range(V.dim))
        assert flt.lambda_value(V, e) == lam


# --- superadditivity ---------------------------------------------------------


def test_superadditivity_examples(tent_divisor, simplex_divisor, two_place_divisor):
    for D in (tent_divisor, two_place_divisor):
        assert check_superadditivity(to_series(D), 8, 3).ok
    assert check_superadditivity(to_series(simplex_divisor), 6).ok
    assert check_superadditivity(zero_series(), 8).ok


def test_planted_violation_is_found_exactly():
    r = check_superadditivity(PLANTED, 2)
    assert len(r.violations) == 1
    v = r.violations[0]
    assert v.degrees == (1, 1) and v.lhs == -4 and v.rhs == -2


def test_closure_violation_reported():
    S = table_series(1, {1: [((1,), 0)], 2: [((3,), 0)]})
    r = check_superadditivity(S, 2)
    assert [v.inequality for v in r.violations] == ["closure"]


def test_positive_level_relaxes_the_inequality():
    # two monomials per degree so ln dim > 0; C = 2 absorbs a deficit of 1 per pair
    table = {1: [((0,), 0), ((1,), 0)], 2: [((0,), 0), ((1,), -1), ((2,), 0)]}
    strict = check_superadditivity(table_series(1, table), 2)
    relaxed = check_superadditivity(table_series(1, table, C=2), 2)
    assert not strict.ok and relaxed.ok


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.fractions(min_value=-2, max_value=2, max_denominator=3),
                          st.fractions(min_value=-2, max_value=2, max_denominator=3)), min_size=1, max_size=3))
def test_concave_greens_are_superadditive(pieces):
    P = interval(-1, 2)
    D = divisor(P, {"w1": green(P, [((a,), b) for a, b in pieces])})
    assert check_superadditivity(to_series(D), 6, 2).ok


# --- Fekete -----------------------------------------------------------------


def test_fekete_toric_equals_lambda(tent_divisor):
    S = to_series(tent_divisor)
    for n in (1, 3, 4):
        for m, lam in S.piece(n):
            assert fekete_lambda(S, n, m, 16).estimate == lam


def test_fekete_zero_series():
    S = zero_series()
    assert fekete_lambda(S, 3, (1,), 8).estimate == 0


def test_fekete_floor_perturbed_recovers_limit():
    c = F(7, 3) + F(1, 97)
    S = floor_series(c, 40)
    res = fekete_lambda(S, 1, (1,), 16)
    assert c - F(1, 16) <= res.estimate <= c
    lo, hi = res.bracket
    assert lo <= hi
    assert list(res.lower_bounds) == sorted(res.lower_bounds)


def test_fekete_rejects_sections_outside(tent_divisor):
    S = to_series(tent_divisor)
    with pytest.raises(InputError):
        fekete_lambda(S, 1, (5,), 4)
    with pytest.raises(InputError):
        fekete_lambda(S, 1, {}, 4)


def test_fekete_with_level_subtracts_delta():
    table = {n: [((k,), F(0)) for k in range(n + 1)] for n in range(1, 9)}
    S = table_series(1, table, C=1)
    res = fekete_lambda(S, 1, (1,), 4)
    # every bound is -ln(dim)/m rounded up, so strictly below 0
    assert res.estimate < 0 and res.ratios == (0, 0, 0, 0)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.data())
def test_asymptotic_norm_is_ultrametric_and_multiplicative(n, data):
    P = interval(0, 2)
    D = divisor(P, {"w1": green(P, [((1,), 0), ((-1,), 2), ((0,), F(3, 4))])})
    S = to_series(D)
    pts = [m for m, _ in S.piece(n)]
    s, t = data.draw(st.sampled_from(pts)), data.draw(st.sampled_from(pts))
    lam = lambda x: fekete_lambda(S, n, x, 6).estimate
    if s != t:
        combo = {s: 1, t: data.draw(st.sampled_from([F(1), F(-2), F(1, 3)]))}
        assert fekete_lambda(S, n, combo, 6).estimate >= min(lam(s), lam(t))
    prod = tuple(a + b for a, b in zip(s, t))
    assert fekete_lambda(S, 2 * n, prod, 6).estimate >= lam(s) + lam(t)
    assert lam(s) >= S.lam(n, s)


# --- asymptotic invariants and χ-volumes ---------------------------------------


def test_asymptotic_invariants_examples(tent_divisor, constant_divisor):
    inv = asymptotic_invariants(to_series(tent_divisor), 40)
    assert inv.mu_max_trace[-1][1] == F(1, 2) and inv.mu_min_trace[-1][1] == 0
    assert inv.mu_max_asy == F(1, 2) and inv.mu_min_inf == 0 and inv.mu_min_sup == 0
    z = asymptotic_invariants(zero_series(), 10)
    assert (z.mu_max_asy, z.mu_min_inf, z.mu_min_sup) == (0, 0, 0)
    c = asymptotic_invariants(to_series(constant_divisor), 10)
    assert (c.mu_max_asy, c.mu_min_inf, c.mu_min_sup) == (1, 1, 1)


def test_asymptotic_nonconvergence_flag():
    # μ/n alternates between 0 and -1/2
    table = {n: [((n,), F(0 if n % 2 == 0 else -n, 2))] for n in range(1, 21)}
    inv = asymptotic_invariants(table_series(1, table), 20, tolerance=F(1, 10))
    assert not inv.converged
    inv_ok = asymptotic_invariants(zero_series(), 20, tolerance=0)
    assert inv_ok.converged


def test_chi_volume_examples(tent_divisor, constant_divisor):
    assert chi_volume_sequence(to_series(tent_divisor), 1, [4])[0].chi_est == F(1, 2)
    assert chi_volume_sequence(to_series(constant_divisor), 1, [10])[0].chi_est == F(11, 5)
    for n in (1, 5, 9):
        row = chi_volume_sequence(zero_series(2), 2, [n])[0]
        assert row.chi_est == 0 and row.vol_est == F((n + 1) * (n + 2), n * n)
    with pytest.raises(InputError):
        chi_volume_sequence(zero_series(), 1, [])


def test_chi_of_bundle_is_merge_of_components(tent_divisor, wide_divisor):
    M = to_multigraded_series([tent_divisor, wide_divisor])
    B = bundle_sum_series(M)
    for m in range(1, 6):
        merged = sum((M.stats((a, m - a)).total for a in range(m + 1)), F(0))
        assert chi_volume_sequence(B, 2, [m])[0].chi_est == merged / F(m**3, 6)


# --- Okounkov bodies ----------------------------------------------------------


def test_okounkov_examples(tent_divisor, simplex_divisor):
    S = to_series(tent_divisor)
    est = okounkov_body(S, 10, [F(3, 4), F(1, 4), 0])
    assert est.vertices == ((F(0),), (F(1),))
    assert est.thresholds[0][1] == ()
    assert est.thresholds[1][1] == ((F(1, 4),), (F(3, 4),))
    assert est.thresholds[2][1] == est.vertices
    assert okounkov_body(to_series(simplex_divisor), 1).vertices == ((0, 0), (1, 0), (0, 1))


def test_superlevel_bodies_are_nested(wide_divisor):
    from slope_lab import geometry

    S = to_series(wide_divisor)
    grid = [F(k, 4) for k in range(-1, 6)]
    est = okounkov_body(S, 12, grid)
    hulls = dict(est.thresholds)
    for lo, hi in zip(grid, grid[1:]):
        assert all(geometry.contains(hulls[lo], v) for v in hulls[hi])
        assert all(geometry.contains(est.vertices, v) for v in hulls[hi])


def test_concave_transform_examples(tent_divisor):
    S = to_series(tent_divisor)
    assert concave_transform(S, (F(1, 2),), 2) == F(1, 2)
    g = tent()
    G = ConcaveTransform(with_samples(S, okounkov_body(S, 12)))
    for k in range(13):
        x = (F(k, 12),)
        assert G(x) == g(x)
    for k in range(25):
        x = (F(k, 24),)
        assert G(x) <= g(x)
    with pytest.raises(DomainError):
        G((F(2),))


def test_concave_transform_below_inf_trace_is_whole_body(wide_divisor):
    S = to_series(wide_divisor)
    inv = asymptotic_invariants(S, 12)
    est = okounkov_body(S, 12, [inv.mu_min_inf - 1])
    assert est.thresholds[0][1] == est.vertices


def test_concave_transform_2d_matches_green(simplex_divisor):
    S = to_series(simplex_divisor)
    G = ConcaveTransform(with_samples(S, okounkov_body(S, 6)))
    g = simplex_divisor.green("w1")
    for i in range(7):
        for j in range(7 - i):
            x = (F(i, 6), F(j, 6))
            assert G(x) == g(x)


def test_concave_transforms_superadditive_under_product(tent_divisor, wide_divisor):
    D3 = combine_divisors([tent_divisor, wide_divisor], [1, 1])
    Gs = [ConcaveTransform(with_samples(to_series(D), okounkov_body(to_series(D), 8)))
          for D in (tent_divisor, wide_divisor, D3)]
    for i in range(9):
        for j in range(17):
            x, y = F(i, 8), F(j, 8)
            assert Gs[0]((x,)) + Gs[1]((y,)) <= Gs[2]((x + y,))


def test_concave_transform_extremes_vs_traces(wide_divisor):
    S = to_series(wide_divisor)
    inv = asymptotic_invariants(S, 12)
    G = ConcaveTransform(with_samples(S, okounkov_body(S, 12)))
    values = [G((F(k, 12),)) for k in range(25)]
    assert max(values) <= max(v for _, v in inv.mu_max_trace)
    assert min(values) >= inv.mu_min_inf


# --- certificates --------------------------------------------------------------


def test_certificate_examples(tent_divisor, constant_divisor):
    c = slope_certificate(to_series(tent_divisor), 1, 50)
    assert (c.S, c.T, c.valid, c.verified_up_to) == (0, 0, True, 50)
    c1 = slope_certificate(to_series(constant_divisor), 1, 50)
    assert c1.S == 1 and c1.valid
    assert slope_certificate(zero_series(), 2, 10).S == 0


def test_certificate_detects_wrong_generation_degree():
    table = {1: [((1,), 0)], 2: [((2,), 0)], 3: [((3,), -5)]}
    c = slope_certificate(table_series(1, table), 1, 3)
    assert not c.valid and c.verified_up_to == 2 and c.failures[0][0] == 3


def test_certificate_offset_is_passed_through(constant_divisor):
    c = slope_certificate(to_series(constant_divisor), 1, 20, offset=-1)
    assert c.T == -1 and c.valid


# --- projective-bundle sums ----------------------------------------------------


def test_bundle_examples(tent_divisor, wide_divisor):
    S = to_series(tent_divisor)
    assert bundle_sum_series(S) is S
    M = to_multigraded_series([tent_divisor, wide_divisor])
    B = bundle_sum_series(M)
    assert B.dim(1) == 5 and B.ambient_dim == 3
    for m in range(1, 5):
        mus = [M.stats((a, m - a)).lam_min for a in range(m + 1)]
        assert B.stats(m).lam_min == min(mus)
        assert [p for p, _ in B.piece(m)] == sorted(p for p, _ in B.piece(m))


def test_bundle_superadditive_and_certified(tent_divisor, wide_divisor):
    M = to_multigraded_series([tent_divisor, wide_divisor])
    B = bundle_sum_series(M)
    assert check_superadditivity(B, 5).ok
    assert check_superadditivity(M, 4).ok
    cert = slope_certificate(B, 1, 12)
    assert cert.valid and check_multigraded_bound(M, cert, 12) == []
