from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from slope_lab import filtration as flt
from slope_lab import linalg
from slope_lab.adelic import (
    AdelicCurveSpec,
    DiagonalAdelicBundle,
    flag_degree_check,
    hn_sorted,
    line_degree,
    properness_defect,
    pushforward_toric,
    total_degree,
    twist,
)
from slope_lab.errors import InputError
from slope_lab.series import series_space
from slope_lab.toric import to_series

CURVE = AdelicCurveSpec((("w1", F(1, 2)), ("w2", F(2))))
RUNNING = DiagonalAdelicBundle.build(CURVE, ["e1", "e2"], {"w1": (2, 0), "w2": (1, 1)})


def test_curve_validation():
    with pytest.raises(InputError):
        AdelicCurveSpec((("a", 1), ("a", 2)))
    with pytest.raises(InputError):
        AdelicCurveSpec((("a", 0),))
    assert AdelicCurveSpec.archimedean_mass == 0


@given(st.fractions(max_denominator=50).filter(lambda q: q != 0))
def test_properness(alpha):
    assert properness_defect(CURVE, alpha) == 0


def test_total_degree_examples():
    zero = DiagonalAdelicBundle.build(CURVE, ["e1", "e2"], {"w1": (0, 0), "w2": (0, 0)})
    assert total_degree(zero) == 0
    assert total_degree(RUNNING) == 5
    empty = DiagonalAdelicBundle.build(CURVE, [], {"w1": (), "w2": ()})
    assert total_degree(empty) == 0


def test_bundle_requires_every_place():
    with pytest.raises(InputError):
        DiagonalAdelicBundle.build(CURVE, ["e1"], {"w1": (1,)})


def test_twist_examples():
    assert twist(RUNNING, {}) == RUNNING
    assert total_degree(twist(RUNNING, {"w1": 2, "w2": 0})) == 7
    line = DiagonalAdelicBundle.build(CURVE, ["e"], {"w1": (3,), "w2": (-1,)})
    f = {"w1": F(1, 3), "w2": F(-5, 4)}
    assert total_degree(twist(line, f)) - total_degree(line) == CURVE.integral(f)


def test_hn_sorted_examples():
    hn = hn_sorted(RUNNING)
    assert hn.slopes == (3, 2) and hn.mu_max == 3 and hn.mu_min == 2
    flat = DiagonalAdelicBundle.build(CURVE, ["a", "b"], {"w1": (1, 1), "w2": (4, 4)})
    assert len(hn_sorted(flat).flag) == 1


def test_hn_mu_max_against_test_lines():
    pool = [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2)]
    assert max(line_degree(RUNNING, v) for v in pool) == hn_sorted(RUNNING).mu_max


def test_flag_check_examples():
    full = flag_degree_check(RUNNING, [[(1, 0)], [(1, 0), (0, 1)]])
    assert full.ok and full.total == 5
    trivial = flag_degree_check(RUNNING, [[(1, 0), (0, 1)]])
    assert trivial.ok
    with pytest.raises(InputError):
        flag_degree_check(RUNNING, [[(1, 0)], [(2, 0)]])


@st.composite
def bundles(draw, rank=None):
    r = rank if rank is not None else draw(st.integers(1, 4))
    vals = st.fractions(min_value=-3, max_value=3, max_denominator=4)
    lam = {p: tuple(draw(vals) for _ in range(r)) for p in CURVE.labels}
    return DiagonalAdelicBundle.build(CURVE, [f"e{i}" for i in range(r)], lam)


@settings(max_examples=40)
@given(bundles(rank=4), st.data())
def test_random_flag_has_zero_slack(B, data):
    rows = data.draw(st.lists(st.lists(st.integers(-2, 2), min_size=4, max_size=4), min_size=4, max_size=4))
    frame = [linalg.vec(r) for r in rows]
    if not linalg.is_independent(frame):
        return
    cuts = sorted(data.draw(st.sets(st.integers(1, 3), min_size=2, max_size=2))) + [4]
    assert flag_degree_check(B, [frame[:c] for c in cuts]).slack == 0


@given(bundles(), st.fixed_dictionaries({p: st.fractions(max_denominator=5) for p in CURVE.labels}))
def test_twist_shifts_every_slope(B, f):
    shift = CURVE.integral(f)
    before, after = hn_sorted(B), hn_sorted(twist(B, f))
    assert after.slopes == tuple(s + shift for s in before.slopes)
    assert after.order == before.order
    assert total_degree(twist(B, f)) == total_degree(B) + B.rank * shift


@given(bundles(), bundles())
def test_total_degree_additive_under_direct_sum(B, C):
    lam = {p: B.values(p) + C.values(p) for p in CURVE.labels}
    S = DiagonalAdelicBundle.build(CURVE, B.labels + C.labels, lam)
    assert total_degree(S) == total_degree(B) + total_degree(C)


@given(bundles())
def test_degree_equals_positive_degree_when_slopes_nonnegative(B):
    hn = hn_sorted(B)
    positive = sum((max(s, 0) for s in hn.slopes), F(0))
    if hn.mu_min >= 0:
        assert positive == total_degree(B)
    else:
        assert positive >= total_degree(B)


@given(bundles(rank=3))
def test_hn_flag_minimal_slopes_match_place_calculus(B):
    # basis lines of the top HN step, restricted place by place, carry degree μ_max
    hn = hn_sorted(B)
    first_step = [tuple(F(int(i == j)) for j in range(3)) for i in hn.flag[0][1]]
    sub_degs = [
        sum((CURVE.weight(p) * flt.restrict(B.place_space(p), [v]).jumps[0] for p in CURVE.labels), F(0))
        for v in first_step
    ]
    assert min(sub_degs) == hn.mu_max


def test_pushforward_examples(tent_divisor):
    B0 = pushforward_toric(tent_divisor, 0)
    assert B0.rank == 1 and total_degree(B0) == 0
    assert hn_sorted(pushforward_toric(tent_divisor, 4)).slopes == (2, 1, 1, 0, 0)


def test_pushforward_matches_series_two_places(two_place_divisor):
    S = to_series(two_place_divisor)
    for n in range(0, 9):
        B = pushforward_toric(two_place_divisor, n)
        assert hn_sorted(B).slopes == flt.slope_profile(series_space(S, n)).slopes
