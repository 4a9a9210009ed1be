import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from slope_lab import geometry, linalg
from slope_lab.errors import InputError
from slope_lab.rational import format_decimal, format_rational, ln_upper, parse_rational


@pytest.mark.parametrize("text,value", [("1/2", F(1, 2)), ("-3", F(-3)), (" 4 / 6 ", F(2, 3)), (7, F(7))])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("bad", ["1/0", "1.5", "a/b", "1/-2", 0.5, True, None])
def test_parse_rational_rejects(bad):
    with pytest.raises(InputError):
        parse_rational(bad)


def test_format_rational_canonical():
    assert format_rational(F(0)) == "0/1"
    assert format_rational(F(-4, 6)) == "-2/3"
    assert format_rational(math.inf) == "inf"
    assert format_rational(-math.inf) == "-inf"


def test_format_decimal_half_even():
    assert format_decimal(F(1, 3)) == "0.333333333333333"
    assert format_decimal(F(2)) == "2"
    # 0.5 ulp ties round to even at the 15th digit
    assert format_decimal(F(1000000000000005, 10**16)) == "0.100000000000000"
    assert format_decimal(F(1000000000000015, 10**16)) == "0.100000000000002"


@given(st.integers(min_value=1, max_value=10**6))
def test_ln_upper_is_tight_upper_bound(k):
    bound = ln_upper(k)
    assert float(bound) >= math.log(k) - 1e-15
    assert float(bound) - math.log(k) <= 2e-12


def test_ln_upper_exact_at_one():
    assert ln_upper(1) == 0


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=1, max_size=4))
def test_kernel_annihilates_and_has_right_dimension(rows):
    m = [linalg.vec(r) for r in rows]
    ker = linalg.kernel(m, 3)
    assert len(ker) == 3 - linalg.rank(m)
    for v in ker:
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in m)


@given(st.lists(st.lists(st.integers(-3, 3), min_size=3, max_size=3), min_size=3, max_size=3))
def test_inverse_roundtrip(rows):
    m = [linalg.vec(r) for r in rows]
    if linalg.rank(m) < 3:
        with pytest.raises(InputError):
            linalg.inverse(m)
        return
    inv = linalg.inverse(m)
    prod = [tuple(sum(m[i][k] * inv[k][j] for k in range(3)) for j in range(3)) for i in range(3)]
    assert prod == linalg.identity(3)


def test_extend_to_basis_completes():
    rows = [linalg.vec((1, 1, 0))]
    ext = linalg.extend_to_basis(rows, 3)
    assert linalg.rank(rows + ext) == 3 and len(ext) == 2


def test_convex_hull_square_with_interior_and_collinear():
    pts = [(0, 0), (2, 0), (2, 2), (0, 2), (1, 1), (1, 0)]
    hull = geometry.convex_hull(pts)
    assert set(hull) == {(0, 0), (2, 0), (2, 2), (0, 2)}
    assert geometry.polygon_area(hull) == 4


@given(st.lists(st.tuples(st.integers(-5, 5), st.integers(-5, 5)), min_size=3, max_size=12))
def test_hull_contains_all_points(pts):
    hull = geometry.convex_hull(pts)
    assert all(geometry.contains(hull, p) for p in pts)


def test_upper_planes_of_tent():
    # lifted tent over the unit square corners + a raised centre
    pts = [((F(0), F(0)), F(0)), ((F(1), F(0)), F(0)), ((F(0), F(1)), F(0)), ((F(1), F(1)), F(0)),
           ((F(1, 2), F(1, 2)), F(1))]
    planes = geometry.upper_planes(pts)
    assert len(planes) == 4
    for (a0, a1), b in planes:
        assert a0 * F(1, 2) + a1 * F(1, 2) + b == 1
