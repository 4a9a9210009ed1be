from fractions import Fraction as F

import pytest

from slope_lab.adelic import AdelicCurveSpec
from slope_lab.toric import ConcavePLFunction, LatticePolytope, ToricAdelicDivisor


def interval(lo, hi):
    return LatticePolytope.interval(F(lo), F(hi))


def simplex():
    return LatticePolytope.hull_of([(0, 0), (1, 0), (0, 1)])


def green(P, pieces):
    return ConcavePLFunction(P, tuple((tuple(F(c) for c in a), F(b)) for a, b in pieces))


def tent(P=None):
    """min(x, 1 - x) on [0, 1]."""
    P = P or interval(0, 1)
    return green(P, [((1,), 0), ((-1,), 1)])


def divisor(P, greens, curve=None):
    return ToricAdelicDivisor.build(P, greens, curve or AdelicCurveSpec.single())


@pytest.fixture
def one_place():
    return AdelicCurveSpec.single()


@pytest.fixture
def tent_divisor():
    return divisor(interval(0, 1), {"w1": tent()})


@pytest.fixture
def constant_divisor():
    P = interval(0, 1)
    return divisor(P, {"w1": ConcavePLFunction.constant(P, 1)})


@pytest.fixture
def simplex_divisor():
    T = simplex()
    return divisor(T, {"w1": green(T, [((-1, -1), 1)])})


@pytest.fixture
def wide_divisor():
    """[0, 2] with min(x/2 + 1/4, 2 - x)."""
    P = interval(0, 2)
    return divisor(P, {"w1": green(P, [((F(1, 2),), F(1, 4)), ((-1,), 2)])})


@pytest.fixture
def two_place_divisor():
    curve = AdelicCurveSpec((("a", F(1, 2)), ("b", F(2))))
    P = interval(0, 1)
    return divisor(P, {"a": tent(P), "b": green(P, [((0,), F(1, 3)), ((-1,), F(1, 2))])}, curve)


# one PASS/FAIL line per acceptance criterion in the terminal summary
_CRITERIA: list = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        label = dict(report.user_properties).get("criterion", report.nodeid)
        _CRITERIA.append((label, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")
