"""Rational polydisc grids and exact grid sup norms."""

from fractions import Fraction

import pytest

from formcert.grid import GridSpec, sup_norm, unit_interval_points
from formcert.ring import Ring

F = Fraction


@pytest.fixture
def R1():
    return Ring.space(["x1"])


def test_axis_points_endpoints():
    K = GridSpec((0,), (1,), 3)
    assert K.axis_points(0) == [F(-1), F(0), F(1)]


def test_points_cartesian():
    K = GridSpec((0, 0), (1, 1), 2)
    assert len(list(K.points())) == 4


def test_unit_interval_points():
    pts = unit_interval_points(3)
    assert pts == [F(0), F(1, 2), F(1)]


def test_sup_norm_linear(R1):
    K = GridSpec((0,), (1,), 3)
    assert sup_norm(R1.parse("x1"), K) == 1


def test_sup_norm_attained_inside(R1):
    K = GridSpec((0,), (1,), 5)
    assert sup_norm(R1.parse("x1^2 - 1"), K) == 1


def test_sup_norm_zero(R1):
    K = GridSpec((0,), (1,), 4)
    assert sup_norm(R1.zero, K) == 0


def test_sup_norm_monotone_under_refinement(R1):
    p = R1.parse("x1^3 - 1/2*x1 + 1/7")
    vals = [
        sup_norm(p, GridSpec((0,), (1,), s)) for s in (2, 3, 5, 9, 17)
    ]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_sup_norm_exact_rational(R1):
    K = GridSpec((F(1, 2),), (F(1, 2),), 3)
    assert sup_norm(R1.parse("x1"), K) == 1
