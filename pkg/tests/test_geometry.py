from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dtseries.geometry import (C, H0, K, LexSlope, NSVec, SheafClass, intersect, k_dot, ns_box,
                               slope_at, slope_fplus, slope_h0)

FIBER = NSVec(1, -1)


def test_intersection_examples():
    assert intersect(FIBER, FIBER) == 0
    for l in range(-5, 6):
        assert intersect(FIBER, NSVec(l, 1 - l)) == 1
    assert intersect(C, C) == -1
    assert intersect(H0, H0) == 1
    assert intersect(H0, C) == 0


def test_canonical_pairing():
    assert K == NSVec(-3, 1)
    assert k_dot(C) == -1
    assert k_dot(FIBER) == -2
    assert k_dot(NSVec(0, 0)) == 0


@pytest.mark.parametrize("cls, expected", [
    (SheafClass(1, NSVec(0, 2)), F(0)),
    (SheafClass(2, NSVec(1, 0)), F(1, 2)),
    (SheafClass(3, NSVec(-2, 5)), F(-2, 3)),
])
def test_slope_h0(cls, expected):
    assert slope_h0(cls) == expected


@pytest.mark.parametrize("cls, expected", [
    (SheafClass(1, NSVec(0, 2)), (2, -2)),
    (SheafClass(1, NSVec(1, -1)), (0, 1)),
    (SheafClass(2, NSVec(1, 1)), (1, F(-1, 2))),
])
def test_slope_fplus(cls, expected):
    assert slope_fplus(cls) == LexSlope(F(expected[0]), F(expected[1]))


def test_ns_box():
    assert ns_box(1) == [NSVec(0, 0)]
    assert ns_box(2) == [NSVec(0, 0), NSVec(0, 1), NSVec(1, 0), NSVec(1, 1)]
    for r in range(1, 7):
        assert len(ns_box(r)) == r * r
    with pytest.raises(ValueError):
        ns_box(0)


def test_rank_must_be_positive():
    with pytest.raises(ValueError):
        SheafClass(0, NSVec(0, 0))


vec = st.builds(NSVec, st.integers(-20, 20), st.integers(-20, 20))
cls = st.builds(SheafClass, st.integers(1, 10), vec)


@settings(max_examples=200, deadline=None)
@given(vec, vec, vec)
def test_intersection_symmetric_bilinear(a, b, c):
    assert intersect(a, b) == intersect(b, a)
    assert intersect(a + b, c) == intersect(a, c) + intersect(b, c)


@settings(max_examples=300, deadline=None)
@given(cls, cls)
def test_lexicographic_slope_matches_nearby_polarization(g1, g2):
    # every critical value of t for this box is at most 1 - 1/400
    t = F(999, 1000)
    diff = slope_at(g1, t) - slope_at(g2, t)
    lex = slope_fplus(g1), slope_fplus(g2)
    assert (diff > 0) == (lex[0] > lex[1])
    assert (diff == 0) == (lex[0] == lex[1])


def test_fiber_slopes_never_tie_across_a_split_of_the_total_class():
    for l in range(-4, 5):
        total = NSVec(l, 1 - l)
        for r1 in range(1, 9):
            for r2 in range(1, 9):
                for x in range(-10, 11):
                    for y in range(-10, 11):
                        b1 = NSVec(x, y)
                        b2 = total - b1
                        assert F(intersect(b1, FIBER), r1) != F(intersect(b2, FIBER), r2)
