from fractions import Fraction as F

import pytest

from dtseries.acceptance import HILBERT_EULER, wall_bruteforce_auto, wall_oracle_cases
from dtseries.engine import (DTEngine, GroupedWall, WallData, blowup_factor, dt_series,
                             order_to_prec, prec_to_order, s_series, s_series_bruteforce,
                             u_series, u_series_bruteforce, walls)
from dtseries.geometry import NSVec
from dtseries.qseries import QSeries

RANK2 = WallData.make(1, [(1, (0, 0)), (1, (0, 0))], [(1, 2)])


def test_wall_enumeration():
    assert list(walls(2, 1)) == [RANK2]
    rank3 = list(walls(3, 1))
    assert len(rank3) == 4 + 4 + 3
    assert len(set(rank3)) == len(rank3)


def test_wall_validation():
    with pytest.raises(ValueError):
        WallData.make(1, [(1, (1, 0)), (1, (0, 0))], [(1, 2)])
    with pytest.raises(ValueError):
        WallData.make(1, [(2, (0, 0))], [])
    with pytest.raises(ValueError):
        GroupedWall(1, ((1, NSVec(0, 0)), (1, NSVec(0, 0))), ((2, 1),))


def test_rank_two_wall_leading_terms():
    want = QSeries.from_terms({F(3, 4): -2, F(7, 4): -10, F(11, 4): -18}, 3)
    assert s_series(RANK2, 3) == want
    assert u_series(RANK2, 3) == want


def test_rank_two_wall_against_box_sum():
    assert s_series(RANK2, 3) == s_series_bruteforce(RANK2, 3, 8)
    assert u_series(RANK2, 3) == u_series_bruteforce(RANK2, 3, 8)


def test_empty_precision_gives_zero():
    assert u_series(RANK2, 0).is_zero()
    assert u_series_bruteforce(RANK2, 0, 4).is_zero()


@pytest.mark.parametrize("index", range(len(wall_oracle_cases())))
def test_wall_oracle_cases(index):
    wall, prec, radius, step = wall_oracle_cases()[index]
    fast = u_series(wall, prec)
    assert fast == wall_bruteforce_auto(wall, prec, radius, step)


def test_two_part_wall_terms_have_positive_exponent():
    for l in range(4):
        for wall in walls(3, l):
            if len(wall.parts) == 2:
                assert all(e > 0 for e, _ in u_series(wall, 2).items())


def test_blowup_factor_examples():
    partitions = [1, 1, 2, 3, 5, 7, 11, 15]
    assert blowup_factor(1, 0, 8) == QSeries.from_terms(dict(enumerate(partitions)), 8)
    lead = blowup_factor(2, 1, 3)
    assert lead.valuation() == F(1, 4)
    assert lead.coefficient(F(1, 4)) == 2


def test_rank_one_values():
    rec = dt_series(1, 0, 14)
    for d in range(15):
        assert rec.values[d] == (HILBERT_EULER[d // 2] if d % 2 == 0 else 0)
    assert dt_series(1, 7, 14).values == rec.values


def test_rank_two_leading_value():
    rec = dt_series(2, 1, 3)
    assert [rec.values[d] for d in range(4)] == [0, 0, 0, 1]


def test_rank_two_published_numbers():
    values = dt_series(2, 1, 11).values
    assert {d: v for d, v in values.items() if v} == {3: 1, 7: 9, 11: 48}


def test_rank_two_even_c1():
    values = dt_series(2, 0, 8).values
    assert values[0] == F(1, 4)
    assert values[8] == F(-21, 4)


@pytest.mark.parametrize("r, l, other", [(2, 1, 3), (2, 0, -2), (3, 1, 4), (3, 2, -1)])
def test_mod_r_invariance(r, l, other):
    order = 10 if r == 3 else 12
    assert DTEngine().dt_series(r, l, order).values == DTEngine().dt_series(r, other, order).values


def test_rank_three_values():
    engine = DTEngine()
    a = engine.dt_series(3, 1, 16).values
    b = engine.dt_series(3, 2, 16).values
    assert a[10] == 3 and b[10] == 3
    assert a[16] == 42
    assert all(v.denominator == 1 for v in list(a.values()) + list(b.values()))
    assert engine.dt_series(3, 0, 0).values[0] == F(1, 9)


def test_support_is_on_the_discriminant_grid():
    for r, l in ((2, 0), (2, 1), (3, 0), (3, 1)):
        series = DTEngine().series(r, l, 2)
        for e, _ in series.items():
            assert e >= 0 and (e * 2 * r).denominator == 1


def test_parallel_run_is_identical():
    assert DTEngine(jobs=2).dt_series(3, 1, 8).values == DTEngine().dt_series(3, 1, 8).values


def test_rank_guard_and_bad_input():
    with pytest.raises(ValueError):
        DTEngine(max_rank=2).dt_series(3, 1, 2)
    with pytest.raises(ValueError):
        DTEngine().dt_series(0, 1, 2)
    with pytest.raises(ValueError):
        DTEngine().dt_series(2, 1, -1)
    with pytest.raises(ValueError):
        DTEngine(jobs=0)


def test_order_and_prec_conversions():
    for r in (1, 2, 3):
        for order in range(10):
            assert prec_to_order(r, order_to_prec(r, order)) == order
