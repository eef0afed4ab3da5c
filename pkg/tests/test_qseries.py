from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from dtseries.qseries import QSeries, eta_pow, format_fraction, parse_fraction


def series(terms, prec):
    return QSeries.from_terms(terms, prec)


def test_add_identity_inverse_merge():
    a = series({0: 1, 1: 1}, 5)
    assert a + QSeries.zero(5) == a
    half = QSeries.monomial(F(1, 2), 1, 5)
    assert (half + -half).is_zero()
    assert series({0: 1, 1: 3}, 5) + series({1: 2, 2: 1}, 5) == series({0: 1, 1: 5, 2: 1}, 5)


def test_mul_examples():
    geometric = series({k: 1 for k in range(6)}, 6)
    assert series({0: 1, 1: -1}, 10) * geometric == QSeries.one(6)
    prod = QSeries.monomial(F(1, 2), 1, 5) * QSeries.monomial(F(1, 3), 1, 5)
    assert prod.terms() == {F(5, 6): 1}
    assert prod.denom == 6
    assert series({0: 1, 1: 3}, 10) ** 2 == series({0: 1, 1: 6, 2: 9}, 10)


def test_mul_precision_tracks_valuations():
    a = series({F(1, 2): 1}, 3)
    b = series({0: 1, 1: 1}, 2)
    assert (a * b).prec == F(5, 2)


def test_invert_examples():
    inv = series({0: 1, 1: -1}, 6).invert()
    assert inv == series({k: 1 for k in range(6)}, 6)
    mono = QSeries.monomial(F(1, 4), 2, 5).invert()
    assert mono.terms() == {F(-1, 4): F(1, 2)}
    theta = series({0: 1, 1: 2, 4: 2}, 5).invert()
    assert theta == series({0: 1, 1: -2, 2: 4, 3: -8, 4: 14}, 5)


def test_invert_of_empty_series_raises():
    with pytest.raises(ZeroDivisionError):
        QSeries.zero(3).invert()


def test_rescale_examples():
    assert series({0: 1, 1: 1}, 4).rescale_exponents(F(1, 2)) == series({0: 1, F(1, 2): 1}, 2)
    assert QSeries.monomial(F(1, 3), 1, 2).rescale_exponents(3).terms() == {F(1): 1}
    a = series({F(1, 3): 2, F(5, 2): -1}, 4)
    assert a.rescale_exponents(F(2, 7)).rescale_exponents(F(7, 2)) == a


def test_coefficient_beyond_precision_is_unknown():
    a = series({0: 1}, 2)
    assert a.coefficient(1) == 0
    with pytest.raises(ValueError):
        a.coefficient(2)


def test_eta_powers():
    assert eta_pow(0, 10) == QSeries.one(10)
    pentagonal = {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1}
    assert eta_pow(1, F(1, 24) + 20) == series({F(1, 24) + k: c for k, c in pentagonal.items()}, F(1, 24) + 20)
    hilbert = [1, 3, 9, 22, 51, 108, 221, 429]
    assert eta_pow(-3, F(-1, 8) + 8) == series({F(-1, 8) + k: c for k, c in enumerate(hilbert)}, F(-1, 8) + 8)


@pytest.mark.parametrize("a", range(-6, 7))
@pytest.mark.parametrize("b", [-6, -1, 0, 2, 5])
def test_eta_power_additivity(a, b):
    prec = 6
    left = eta_pow(a, prec) * eta_pow(b, prec)
    right = eta_pow(a + b, prec)
    assert left.agrees_with(right)
    assert left.prec >= prec - 1


def test_printing_and_json_roundtrip():
    a = series({F(-1, 2): F(3, 4), 2: -1}, 3)
    assert str(a) == "3/4*q^-1/2 + -1*q^2 + O(q^3)"
    assert QSeries.from_json(a.to_json()) == a
    assert parse_fraction(format_fraction(F(-7, 3))) == F(-7, 3)


def test_json_rejects_terms_beyond_precision():
    record = series({0: 1}, 1).to_json()
    record["prec"] = "0"
    with pytest.raises(ValueError):
        QSeries.from_json(record)


# --- randomized ring axioms ----------------------------------------------------

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)
term = st.tuples(st.integers(min_value=0, max_value=18), coeff)


@st.composite
def random_series(draw):
    denom = draw(st.sampled_from([1, 2, 3, 6]))
    terms = dict(draw(st.lists(term, max_size=6)))
    prec = draw(st.integers(min_value=1, max_value=5))
    return QSeries(terms, denom, prec)


@st.composite
def unit_series(draw):
    a = draw(random_series())
    lead = draw(coeff.filter(bool))
    return QSeries({**{k: c for k, c in a.raw_terms.items() if k > 0}, 0: lead}, a.denom, a.prec)


@settings(max_examples=60, deadline=None)
@given(random_series(), random_series(), random_series())
def test_ring_axioms(a, b, c):
    assert (a + b) == (b + a)
    assert (a * b) == (b * a)
    assert ((a + b) + c) == (a + (b + c))
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)


@settings(max_examples=60, deadline=None)
@given(unit_series())
def test_inverse_is_inverse(a):
    product = a * a.invert()
    assert product.agrees_with(QSeries.one(product.prec))
    assert product.prec == a.prec - a.valuation()


@settings(max_examples=40, deadline=None)
@given(unit_series(), unit_series(), st.integers(min_value=1, max_value=3))
def test_more_input_precision_never_changes_old_coefficients(a, b, extra):
    def raise_prec(s):
        return QSeries(s.raw_terms, s.denom, s.prec + extra)
    for op in (lambda x, y: x * y, lambda x, y: x + y, lambda x, y: x * y.invert()):
        low, high = op(a, b), op(raise_prec(a), raise_prec(b))
        assert high.prec >= low.prec
        assert high.truncate(low.prec) == low
