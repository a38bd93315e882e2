import math

import pytest
from hypothesis import given, strategies as st

from ffdiophantine.algebra import NEG_INF, Poly, gf
from ffdiophantine.errors import DivisionByZero, InsufficientPrecision
from ffdiophantine.laurent import (EXACT, LaurentSeries, format_series, fractional_part, from_rational,
                                   parse_series, polynomial_part)
from oracles import long_division

F2, F3 = gf(2), gf(3)


def T(F):
    return Poly.T(F)


def test_inverse_of_monomial():
    x = LaurentSeries.monomial(F2, 1)          # T^{-1}
    y = x.inv()
    assert y.val == -1 and y.coeff(-1) == 1 and y.is_exact


def test_geometric_series_inverts_one_plus_t_inverse():
    geo = LaurentSeries(F2, 0, [1] * 32, 32)
    prod = geo * LaurentSeries(F2, 0, [1, 1], EXACT)
    assert prod.coeff(0) == 1
    assert all(prod.coeff(n) == 0 for n in range(1, 32))
    assert prod.known == 32


def test_self_difference_is_zero():
    x = LaurentSeries(F3, -2, [1, 2, 0, 1], EXACT)
    d = x - x
    assert d.is_exact_zero() and d.logabs() == NEG_INF


def test_truncated_difference_is_zero_to_precision():
    x = LaurentSeries(F3, 0, [1, 2, 2], 3)
    d = x - x
    assert d.is_zero_to_precision()
    with pytest.raises(InsufficientPrecision):
        d.valuation()


def test_from_rational_examples():
    one = Poly.one(F2)
    s = from_rational(one, T(F2), 10)
    assert s.val == 1 and s.coefficients(1, 11) == [1] + [0] * 9
    assert s.rational == (one, T(F2))
    s = from_rational(one, T(F2) + one, 20)
    assert s.val == 1 and [s.coeff(n) for n in range(1, 21)] == [1] * 20
    s = from_rational(T(F2), one, 5)
    assert s.val == -1 and s.is_exact


@pytest.mark.parametrize("p", [2, 3, 5])
@given(data=st.data())
def test_from_rational_matches_long_division(p, data):
    F = gf(p)
    num = data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=8).filter(any))
    den = data.draw(st.lists(st.integers(0, p - 1), min_size=1, max_size=8).filter(any))
    s = from_rational(Poly.from_ints(F, num), Poly.from_ints(F, den), 40)
    v, digits = long_division(num, den, p, 40)
    first_nonzero = next(i for i, c in enumerate(digits) if c)
    assert s.val == v + first_nonzero
    for i, c in enumerate(digits):
        assert s.coeff(v + i) == c


def test_polynomial_part_examples():
    F = F2
    x = LaurentSeries.from_poly(T(F) ** 2) + LaurentSeries.monomial(F, 1)
    assert polynomial_part(x) == T(F) ** 2
    assert polynomial_part(LaurentSeries.monomial(F, 3)).is_zero()
    y = from_rational(T(F) ** 2 + Poly.one(F), T(F), 16)
    assert polynomial_part(y) == T(F)
    assert fractional_part(y).val == 1


def test_polynomial_part_needs_digits():
    x = LaurentSeries(F2, -3, [1, 0], 2)        # T^3 + 0*T^2, unknown below
    with pytest.raises(InsufficientPrecision):
        polynomial_part(x)


def test_division_by_zero():
    with pytest.raises(DivisionByZero):
        LaurentSeries.zero(F3).inv()


@given(st.lists(st.integers(0, 2), min_size=1, max_size=20).filter(lambda c: c[0] != 0),
       st.integers(-5, 5))
def test_inverse_round_trip(coeffs, val):
    x = LaurentSeries(F3, val, coeffs, 30)
    y = x.inv()
    prod = x * y
    assert prod.coeff(0) == 1
    assert all(prod.coeff(n) == 0 for n in range(1, int(prod.prec)))
    assert prod.known == 30


@given(st.lists(st.integers(0, 2), min_size=1, max_size=15), st.lists(st.integers(0, 2), min_size=1, max_size=15))
def test_multiplication_commutes_and_tracks_precision(a, b):
    x = LaurentSeries(F3, 0, a, 15)
    y = LaurentSeries(F3, 1, b, 12)
    assert (x * y).agrees(y * x)
    s = x + y
    assert s.prec == min(x.prec, y.prec)


def test_frobenius_power_matches_repeated_multiplication():
    x = LaurentSeries(F3, 1, [1, 2, 0, 1, 1], 20)
    assert x.frobenius_pow(1).agrees(x * x * x)
    assert x.frobenius_pow(1).known == 60


def test_shift_multiplies_by_power_of_t():
    x = LaurentSeries(F2, 2, [1, 1], EXACT)
    assert x.shift(3).val == -1


@pytest.mark.parametrize("F", [gf(2), gf(3, 2)])
def test_format_parse_round_trip(F):
    x = LaurentSeries(F, -2, [1, 0, F.q - 1, 1], 9)
    text = format_series(x)
    assert parse_series(F, text) == x
    z = LaurentSeries.zero(F)
    assert parse_series(F, format_series(z)).is_exact_zero()
    e = LaurentSeries(F, 1, [1, 1], EXACT)
    assert parse_series(F, format_series(e)) == e


def test_logabs():
    x = LaurentSeries(F2, 3, [1], EXACT)
    assert x.logabs() == -3
    assert math.isinf(LaurentSeries.zero(F2).val)
