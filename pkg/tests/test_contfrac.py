import random

import pytest
from hypothesis import given, strategies as st

from ffdiophantine.algebra import Poly, gf
from ffdiophantine.contfrac import (CFExpansion, QuadraticNumber, cf_distance, cf_expand, cf_value,
                                    conjugate_distance, convergent_at, convergents, format_cf, parse_cf,
                                    quadratic_from_runs, quadratic_value, quotient_matrix, runs_of,
                                    verify_identities)
from ffdiophantine.errors import InsufficientPrecision, InseparableQuadratic, PreconditionViolated
from ffdiophantine.laurent import LaurentSeries, from_rational
from oracles import telescoped_degrees

F2, F3, F5 = gf(2), gf(3), gf(5)


def T(F):
    return Poly.T(F)


def mahler(F, known):
    c = [0] * known
    e = 1
    while e < known:
        c[e] = 1
        e *= 2
    return LaurentSeries(F, 0, c, known)


def random_poly(rng, F, lo, hi):
    d = rng.randint(lo, hi)
    return Poly(F, [rng.randrange(F.q) for _ in range(d)] + [rng.randrange(1, F.q)])


def test_rational_expansion_is_euclid():
    one = Poly.one(F2)
    e = cf_expand((T(F2) ** 2 + one, T(F2)), 10)
    assert e.quotients == (T(F2), T(F2)) and e.complete


def test_polynomial_expands_to_itself():
    e = cf_expand(T(F3), 5)
    assert e.quotients == (T(F3),) and e.complete


def test_mahler_expansion_and_round_trip():
    xi = mahler(F2, 128)
    e = cf_expand(xi, 6)
    assert e.quotients[0].is_zero()
    assert all(a.degree >= 1 for a in e.quotients[1:])
    assert verify_identities(xi, e) == []
    back = cf_value(e, 64)
    degs = telescoped_degrees([int(a.degree) if a else 0 for a in e.quotients])
    # the last convergent approximates xi to 2 deg q_5 + deg a_6 >= 2 deg q_5 digits
    assert back.agrees(xi, upto=2 * degs[-1])


def test_honest_precision():
    xi = mahler(F2, 16)
    with pytest.raises(InsufficientPrecision):
        cf_expand(xi, 50)
    e = cf_expand(xi, 50, strict=False)
    assert e.reason == "precision" and not e.complete
    assert len(e.quotients) < 50
    # the certified prefix agrees with a much longer expansion
    ref = cf_expand(mahler(F2, 512), len(e.quotients))
    assert ref.quotients == e.quotients


def test_convergents_by_hand():
    for F in (F3, F5):
        t = T(F)
        conv = list(convergents([t, t, t]))
        assert conv[0].p == t and conv[0].q == Poly.one(F)
        assert conv[1].q == t
        assert conv[2].q == t * t + Poly.one(F)
        assert conv[2].p == t ** 3 + t.scale(2)


def test_empty_tail_convergent():
    c = list(convergents([T(F2)]))[0]
    assert c.q == Poly.one(F2) and c.p == T(F2)


def test_degree_of_q5():
    t = T(F2)
    conv = list(convergents([Poly.zero(F2)] + [t] * 5))
    assert conv[5].q.degree == 5


def test_cf_value_simple():
    v = cf_value([Poly.zero(F2), T(F2)], 10)
    assert v.val == 1 and v.coefficients(1, 11) == [1] + [0] * 9


def test_distance_to_convergents():
    t = T(F2)
    xi = quadratic_value([Poly.zero(F2)], [t]).series(64)
    conv = list(convergents([Poly.zero(F2)] + [t] * 4))
    assert (xi - from_rational(conv[1].p, conv[1].q, 64)).logabs() == -3
    assert (xi - from_rational(conv[2].p, conv[2].q, 64)).logabs() == -5


@given(st.integers(0, 10 ** 9))
def test_rational_round_trip(seed):
    rng = random.Random(seed)
    F = [F2, F3, F5][seed % 3]
    num = random_poly(rng, F, 0, 8)
    den = random_poly(rng, F, 1, 8)
    e = cf_expand((num, den), 100)
    assert e.complete
    c = convergent_at(list(e.quotients))
    assert c.p * den == c.q * num


@given(st.integers(0, 10 ** 9))
def test_series_expansion_round_trip_and_identities(seed):
    rng = random.Random(seed)
    F = [F2, F3][seed % 2]
    coeffs = [rng.randrange(F.q) for _ in range(80)]
    x = LaurentSeries(F, -rng.randint(0, 3), coeffs, 80)
    e = cf_expand(x, 12, strict=False)
    assert verify_identities(x, e) == []


def test_quadratic_period_t_over_f3():
    t = T(F3)
    beta = quadratic_value([], [t])
    one = Poly.one(F3)
    assert (beta.A, beta.B, beta.C) == (one, -t, -one)
    s = beta.series(40)
    assert beta.evaluate(s).is_zero_to_precision()


def test_quadratic_with_zero_preperiod():
    t = T(F3)
    xi = quadratic_value([Poly.zero(F3)], [t])
    one = Poly.one(F3)
    assert (xi.A, xi.B, xi.C) == (one, t, -one)


@given(st.integers(0, 10 ** 9))
def test_quadratic_series_matches_unrolled_expansion(seed):
    rng = random.Random(seed)
    F = [F2, F3][seed % 2]
    pre = [random_poly(rng, F, 0, 2)] + [random_poly(rng, F, 1, 2) for _ in range(rng.randint(0, 2))]
    per = [random_poly(rng, F, 1, 2) for _ in range(rng.randint(1, 3))]
    alpha = quadratic_value(pre, per)
    unrolled = pre + per * 120
    s = alpha.series(200)
    assert s.agrees(cf_value(unrolled, 400), upto=s.prec)
    assert alpha.evaluate(s).is_zero_to_precision()


def test_runs_and_matrix_agree_with_recurrence():
    rng = random.Random(3)
    qs = [random_poly(rng, F3, 1, 2) for _ in range(3)]
    seq = [qs[0]] * 5 + [qs[1]] + [qs[2]] * 7
    (p1, p2), (q1, q2) = quotient_matrix(seq)
    conv = list(convergents(seq))
    assert p1 == conv[-1].p and q1 == conv[-1].q
    assert p2 == conv[-2].p and q2 == conv[-2].q
    assert runs_of(seq) == [(qs[0], 5), (qs[1], 1), (qs[2], 7)]
    alpha = quadratic_from_runs([(Poly.zero(F3), 1), (qs[0], 5)], [(qs[1], 1), (qs[2], 7)])
    beta = quadratic_value([Poly.zero(F3)] + [qs[0]] * 5, [qs[1]] + [qs[2]] * 7)
    assert (alpha.A, alpha.B, alpha.C) == (beta.A, beta.B, beta.C)


def test_conjugate_distance_char_two():
    one = Poly.one(F2)
    alpha = QuadraticNumber(one, T(F2), one)
    assert conjugate_distance(alpha) == 1
    with pytest.raises(InseparableQuadratic):
        conjugate_distance(QuadraticNumber(one, Poly.zero(F2), T(F2)))


def test_conjugate_distance_from_discriminant():
    t = T(F3)
    alpha = QuadraticNumber(Poly.one(F3), -(t * t), Poly.one(F3))
    assert conjugate_distance(alpha) == 2


@given(st.integers(0, 10 ** 9))
def test_galois_lower_bound(seed):
    rng = random.Random(seed)
    F = [F2, F3, F5][seed % 3]
    pre = [random_poly(rng, F, 0, 3)] + [random_poly(rng, F, 1, 3) for _ in range(rng.randint(0, 3))]
    per = [random_poly(rng, F, 1, 3) for _ in range(rng.randint(1, 4))]
    alpha = quadratic_value(pre, per)
    assert conjugate_distance(alpha) + alpha.height_log >= 0


def test_cf_distance_shortcut():
    t = T(F2)
    x = CFExpansion(tuple([Poly.zero(F2)] + [t] * 8), complete=True)
    y = CFExpansion((Poly.zero(F2), t, t), complete=True)
    assert cf_distance(x, y) == -5
    with pytest.raises((PreconditionViolated, InsufficientPrecision, ValueError)):
        cf_distance(x, x)


@given(st.integers(0, 10 ** 9))
def test_cf_distance_shortcut_equals_subtraction(seed):
    rng = random.Random(seed)
    F = [F2, F3][seed % 2]
    shared = [random_poly(rng, F, 0, 2)] + [random_poly(rng, F, 1, 2) for _ in range(rng.randint(0, 4))]
    xa = shared + [random_poly(rng, F, 1, 3) for _ in range(rng.randint(1, 3))]
    ya = shared + [random_poly(rng, F, 1, 3) for _ in range(rng.randint(0, 3))]
    if xa == ya:
        return
    x = CFExpansion(tuple(xa), complete=True)
    y = CFExpansion(tuple(ya), complete=True)
    cx, cy = convergent_at(xa), convergent_at(ya)
    direct = (from_rational(cx.p, cx.q, 200) - from_rational(cy.p, cy.q, 200)).logabs()
    assert cf_distance(x, y) == direct


def test_format_and_parse():
    t = T(F3)
    qs = [Poly.zero(F3), t, t + Poly.one(F3)]
    assert format_cf(qs) == "[0; T, T + 1]"
    assert parse_cf(F3, format_cf(qs)) == qs


def test_expansion_rejects_constant_quotients():
    with pytest.raises(PreconditionViolated):
        CFExpansion((Poly.zero(F2), Poly.one(F2)))
