from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g3modular.exact_series import (BEYOND_TRUNCATION, InvalidParameterError, SeriesError, TruncatedSeries, add,
                                    degeneracy, evaluate_form, mul, power, theta, vanishing_order)
from g3modular.number_field import NumberField
from g3modular.polynomials import HomogeneousPolynomial
from g3modular.rings import RingMismatchError

from conftest import series, seq

# printed 243E expansions below q^20
H1 = {1: 1, 5: -3, 7: -2, 8: -3, 10: -2, 13: 1, 16: 1, 17: -3, 19: 2}
H2 = {2: 1, 5: -1, 7: -3, 8: -4, 10: -3, 11: 4, 13: 3, 14: 2, 16: 3, 19: 6}
H3 = {4: 1, 7: -2, 8: -3, 10: -1, 11: 3, 13: 1, 14: 3, 16: 3, 19: 3}


def printed(d):
    return TruncatedSeries.from_dict(d, 19)


def naive_product(a, b):
    # independent oracle: plain double loop over exponents
    m = min(a.trunc_order + (b.leading() or (b.trunc_order + 1,))[0],
            b.trunc_order + (a.leading() or (a.trunc_order + 1,))[0],
            a.trunc_order + b.trunc_order)
    out = [Fraction(0)] * m
    for i in range(1, a.trunc_order + 1):
        for j in range(1, b.trunc_order + 1):
            if i + j <= m:
                out[i + j - 1] += a[i] * b[j]
    return TruncatedSeries(tuple(out))


fractions = st.fractions(min_value=-50, max_value=50, max_denominator=7)


@st.composite
def trunc_series(draw, M=None):
    M = M or draw(st.integers(1, 40))
    lead = draw(st.integers(1, M))
    c = [Fraction(0)] * (lead - 1) + draw(st.lists(fractions, min_size=M - lead + 1, max_size=M - lead + 1))
    return TruncatedSeries(tuple(c))


@st.composite
def same_order(draw, k=3):
    M = draw(st.integers(1, 40))
    return [draw(trunc_series(M)) for _ in range(k)]


def agree(a, b):
    m = min(a.trunc_order, b.trunc_order)
    return a.truncate(m) == b.truncate(m)


# ---------------------------------------------------------------- add / mul examples

def test_add_cancels():
    a = series((1, 1), (2, 1), M=5)
    b = series((1, -1), M=5)
    assert add(a, b) == series((2, 1), M=5)


def test_add_zero_identity():
    a = series((1, 3), (4, -1), M=6)
    assert a + TruncatedSeries.zero(6) == a


def test_add_truncates_to_min():
    assert (series((1, 1), M=3) + series((1, 1), M=7)).trunc_order == 3


def test_add_243E_printed():
    s = printed(H1) + printed(H2)
    assert [s[n] for n in range(1, 6)] == [1, 1, 0, 0, -4]
    # the sequence 1, 1, 0, 1, -4 belongs to h1 + h2 + h3
    t = s + printed(H3)
    assert [t[n] for n in range(1, 6)] == [1, 1, 0, 1, -4]


def test_ring_mismatch():
    K = NumberField([1, 2, -1])
    a = TruncatedSeries((K.one,), K)
    with pytest.raises(RingMismatchError):
        add(series((1, 1), M=1), a)


def test_mul_q_times_q():
    p = mul(series((1, 1), M=4), series((1, 1), M=4))
    assert p.trunc_order == 5
    assert p == series((2, 1), M=5)


def test_mul_difference_of_squares():
    p = mul(series((1, 1), (2, 1), M=3), series((1, 1), (2, -1), M=3))
    assert p == series((2, 1), (4, -1), M=4)


def test_mul_243E_h1_h2():
    p = mul(printed(H1), printed(H2))
    assert p.leading() == (3, 1)
    assert [p[n] for n in range(3, 7)] == [1, 0, 0, -1]
    assert p == naive_product(printed(H1), printed(H2))


def test_kronecker_path_matches_oracle():
    # long series go through the big-integer packing
    a = seq([Fraction((-1) ** n * n * n, n % 5 + 1) for n in range(1, 120)])
    b = seq([Fraction(3 * n - 200, 7) for n in range(1, 120)])
    assert mul(a, b) == naive_product(a, b)


def test_mul_over_number_field():
    K = NumberField([1, 2, -1])
    x = K.gen
    a = TruncatedSeries((K.one, x), K)
    p = mul(a, a)
    assert p[2] == K.one and p[3] == x + x


def test_power():
    assert power(series((1, 1), M=10), 3) == series((3, 1), M=12)
    with pytest.raises(InvalidParameterError):
        power(series((1, 1), M=3), 0)


# ---------------------------------------------------------------- theta / degeneracy / order

def test_theta_examples():
    assert theta(series((1, 1), M=4)) == series((1, 1), M=4)
    assert theta(series((3, 1), M=4)) == series((3, 3), M=4)
    t = theta(printed(H1))
    assert [t[n] for n in (1, 5, 7, 8)] == [1, -15, -14, -24]


def test_degeneracy_examples():
    assert degeneracy(series((1, 1), M=4), 1) == series((1, 1), M=4)
    d = degeneracy(series((1, 1), (2, 1), M=2), 2)
    assert d == series((2, 1), (4, 1), M=4)
    with pytest.raises(InvalidParameterError):
        degeneracy(series((1, 1), M=2), 0)


def test_degeneracy_89A_combination():
    g = series((1, 1), (2, -1), (3, -1), (4, -1), (5, -1), (6, 1), (7, -4), (8, 3), (9, -2), (10, 1), M=10)
    f3 = g + degeneracy(g, 2).scale(2)
    assert [f3[n] for n in range(1, 6)] == [1, 1, -1, -3, -1]


def test_vanishing_order():
    assert vanishing_order(series((3, 1), (4, 1), M=6)) == 3
    assert vanishing_order(TruncatedSeries.zero(10)) == BEYOND_TRUNCATION
    assert vanishing_order(printed(H3)) == 4


def test_unknown_is_not_zero():
    s = series((1, 1), M=3)
    with pytest.raises(IndexError):
        s[4]
    with pytest.raises(SeriesError):
        s.truncate(5)


def test_evaluate_form_examples():
    s = (series((1, 1), M=12), series((2, 1), M=12), series((3, 1), M=12))
    assert evaluate_form(HomogeneousPolynomial.parse("XZ - Y^2"), *s).is_zero()
    z = TruncatedSeries.zero(8)
    assert evaluate_form(HomogeneousPolynomial.parse("X^4"), series((1, 1), M=8), z, z).leading() == (4, 1)


def test_evaluate_243E_quartic_on_printed_basis():
    F = HomogeneousPolynomial.parse("X^3 Z - 3 X^2 Z^2 - X Y^3 + 9 X Y Z^2 - 6 X Z^3 + 2 Y^3 Z - 9 Y^2 Z^2 "
                                    "+ 9 Y Z^3 - 2 Z^4")
    v = evaluate_form(F, printed(H1), printed(H2), printed(H3))
    assert v.trunc_order >= 19 and v.is_zero()


# ---------------------------------------------------------------- properties (>= 1000 random cases in total)

@settings(max_examples=300)
@given(same_order())
def test_ring_axioms_add(t):
    a, b, c = t
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a + TruncatedSeries.zero(a.trunc_order) == a
    assert (a + (-a)).is_zero()


@settings(max_examples=300)
@given(same_order())
def test_ring_axioms_mul(t):
    a, b, c = t
    assert mul(a, b) == mul(b, a)
    assert agree(mul(mul(a, b), c), mul(a, mul(b, c)))
    assert agree(mul(a, b + c), mul(a, b) + mul(a, c))
    assert mul(a, b) == naive_product(a, b)


@settings(max_examples=300)
@given(same_order(2))
def test_leibniz(t):
    a, b = t
    assert agree(theta(mul(a, b)), mul(theta(a), b) + mul(a, theta(b)))


@settings(max_examples=150)
@given(same_order(2), st.integers(1, 5))
def test_degeneracy_additive_and_order(t, d):
    a, b = t
    assert degeneracy(a + b, d) == degeneracy(a, d) + degeneracy(b, d)
    o = vanishing_order(a)
    if o != BEYOND_TRUNCATION:
        assert vanishing_order(degeneracy(a, d)) == d * o


@settings(max_examples=100)
@given(same_order(3), st.lists(st.integers(-9, 9), min_size=10, max_size=10),
       st.lists(st.integers(-9, 9), min_size=10, max_size=10))
def test_evaluate_form_linear(t, c1, c2):
    from g3modular.polynomials import monomials
    m3 = monomials(3)
    F = HomogeneousPolynomial(3, dict(zip(m3, c1)))
    G = HomogeneousPolynomial(3, dict(zip(m3, c2)))
    lhs = evaluate_form(F + G, *t)
    rhs = evaluate_form(F, *t) + evaluate_form(G, *t)
    assert agree(lhs, rhs)
