from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g3modular.number_field import (
    MinimalPolynomial,
    NumberField,
    NumberFieldError,
    ReduciblePolynomialError,
    nf_mul,
    poly_disc,
    trace,
)

SQRT2 = NumberField([1, 0, -2])
GOLDEN = NumberField([1, -1, -1])
CUBIC = NumberField([1, 0, -3, 1])  # totally real, discriminant 81


def _polymod(u, v, poly):
    # schoolbook product then long division by the monic modulus (low degree first)
    n = len(poly) - 1
    prod = [Fraction(0)] * (2 * n - 1)
    for i, a in enumerate(u):
        for j, b in enumerate(v):
            prod[i + j] += Fraction(a) * Fraction(b)
    low = list(reversed(poly))  # low degree first, low[n] == 1
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for i in range(n + 1):
                prod[k - n + i] -= c * low[i]
    return tuple(prod[:n])


def test_sqrt2_product():
    x = SQRT2.gen
    assert nf_mul(x, x) == SQRT2.coerce(2)
    assert (1 + x) * (1 - x) == SQRT2.coerce(-1)


def test_golden_ratio_square():
    x = GOLDEN.gen
    assert x * x == x + 1


def test_traces():
    assert trace(SQRT2.one) == 2
    assert trace(SQRT2.gen) == 0
    assert trace(GOLDEN.gen) == 1
    assert trace(CUBIC.gen ** 2) == 6
    assert trace(NumberField([1, 2, -1]).gen) == -2


def test_discriminants():
    assert poly_disc([1, 0, -2]) == 8
    assert poly_disc([1, 0, 1]) == -4
    assert poly_disc([1, 0, -3, 1]) == 81
    # x^3 + c has discriminant -27 c^2
    for c in (1, 2, 5):
        assert poly_disc([1, 0, 0, c]) == -27 * c * c


def test_trace_form_determinant_is_discriminant():
    for K in (SQRT2, GOLDEN, CUBIC, NumberField([1, 1, -2, -1])):
        n = K.degree
        basis = [K.gen ** k for k in range(n)]
        gram = [[trace(a * b) for b in basis] for a in basis]
        if n == 2:
            det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0]
        else:
            det = sum(gram[0][j] * (gram[1][(j + 1) % 3] * gram[2][(j + 2) % 3]
                                    - gram[1][(j + 2) % 3] * gram[2][(j + 1) % 3]) for j in range(3))
        assert det == poly_disc(K.poly)


def test_reducible_rejected():
    with pytest.raises(ReduciblePolynomialError):
        NumberField([1, 0, -1])
    with pytest.raises(ReduciblePolynomialError):
        NumberField([1, -6, 11, -6])


def test_bad_polynomials():
    with pytest.raises(NumberFieldError):
        MinimalPolynomial((2, 1))
    with pytest.raises(NumberFieldError):
        MinimalPolynomial((1, 0, 0, 0, 1))


def test_roots_of_unity():
    K = NumberField([1, 1, 1])
    (w,) = [r for r in K.roots_of_unity(3) if r == K.gen]
    assert w ** 3 == K.one
    assert len(K.roots_of_unity(6)) == 2
    for r in K.roots_of_unity(6):
        assert r ** 6 == K.one and r ** 3 != K.one
    i = NumberField([1, 0, 1])
    assert all(r * r == -i.one for r in i.roots_of_unity(4))
    assert SQRT2.roots_of_unity(4) == []


small = st.integers(-20, 20).map(Fraction)


@settings(max_examples=200)
@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_mul_against_polynomial_division(u, v):
    got = nf_mul(CUBIC(u), CUBIC(v))
    assert got.coords == _polymod(u, v, CUBIC.poly.coeffs)


@settings(max_examples=100)
@given(st.lists(small, min_size=3, max_size=3), st.lists(small, min_size=3, max_size=3))
def test_multiplication_matrix_acts(u, v):
    a, b = CUBIC(u), CUBIC(v)
    mat = CUBIC.multiplication_matrix(a)
    prod = [sum(mat[i][k] * b.coords[k] for k in range(3)) for i in range(3)]
    assert tuple(prod) == (a * b).coords
    # trace equals the matrix trace
    assert trace(a) == sum(mat[i][i] for i in range(3))
