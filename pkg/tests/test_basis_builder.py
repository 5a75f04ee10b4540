from fractions import Fraction

import pytest

from g3modular.basis_builder import (
    BasisError,
    HyperellipticObstructionError,
    WrongCaseError,
    build_basis,
    build_case_A,
    build_case_AE,
    build_case_EEE,
    echelon_span,
    monomial_order_profile,
    package_span,
    quadratic_coordinates,
    spans_inputs,
)
from g3modular.curve_records import record_basis, table_records
from g3modular.exact_series import TruncatedSeries
from g3modular.forms_data import load_fixture

from conftest import seq

H1 = {1: 1, 5: -3, 7: -2, 8: -3, 10: -2, 13: 1, 16: 1, 17: -3, 19: 2}
H2 = {2: 1, 5: -1, 7: -3, 8: -4, 10: -3, 11: 4, 13: 3, 14: 2, 16: 3, 19: 6}
H3 = {4: 1, 7: -2, 8: -3, 10: -1, 11: 3, 13: 1, 14: 3, 16: 3, 19: 3}


def test_243E_echelon_matches_printed_expansions():
    b = build_case_A(load_fixture("243E"), echelon=True)
    assert b.ord_h3 == 4
    for h, printed in zip(b.series, (H1, H2, H3)):
        assert [h[n] for n in range(1, 20)] == [printed.get(n, 0) for n in range(1, 20)]


def test_243E_formula_basis_spans_the_same_space():
    f = load_fixture("243E")
    b = build_case_A(f)
    assert b.ord_h3 == 4 and not b.derivation.echelon
    assert spans_inputs(b, f.rational_span())
    # derivation constants tie ord h3 to the a_2^2 coordinate of a_3
    assert b.derivation.constants["gamma3"] == 0


def test_case_A_ord3_iff_gamma3():
    for label in ("97A", "113C", "109B", "151A"):
        b = build_case_A(load_fixture(label))
        assert (b.ord_h3 == 3) == (b.derivation.constants["gamma3"] != 0)


def test_every_table_basis_is_normalized(corpus):
    for rec in table_records(corpus):
        _, b, pk = record_basis(rec)
        b.check()
        assert 3 <= b.ord_h3 <= 5
        assert spans_inputs(b, [s for p in pk for s in p.rational_span()])


def test_AE_branches():
    f, g = load_fixture("49A_{14}"), load_fixture("49A")
    b = build_case_AE(f, g)
    assert b.derivation.branch == "B2!=0"
    assert spans_inputs(b, f.rational_span() + g.rational_span())
    b = build_case_AE(load_fixture("82B"), load_fixture("82A"))
    assert b.derivation.branch == "B2=0"
    b.check()


def test_quadratic_coordinates():
    f = load_fixture("49A_{14}")  # K = Q(sqrt(-3))
    d, R, S = quadratic_coordinates(f)
    assert d == -3
    x = f.field.gen  # (-1 + sqrt(-3)) / 2
    assert (R(x), S(x)) == (Fraction(-1, 2), Fraction(1, 2))


def test_EEE_57():
    pk = [load_fixture(x) for x in ("57C", "57B", "57A")]
    b = build_case_EEE(*pk)
    assert b.case == "EEE" and b.ord_h3 == 3
    assert spans_inputs(b, [p.coordinate_series(0) for p in pk])


def test_obstructions():
    with pytest.raises(HyperellipticObstructionError):
        build_case_A(load_fixture("178D"))
    a = load_fixture("57A")
    with pytest.raises(HyperellipticObstructionError):
        build_case_EEE(a, a, a)
    with pytest.raises(WrongCaseError):
        build_case_A(load_fixture("89A"))
    with pytest.raises(WrongCaseError):
        build_case_AE(load_fixture("89A"), load_fixture("49A_{14}"))


def test_dispatch():
    assert build_basis([load_fixture("97A")]).case == "A"
    assert build_basis([load_fixture("49A"), load_fixture("49A_{14}")]).case == "AE"


def test_order_profile():
    assert not monomial_order_profile(3, 4).distinct
    assert not monomial_order_profile(5, 4).distinct
    assert monomial_order_profile(6, 4).distinct
    p = monomial_order_profile(4, 4)
    assert p[(0, 4, 0)] == 8 and p[(0, 0, 4)] == 16 and p[(4, 0, 0)] == 4


def test_echelon_span():
    e = echelon_span([seq([1, 2, 3, 4]), seq([2, 4, 7, 9])])
    assert e.pivots == (1, 3)
    assert [list(s.coeffs) for s in e.series] == [[1, 2, 0, 1], [0, 0, 1, 1]]
    with pytest.raises(BasisError):
        echelon_span([seq([1, 2, 3]), seq([2, 4, 6])])


def test_package_span_has_no_q2_pivot():
    # without a degeneracy copy of 89A the span misses the q^2 normal form
    e = package_span([load_fixture("178C"), load_fixture("89A")])
    assert len(e.series) == 3 and e.pivots == (1, 3, 4)
    assert isinstance(e.series[0], TruncatedSeries)
