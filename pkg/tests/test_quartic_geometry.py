import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g3modular.curve_records import MARKERS, table_records
from g3modular.forms_data import load_fixture, make_factor_spec
from g3modular.polynomials import HomogeneousPolynomial, monomials
from g3modular.quartic_geometry import (
    FLEX,
    HYPERFLEX,
    NO_EXPECTED_LEVEL,
    NO_EXPECTED_MODEL,
    NOT_ON_CURVE,
    ORDINARY,
    SINGULAR,
    SMOOTH,
    GeometryError,
    check_smooth,
    classify_P_infinity,
    count_points,
    hasse_weil_ok,
    smooth_mod,
)
from g3modular.relation_engine import change_of_basis

P = HomogeneousPolynomial.parse
KLEIN = P("X^3*Z - X*Y^3 + Y*Z^3")


def projective_points(p):
    for z in range(p):
        for y in range(p):
            yield (1, y, z)
    for z in range(p):
        yield (0, 1, z)
    yield (0, 0, 1)


def brute_count(F, p):
    return sum(1 for pt in projective_points(p) if F.evaluate(*pt) % p == 0)


def rational_singular_point(F, p):
    parts = [F.derivative(v) for v in range(3)]
    return any(F.evaluate(*pt) % p == 0 and all(g.evaluate(*pt) % p == 0 for g in parts)
               for pt in projective_points(p))


def test_smooth_examples():
    assert check_smooth(KLEIN).verdict == SMOOTH
    assert check_smooth(P("X^4 + Y^4 + Z^4")).verdict == SMOOTH


# X Y Z (X + Y + Z), (X^2 + Y^2 + Z^2)^2, a product of two conics
@pytest.mark.parametrize("text", ["X^2*Y*Z + X*Y^2*Z + X*Y*Z^2", "X^4 + Y^4 + Z^4 + 2*X^2*Y^2 + 2*X^2*Z^2 + 2*Y^2*Z^2", "X^4 + Y^4",
                                  "X^2*Y^2 + X^3*Z + Y^3*Z + X*Y*Z^2", "Y^2*Z^2 - X^4 + X^3*Z"])
def test_singular_examples(text):
    assert check_smooth(P(text)).verdict == SINGULAR


def _singular_at_origin(rng):
    # no Z^4 or Z^3 terms: (0:0:1) is a singular point
    terms = {e: rng.randint(-4, 4) for e in monomials(4) if e[0] + e[1] >= 2}
    terms[(2, 0, 2)] = terms.get((2, 0, 2), 0) or 1
    return HomogeneousPolynomial(4, terms)


@settings(max_examples=30)
@given(st.integers(0, 10 ** 6))
def test_constructed_singular_quartics(seed):
    rng = random.Random(seed)
    F = _singular_at_origin(rng)
    M = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    for _ in range(4):
        i, j = rng.sample(range(3), 2)
        M[i] = [a + rng.choice([-1, 1]) * b for a, b in zip(M[i], M[j])]
    G = change_of_basis(F, M)
    assert check_smooth(G).verdict == SINGULAR
    for p in (2, 3, 5):
        assert not smooth_mod(G, p)


@settings(max_examples=40)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3, 5, 7]))
def test_smooth_mod_never_misses_rational_singularities(seed, p):
    rng = random.Random(seed)
    F = HomogeneousPolynomial(4, {e: rng.randint(-3, 3) for e in monomials(4)})
    if F.is_zero():
        return
    if rational_singular_point(F, p):
        assert not smooth_mod(F, p)


def test_smooth_mod_examples():
    assert smooth_mod(KLEIN, 2) and smooth_mod(KLEIN, 3)
    assert not smooth_mod(KLEIN, 7)  # bad reduction at the level
    # Fermat quartic reduces to a fourth power of a linear form in characteristic 2
    assert not smooth_mod(P("X^4 + Y^4 + Z^4"), 2)
    assert smooth_mod(P("X^4 + Y^4 + Z^4"), 3)
    with pytest.raises(GeometryError):
        smooth_mod(KLEIN, 9)


def test_flex_classification():
    assert classify_P_infinity(P("X^4 + Y^4 + Z^4")).kind == NOT_ON_CURVE
    assert classify_P_infinity(P("X^3*Y + Y^4 + Z^4")).kind == ORDINARY
    assert classify_P_infinity(P("X^3*Z + X*Y^3 + Y^4 + Z^4")).kind == FLEX
    assert classify_P_infinity(P("X^3*Z + Y^4 + Z^4")).kind == HYPERFLEX
    assert classify_P_infinity(KLEIN, ord_h3=4).consistent_with_ord


def test_table_markers_match_geometry(corpus):
    kinds = {"none": ORDINARY, "flex": FLEX, "hyperflex": HYPERFLEX}
    for rec in table_records(corpus):
        assert classify_P_infinity(rec.F).kind == kinds[rec.marker], rec.id
    assert set(MARKERS) == set(kinds)


def test_counts_over_F2_bounded():
    for text in ("X^4 + Y^4 + Z^4", "X^2*Y*Z + X*Y^2*Z + X*Y*Z^2", "X^3*Z + Y^4 + Z^4"):
        assert count_points(P(text), 2).count <= 7
    # every point but (1:1:1) has a zero coordinate
    assert count_points(P("X^2*Y*Z + X*Y^2*Z + X*Y*Z^2"), 2).count == 6


def test_fermat_over_F3():
    assert count_points(P("X^4 + Y^4 + Z^4"), 3).count == 4 == brute_count(P("X^4 + Y^4 + Z^4"), 3)


@pytest.mark.parametrize("p", [2, 3, 5, 11, 13])
def test_count_matches_brute_force(corpus, p):
    for rec in table_records(corpus)[:12]:
        assert count_points(rec.F, p).count == brute_count(rec.F, p)


def test_klein_against_traces():
    spec = make_factor_spec([load_fixture("49A_{14}"), load_fixture("49A")])
    for p in (2, 3, 5, 11, 13, 17, 19, 23):
        pc = count_points(KLEIN, p, spec)
        assert pc.consistent, p
    assert count_points(KLEIN, 2).count == 3
    pc = count_points(KLEIN, 7, spec)
    assert pc.expected is None and pc.reason == NO_EXPECTED_LEVEL


def test_no_expected_value_for_bad_model():
    spec = make_factor_spec([load_fixture("43A"), load_fixture("43B")])
    F = next(r.F for r in table_records() if r.id == "table-07-43AB")
    pc = count_points(F, 2, spec)
    assert pc.expected is None and pc.reason == NO_EXPECTED_MODEL


def test_hasse_weil(corpus):
    for rec in table_records(corpus):
        for p in (2, 3, 5, 7, 11):
            if rec.level % p and smooth_mod(rec.F, p):
                assert hasse_weil_ok(count_points(rec.F, p).count, p)
    assert not hasse_weil_ok(40, 3)
