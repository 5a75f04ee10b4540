"""Normalized bases h1 = q + O(q^2), h2 = q^2 + O(q^3), h3 = O(q^3) of S_2(A)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_series import BEYOND_TRUNCATION, TruncatedSeries, add, vanishing_order
from .forms_data import (AbelianFactorSpec, EigenformPackage, ExcludedOrderError,
                         factorize, format_label, make_factor_spec)
from .number_field import NumberFieldElement, poly_disc, trace
from .polynomials import monomials


class BasisError(ValueError):
    pass


class WrongCaseError(BasisError):
    pass


class HyperellipticObstructionError(BasisError):
    """The trace data force a hyperelliptic signature (equal a_2 across all embeddings)."""


@dataclass(frozen=True)
class BasisDerivation:
    case: str
    constants: dict
    branch: str = ""
    ordering: tuple[str, ...] = ()
    echelon: bool = False


@dataclass(frozen=True, eq=False)
class NormalizedBasis:
    h1: TruncatedSeries
    h2: TruncatedSeries
    h3: TruncatedSeries
    case: str
    ord_h3: int
    derivation: BasisDerivation
    labels: tuple[str, ...] = ()

    @property
    def series(self) -> tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
        return (self.h1, self.h2, self.h3)

    @property
    def trunc_order(self) -> int:
        return min(s.trunc_order for s in self.series)

    def check(self):
        if self.h1.leading() != (1, 1) or self.h2.leading() != (2, 1):
            raise BasisError("h1 or h2 violates the leading-term normal form")
        lead = self.h3.leading()
        if lead is None or lead[0] < 3 or lead[1] != 1:
            raise BasisError(f"h3 has leading term {lead}")
        return self


# ---------------------------------------------------------------- helpers

def _lin(*pairs) -> TruncatedSeries:
    """sum c_i * s_i over (c_i, s_i) pairs."""
    acc = None
    for c, s in pairs:
        t = s.scale(c)
        acc = t if acc is None else add(acc, t)
    return acc


def _monic_leading(s: TruncatedSeries) -> TruncatedSeries:
    lead = s.leading()
    if lead is None:
        raise BasisError("h3 vanishes to the full truncation order")
    return s.scale(1 / Fraction(lead[1]))


def _ord(s: TruncatedSeries) -> int:
    o = vanishing_order(s)
    if o == BEYOND_TRUNCATION:
        raise BasisError("series vanishes to its truncation order")
    return o


def echelonize(h1: TruncatedSeries, h2: TruncatedSeries, h3: TruncatedSeries):
    """Reduced echelon form: h1 and h2 lose their terms at the pivots of the later series."""
    n = _ord(h3)
    h2 = add(h2, h3.scale(-h2[n]))
    h1 = add(h1, h3.scale(-h1[n]))
    h1 = add(h1, h2.scale(-h1[2]))
    return h1, h2, h3


def _finish(case, h1, h2, h3, derivation: BasisDerivation, labels, echelon: bool) -> NormalizedBasis:
    h3 = _monic_leading(h3)
    if echelon:
        h1, h2, h3 = echelonize(h1, h2, h3)
    d = BasisDerivation(derivation.case, derivation.constants, derivation.branch, derivation.ordering, echelon)
    b = NormalizedBasis(h1, h2, h3, case, _ord(h3), d, tuple(labels))
    b.check()
    if b.ord_h3 > 5:
        # Lemma-type bound on the gap: ord h3 <= 5 for a non-hyperelliptic curve
        raise HyperellipticObstructionError(f"ord_q h3 = {b.ord_h3} > 5")
    return b


def _minpoly_cubic(u: NumberFieldElement) -> tuple[Fraction, Fraction, Fraction]:
    """(a, b, c) with x^3 + a x^2 + b x + c the characteristic polynomial of u."""
    s1, s2, s3 = trace(u), trace(u * u), trace(u * u * u)
    e1 = s1
    e2 = (e1 * s1 - s2) / 2
    e3 = (e2 * s1 - e1 * s2 + s3) / 3
    return -e1, e2, -e3


def _solve3(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    # Cramer; only used on 3x3 systems with nonzero determinant
    def det(m):
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    D = det(rows)
    if D == 0:
        raise BasisError("singular system")
    out = []
    for k in range(3):
        m = [list(r) for r in rows]
        for i in range(3):
            m[i][k] = rhs[i]
        out.append(Fraction(det(m)) / D)
    return out


# ---------------------------------------------------------------- case A

def build_case_A(f: EigenformPackage, echelon: bool = False) -> NormalizedBasis:
    if f.dimension != 3:
        raise WrongCaseError(f"case A needs a cubic coefficient field, got degree {f.dimension}")
    if not f.label.character.is_trivial():
        raise WrongCaseError("case A needs trivial Nebentypus")
    a2 = f.a(2)
    if a2.is_rational():
        raise HyperellipticObstructionError(f"a_2 = {a2.coords[0]} is rational: all conjugates share it")
    a, b, c = _minpoly_cubic(a2)
    p = (1, a, b, c)
    dp = (3, 2 * a, b)
    disc_p, disc_dp = poly_disc(p), poly_disc(dp)
    if disc_p == 0 or disc_dp == 0:
        raise BasisError("degenerate minimal polynomial of a_2")
    third = Fraction(1, 3)
    g1 = f.trace_series().scale(third)
    g2 = f.trace_series(a2).scale(third)
    g3 = f.trace_series(a2 * a2).scale(third)
    h1 = g1
    h2 = _lin((Fraction(18) / disc_dp, g2), (Fraction(18) / disc_dp * a / 3, g1))
    # the q^2 correction is taken along h2 (taking it along g2 would leave a q^1 term)
    h3 = _lin((1, g3), (-(a * a - 2 * b) / 3, h1), ((2 * a ** 3 - 7 * a * b + 9 * c) / 9, h2))
    # a_3 = alpha + beta a_2 + gamma a_2^2
    one = f.field.one
    basis = [one, a2, a2 * a2]
    rows = [[basis[j].coords[i] for j in range(3)] for i in range(3)]
    alpha3, beta3, gamma3 = _solve3(rows, f.a(3).coords)
    consts = {"a": a, "b": b, "c": c, "disc_p": disc_p, "disc_dp": disc_dp,
              "alpha3": alpha3, "beta3": beta3, "gamma3": gamma3,
              "A": Fraction(2, 3) * disc_p / disc_dp}
    out = _finish("A", h1, h2, h3, BasisDerivation("A", consts), [format_label(f.label)], echelon)
    if (out.ord_h3 == 3) != (gamma3 != 0):
        raise BasisError("ord_q h3 disagrees with the a_2^2-coordinate of a_3")
    return out


# ---------------------------------------------------------------- case AE

def _squarefree_split(n: int) -> tuple[int, int]:
    """n = s^2 * d with d squarefree; returns (d, s)."""
    sign = -1 if n < 0 else 1
    d, s = sign, 1
    for p, e in factorize(abs(n)):
        s *= p ** (e // 2)
        if e % 2:
            d *= p
    return d, s


def quadratic_coordinates(f: EigenformPackage):
    """(d, R, S) with a = R(a) + S(a) sqrt(d) for elements a of the quadratic field."""
    _, a, b = f.field.poly.coeffs
    D = a * a - 4 * b
    d, s = _squarefree_split(D)
    # x = (-a + s sqrt(d)) / 2, so u + v x = (u - a v / 2) + (v s / 2) sqrt(d)
    def R(e):
        return e.coords[0] - Fraction(a) * e.coords[1] / 2

    def S(e):
        return e.coords[1] * Fraction(s, 2)
    return d, R, S


def build_case_AE(f: EigenformPackage, g: EigenformPackage, echelon: bool = False) -> NormalizedBasis:
    if f.dimension != 2 or g.dimension != 1:
        raise WrongCaseError("case AE needs a quadratic form f and a rational form g")
    if f.nebentypus_order == 6 or f.nebentypus_order not in (1, 2, 3, 4):
        raise ExcludedOrderError(f"Nebentypus order {f.nebentypus_order} is excluded")
    d, R, S = quadratic_coordinates(f)
    m = min(f.M, g.M)
    A2, B2 = R(f.a(2)), S(f.a(2))
    c2 = g.a(2).coords[0]
    real = TruncatedSeries(tuple(R(x) for x in f.coefficients[:m]))
    imag = TruncatedSeries(tuple(S(x) for x in f.coefficients[:m]))
    gs = g.coordinate_series(0, m)
    consts = {"A2": A2, "B2": B2, "c2": c2, "d": d}
    h1 = real
    if B2 != 0:
        branch = "B2!=0"
        h2 = imag.scale(1 / B2)
        h3 = _lin((1, gs), (-1, h1), (-(c2 - A2), h2))
    else:
        if A2 == c2:
            raise HyperellipticObstructionError("B_2 = 0 and A_2 = c_2: a_2 agrees on all embeddings")
        branch = "B2=0"
        h2 = _lin((1, gs), (-1, h1)).scale(1 / (c2 - A2))
        h3 = imag
    labels = [format_label(f.label), format_label(g.label)]
    return _finish("AE", h1, h2, h3, BasisDerivation("AE", consts, branch), labels, echelon)


# ---------------------------------------------------------------- case EEE

def build_case_EEE(f1: EigenformPackage, f2: EigenformPackage, f3: EigenformPackage,
                   echelon: bool = False) -> NormalizedBasis:
    pk = [f1, f2, f3]
    if any(p.dimension != 1 for p in pk):
        raise WrongCaseError("case EEE needs three rational forms")
    pk.sort(key=lambda p: format_label(p.label))
    a2s = [p.a(2).coords[0] for p in pk]
    pair = next(((i, j) for i in range(3) for j in range(i + 1, 3) if a2s[i] != a2s[j]), None)
    if pair is None:
        raise HyperellipticObstructionError(f"a_2 = {a2s[0]} for all three forms")
    i, j = pair
    k = 3 - i - j
    F1, F2, F3 = pk[i], pk[j], pk[k]
    a2, b2, c2 = a2s[i], a2s[j], a2s[k]
    m = min(p.M for p in pk)
    s1, s2, s3 = (p.coordinate_series(0, m) for p in (F1, F2, F3))
    h1 = s1
    h2 = _lin((1, s1), (-1, s2)).scale(1 / (a2 - b2))
    h3 = _lin((1, s3), (-1, s1), (-(c2 - a2), h2))
    labels = tuple(format_label(p.label) for p in (F1, F2, F3))
    consts = {"a2": a2, "b2": b2, "c2": c2}
    return _finish("EEE", h1, h2, h3, BasisDerivation("EEE", consts, ordering=labels), labels, echelon)


# ---------------------------------------------------------------- dispatch

def build_basis(spec: AbelianFactorSpec | Sequence[EigenformPackage], echelon: bool = False) -> NormalizedBasis:
    if not isinstance(spec, AbelianFactorSpec):
        spec = make_factor_spec(list(spec))
    pk = spec.packages
    if spec.case == "A":
        return build_case_A(pk[0], echelon)
    if spec.case == "AE":
        return build_case_AE(pk[0], pk[1], echelon)
    if spec.case == "EEE":
        return build_case_EEE(*pk, echelon=echelon)
    raise WrongCaseError(f"unknown case {spec.case}")


@dataclass(frozen=True)
class OrderProfile:
    orders: dict
    distinct: bool

    def __getitem__(self, e):
        return self.orders[e]


def monomial_order_profile(basis: NormalizedBasis | int, degree: int) -> OrderProfile:
    """Leading exponent i + 2j + n k of h1^i h2^j h3^k, with n = ord_q h3."""
    n = basis if isinstance(basis, int) else basis.ord_h3
    orders = {e: e[0] + 2 * e[1] + n * e[2] for e in monomials(degree)}
    return OrderProfile(orders, len(set(orders.values())) == len(orders))


def spans_inputs(basis: NormalizedBasis, inputs: Sequence[TruncatedSeries]) -> bool:
    """Every input series is a rational combination of h1, h2, h3 on all known coefficients."""
    h = basis.series
    n = basis.ord_h3
    for s in inputs:
        m = min(s.trunc_order, basis.trunc_order)
        # triangular solve on the pivot exponents 1, 2, n
        c1 = s[1]
        r = add(s.truncate(m), h[0].truncate(m).scale(-c1))
        c2 = r[2]
        r = add(r, h[1].truncate(m).scale(-c2))
        c3 = r[n]
        r = add(r, h[2].truncate(m).scale(-c3))
        if not r.is_zero():
            return False
    return True


@dataclass(frozen=True, eq=False)
class EchelonBasis:
    """Reduced row echelon basis of a span of series, with its pivot exponents."""

    series: tuple[TruncatedSeries, ...]
    pivots: tuple[int, ...]
    labels: tuple[str, ...] = ()

    @property
    def trunc_order(self) -> int:
        return min(s.trunc_order for s in self.series)


def echelon_span(series: Sequence[TruncatedSeries], labels: Sequence[str] = ()) -> EchelonBasis:
    """Reduced echelon basis (leading coefficient 1, zeros above every pivot)."""
    m = min(s.trunc_order for s in series)
    rows = [list(s.coeffs[:m]) for s in series]
    pivots = []
    r = 0
    for c in range(m):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c + 1)
        r += 1
        if r == len(rows):
            break
    if r < len(rows):
        raise BasisError("the series are linearly dependent to the known order")
    return EchelonBasis(tuple(TruncatedSeries(tuple(x)) for x in rows), tuple(pivots), tuple(labels))


def package_span(packages: Sequence[EigenformPackage]) -> EchelonBasis:
    """Echelon basis of the rational span of the Galois orbits of the packages."""
    m = min(p.M for p in packages)
    series = [s for p in packages for s in p.rational_span(m)]
    return echelon_span(series, [format_label(p.label) for p in packages])
