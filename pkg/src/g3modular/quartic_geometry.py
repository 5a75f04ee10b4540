"""Smoothness, the point P_inf = (1:0:0), and point counts of plane curves."""

from __future__ import annotations

from dataclasses import dataclass

from .forms_data import AbelianFactorSpec, is_prime
from .polynomials import HomogeneousPolynomial, monomials
from .relation_engine import IncrementalEchelon

SMOOTH = "smooth"
SINGULAR = "singular"
UNDETERMINED = "undetermined"

# good primes tried before falling back to exact rank over Q
_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


class GeometryError(ValueError):
    pass


class NoExpectedValue(GeometryError):
    pass


@dataclass(frozen=True)
class SmoothnessCertificate:
    verdict: str
    witness: str
    prime: int | None = None
    rank: int | None = None
    needed: int | None = None


def _int_coeffs(F: HomogeneousPolynomial) -> dict:
    G = F.normalized()
    return {e: int(c) for e, c in G.terms.items()}


def _macaulay_rows(F: HomogeneousPolynomial):
    """Rows m * dF/dv for monomials m of degree 2d-4, indexed by degree 3d-5 monomials.

    The partials have no common zero over the algebraic closure exactly when these
    rows span every form of degree 3d-5 (a regular sequence of three (d-1)-ics has
    its Hilbert function vanish from degree 3(d-2)+1 on, and a common zero would
    survive in every degree).
    """
    d = F.degree
    G = _int_coeffs(F)
    H = HomogeneousPolynomial(d, G)
    parts = [{e: int(c) for e, c in H.derivative(v).terms.items()} for v in range(3)]
    target = monomials(3 * d - 5)
    col = {e: i for i, e in enumerate(target)}
    rows = []
    for part in parts:
        for m in monomials(2 * d - 4):
            row = [0] * len(target)
            for e, c in part.items():
                row[col[(e[0] + m[0], e[1] + m[1], e[2] + m[2])]] += c
            rows.append(row)
    return rows, len(target)


def _rank_mod(rows, p: int) -> int:
    rows = [[x % p for x in r] for r in rows]
    rank, ncol = 0, len(rows[0]) if rows else 0
    for c in range(ncol):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [(x * inv) % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _rank_exact(rows) -> int:
    # rank of the row space equals rank of the column space; feed columns
    ech = IncrementalEchelon(len(rows))
    for j in range(len(rows[0])):
        ech.add([r[j] for r in rows])
    return ech.rank


def check_smooth(F: HomogeneousPolynomial, primes=_PRIMES) -> SmoothnessCertificate:
    if F.is_zero():
        raise GeometryError("the zero polynomial defines no curve")
    d = F.degree
    if d < 2:
        return SmoothnessCertificate(SMOOTH, "a line is smooth")
    rows, needed = _macaulay_rows(F)
    for p in primes:
        if d % p == 0:
            continue  # Euler's relation needs p not dividing d
        if all(c % p == 0 for c in _int_coeffs(F).values()):
            continue
        r = _rank_mod(rows, p)
        if r == needed:
            return SmoothnessCertificate(SMOOTH, f"partials generate all degree-{3 * d - 5} forms mod {p}", p, r, needed)
    r = _rank_exact(rows)
    if r == needed:
        return SmoothnessCertificate(SMOOTH, "partials generate all forms over Q", None, r, needed)
    return SmoothnessCertificate(SINGULAR, f"partials span rank {r} < {needed}: common zero over the algebraic closure",
                                 None, r, needed)


def _ideal_rows(F: HomogeneousPolynomial, D: int, p: int):
    """Rows m*F and m*dF/dv spanning the degree-D part of (F, F_x, F_y, F_z) mod p."""
    d = F.degree
    G = _int_coeffs(F)
    gens = [(d, G)]
    H = HomogeneousPolynomial(d, G)
    for v in range(3):
        gens.append((d - 1, {e: int(c) for e, c in H.derivative(v).terms.items()}))
    target = monomials(D)
    col = {e: i for i, e in enumerate(target)}
    rows = []
    for deg, g in gens:
        for m in monomials(D - deg):
            row = [0] * len(target)
            for e, c in g.items():
                row[col[(e[0] + m[0], e[1] + m[1], e[2] + m[2])]] += c
            rows.append([x % p for x in row])
    return rows, len(target)


def smooth_mod(F: HomogeneousPolynomial, p: int) -> bool:
    """Whether F mod p defines a smooth curve of the same degree over the algebraic closure of F_p.

    F and its partials have no common zero exactly when they generate every form of
    degree 3d - 2 (three general combinations, brought to degree d, form a regular
    sequence).  F is included so the test also holds when p divides d.
    """
    if not is_prime(p):
        raise GeometryError(f"{p} is not prime")
    if all(c % p == 0 for c in _int_coeffs(F).values()):
        return False
    d = F.degree
    if d < 2:
        return True
    rows, needed = _ideal_rows(F, 3 * d - 2, p)
    return _rank_mod(rows, p) == needed


# ---------------------------------------------------------------- P_inf

NOT_ON_CURVE = "not-on-curve-normal-form"
ORDINARY = "ordinary-point"
FLEX = "flex"
HYPERFLEX = "hyperflex"

_ORD_TO_KIND = {3: ORDINARY, 4: FLEX, 5: HYPERFLEX}


@dataclass(frozen=True)
class FlexClassification:
    kind: str
    vanishing: tuple[str, ...]
    consistent_with_ord: bool | None = None


def classify_P_infinity(F: HomogeneousPolynomial, ord_h3: int | None = None) -> FlexClassification:
    """Position of (1:0:0) on a quartic written in the basis normal form."""
    names = ("a400", "a310", "a220", "a130")
    vals = [F.coefficient(4, 0, 0), F.coefficient(3, 1, 0), F.coefficient(2, 2, 0), F.coefficient(1, 3, 0)]
    zero = tuple(n for n, v in zip(names, vals) if v == 0)
    if vals[0] != 0:
        kind = NOT_ON_CURVE
    elif vals[1] != 0 or vals[2] != 0:
        kind = ORDINARY
    elif vals[3] != 0:
        kind = FLEX
    else:
        kind = HYPERFLEX
    ok = None if ord_h3 is None else _ORD_TO_KIND.get(ord_h3) == kind
    return FlexClassification(kind, zero, ok)


# ---------------------------------------------------------------- point counts

NO_EXPECTED_LEVEL = "p divides the level"
NO_EXPECTED_MODEL = "the model is singular mod p"


@dataclass(frozen=True)
class PointCount:
    p: int
    count: int
    expected: int | None = None
    reason: str = ""  # why there is no expected value

    @property
    def consistent(self) -> bool | None:
        return None if self.expected is None else self.count == self.expected


def _count(F: HomogeneousPolynomial, p: int) -> int:
    G = _int_coeffs(F)
    d = F.degree
    terms = [(e, c % p) for e, c in G.items() if c % p]
    powtab = [[pow(x, k, p) for k in range(d + 1)] for x in range(p)]

    def val(x, y, z):
        s = 0
        for (i, j, k), c in terms:
            s += c * powtab[x][i] * powtab[y][j] * powtab[z][k]
        return s % p == 0

    n = 0
    # points (x:y:1), (x:1:0), (1:0:0)
    for x in range(p):
        px = powtab[x]
        for y in range(p):
            py = powtab[y]
            s = 0
            for (i, j, k), c in terms:
                s += c * px[i] * py[j]
            if s % p == 0:
                n += 1
    n += sum(1 for x in range(p) if val(x, 1, 0))
    n += 1 if val(1, 0, 0) else 0
    return n


def expected_count(spec: AbelianFactorSpec, p: int) -> int:
    if spec.level % p == 0:
        raise NoExpectedValue(f"p = {p} divides the level {spec.level}")
    t = spec.trace_of_frobenius(p)
    return int(p + 1 - t)


def count_points(F: HomogeneousPolynomial, p: int, spec: AbelianFactorSpec | None = None,
                 level: int | None = None) -> PointCount:
    """Exhaustive count of F = 0 over the projective plane over F_p.

    With ``spec`` the expected value p + 1 - Tr(a_p) is attached when p is good for
    both the level and the model.
    """
    if not is_prime(p):
        raise GeometryError(f"{p} is not prime")
    n = _count(F, p)
    if spec is None:
        return PointCount(p, n)
    lvl = level or spec.level
    if lvl % p == 0:
        return PointCount(p, n, None, NO_EXPECTED_LEVEL)
    if not smooth_mod(F, p):
        return PointCount(p, n, None, NO_EXPECTED_MODEL)
    return PointCount(p, n, int(p + 1 - spec.trace_of_frobenius(p)))


def hasse_weil_ok(count: int, p: int, genus: int = 3) -> bool:
    # |N - (p+1)| <= 2 g sqrt(p), compared in integers
    dev = abs(count - (p + 1))
    return dev * dev <= 4 * genus * genus * p
