"""Relation search among q-expansions and its Sturm-type certification."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Sequence

from .exact_series import (BEYOND_TRUNCATION, MonomialCache, TruncatedSeries, add, evaluate_form,
                           mul, theta, vanishing_order)
from .forms_data import factorize
from .polynomials import HomogeneousPolynomial, monomials

GAMMA0 = "g0"
GAMMA1 = "g1"
CUSTOM = "custom"


class RelationError(ValueError):
    pass


class InsufficientTruncationError(RelationError):
    def __init__(self, required: int, available: int, what: str = "series"):
        self.required, self.available = required, available
        super().__init__(f"{what} known to q^{available}, but q^{required} is required")


class DegenerateDenominatorError(RelationError):
    pass


class SingularMatrixError(RelationError):
    pass


# ---------------------------------------------------------------- group indices

def parse_group(group) -> tuple[str, int | None]:
    """Accept 'g0', 'g1', 'custom:k' or a (kind, k) pair."""
    if isinstance(group, tuple):
        return group
    g = str(group).lower()
    if g in ("g0", "gamma0", "Γ0", "Γ₀"):
        return GAMMA0, None
    if g in ("g1", "gamma1", "Γ1", "Γ₁"):
        return GAMMA1, None
    if g.startswith("custom:"):
        return CUSTOM, int(g.split(":", 1)[1])
    raise ValueError(f"unknown group {group!r}")


def group_index(N: int, group) -> int:
    """[SL2(Z) : G] for G = Gamma0(N), Gamma1(N) or a supplied custom index."""
    if N < 1:
        raise ValueError("level must be positive")
    kind, k = parse_group(group)
    if kind == CUSTOM:
        if k is None or k <= 0:
            raise ValueError(f"custom index must be positive, got {k}")
        return k
    idx = Fraction(N) if kind == GAMMA0 else Fraction(N * N)
    for p, _ in factorize(N):
        idx *= (1 + Fraction(1, p)) if kind == GAMMA0 else (1 - Fraction(1, p * p))
    assert idx.denominator == 1
    return int(idx)


def coset_count(N: int, group) -> int:
    """Index by orbit enumeration: the orbit of (0,1) (Gamma1) or of [0:1] in P^1(Z/N)
    (Gamma0) under right multiplication by S and T."""
    kind, _ = parse_group(group)
    if N == 1:
        return 1
    units = [u for u in range(1, N) if gcd(u, N) == 1]

    def canon(v):
        if kind == GAMMA1:
            return v
        return min(((v[0] * u) % N, (v[1] * u) % N) for u in units)

    start = canon((0, 1))
    seen = {start}
    todo = deque([start])
    while todo:
        c, d = todo.popleft()
        for w in ((d % N, (-c) % N), (c, (c + d) % N)):  # v*S, v*T
            w = canon(w)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen)


@dataclass(frozen=True)
class SturmBound:
    level: int
    group: str
    index: int
    weight: int
    bound: int


def sturm_bound(N: int, weight: int, group=GAMMA1) -> SturmBound:
    if weight < 2 or weight % 2:
        raise ValueError(f"weight must be even and >= 2, got {weight}")
    kind, k = parse_group(group)
    idx = group_index(N, group)
    bound = -(-weight * idx // 12)
    label = f"{kind}:{k}" if kind == CUSTOM else kind
    return SturmBound(N, label, idx, weight, bound)


# ---------------------------------------------------------------- nullspace

def _content(v: Sequence[int]) -> int:
    return reduce(gcd, v, 0)


def _primitive(v: list[int]) -> list[int]:
    g = _content(v)
    return [x // g for x in v] if g > 1 else v


class IncrementalEchelon:
    """Fraction-free row echelon form over Z, fed one equation at a time."""

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.rows: list[tuple[int, list[int]]] = []  # (lead column, row)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def add(self, eq: Sequence[int]) -> bool:
        e = list(eq)
        for lead, row in self.rows:
            c = e[lead]
            if c:
                p = row[lead]
                g = gcd(p, c)
                a, b = p // g, c // g
                e = [a * x - b * y for x, y in zip(e, row)]
                e = _primitive(e)
        for i, x in enumerate(e):
            if x:
                self.rows.append((i, _primitive(e)))
                return True
        return False

    def nullspace(self) -> list[list[int]]:
        """Integer basis of the solution space, one vector per free variable."""
        n = self.nvars
        # reduced echelon over Q on the (small) pivot system
        rows = sorted(((lead, [Fraction(x) for x in r]) for lead, r in self.rows), key=lambda t: t[0])
        red = []
        for lead, r in rows:
            inv = 1 / r[lead]
            r = [x * inv for x in r]
            red.append((lead, r))
        for i in range(len(red) - 1, -1, -1):
            lead_i, ri = red[i]
            for j in range(i):
                lead_j, rj = red[j]
                c = rj[lead_i]
                if c:
                    red[j] = (lead_j, [x - c * y for x, y in zip(rj, ri)])
        pivots = {lead for lead, _ in red}
        basis = []
        for free in range(n):
            if free in pivots:
                continue
            v = [Fraction(0)] * n
            v[free] = Fraction(1)
            for lead, r in red:
                v[lead] = -r[free]
            den = reduce(lcm, (x.denominator for x in v), 1)
            basis.append(_primitive([int(x * den) for x in v]))
        return basis


def nullspace(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Integer basis of {a : sum_i a_i rows[i] = 0} (left kernel)."""
    n = len(rows)
    if n == 0:
        return []
    scaled, dens = [], []
    for r in rows:
        den = reduce(lcm, (Fraction(x).denominator for x in r), 1)
        dens.append(den)
        scaled.append([int(Fraction(x) * den) for x in r])
    ech = IncrementalEchelon(n)
    for j in range(len(scaled[0])):
        ech.add([scaled[i][j] for i in range(n)])
        if ech.rank == n:
            return []
    out = []
    for v in ech.nullspace():
        # undo the per-row scaling: a_i = v_i * den_i
        out.append(_primitive([v[i] * dens[i] for i in range(n)]))
    return out


# ---------------------------------------------------------------- relation search

@dataclass
class RelationResult:
    degree: int
    dimension: int
    relations: list[HomogeneousPolynomial]
    classification: str
    bound: SturmBound | None = None
    columns: int = 0
    guard: bool = False  # True when the monomial-profile argument settled the answer

    @property
    def relation(self) -> HomogeneousPolynomial | None:
        return self.relations[0] if len(self.relations) == 1 else None


UNIQUE_QUARTIC = "unique-quartic"
HYPERELLIPTIC = "hyperelliptic-signature"
NONE = "none"
OVER_DETERMINED = "over-determined"


def classify(d: int, dim: int) -> str:
    if dim == 0:
        return NONE
    if d == 4:
        return UNIQUE_QUARTIC if dim == 1 else HYPERELLIPTIC
    return OVER_DETERMINED


def leading_profile(series: Sequence[TruncatedSeries], d: int) -> dict[tuple[int, int, int], int]:
    orders = []
    for s in series:
        o = vanishing_order(s)
        if o == BEYOND_TRUNCATION:
            raise RelationError("a basis series vanishes to its full truncation order")
        orders.append(o)
    return {e: sum(a * b for a, b in zip(e, orders)) for e in monomials(d)}


def _as_triple(basis) -> tuple[TruncatedSeries, TruncatedSeries, TruncatedSeries]:
    if hasattr(basis, "series"):
        return basis.series
    return tuple(basis)


def find_relation(basis, d: int, bound: SturmBound | int, cache: MonomialCache | None = None) -> RelationResult:
    """Left kernel of the monomial coefficient matrix at exponents 1..bound."""
    if d < 2:
        raise RelationError(f"degree {d} < 2")
    h = _as_triple(basis)
    B = bound.bound if isinstance(bound, SturmBound) else int(bound)
    avail = min(s.trunc_order for s in h)
    if avail < B + d:
        raise InsufficientTruncationError(B + d, avail)
    profile = leading_profile(h, d)
    if len(set(profile.values())) == len(profile):
        # distinct leading exponents make the monomials linearly independent
        return RelationResult(d, 0, [], NONE, bound if isinstance(bound, SturmBound) else None, 0, True)
    cache = cache or MonomialCache(*h)
    monos = monomials(d)
    series = [cache.monomial(e) for e in monos]
    for e, s in zip(monos, series):
        if s.trunc_order < B:
            raise InsufficientTruncationError(B, s.trunc_order, f"monomial {e}")
    rows = [s.coeffs[:B] for s in series]
    kernel = nullspace(rows)
    rels = [HomogeneousPolynomial(d, {e: c for e, c in zip(monos, v) if c}).normalized() for v in kernel]
    rels.sort(key=lambda F: F.to_list())
    return RelationResult(d, len(rels), rels, classify(d, len(rels)),
                          bound if isinstance(bound, SturmBound) else None, B)


def certify_vanishing(F: HomogeneousPolynomial, basis, bound: SturmBound | int,
                      cache: MonomialCache | None = None) -> bool:
    """True iff F(h1,h2,h3) has every coefficient through q^bound equal to zero."""
    h = _as_triple(basis)
    B = bound.bound if isinstance(bound, SturmBound) else int(bound)
    val = evaluate_form(F, *h, cache=cache or MonomialCache(*h))
    if val.trunc_order < B:
        raise InsufficientTruncationError(B, val.trunc_order, "F(h1,h2,h3)")
    return all(c == 0 for c in val.coeffs[:B])


@dataclass(frozen=True)
class PsiCertificate:
    c_F: Fraction | None
    verified_to: int
    status: str  # constant | non-constant | inconclusive
    first_residual: int | None = None


def psi_certificate(F: HomogeneousPolynomial, basis, bound_w6: SturmBound | int,
                    cache: MonomialCache | None = None) -> PsiCertificate:
    """Constancy check of (theta(h1) h3 - h1 theta(h3)) / (dF/dY)(h1,h2,h3)."""
    h1, h2, h3 = _as_triple(basis)
    B = bound_w6.bound if isinstance(bound_w6, SturmBound) else int(bound_w6)
    num = add(mul(theta(h1), h3), mul(h1, theta(h3)).scale(-1))
    den = evaluate_form(F.derivative(1), h1, h2, h3, cache=cache or MonomialCache(h1, h2, h3))
    dl = den.leading()
    if dl is None:
        raise DegenerateDenominatorError("dF/dY(h1,h2,h3) vanishes to the available order")
    nl = num.leading()
    avail = min(num.trunc_order, den.trunc_order)
    if nl is None or nl[0] != dl[0]:
        first = min(x[0] for x in (nl, dl) if x is not None)
        if first > min(B, avail):
            return PsiCertificate(None, avail, "inconclusive")
        return PsiCertificate(None, first, "non-constant", first)
    c = Fraction(nl[1]) / Fraction(dl[1])
    resid = add(num, den.scale(-c))
    lim = min(B, resid.trunc_order)
    for n in range(1, lim + 1):
        if resid[n] != 0:
            return PsiCertificate(c, n - 1, "non-constant", n)
    if resid.trunc_order < B:
        return PsiCertificate(c, resid.trunc_order, "inconclusive")
    return PsiCertificate(c, B, "constant")


# ---------------------------------------------------------------- change of basis

def _det3(M) -> Fraction:
    M = [[Fraction(x) for x in r] for r in M]
    return (M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
            - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
            + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]))


def det3(M) -> Fraction:
    return _det3(M)


def inverse3(M) -> list[list[Fraction]]:
    d = _det3(M)
    if d == 0:
        raise SingularMatrixError("matrix is singular")
    M = [[Fraction(x) for x in r] for r in M]
    cof = [[(M[(j + 1) % 3][(i + 1) % 3] * M[(j + 2) % 3][(i + 2) % 3]
             - M[(j + 1) % 3][(i + 2) % 3] * M[(j + 2) % 3][(i + 1) % 3]) for j in range(3)] for i in range(3)]
    return [[cof[i][j] / d for j in range(3)] for i in range(3)]


def change_of_basis(F: HomogeneousPolynomial, M, normalize: bool = True) -> HomogeneousPolynomial:
    """G(X,Y,Z) = F((X,Y,Z) M^t): the relation satisfied by g = M^{-1} f."""
    if _det3(M) == 0:
        raise SingularMatrixError("change-of-basis matrix is singular")
    G = F.substitute_linear(M)
    return G.normalized() if normalize else G


def transform_basis(M, series: Sequence[TruncatedSeries]) -> tuple[TruncatedSeries, ...]:
    """(g1,g2,g3)^t = M^{-1} (f1,f2,f3)^t."""
    inv = inverse3(M)
    out = []
    for row in inv:
        acc = None
        for c, s in zip(row, series):
            t = s.scale(c)
            acc = t if acc is None else add(acc, t)
        out.append(acc)
    return tuple(out)
