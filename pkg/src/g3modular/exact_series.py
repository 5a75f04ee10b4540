"""Exact truncated q-expansions without constant term.

A series with truncation order ``M`` stores the coefficients of q^1 .. q^M;
everything from q^{M+1} on is unknown (not zero).  Operations track the
largest exponent they can vouch for instead of silently truncating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Sequence

from .polynomials import HomogeneousPolynomial
from .rings import QQ, RingMismatchError

BEYOND_TRUNCATION = "beyond-truncation"

# below this length schoolbook multiplication beats packing into big integers
_KRONECKER_CUTOFF = 24


class SeriesError(ValueError):
    pass


class InvalidParameterError(SeriesError):
    pass


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    coeffs: tuple
    ring: object = QQ

    def __post_init__(self):
        c = tuple(self.ring.coerce(x) for x in self.coeffs)
        if not c:
            raise SeriesError("a truncated series needs a positive truncation order")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, terms: dict[int, object], trunc_order: int, ring=QQ) -> "TruncatedSeries":
        c = [ring.zero] * trunc_order
        for n, v in terms.items():
            if not 1 <= n <= trunc_order:
                raise SeriesError(f"exponent {n} outside 1..{trunc_order}")
            c[n - 1] = ring.coerce(v)
        return cls(tuple(c), ring)

    @classmethod
    def zero(cls, trunc_order: int, ring=QQ) -> "TruncatedSeries":
        return cls((ring.zero,) * trunc_order, ring)

    @property
    def trunc_order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int):
        """Coefficient of q^n (1 <= n <= trunc_order)."""
        if not 1 <= n <= len(self.coeffs):
            raise IndexError(f"q^{n} is not known (trunc_order {len(self.coeffs)})")
        return self.coeffs[n - 1]

    def truncate(self, m: int) -> "TruncatedSeries":
        if m > self.trunc_order:
            raise SeriesError(f"cannot extend a series known to q^{self.trunc_order} up to q^{m}")
        return TruncatedSeries(self.coeffs[:m], self.ring)

    def _check(self, other: "TruncatedSeries"):
        if self.ring != other.ring:
            raise RingMismatchError(f"{self.ring!r} vs {other.ring!r}")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return add(self, other.scale(-1))

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "TruncatedSeries":
        c = self.ring.coerce(c)
        return TruncatedSeries(tuple(c * a for a in self.coeffs), self.ring)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.ring == other.ring and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(a == self.ring.zero for a in self.coeffs)

    def leading(self):
        """(exponent, coefficient) of the first nonzero term, or None."""
        zero = self.ring.zero
        for n, a in enumerate(self.coeffs, start=1):
            if a != zero:
                return n, a
        return None

    def __repr__(self):
        shown = []
        for n, a in enumerate(self.coeffs[:12], start=1):
            if a != self.ring.zero:
                shown.append(f"{a}*q^{n}")
        return f"<{' + '.join(shown) or '0'} + O(q^{self.trunc_order + 1})>"


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    m = min(a.trunc_order, b.trunc_order)
    return TruncatedSeries(tuple(x + y for x, y in zip(a.coeffs[:m], b.coeffs[:m])), a.ring)


def vanishing_order(a: TruncatedSeries):
    """Smallest n with a nonzero q^n coefficient, or ``BEYOND_TRUNCATION``."""
    lead = a.leading()
    return BEYOND_TRUNCATION if lead is None else lead[0]


def _reliable_order(a: TruncatedSeries) -> int:
    lead = a.leading()
    # an all-zero known part still guarantees vanishing through q^M
    return a.trunc_order + 1 if lead is None else lead[0]


def product_trunc_order(a: TruncatedSeries, b: TruncatedSeries) -> int:
    bound = min(a.trunc_order + _reliable_order(b), b.trunc_order + _reliable_order(a))
    return min(bound, a.trunc_order + b.trunc_order)


def _schoolbook(x: Sequence, y: Sequence, m: int, zero):
    # x[i] is the coefficient of q^{i+1}; product coefficient of q^{n} sits at n-1
    out = [zero] * m
    for i, u in enumerate(x):
        if i + 1 >= m:
            break
        if u == zero:
            continue
        lim = min(len(y), m - i - 1)
        for j in range(lim):
            v = y[j]
            if v != zero:
                out[i + j + 1] = out[i + j + 1] + u * v
    return out


def _int_convolve(x: list[int], y: list[int]) -> list[int]:
    """Exact integer convolution by Kronecker substitution into one big product."""
    if not x or not y:
        return []
    mx = max(abs(v) for v in x)
    my = max(abs(v) for v in y)
    if mx == 0 or my == 0:
        return [0] * (len(x) + len(y) - 1)
    bound = mx * my * min(len(x), len(y))
    k = ((bound.bit_length() + 2 + 7) // 8) * 8  # signed digit width, whole bytes
    X = sum(v << (k * i) for i, v in enumerate(x)) if len(x) < 64 else _pack(x, k)
    Y = sum(v << (k * i) for i, v in enumerate(y)) if len(y) < 64 else _pack(y, k)
    length = len(x) + len(y) - 1
    half = 1 << (k - 1)
    # bias every digit into [0, 2^k) so the packed product reads back as unsigned bytes
    bias = (half * ((1 << (k * length)) - 1)) // ((1 << k) - 1)
    P = X * Y + bias
    nbytes = k // 8
    raw = P.to_bytes(nbytes * length + 1, "little")
    return [int.from_bytes(raw[i * nbytes:(i + 1) * nbytes], "little") - half for i in range(length)]


def _pack(v: list[int], k: int) -> int:
    # divide and conquer keeps packing near-linear in the bit length
    if len(v) <= 32:
        return sum(c << (k * i) for i, c in enumerate(v))
    mid = len(v) // 2
    return _pack(v[:mid], k) + (_pack(v[mid:], k) << (k * mid))


def _common_denominator(c: Sequence[Fraction]) -> tuple[int, list[int]]:
    den = reduce(lcm, (x.denominator for x in c), 1)
    return den, [int(x * den) for x in c]


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    a._check(b)
    m = product_trunc_order(a, b)
    if a.ring == QQ and min(a.trunc_order, b.trunc_order) > _KRONECKER_CUTOFF:
        da, xa = _common_denominator(a.coeffs)
        db, xb = _common_denominator(b.coeffs)
        conv = _int_convolve(xa, xb)
        den = da * db
        out = [Fraction(0)] * m
        for idx in range(min(len(conv), m - 1)):
            v = conv[idx]
            if v:
                out[idx + 1] = Fraction(v, den)
        return TruncatedSeries(tuple(out), QQ)
    return TruncatedSeries(tuple(_schoolbook(a.coeffs, b.coeffs, m, a.ring.zero)), a.ring)


def power(a: TruncatedSeries, k: int) -> TruncatedSeries:
    if k < 1:
        raise InvalidParameterError("series without constant term have no 0-th power")
    result = a
    for _ in range(k - 1):
        result = mul(result, a)
    return result


def theta(a: TruncatedSeries) -> TruncatedSeries:
    """q d/dq: the coefficient of q^n is multiplied by n."""
    return TruncatedSeries(tuple(a.ring.coerce(n) * c for n, c in enumerate(a.coeffs, start=1)), a.ring)


def degeneracy(a: TruncatedSeries, d: int) -> TruncatedSeries:
    """a(q^d), known through q^{d*M}."""
    if not isinstance(d, int) or d < 1:
        raise InvalidParameterError(f"degeneracy index must be a positive integer, got {d!r}")
    out = [a.ring.zero] * (d * a.trunc_order)
    for n, c in enumerate(a.coeffs, start=1):
        out[n * d - 1] = c
    return TruncatedSeries(tuple(out), a.ring)


class MonomialCache:
    """Products h1^i h2^j h3^k built incrementally and shared across callers."""

    def __init__(self, s1: TruncatedSeries, s2: TruncatedSeries, s3: TruncatedSeries):
        s1._check(s2)
        s1._check(s3)
        self.series = (s1, s2, s3)
        self._pow = {}
        self._mono = {}

    def _power(self, v: int, e: int):
        key = (v, e)
        if key not in self._pow:
            if e == 1:
                self._pow[key] = self.series[v]
            else:
                half = self._power(v, e // 2)
                sq = mul(half, half)
                self._pow[key] = mul(sq, self.series[v]) if e % 2 else sq
        return self._pow[key]

    def monomial(self, e: tuple[int, int, int]) -> TruncatedSeries:
        if e not in self._mono:
            parts = [self._power(v, p) for v, p in enumerate(e) if p]
            if not parts:
                raise InvalidParameterError("constant monomial has no cusp-form expansion")
            acc = parts[0]
            for p in parts[1:]:
                acc = mul(acc, p)
            self._mono[e] = acc
        return self._mono[e]


def evaluate_form(F: HomogeneousPolynomial, s1: TruncatedSeries, s2: TruncatedSeries,
                  s3: TruncatedSeries, cache: MonomialCache | None = None) -> TruncatedSeries:
    """F(s1, s2, s3); reliable up to the smallest monomial truncation order."""
    cache = cache or MonomialCache(s1, s2, s3)
    ring = s1.ring
    if F.is_zero():
        m = min(cache.monomial(e).trunc_order for e in [(F.degree, 0, 0), (0, F.degree, 0), (0, 0, F.degree)])
        return TruncatedSeries.zero(m, ring)
    acc = None
    for e, c in F.terms.items():
        term = cache.monomial(e).scale(ring.coerce(c))
        acc = term if acc is None else add(acc, term)
    return acc
