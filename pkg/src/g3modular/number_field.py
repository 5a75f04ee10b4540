"""Arithmetic in K = Q[x]/(p(x)) for coefficient fields of degree at most 3."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import isqrt
from typing import Sequence

from .rings import RingMismatchError

MAX_DEGREE = 3


class NumberFieldError(ValueError):
    pass


class ReduciblePolynomialError(NumberFieldError):
    pass


def _int_divisors(n: int) -> list[int]:
    n = abs(n)
    small = [d for d in range(1, isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


@dataclass(frozen=True)
class MinimalPolynomial:
    """Monic integer polynomial, coefficients stored highest degree first."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(a) for a in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        if len(c) < 2 or c[0] != 1:
            raise NumberFieldError(f"not a monic polynomial of positive degree: {c}")
        if len(c) - 1 > MAX_DEGREE:
            raise NumberFieldError(f"degree {len(c) - 1} exceeds the supported cap {MAX_DEGREE}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0
        for c in self.coeffs:
            acc = acc * x + c
        return acc

    def rational_roots(self) -> list[int]:
        # monic integer polynomial: rational roots are integers dividing the constant term
        const = self.coeffs[-1]
        if const == 0:
            return [0] + [r for r in self._roots_of(self.coeffs[:-1]) if r != 0]
        return [r for d in _int_divisors(const) for r in (d, -d) if self(r) == 0]

    @staticmethod
    def _roots_of(coeffs):
        if len(coeffs) < 2:
            return []
        return MinimalPolynomial(tuple(coeffs)).rational_roots()

    def is_irreducible(self) -> bool:
        # degrees 1..3: reducible iff a rational root exists (degree 1 is always irreducible)
        return self.degree == 1 or not self.rational_roots()

    def derivative(self) -> tuple[int, ...]:
        n = self.degree
        return tuple(c * (n - i) for i, c in enumerate(self.coeffs[:-1]))

    def power_sums(self, count: int) -> list[Fraction]:
        """Power sums s_0..s_{count-1} of the roots, via Newton's identities."""
        n = self.degree
        e = self.coeffs[1:]  # x^n + e1 x^{n-1} + ... + en
        s = [Fraction(n)]
        for k in range(1, count):
            acc = Fraction(0)
            for i in range(1, min(k - 1, n) + 1):
                acc -= e[i - 1] * s[k - i]
            if k <= n:
                acc -= k * e[k - 1]
            s.append(acc)
        return s

    def __str__(self):
        terms = []
        n = self.degree
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*x^{n - i}")
        return " + ".join(terms)


def poly_disc(p: MinimalPolynomial | Sequence) -> Fraction:
    """Discriminant of a polynomial of degree 2 or 3 (coefficients highest first)."""
    c = p.coeffs if isinstance(p, MinimalPolynomial) else tuple(p)
    c = [Fraction(x) for x in c]
    if len(c) == 3:
        a, b, cc = c
        return b * b - 4 * a * cc
    if len(c) == 4:
        a, b, cc, d = c
        return (b * b * cc * cc - 4 * a * cc ** 3 - 4 * b ** 3 * d
                - 27 * a * a * d * d + 18 * a * b * cc * d)
    raise NumberFieldError(f"discriminant only supported in degrees 2 and 3, got {len(c) - 1}")


class NumberField:
    """Q[x]/(p(x)); acts as the coefficient ring for its elements."""

    def __init__(self, poly: MinimalPolynomial | Sequence[int], check: bool = True):
        if not isinstance(poly, MinimalPolynomial):
            poly = MinimalPolynomial(tuple(poly))
        if check and not poly.is_irreducible():
            raise ReduciblePolynomialError(f"{poly.coeffs} has a rational root")
        self.poly = poly
        self.degree = poly.degree
        self.name = f"Q[x]/({poly})"

    def __eq__(self, other):
        return isinstance(other, NumberField) and other.poly == self.poly

    def __hash__(self):
        return hash(("NF", self.poly.coeffs))

    def __repr__(self):
        return f"NumberField({list(self.poly.coeffs)})"

    def __call__(self, coords) -> "NumberFieldElement":
        return NumberFieldElement(tuple(Fraction(c) for c in coords), self)

    @property
    def zero(self) -> "NumberFieldElement":
        return self([0] * self.degree)

    @property
    def one(self) -> "NumberFieldElement":
        return self([1] + [0] * (self.degree - 1))

    @property
    def gen(self) -> "NumberFieldElement":
        if self.degree == 1:
            # x = -c0 in Q[x]/(x + c0)
            return self([-self.poly.coeffs[1]])
        return self([0, 1] + [0] * (self.degree - 2))

    def coerce(self, x) -> "NumberFieldElement":
        if isinstance(x, NumberFieldElement):
            if x.field != self:
                raise RingMismatchError(f"element of {x.field!r} used in {self!r}")
            return x
        return self([Fraction(x)] + [0] * (self.degree - 1))

    @cached_property
    def _power_sums(self) -> list[Fraction]:
        return self.poly.power_sums(self.degree)

    @cached_property
    def _reduction(self) -> list[list[Fraction]]:
        # coordinates of x^k for k = 0 .. 2*deg-2
        n = self.degree
        e = self.poly.coeffs[1:]
        rows = []
        for k in range(2 * n - 1):
            if k < n:
                v = [Fraction(0)] * n
                v[k] = Fraction(1)
            else:
                prev = rows[k - 1]
                # x * (v_0 + ... + v_{n-1} x^{n-1}); x^n = -(e1 x^{n-1} + ... + en)
                top = prev[n - 1]
                v = [Fraction(0)] + prev[:-1]
                for i in range(n):
                    v[n - 1 - i] -= top * e[i]
            rows.append(v)
        return rows

    def mul_coords(self, u: Sequence[Fraction], v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        n = self.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(u):
            if a:
                for j, b in enumerate(v):
                    if b:
                        prod[i + j] += a * b
        red = self._reduction
        out = [Fraction(0)] * n
        for k, c in enumerate(prod):
            if c:
                row = red[k]
                for i in range(n):
                    if row[i]:
                        out[i] += c * row[i]
        return tuple(out)

    def multiplication_matrix(self, u: "NumberFieldElement") -> list[list[Fraction]]:
        """Matrix of y -> u*y in the power basis; column k is u*x^k."""
        n = self.degree
        cols = [self.mul_coords(u.coords, [1 if i == k else 0 for i in range(n)]) for k in range(n)]
        return [[cols[k][i] for k in range(n)] for i in range(n)]

    def roots_of_unity(self, order: int) -> list["NumberFieldElement"]:
        """Elements of exact multiplicative order ``order`` (order <= 6)."""
        if order == 1:
            return [self.one]
        if order == 2:
            return [-self.one]
        if order not in (3, 4, 6):
            raise NumberFieldError(f"unsupported root-of-unity order {order}")
        if self.degree != 2:
            return []
        # sqrt(D) = 2x + a in Q[x]/(x^2 + a x + b)
        _, a, b = self.poly.coeffs
        disc = Fraction(a * a - 4 * b)
        target = -3 if order in (3, 6) else -1
        ratio = Fraction(target) / disc
        if ratio <= 0:
            return []
        num, den = ratio.numerator, ratio.denominator
        rn, rd = isqrt(num), isqrt(den)
        if rn * rn != num or rd * rd != den:
            return []
        s = Fraction(rn, rd)
        sqrt_target = self([s * a, 2 * s])
        if order == 4:
            roots = [sqrt_target, -sqrt_target]
        else:
            half = Fraction(1, 2)
            base = -half if order == 3 else half
            roots = [self.coerce(base) + sqrt_target * self.coerce(half),
                     self.coerce(base) - sqrt_target * self.coerce(half)]
        return roots


@dataclass(frozen=True, eq=False)
class NumberFieldElement:
    coords: tuple[Fraction, ...]
    field: NumberField

    def __post_init__(self):
        if len(self.coords) != self.field.degree:
            raise NumberFieldError(
                f"coordinate vector of length {len(self.coords)} in a degree-{self.field.degree} field")

    def _lift(self, other) -> "NumberFieldElement":
        if isinstance(other, NumberFieldElement):
            if other.field != self.field:
                raise RingMismatchError("elements of different number fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.field.coerce(other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return NumberFieldElement(tuple(a + b for a, b in zip(self.coords, o.coords)), self.field)

    __radd__ = __add__

    def __neg__(self):
        return NumberFieldElement(tuple(-a for a in self.coords), self.field)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NumberFieldElement(tuple(a * other for a in self.coords), self.field)
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return NumberFieldElement(self.field.mul_coords(self.coords, o.coords), self.field)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        acc = self.field.one
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def __eq__(self, other):
        o = self._lift(other) if isinstance(other, (int, Fraction, NumberFieldElement)) else NotImplemented
        if o is NotImplemented:
            return NotImplemented
        return self.coords == o.coords

    def __hash__(self):
        return hash(self.coords)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def is_rational(self) -> bool:
        return not any(self.coords[1:])

    def trace(self) -> Fraction:
        return trace(self)

    def __repr__(self):
        return f"NF{[str(c) for c in self.coords]}"


def nf_mul(u: NumberFieldElement, v: NumberFieldElement) -> NumberFieldElement:
    if u.field != v.field:
        raise RingMismatchError("elements of different number fields")
    return u * v


def trace(u: NumberFieldElement) -> Fraction:
    """Tr_{K/Q}(u) = sum_k u_k * s_k with s_k the power sums of the roots of p."""
    s = u.field._power_sums
    return sum((c * s[k] for k, c in enumerate(u.coords)), Fraction(0))
