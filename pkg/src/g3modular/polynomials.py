"""Exact homogeneous polynomials in X, Y, Z."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

VARS = "XYZ"


def monomials(d: int) -> list[tuple[int, int, int]]:
    """Exponent triples of degree ``d`` in graded-lex order with X > Y > Z."""
    return [(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


@dataclass(frozen=True)
class HomogeneousPolynomial:
    """A homogeneous form as a map (i, j, k) -> coefficient.

    Coefficients are integers after :meth:`normalized`; intermediate results
    (substitutions, derivatives) may carry rationals.
    """

    degree: int
    terms: Mapping[tuple[int, int, int], Fraction]

    def __post_init__(self):
        clean = {}
        for e, c in dict(self.terms).items():
            e = tuple(int(x) for x in e)
            if len(e) != 3 or min(e) < 0 or sum(e) != self.degree:
                raise ValueError(f"exponent {e} is not of degree {self.degree}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c})

    @classmethod
    def from_list(cls, rows: Iterable[Sequence]) -> "HomogeneousPolynomial":
        rows = [tuple(r) for r in rows]
        if not rows:
            raise ValueError("empty term list; degree is undetermined")
        d = sum(int(x) for x in rows[0][:3])
        return cls(d, {tuple(r[:3]): Fraction(r[3]) for r in rows})

    @classmethod
    def parse(cls, text: str) -> "HomogeneousPolynomial":
        """Parse text like ``x^3 z - x y^3 + y z^3`` (case-insensitive, ``=0`` allowed)."""
        src = text.replace("−", "-").split("=")[0]
        src = src.replace("*", " ").strip()
        if not src:
            raise ValueError("empty polynomial text")
        terms: dict[tuple[int, int, int], Fraction] = {}
        degree = None
        for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", src):
            body = body.strip()
            m = re.match(r"^(\d+)?\s*(.*)$", body)
            coef = int(m.group(1)) if m.group(1) else 1
            exps = [0, 0, 0]
            for var, power in re.findall(r"([xyzXYZ])\s*(?:\^\s*(\d+))?", m.group(2)):
                exps[VARS.index(var.upper())] += int(power) if power else 1
            rest = re.sub(r"[xyzXYZ]\s*(\^\s*\d+)?", "", m.group(2)).strip()
            if rest:
                raise ValueError(f"cannot parse term {body!r}")
            if degree is None:
                degree = sum(exps)
            elif sum(exps) != degree:
                raise ValueError(f"term {body!r} breaks homogeneity (degree {degree})")
            key = tuple(exps)
            terms[key] = terms.get(key, Fraction(0)) + (-coef if sign == "-" else coef)
        return cls(degree, terms)

    def coefficient(self, i: int, j: int, k: int) -> Fraction:
        return self.terms.get((i, j, k), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def to_list(self) -> list[list[int]]:
        out = []
        for e in monomials(self.degree):
            c = self.terms.get(e)
            if c:
                out.append([*e, int(c) if c.denominator == 1 else str(c)])
        return out

    def normalized(self) -> "HomogeneousPolynomial":
        """Primitive integer form whose first graded-lex coefficient is positive."""
        if not self.terms:
            return self
        den = reduce(lcm, (c.denominator for c in self.terms.values()), 1)
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = reduce(gcd, ints.values())
        lead = next(ints[e] for e in monomials(self.degree) if e in ints)
        if lead < 0:
            g = -g
        return HomogeneousPolynomial(self.degree, {e: Fraction(c // g) for e, c in ints.items()})

    def is_normalized(self) -> bool:
        return self == self.normalized()

    def max_abs_coefficient(self) -> int:
        return max((abs(c) for c in self.terms.values()), default=0)

    def __add__(self, other: "HomogeneousPolynomial"):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, Fraction(0)) + c
        return HomogeneousPolynomial(self.degree, t)

    def scale(self, c) -> "HomogeneousPolynomial":
        c = Fraction(c)
        return HomogeneousPolynomial(self.degree, {e: v * c for e, v in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, HomogeneousPolynomial):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.terms.items()))))

    def derivative(self, var: int | str) -> "HomogeneousPolynomial":
        """Partial derivative with respect to X (0), Y (1) or Z (2)."""
        v = VARS.index(var.upper()) if isinstance(var, str) else var
        if self.degree == 0:
            raise ValueError("derivative of a constant form")
        out = {}
        for e, c in self.terms.items():
            if e[v]:
                f = list(e)
                f[v] -= 1
                out[tuple(f)] = c * e[v]
        return HomogeneousPolynomial(self.degree - 1, out)

    def evaluate(self, x, y, z, one=1):
        """Evaluate at a point whose coordinates support ring arithmetic."""
        acc = None
        for (i, j, k), c in self.terms.items():
            t = _pow(x, i, one) * _pow(y, j, one) * _pow(z, k, one)
            t = t * (int(c) if c.denominator == 1 else c)
            acc = t if acc is None else acc + t
        return acc if acc is not None else one * 0

    def substitute_linear(self, rows: Sequence[Sequence]) -> "HomogeneousPolynomial":
        """F(L1, L2, L3) where L_r = rows[r][0] X + rows[r][1] Y + rows[r][2] Z."""
        lin = [_Lin.linear(r) for r in rows]
        acc = _Lin.zero(self.degree)
        for (i, j, k), c in self.terms.items():
            acc = acc + (lin[0] ** i * lin[1] ** j * lin[2] ** k).scale(c)
        return HomogeneousPolynomial(self.degree, acc.terms)

    def __str__(self):
        return format_polynomial(self)

    def __repr__(self):
        return f"HomogeneousPolynomial({format_polynomial(self)!r})"


def _pow(x, n, one):
    if n == 0:
        return one
    r = x
    for _ in range(n - 1):
        r = r * x
    return r


class _Lin:
    """Tiny sparse ternary-form algebra used for linear substitutions."""

    def __init__(self, terms):
        self.terms = terms

    @classmethod
    def linear(cls, row):
        t = {}
        for idx, c in enumerate(row):
            if Fraction(c):
                e = [0, 0, 0]
                e[idx] = 1
                t[tuple(e)] = Fraction(c)
        return cls(t)

    @classmethod
    def zero(cls, d):
        return cls({})

    def __add__(self, o):
        t = dict(self.terms)
        for e, c in o.terms.items():
            t[e] = t.get(e, 0) + c
        return _Lin({e: c for e, c in t.items() if c})

    def __mul__(self, o):
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2])
                t[e] = t.get(e, 0) + c1 * c2
        return _Lin({e: c for e, c in t.items() if c})

    def __pow__(self, n):
        r = _Lin({(0, 0, 0): Fraction(1)})
        for _ in range(n):
            r = r * self
        return r

    def scale(self, c):
        return _Lin({e: v * c for e, v in self.terms.items()})


def format_polynomial(F: HomogeneousPolynomial, lowercase: bool = False) -> str:
    """Render in graded-lex order, e.g. ``X^3*Z - X*Y^3 + Y*Z^3``."""
    names = "xyz" if lowercase else VARS
    parts = []
    for e in monomials(F.degree):
        c = F.terms.get(e)
        if not c:
            continue
        mono = "*".join(f"{names[v]}^{p}" if p > 1 else names[v] for v, p in enumerate(e) if p)
        mag = abs(c)
        if mono:
            body = mono if mag == 1 else f"{mag}*{mono}"
        else:
            body = str(mag)
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts) if parts else "0"
