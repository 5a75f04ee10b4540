"""Coefficient rings shared by the series kernel.

Every ring exposes ``zero``, ``one`` and ``coerce``; its elements support
``+``, ``-``, ``*``, unary ``-`` and exact ``==``.  Series arithmetic only
relies on that contract, so rationals, number-field elements and prime
field residues can all be used as q-expansion coefficients.
"""

from __future__ import annotations

from fractions import Fraction
from functools import total_ordering


class RingMismatchError(TypeError):
    """Operands live in different coefficient rings."""


class RationalField:
    """The field of rationals, backed by :class:`fractions.Fraction`."""

    name = "QQ"

    @property
    def zero(self) -> Fraction:
        return Fraction(0)

    @property
    def one(self) -> Fraction:
        return Fraction(1)

    def coerce(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into QQ")

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __repr__(self):
        return "QQ"


QQ = RationalField()


@total_ordering
class Fp:
    """Residue class modulo a prime ``p``."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.p = p
        self.v = v % p

    def _other(self, other) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise RingMismatchError(f"F_{self.p} vs F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fp(self.v - o, self.p)

    def __rsub__(self, other):
        return Fp(other - self.v, self.p)

    def __mul__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.v, self.p)

    def inverse(self) -> "Fp":
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (self.v - other) % self.p == 0
        return NotImplemented

    def __lt__(self, other):
        return self.v < self._other(other)

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"{self.v} mod {self.p}"


class PrimeField:
    """The prime field F_p."""

    def __init__(self, p: int):
        if p < 2:
            raise ValueError(f"not a prime: {p}")
        self.p = p
        self.name = f"F_{p}"

    @property
    def zero(self) -> Fp:
        return Fp(0, self.p)

    @property
    def one(self) -> Fp:
        return Fp(1, self.p)

    def coerce(self, x) -> Fp:
        if isinstance(x, Fp):
            if x.p != self.p:
                raise RingMismatchError(f"F_{x.p} element in F_{self.p}")
            return x
        if isinstance(x, Fraction):
            return Fp(x.numerator, self.p) * Fp(x.denominator, self.p).inverse()
        return Fp(int(x), self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("Fp", self.p))

    def __repr__(self):
        return self.name
