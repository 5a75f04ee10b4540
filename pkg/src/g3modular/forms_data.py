"""Newform packages: labels, Nebentypus codes, ingestion and validation.

Labels follow the ``NX_eps`` convention: level, a letter string, and an
optional list of per-prime-power character exponents.  For an odd prime
power p^a the exponent e gives eps_p(g) = exp(2 pi i e / phi(p^a)) at the
smallest positive generator g; 2^2 uses the generator -1; 2^a with a > 2
carries a pair (e', e'') for the generators -1 and 5, of orders 2 and
2^(a-2).  The factor 2^1 has a trivial unit group and is not written.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from pathlib import Path
from typing import Sequence

from .exact_series import TruncatedSeries
from .number_field import (MinimalPolynomial, NumberField, NumberFieldElement, NumberFieldError, trace)
from .rings import QQ

SCHEMA_VERSION = 1
FIXTURE_ENV = "G3MODULAR_FIXTURES"


class PackageError(ValueError):
    """Base class for ingestion failures."""


class SchemaError(PackageError):
    pass


class LabelError(PackageError):
    pass


class NormalizationError(PackageError):
    pass


class MultiplicativityError(PackageError):
    def __init__(self, m: int, n: int, msg: str = ""):
        self.m, self.n = m, n
        super().__init__(msg or f"a_{m * n} != a_{m} * a_{n} for coprime (m,n)=({m},{n})")


class HeckeRecursionError(PackageError):
    def __init__(self, p: int, power: int):
        self.p, self.power = p, power
        super().__init__(f"Hecke recursion fails at prime {p}, power {power} (a_{p ** power})")


class CharacterError(PackageError):
    pass


class UndefinedCharacterValue(CharacterError):
    pass


class FixtureMissingError(FileNotFoundError):
    pass


def factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            a = 0
            while n % d == 0:
                n //= d
                a += 1
            out.append((d, a))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    return n > 1 and factorize(n) == [(n, 1)]


def euler_phi(n: int) -> int:
    r = n
    for p, _ in factorize(n):
        r = r // p * (p - 1)
    return r


def _smallest_generator(pp: int) -> int:
    phi = euler_phi(pp)
    for g in range(2, pp):
        if gcd(g, pp) == 1:
            x, order = g % pp, 1
            while x != 1:
                x = x * g % pp
                order += 1
            if order == phi:
                return g
    raise CharacterError(f"(Z/{pp})^* is not cyclic")


def _discrete_log(x: int, g: int, mod: int) -> int:
    # exhaustive search; moduli here are desk-sized
    acc, k = 1, 0
    x %= mod
    while True:
        if acc == x:
            return k
        acc = acc * g % mod
        k += 1
        if acc == 1:
            raise CharacterError(f"{x} is not a power of {g} modulo {mod}")


@dataclass(frozen=True)
class CharacterComponent:
    p: int
    alpha: int
    exponents: tuple[int, ...]

    @property
    def modulus(self) -> int:
        return self.p ** self.alpha

    @property
    def generator_orders(self) -> tuple[int, ...]:
        if self.p == 2 and self.alpha == 1:
            return ()
        if self.p == 2 and self.alpha > 2:
            return (2, 2 ** (self.alpha - 2))
        return (euler_phi(self.modulus),)

    def value(self, x: int) -> Fraction:
        """Exponent r with eps_p(x) = exp(2 pi i r)."""
        pp = self.modulus
        if self.p == 2:
            if self.alpha == 1:
                return Fraction(0)
            if self.alpha == 2:
                s = 0 if x % 4 == 1 else 1
                return Fraction(self.exponents[0] * s, 2)
            sign = 0 if x % 4 == 1 else 1
            y = x if sign == 0 else -x
            t = _discrete_log(y % pp, 5, pp)
            e1, e2 = self.exponents
            return Fraction(e1 * sign, 2) + Fraction(e2 * t, 2 ** (self.alpha - 2))
        g = _smallest_generator(pp)
        k = _discrete_log(x % pp, g, pp)
        return Fraction(self.exponents[0] * k, euler_phi(pp))

    @property
    def order(self) -> int:
        return reduce(lcm, (Fraction(e, o).denominator for e, o in zip(self.exponents, self.generator_orders)), 1)


@dataclass(frozen=True)
class DirichletCharacterCode:
    modulus: int
    components: tuple[CharacterComponent, ...]

    @classmethod
    def trivial(cls, modulus: int) -> "DirichletCharacterCode":
        comps = []
        for p, a in factorize(modulus):
            n = len(CharacterComponent(p, a, ()).generator_orders)
            comps.append(CharacterComponent(p, a, (0,) * n))
        return cls(modulus, tuple(comps))

    @classmethod
    def from_exponents(cls, modulus: int, exps: Sequence[int]) -> "DirichletCharacterCode":
        """Distribute a flat exponent list over the prime powers of the modulus."""
        comps = []
        it = list(exps)
        pos = 0
        for p, a in factorize(modulus):
            need = len(CharacterComponent(p, a, ()).generator_orders)
            chunk = tuple(int(e) for e in it[pos:pos + need])
            if len(chunk) != need:
                raise LabelError(f"too few character exponents for modulus {modulus}: {list(exps)}")
            comps.append(CharacterComponent(p, a, chunk))
            pos += need
        if pos != len(it):
            raise LabelError(f"too many character exponents for modulus {modulus}: {list(exps)}")
        code = cls(modulus, tuple(comps))
        code.validate()
        return code

    def validate(self):
        seen = set()
        for c in self.components:
            if c.p in seen:
                raise LabelError(f"prime {c.p} appears twice")
            seen.add(c.p)
            for e, o in zip(c.exponents, c.generator_orders):
                if not 0 <= e < o:
                    raise LabelError(f"exponent {e} for {c.p}^{c.alpha} outside [0, {o})")
        if {p for p, _ in factorize(self.modulus)} != seen:
            raise LabelError(f"character components do not cover the primes of {self.modulus}")

    @property
    def exponents(self) -> tuple[int, ...]:
        return tuple(e for c in self.components for e in c.exponents)

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    @property
    def order(self) -> int:
        return reduce(lcm, (c.order for c in self.components), 1)

    def value(self, n: int) -> Fraction:
        """eps(n) = exp(2 pi i r); returns r in [0, 1)."""
        if gcd(n, self.modulus) != 1:
            raise UndefinedCharacterValue(f"eps({n}) undefined: gcd with {self.modulus} is not 1")
        r = sum((c.value(n) for c in self.components), Fraction(0))
        return r - (r.numerator // r.denominator)

    def text(self) -> str:
        return "{" + ",".join(str(e) for e in self.exponents) + "}"


def character_value(code: DirichletCharacterCode, p: int) -> Fraction:
    return code.value(p)


def letters_to_index(s: str) -> int:
    if not re.fullmatch(r"([A-Z])\1*", s):
        raise LabelError(f"bad letter string {s!r}")
    return 26 * (len(s) - 1) + (ord(s[0]) - ord("A"))


def index_to_letters(i: int) -> str:
    return chr(ord("A") + i % 26) * (i // 26 + 1)


_LABEL_RE = re.compile(r"^(\d+)([A-Z]+)(?:_\{\{?([0-9,\s]*)\}?\})?$")


@dataclass(frozen=True)
class NewformLabel:
    level: int
    letters: str
    character: DirichletCharacterCode

    @property
    def is_trivial_character(self) -> bool:
        return self.character.is_trivial()

    def __str__(self):
        return format_label(self)


def parse_label(text: str) -> NewformLabel:
    m = _LABEL_RE.match(text.strip())
    if not m:
        raise LabelError(f"malformed newform label {text!r}")
    level = int(m.group(1))
    if level < 1:
        raise LabelError("level must be positive")
    letters = m.group(2)
    letters_to_index(letters)
    if m.group(3) is None:
        char = DirichletCharacterCode.trivial(level)
    else:
        parts = [p for p in m.group(3).replace(" ", "").split(",") if p != ""]
        char = DirichletCharacterCode.from_exponents(level, [int(p) for p in parts])
    return NewformLabel(level, letters, char)


def format_label(label: NewformLabel) -> str:
    base = f"{label.level}{label.letters}"
    if label.character.is_trivial():
        return base
    return base + "_{" + ",".join(str(e) for e in label.character.exponents) + "}"


@dataclass(frozen=True, eq=False)
class EigenformPackage:
    label: NewformLabel
    field: NumberField
    nebentypus_order: int
    coefficients: tuple[NumberFieldElement, ...]
    provenance: str = ""
    character_root: NumberFieldElement | None = None
    digest: str = ""

    @property
    def level(self) -> int:
        return self.label.level

    @property
    def M(self) -> int:
        return len(self.coefficients)

    @property
    def dimension(self) -> int:
        return self.field.degree

    def a(self, n: int) -> NumberFieldElement:
        return self.coefficients[n - 1]

    def epsilon(self, p: int) -> NumberFieldElement:
        """eps(p) as an element of K_f (zero when p divides the level)."""
        if self.level % p == 0:
            return self.field.zero
        r = self.label.character.value(p)
        o = self.nebentypus_order
        if o <= 2:
            return self.field.coerce(-1 if r == Fraction(1, 2) else 1)
        if self.character_root is None:
            raise CharacterError(f"no root of unity of order {o} attached to {self.label}")
        return self.character_root ** int(r * o)

    def trace_series(self, weight: NumberFieldElement | None = None, m: int | None = None) -> TruncatedSeries:
        """sum_n Tr(weight * a_n) q^n."""
        m = m or self.M
        if weight is None:
            return TruncatedSeries(tuple(trace(c) for c in self.coefficients[:m]), QQ)
        return TruncatedSeries(tuple(trace(weight * c) for c in self.coefficients[:m]), QQ)

    def coordinate_series(self, k: int, m: int | None = None) -> TruncatedSeries:
        """Series of the k-th power-basis coordinate of a_n."""
        m = m or self.M
        return TruncatedSeries(tuple(c.coords[k] for c in self.coefficients[:m]), QQ)

    def series(self, m: int | None = None) -> TruncatedSeries:
        """The eigenform itself, with coefficients in K_f."""
        m = m or self.M
        return TruncatedSeries(self.coefficients[:m], self.field)

    def rational_span(self, m: int | None = None) -> list[TruncatedSeries]:
        """A Q-basis of the span of the Galois conjugates (power-basis coordinates)."""
        return [self.coordinate_series(k, m) for k in range(self.dimension)]


def _rat(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (int, str)):
        raise SchemaError(f"rational entries must be integers or decimal strings, got {x!r}")
    try:
        return Fraction(x)
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"bad rational {x!r}") from exc


def _parse_nebentypus(level: int, items) -> DirichletCharacterCode:
    if not isinstance(items, list):
        raise SchemaError("nebentypus must be a list")
    by_pp = {}
    for it in items:
        if not isinstance(it, dict) or "prime_power" not in it or "exponent" not in it:
            raise SchemaError(f"bad nebentypus entry {it!r}")
        m = re.fullmatch(r"(\d+)\^(\d+)", str(it["prime_power"]))
        if not m:
            raise SchemaError(f"bad prime power {it['prime_power']!r}")
        e = it["exponent"]
        e = tuple(e) if isinstance(e, list) else (e,)
        by_pp[(int(m.group(1)), int(m.group(2)))] = tuple(int(x) for x in e)
    comps = []
    for p, a in factorize(level):
        proto = CharacterComponent(p, a, ())
        n = len(proto.generator_orders)
        e = by_pp.pop((p, a), (0,) * n)
        if len(e) != n:
            raise SchemaError(f"{p}^{a} needs {n} exponent(s), got {list(e)}")
        comps.append(CharacterComponent(p, a, e))
    if by_pp:
        raise SchemaError(f"nebentypus entries {sorted(by_pp)} do not divide level {level}")
    code = DirichletCharacterCode(level, tuple(comps))
    try:
        code.validate()
    except LabelError as exc:
        raise SchemaError(str(exc)) from exc
    return code


def nebentypus_to_json(code: DirichletCharacterCode) -> list[dict]:
    out = []
    for c in code.components:
        if not c.generator_orders:
            continue
        e = list(c.exponents) if len(c.exponents) > 1 else c.exponents[0]
        out.append({"prime_power": f"{c.p}^{c.alpha}", "exponent": e})
    return out


def ingest_package(document: bytes | str) -> EigenformPackage:
    """Parse and fully validate a package document (JSON syntax)."""
    raw = document.encode() if isinstance(document, str) else bytes(document)
    if not raw.strip():
        raise SchemaError("empty document")
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object")
    for key in ("schema_version", "level", "label", "nebentypus", "field_poly", "coefficients", "provenance"):
        if key not in doc:
            raise SchemaError(f"missing field {key!r}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    level = int(doc["level"])
    try:
        label = parse_label(doc["label"])
    except LabelError as exc:
        raise SchemaError(str(exc)) from exc
    if label.level != level:
        raise SchemaError(f"label level {label.level} differs from level {level}")
    char = _parse_nebentypus(level, doc["nebentypus"])
    if char != label.character:
        raise SchemaError(f"nebentypus {char.text()} disagrees with label {doc['label']}")
    try:
        poly = MinimalPolynomial(tuple(int(_rat(c)) for c in doc["field_poly"]))
    except NumberFieldError as exc:
        raise SchemaError(str(exc)) from exc
    K = NumberField(poly)  # raises ReduciblePolynomialError
    rows = doc["coefficients"]
    if not isinstance(rows, list) or not rows:
        raise SchemaError("coefficients must be a non-empty list")
    coeffs = []
    for n, row in enumerate(rows, start=1):
        if not isinstance(row, list) or len(row) != K.degree:
            raise SchemaError(f"a_{n} must have {K.degree} coordinates")
        coeffs.append(K([_rat(x) for x in row]))
    order = char.order
    if "nebentypus_order" in doc and int(doc["nebentypus_order"]) != order:
        raise SchemaError(f"nebentypus_order {doc['nebentypus_order']} but the code has order {order}")
    root = None
    if doc.get("nebentypus_root") is not None:
        root = K([_rat(x) for x in doc["nebentypus_root"]])
    pkg = EigenformPackage(label, K, order, tuple(coeffs), str(doc["provenance"]), root,
                           hashlib.sha256(raw).hexdigest())
    return validate_package(pkg)


def _prime_power_split(n: int) -> tuple[int, int]:
    p = factorize(n)[0][0]
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q, n


def _select_root(pkg: EigenformPackage) -> NumberFieldElement:
    o = pkg.nebentypus_order
    candidates = pkg.field.roots_of_unity(o)
    if not candidates:
        raise CharacterError(f"K_f = {pkg.field.name} contains no root of unity of order {o}")
    if pkg.character_root is not None:
        if not any(pkg.character_root == c for c in candidates):
            raise CharacterError(f"declared nebentypus_root is not a primitive {o}-th root of unity")
        return pkg.character_root
    # undeclared: pick the embedding consistent with the first usable Hecke relation
    for p in range(2, pkg.M + 1):
        if is_prime(p) and pkg.level % p and p * p <= pkg.M:
            r = pkg.label.character.value(p)
            k = int(r * o)
            lhs = pkg.a(p * p)
            fits = [c for c in candidates if lhs == pkg.a(p) * pkg.a(p) - (c ** k) * p]
            if len(fits) == 1:
                return fits[0]
            if not fits:
                break
    raise CharacterError("could not pin down the root of unity carrying the Nebentypus")


def validate_package(pkg: EigenformPackage) -> EigenformPackage:
    M = pkg.M
    if pkg.a(1) != 1:
        raise NormalizationError(f"a_1 = {pkg.a(1)!r}, expected 1")
    if pkg.nebentypus_order > 2:
        root = _select_root(pkg)
        if root is not pkg.character_root:
            pkg = EigenformPackage(pkg.label, pkg.field, pkg.nebentypus_order, pkg.coefficients,
                                   pkg.provenance, root, pkg.digest)
    for n in range(2, M + 1):
        q, rest = _prime_power_split(n)
        if rest > 1 and pkg.a(n) != pkg.a(q) * pkg.a(rest):
            raise MultiplicativityError(q, rest)
    for p in range(2, M + 1):
        if not is_prime(p) or p * p > M:
            continue
        eps_p = pkg.epsilon(p) * p
        prev, cur = pkg.field.one, pkg.a(p)
        r = 1
        while p ** (r + 1) <= M:
            expect = pkg.a(p) * cur - eps_p * prev
            if pkg.a(p ** (r + 1)) != expect:
                raise HeckeRecursionError(p, r + 1)
            prev, cur = cur, pkg.a(p ** (r + 1))
            r += 1
    return pkg


def package_to_json(pkg: EigenformPackage) -> dict:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "level": pkg.level,
        "label": format_label(pkg.label),
        "nebentypus": nebentypus_to_json(pkg.label.character),
        "nebentypus_order": pkg.nebentypus_order,
        "field_poly": list(pkg.field.poly.coeffs),
        "coefficients": [[str(c) for c in a.coords] for a in pkg.coefficients],
        "provenance": pkg.provenance,
    }
    if pkg.character_root is not None:
        doc["nebentypus_root"] = [str(c) for c in pkg.character_root.coords]
    return doc


# ---------------------------------------------------------------- factor specs

CASES = ("A", "AE", "EEE")


class FactorSpecError(PackageError):
    pass


class ExcludedOrderError(FactorSpecError):
    pass


@dataclass(frozen=True)
class AbelianFactorSpec:
    factors: tuple[tuple[EigenformPackage, int], ...]
    case: str

    @property
    def packages(self) -> list[EigenformPackage]:
        return [p for p, _ in self.factors]

    @property
    def level(self) -> int:
        return self.factors[0][0].level

    @property
    def all_trivial_character(self) -> bool:
        return all(p.label.character.is_trivial() for p in self.packages)

    def trace_of_frobenius(self, p: int) -> Fraction:
        """Sum of multiplicity * Tr(a_p) over the factors."""
        return sum((m * trace(pkg.a(p)) for pkg, m in self.factors), Fraction(0))

    @property
    def min_truncation(self) -> int:
        return min(p.M for p in self.packages)


def make_factor_spec(packages: Sequence[EigenformPackage], multiplicities: Sequence[int] | None = None) -> AbelianFactorSpec:
    mult = list(multiplicities or [1] * len(packages))
    if any(m != 1 for m in mult):
        raise FactorSpecError("factors with multiplicity > 1 are not covered by the three basis cases")
    if len({p.level for p in packages}) != 1:
        raise FactorSpecError("all factors must share one level")
    dims = sorted(p.dimension for p in packages)
    if sum(dims) != 3:
        raise FactorSpecError(f"factor dimensions {dims} do not sum to 3")
    if dims == [3]:
        case = "A"
        if not packages[0].label.character.is_trivial():
            raise FactorSpecError("case A needs trivial Nebentypus")
    elif dims == [1, 2]:
        case = "AE"
        g = next(p for p in packages if p.dimension == 1)
        f = next(p for p in packages if p.dimension == 2)
        if not g.label.character.is_trivial():
            raise FactorSpecError("the elliptic factor must have trivial Nebentypus")
        if f.nebentypus_order == 6:
            raise ExcludedOrderError("Nebentypus of order 6 cannot occur (orders 2, 3, 4 only)")
        if f.nebentypus_order not in (1, 2, 3, 4):
            raise ExcludedOrderError(f"Nebentypus order {f.nebentypus_order} outside {{1,2,3,4}}")
        packages = [f, g]
    elif dims == [1, 1, 1]:
        case = "EEE"
        if not all(p.label.character.is_trivial() for p in packages):
            raise FactorSpecError("case EEE needs trivial Nebentypus")
        packages = sorted(packages, key=lambda p: format_label(p.label))
    else:
        raise FactorSpecError(f"unsupported factor dimensions {dims}")
    return AbelianFactorSpec(tuple((p, 1) for p in packages), case)


# ---------------------------------------------------------------- fixture files

def fixtures_dir() -> Path:
    env = os.environ.get(FIXTURE_ENV)
    if env:
        return Path(env)
    return Path(__file__).parent / "data" / "fixtures"


def fixture_filename(label: str) -> str:
    lab = parse_label(label)
    base = f"{lab.level}{lab.letters}"
    if not lab.character.is_trivial():
        base += "_" + "-".join(str(e) for e in lab.character.exponents)
    return base + ".json"


_CACHE: dict[tuple[str, str], EigenformPackage] = {}


def load_fixture(label: str, directory: Path | str | None = None) -> EigenformPackage:
    d = Path(directory) if directory is not None else fixtures_dir()
    path = d / fixture_filename(label)
    key = (str(path), label)
    if key in _CACHE:
        return _CACHE[key]
    if not path.exists():
        raise FixtureMissingError(f"no fixture for {label} at {path}")
    pkg = ingest_package(path.read_bytes())
    if format_label(pkg.label) != format_label(parse_label(label)):
        raise PackageError(f"{path} holds {format_label(pkg.label)}, not {label}")
    _CACHE[key] = pkg
    return pkg


def available_fixtures(directory: Path | str | None = None) -> list[str]:
    d = Path(directory) if directory is not None else fixtures_dir()
    if not d.exists():
        return []
    out = []
    for path in sorted(d.glob("*.json")):
        base, _, char = path.stem.partition("_")
        out.append(base + ("_{" + char.replace("-", ",") + "}" if char else ""))
    return out
