"""Curve records: labels, the bundled corpus of quartics and per-record verification."""

from __future__ import annotations

import hashlib
import json
import re
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Sequence

from .basis_builder import BasisError, build_basis, echelon_span
from .exact_series import add, degeneracy
from .forms_data import (FixtureMissingError, PackageError, factorize, format_label, is_prime,
                         load_fixture, make_factor_spec, parse_label)
from .polynomials import HomogeneousPolynomial
from .quartic_geometry import (FLEX, HYPERFLEX, ORDINARY, SMOOTH, classify_P_infinity, check_smooth,
                               count_points)
from .relation_engine import (GAMMA0, GAMMA1, RelationError, certify_vanishing, find_relation,
                              psi_certificate, sturm_bound)

CORPUS_FILE = "corpus.json"

MARKERS = {"none": "", "flex": "♦", "hyperflex": "★"}
_MARKER_OF = {"♦": "flex", "★": "hyperflex"}
_KIND_OF_MARKER = {"none": ORDINARY, "flex": FLEX, "hyperflex": HYPERFLEX}

VERIFIED = "verified"
MISMATCH = "mismatch"
REFUSED = "refused"
SKIPPED = "skipped"
FAILED = "failed"
ERROR = "error"


class CorpusError(ValueError):
    pass


# ---------------------------------------------------------------- labels

@dataclass(frozen=True)
class CurveLabel:
    """C^{sup}_{sub} with an optional flex marker, e.g. ``♦C^A_{49,A_{14}}``."""

    level: int
    sub: str
    sup: tuple[str, ...]
    marker: str = "none"

    def text(self) -> str:
        sup = self.sup[0] if len(self.sup) == 1 and len(self.sup[0]) == 1 else "{" + ",".join(self.sup) + "}"
        return f"{MARKERS[self.marker]}C^{sup}_{{{self.sub}}}"

    __str__ = text

    @classmethod
    def parse(cls, text: str) -> "CurveLabel":
        s = text.strip()
        marker = "none"
        if s and s[0] in _MARKER_OF:
            marker = _MARKER_OF[s[0]]
            s = s[1:]
        m = re.fullmatch(r"C\^(?:\{([^}]*)\}|([A-Za-z0-9]))_\{(.+)\}", s)
        if not m:
            raise CorpusError(f"cannot parse curve label {text!r}")
        sup = tuple(x.strip() for x in (m.group(1) or m.group(2)).split(","))
        sub = m.group(3).replace(" ", "")
        lvl = re.match(r"\d+", sub)
        if not lvl:
            raise CorpusError(f"no level in {text!r}")
        return cls(int(lvl.group(0)), sub, sup, marker)

    def factor_labels(self) -> list[str]:
        """Newform labels named by the label (tokens starting with a digit are full labels)."""
        out = []
        m = re.fullmatch(r"(\d+),([A-Z]+)_\{(.+)\}", self.sub)
        if m:
            out.append(format_label(parse_label(f"{m.group(1)}{m.group(2)}_{{{m.group(3)}}}")))
        elif not self.sub.isdigit():
            out.append(format_label(parse_label(self.sub)))
        for x in self.sup:
            out.append(format_label(parse_label(x if x[0].isdigit() else f"{self.level}{x}")))
        return out


# ---------------------------------------------------------------- records

@dataclass(frozen=True)
class BasisRecipe:
    """How the basis of a record is assembled from fixture packages.

    ``lemma``: the normalized basis of the factor spec (echelon form when requested).
    ``auto``: ``lemma``, falling back to ``blocks`` over the factors when the closed
    formulas do not apply (for instance a rational a_2 in case A).
    ``blocks``: concatenated echelon bases of each listed package's span, then extra
    series sum_d c_d * g(q^d) for the listed rational forms, all scaled by ``scale``.
    """

    method: str = "lemma"
    echelon: bool = True
    blocks: tuple[str, ...] = ()
    extra: tuple[tuple[str, tuple[tuple[int, Fraction], ...]], ...] = ()
    scale: Fraction = Fraction(1)

    @classmethod
    def from_json(cls, d: dict | None) -> "BasisRecipe | None":
        if d is None:
            return None
        extra = tuple((e["label"], tuple((int(k), Fraction(v)) for k, v in e["combination"]))
                      for e in d.get("extra", []))
        return cls(d.get("method", "lemma"), bool(d.get("echelon", True)), tuple(d.get("blocks", [])),
                   extra, Fraction(d.get("scale", "1")))

    def to_json(self) -> dict:
        out = {"method": self.method}
        if self.method in ("lemma", "auto"):
            out["echelon"] = self.echelon
        else:
            out["blocks"] = list(self.blocks)
            if self.extra:
                out["extra"] = [{"label": lab, "combination": [[d, str(c)] for d, c in comb]}
                                for lab, comb in self.extra]
            if self.scale != 1:
                out["scale"] = str(self.scale)
        return out


@dataclass(frozen=True)
class RelatedModel:
    """A second polynomial attached to a record.

    ``substitution`` rows L give this polynomial as F(L1, L2, L3); ``basis`` (with its own
    level and factors) lets the model be verified on a basis of its own.
    """

    name: str
    F: HomogeneousPolynomial
    note: str = ""
    substitution: tuple[tuple[int, int, int], ...] | None = None
    level: int | None = None
    factors: tuple[str, ...] = ()
    basis: BasisRecipe | None = None

    @classmethod
    def from_json(cls, d: dict) -> "RelatedModel":
        sub = d.get("substitution")
        return cls(d["name"], _poly(d["polynomial"]), d.get("note", ""),
                   tuple(tuple(int(x) for x in r) for r in sub) if sub else None,
                   d.get("level"), tuple(d.get("factors", [])), BasisRecipe.from_json(d.get("basis")))

    def to_json(self) -> dict:
        d = {"name": self.name, "polynomial": self.F.to_list()}
        if self.note:
            d["note"] = self.note
        if self.substitution:
            d["substitution"] = [list(r) for r in self.substitution]
        if self.level is not None:
            d["level"] = self.level
            d["factors"] = list(self.factors)
        if self.basis is not None:
            d["basis"] = self.basis.to_json()
        return d


@dataclass(frozen=True)
class Certificates:
    vanishing: bool | None = None
    vanishing_bound: int | None = None
    psi: object = None
    smoothness: object = None
    flex: object = None
    point_counts: tuple = ()
    relation_dimension: int | None = None


@dataclass(frozen=True)
class CurveRecord:
    id: str
    label: CurveLabel
    kind: str  # table | auxiliary
    level: int
    factors: tuple[str, ...]
    F: HomogeneousPolynomial
    basis: BasisRecipe | None = None
    new: bool = True
    related: tuple[RelatedModel, ...] = ()
    expansions: tuple[tuple[tuple[int, int], ...], ...] = ()
    count_factors: tuple[str, ...] = ()
    count_min_prime: int = 2
    notes: str = ""
    # filled in by verify_record
    status: str | None = None
    certificates: Certificates | None = None
    found: HomogeneousPolynomial | None = None
    message: str = ""
    seconds: float | None = None
    digests: tuple[tuple[str, str], ...] = ()

    @property
    def degree(self) -> int:
        return self.F.degree

    @property
    def marker(self) -> str:
        return self.label.marker

    @property
    def verified(self) -> bool:
        return self.status == VERIFIED

    def default_group(self) -> str:
        return default_group(self.factors, self.basis)

    def related_model(self, name: str) -> RelatedModel:
        for m in self.related:
            if m.name == name:
                return m
        raise KeyError(name)


def default_group(factors: Sequence[str], basis: BasisRecipe | None = None) -> str:
    """Gamma_0 when every form involved has trivial character, otherwise Gamma_1."""
    labels = tuple(factors)
    if basis is not None:
        labels += basis.blocks + tuple(lab for lab, _ in basis.extra)
    triv = all(parse_label(x).character.is_trivial() for x in labels)
    return GAMMA0 if triv else GAMMA1


def _poly(rows) -> HomogeneousPolynomial:
    return HomogeneousPolynomial.from_list(rows)


def record_from_json(d: dict) -> CurveRecord:
    return CurveRecord(
        id=d["id"],
        label=CurveLabel.parse(d["label"]),
        kind=d["kind"],
        level=int(d["level"]),
        factors=tuple(d["factors"]),
        F=_poly(d["polynomial"]),
        basis=BasisRecipe.from_json(d.get("basis")),
        new=bool(d.get("new", True)),
        related=tuple(RelatedModel.from_json(r) for r in d.get("related", [])),
        expansions=tuple(tuple((int(n), int(c)) for n, c in e) for e in d.get("expansions", [])),
        count_factors=tuple(d.get("count_factors", d["factors"])),
        count_min_prime=int(d.get("count_min_prime", 2)),
        notes=d.get("notes", ""),
    )


def record_to_json(r: CurveRecord) -> dict:
    d = {"id": r.id, "label": r.label.text(), "kind": r.kind, "level": r.level,
         "factors": list(r.factors), "polynomial": r.F.to_list(), "new": r.new}
    if r.basis is not None:
        d["basis"] = r.basis.to_json()
    if r.related:
        d["related"] = [m.to_json() for m in r.related]
    if r.expansions:
        d["expansions"] = [[list(t) for t in e] for e in r.expansions]
    if r.count_factors != r.factors:
        d["count_factors"] = list(r.count_factors)
    if r.count_min_prime != 2:
        d["count_min_prime"] = r.count_min_prime
    if r.notes:
        d["notes"] = r.notes
    return d


def corpus_checksum(records: Sequence[dict]) -> str:
    canon = json.dumps(records, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _corpus_text(path: Path | str | None) -> str:
    if path is not None:
        return Path(path).read_text(encoding="utf-8")
    return resources.files("g3modular").joinpath("data", CORPUS_FILE).read_text(encoding="utf-8")


def load_corpus(path: Path | str | None = None, check: bool = True) -> list[CurveRecord]:
    """The bundled records: Table rows first, then the auxiliary examples."""
    doc = json.loads(_corpus_text(path))
    recs = doc["records"]
    if check and corpus_checksum(recs) != doc.get("checksum"):
        raise CorpusError("corpus checksum mismatch: the stored records were edited")
    return [record_from_json(r) for r in recs]


def table_records(records: Sequence[CurveRecord] | None = None) -> list[CurveRecord]:
    return [r for r in (records if records is not None else load_corpus()) if r.kind == "table"]


def find_record(key: str, records: Sequence[CurveRecord] | None = None) -> CurveRecord:
    recs = records if records is not None else load_corpus()
    for r in recs:
        if key in (r.id, r.label.text()):
            return r
    raise KeyError(key)


def largest_coefficient(records: Sequence[CurveRecord]) -> tuple[int, CurveRecord]:
    best = max(records, key=lambda r: r.F.max_abs_coefficient())
    return int(best.F.max_abs_coefficient()), best


def distinct_odd_primes(level: int) -> int:
    return sum(1 for p, _ in factorize(level) if p % 2)


# ---------------------------------------------------------------- verification

def build_recipe_basis(recipe: BasisRecipe, factors: Sequence[str], directory=None):
    """(series triple, normalized basis or None, packages used)."""
    if recipe.method in ("lemma", "auto"):
        pk = [load_fixture(x, directory) for x in factors]
        try:
            b = build_basis(make_factor_spec(pk), echelon=recipe.echelon)
            return b.series, b, pk
        except (BasisError, PackageError):
            if recipe.method == "lemma":
                raise
        recipe = BasisRecipe("blocks", blocks=tuple(factors))
    if recipe.method != "blocks":
        raise CorpusError(f"unknown basis method {recipe.method!r}")
    pk, series = [], []
    for lab in recipe.blocks:
        p = load_fixture(lab, directory)
        pk.append(p)
        series.extend(echelon_span(p.rational_span()).series)
    for lab, comb in recipe.extra:
        p = load_fixture(lab, directory)
        pk.append(p)
        s = p.coordinate_series(0)
        acc = None
        for d, c in comb:
            t = (s if d == 1 else degeneracy(s, d)).scale(c)
            acc = t if acc is None else add(acc, t)
        series.append(acc)
    if len(series) != 3:
        raise BasisError(f"recipe yields {len(series)} series, not 3")
    if recipe.scale != 1:
        series = [s.scale(recipe.scale) for s in series]
    return tuple(series), None, pk


def record_basis(rec: CurveRecord, directory=None):
    if rec.basis is None:
        raise CorpusError(f"{rec.id} carries no basis recipe")
    return build_recipe_basis(rec.basis, rec.factors, directory)


def good_primes(level: int, limit: int = 50, start: int = 2) -> list[int]:
    return [p for p in range(max(2, start), limit) if is_prime(p) and level % p]


class _Traces:
    """Frobenius traces of a product of factors, without the basis-case restrictions."""

    def __init__(self, level: int, packages):
        self.level = level
        self.packages = list(packages)

    def trace_of_frobenius(self, p: int) -> Fraction:
        return sum((a.a(p).trace() for a in self.packages), Fraction(0))


def point_count_report(F: HomogeneousPolynomial, level: int, count_factors: Sequence[str], primes=None,
                       directory=None, min_prime: int = 2) -> tuple:
    spec = _Traces(level, [load_fixture(x, directory) for x in count_factors])
    primes = primes or good_primes(level, 50, min_prime)
    return tuple(count_points(F, p, spec) for p in primes)


@dataclass(frozen=True)
class PipelineOutcome:
    status: str
    certificates: Certificates | None = None
    found: HomogeneousPolynomial | None = None
    message: str = ""
    digests: tuple[tuple[str, str], ...] = ()
    seconds: float = 0.0


def run_pipeline(F: HomogeneousPolynomial | None, level: int, factors: Sequence[str], recipe: BasisRecipe,
                 marker: str | None = None, count_factors: Sequence[str] | None = None, min_prime: int = 2,
                 directory=None, point_counts: bool = True, group=None, degree: int | None = None,
                 order: int | None = None) -> PipelineOutcome:
    """Rebuild a basis, re-find the degree-d relation and certify it.

    With a stored F the found relation must equal it; with F None (discovery) the unique
    relation found is certified instead.  ``order`` truncates the basis series to M terms.
    """
    t0 = time.perf_counter()
    try:
        series, nb, pk = build_recipe_basis(recipe, factors, directory)
    except FixtureMissingError as exc:
        return PipelineOutcome(SKIPPED, message=f"fixtures: {exc}")
    except (PackageError, BasisError, CorpusError) as exc:
        return PipelineOutcome(ERROR, message=f"basis: {exc}")
    if order is not None:
        series = tuple(s.truncate(min(order, s.trunc_order)) for s in series)
    digests = tuple((format_label(p.label), p.digest) for p in pk)
    d = F.degree if F is not None else (degree or 4)
    g = group or default_group(factors, recipe)
    bound = sturm_bound(level, 2 * d, g)
    try:
        rel = find_relation(series, d, bound)
    except RelationError as exc:
        return PipelineOutcome(ERROR, message=f"relation: {exc}", digests=digests)
    found = rel.relations[0] if rel.dimension == 1 else None
    if F is None and found is None:
        return PipelineOutcome(FAILED, Certificates(relation_dimension=rel.dimension), None,
                               f"relation: {rel.classification} (dimension {rel.dimension})", digests,
                               time.perf_counter() - t0)
    if F is not None and found != F:
        what = found if found is not None else f"{rel.classification} (dimension {rel.dimension})"
        return PipelineOutcome(MISMATCH, Certificates(relation_dimension=rel.dimension), found,
                               f"found {what} but stored {F}", digests, time.perf_counter() - t0)
    F = found
    try:
        vanish = certify_vanishing(F, series, bound)
    except RelationError as exc:
        return PipelineOutcome(ERROR, Certificates(relation_dimension=rel.dimension), found,
                               f"vanishing: {exc}", digests, time.perf_counter() - t0)
    psi = smooth = flex = None
    counts = ()
    status, msg = VERIFIED, ""
    if d == 4:
        try:
            psi = psi_certificate(F, series, sturm_bound(level, 6, g))
        except RelationError as exc:
            return PipelineOutcome(ERROR, Certificates(vanish, bound.bound, relation_dimension=rel.dimension),
                                   found, f"psi: {exc}", digests, time.perf_counter() - t0)
        smooth = check_smooth(F)
        flex = classify_P_infinity(F, nb.ord_h3 if nb is not None else None)
        if point_counts and smooth.verdict == SMOOTH:
            counts = point_count_report(F, level, count_factors or factors, directory=directory,
                                        min_prime=min_prime)
        if psi.status == "inconclusive":
            status, msg = FAILED, f"psi: inconclusive, checked through q^{psi.verified_to} only"
        elif psi.status != "constant":
            status, msg = REFUSED, f"psi is {psi.status}: the modularity verdict is refused"
        elif smooth.verdict != SMOOTH:
            status, msg = FAILED, "smoothness: the quartic is singular"
        elif marker is not None and flex.kind != _KIND_OF_MARKER[marker]:
            status, msg = FAILED, f"flex: P_inf is {flex.kind} but the label carries {marker}"
        elif any(c.consistent is False for c in counts):
            status, msg = FAILED, "point counts: disagreement with the traces of Frobenius"
    if not vanish:
        status, msg = FAILED, "vanishing: not certified"
    cert = Certificates(vanish, bound.bound, psi, smooth, flex, counts, rel.dimension)
    return PipelineOutcome(status, cert, found, msg, digests, time.perf_counter() - t0)


def verify_record(rec: CurveRecord, directory=None, point_counts: bool = True, group=None) -> CurveRecord:
    """Rebuild the basis, re-find the relation and attach every certificate."""
    if rec.basis is None:
        return replace(rec, status=SKIPPED, message="no basis recipe: equation-only record")
    out = run_pipeline(rec.F, rec.level, rec.factors, rec.basis,
                       marker=rec.marker if rec.kind == "table" else None,
                       count_factors=rec.count_factors, min_prime=rec.count_min_prime,
                       directory=directory, point_counts=point_counts, group=group)
    return replace(rec, status=out.status, certificates=out.certificates, found=out.found,
                   message=out.message, seconds=out.seconds, digests=out.digests)


def verify_related(rec: CurveRecord, name: str, directory=None, point_counts: bool = True,
                   group=None) -> PipelineOutcome:
    m = rec.related_model(name)
    if m.basis is None:
        raise CorpusError(f"related model {name} of {rec.id} carries no basis")
    return run_pipeline(m.F, m.level, m.factors, m.basis, directory=directory,
                        point_counts=point_counts, group=group)


def substitution_holds(rec: CurveRecord, name: str) -> bool:
    """Whether the related model equals F(L1, L2, L3) for its stored substitution."""
    m = rec.related_model(name)
    if m.substitution is None:
        raise CorpusError(f"related model {name} of {rec.id} has no substitution")
    return rec.F.substitute_linear(m.substitution) == m.F
