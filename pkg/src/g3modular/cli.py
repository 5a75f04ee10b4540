"""Command-line driver: JSON reports on stdout, a short summary on stderr.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .basis_builder import BasisError, build_basis
from .curve_records import (ERROR, MISMATCH, SKIPPED, VERIFIED, BasisRecipe, CorpusError, CurveRecord,
                            default_group, find_record, good_primes, load_corpus, point_count_report,
                            run_pipeline, table_records, verify_record)
from .forms_data import (FIXTURE_ENV, FixtureMissingError, PackageError, format_label, ingest_package,
                         load_fixture, make_factor_spec, parse_label)
from .polynomials import HomogeneousPolynomial, format_polynomial
from .quartic_geometry import SMOOTH, check_smooth, classify_P_infinity
from .relation_engine import RelationError, parse_group

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(ValueError):
    """Bad command-line input; reported with exit status 2."""


# ---------------------------------------------------------------- JSON rendering

def to_jsonable(obj, deterministic: bool = False):
    if isinstance(obj, HomogeneousPolynomial):
        return {"text": format_polynomial(obj), "terms": obj.to_list()}
    if isinstance(obj, Fraction):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {}
        for f in dataclasses.fields(obj):
            if deterministic and f.name == "seconds":
                continue
            out[f.name] = to_jsonable(getattr(obj, f.name), deterministic)
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v, deterministic) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x, deterministic) for x in obj]
    return obj


def emit(report: dict, args, summary: str):
    if args.format == "json":
        sys.stdout.write(json.dumps(to_jsonable(report, args.deterministic), indent=1, sort_keys=True,
                                    ensure_ascii=False) + "\n")
    else:
        sys.stdout.write(_text(report) + "\n")
    if summary:
        sys.stderr.write(summary + "\n")


def _text(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if isinstance(v, HomogeneousPolynomial):
            v = format_polynomial(v)
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], dict):
            lines.append(f"{k}:")
            lines.extend("  " + ", ".join(f"{a}={to_jsonable(b)}" for a, b in item.items()) for item in v)
            continue
        lines.append(f"{k}: {to_jsonable(v)}")
    return "\n".join(lines)


def _header(args) -> dict:
    return {"tool": "g3modular", "version": __version__}


# ---------------------------------------------------------------- inputs

def _fixtures(args):
    return args.fixtures or os.environ.get(FIXTURE_ENV) or None


def _spec_from_arg(text: str):
    """(level, factors, recipe, degree, name) from a record id, a JSON spec file or a label list."""
    path = Path(text)
    if path.suffix == ".json" or path.exists():
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise InputError(f"spec file: {exc}") from exc
        factors = list(d.get("factors") or [])
        if not factors:
            raise InputError("spec file: no factors")
        level = int(d.get("level") or parse_label(factors[0]).level)
        return level, factors, BasisRecipe.from_json(d.get("basis")) or BasisRecipe("auto"), d.get("degree"), str(path)
    try:
        rec = find_record(text)
        return rec.level, list(rec.factors), rec.basis or BasisRecipe(), rec.degree, rec.id
    except KeyError:
        pass
    factors = [x for x in text.replace(" ", "").split(",") if x] if "_{" not in text else _split_labels(text)
    try:
        levels = {parse_label(x).level for x in factors}
    except PackageError as exc:
        raise InputError(f"spec: {exc}") from exc
    return max(levels), factors, BasisRecipe("auto"), None, text


def _split_labels(text: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in text.replace(" ", ""):
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "{"
        depth -= ch == "}"
        cur += ch
    if cur:
        out.append(cur)
    return out


def _polynomial_or_record(text: str) -> tuple[HomogeneousPolynomial, CurveRecord | None]:
    try:
        rec = find_record(text)
        return rec.F, rec
    except KeyError:
        pass
    try:
        return HomogeneousPolynomial.parse(text).normalized(), None
    except ValueError as exc:
        raise InputError(f"polynomial: {exc}") from exc


def _group(args, factors, recipe):
    if args.group:
        try:
            parse_group(args.group)
        except (ValueError, RelationError) as exc:
            raise InputError(f"group: {exc}") from exc
        return args.group
    return default_group(factors, recipe)


def _status_code(status: str) -> int:
    if status == VERIFIED:
        return EXIT_OK
    if status in (SKIPPED,):
        return EXIT_INPUT
    if status == ERROR:
        return EXIT_INPUT
    return EXIT_FAIL


# ---------------------------------------------------------------- commands

def cmd_ingest(args) -> int:
    results, bad = [], 0
    for p in args.paths:
        try:
            pkg = ingest_package(Path(p).read_bytes())
            results.append({"file": p, "valid": True, "label": format_label(pkg.label), "M": pkg.M,
                            "dimension": pkg.dimension, "digest": pkg.digest})
        except (OSError, PackageError) as exc:
            bad += 1
            results.append({"file": p, "valid": False, "error": f"{type(exc).__name__}: {exc}"})
    emit({**_header(args), "command": "ingest", "files": results}, args,
         f"ingest: {len(results) - bad} valid, {bad} invalid")
    return EXIT_INPUT if bad else EXIT_OK


def cmd_basis(args) -> int:
    level, factors, recipe, _, name = _spec_from_arg(args.spec)
    try:
        pk = [load_fixture(x, _fixtures(args)) for x in factors]
        b = build_basis(make_factor_spec(pk), echelon=not args.formula)
    except FixtureMissingError as exc:
        raise InputError(f"fixtures: {exc}") from exc
    except (PackageError, BasisError) as exc:
        emit({**_header(args), "command": "basis", "spec": name, "error": f"basis: {exc}"}, args, f"basis: {exc}")
        return EXIT_FAIL
    n = args.terms
    rep = {**_header(args), "command": "basis", "spec": name, "case": b.case, "ord_h3": b.ord_h3,
           "echelon": not args.formula, "branch": b.derivation.branch,
           "series": {f"h{i + 1}": [str(s[k]) for k in range(1, n + 1)] for i, s in enumerate(b.series)},
           "digests": {format_label(p.label): p.digest for p in pk}}
    emit(rep, args, f"basis: case {b.case}, ord h3 = {b.ord_h3}")
    return EXIT_OK


def _outcome_report(args, name, level, factors, group, out) -> dict:
    c = out.certificates
    rep = {**_header(args), "spec": name, "level": level, "factors": factors, "group": group,
           "status": out.status, "message": out.message, "polynomial": out.found,
           "certificates": c, "digests": dict(out.digests)}
    if not args.deterministic:
        rep["seconds"] = round(out.seconds, 3)
    return rep


def cmd_find(args) -> int:
    level, factors, recipe, deg, name = _spec_from_arg(args.spec)
    d = args.degree or deg or 4
    g = _group(args, factors, recipe)
    out = run_pipeline(None, level, factors, recipe, directory=_fixtures(args), group=g, degree=d,
                       order=args.order, point_counts=not args.no_counts)
    rep = {"command": "find", "degree": d, **_outcome_report(args, name, level, factors, g, out)}
    poly = format_polynomial(out.found) if out.found is not None else "-"
    emit(rep, args, f"find: {out.status}: {poly}" + (f" ({out.message})" if out.message else ""))
    if out.status == SKIPPED:
        return EXIT_INPUT
    return _status_code(out.status)


def cmd_verify(args) -> int:
    recs = load_corpus(args.corpus)
    chosen = recs if args.all else [find_record(k, recs) for k in args.records]
    if not chosen:
        raise InputError("verify: name records or pass --all")
    rows, worst = [], EXIT_OK
    for r in chosen:
        v = verify_record(r, _fixtures(args), group=args.group, point_counts=not args.no_counts)
        rows.append(_record_row(v, args))
        if v.status not in (VERIFIED, SKIPPED):
            worst = max(worst, _status_code(v.status))
    n = sum(1 for x in rows if x["status"] == VERIFIED)
    emit({**_header(args), "command": "verify", "records": rows}, args, f"verify: {n}/{len(rows)} verified")
    return worst


def _record_row(v: CurveRecord, args) -> dict:
    row = {"id": v.id, "label": v.label.text(), "status": v.status, "message": v.message,
           "stored": v.F, "found": v.found, "certificates": v.certificates, "digests": dict(v.digests)}
    if not args.deterministic and v.seconds is not None:
        row["seconds"] = round(v.seconds, 3)
    return row


def cmd_classify(args) -> int:
    F, rec = _polynomial_or_record(args.polynomial)
    if F.degree != 4:
        raise InputError(f"classify: degree {F.degree}, a quartic is needed")
    sm = check_smooth(F)
    fl = classify_P_infinity(F)
    rep = {**_header(args), "command": "classify", "polynomial": F, "smoothness": sm, "flex": fl}
    if rec is not None:
        rep["record"] = rec.id
        rep["marker"] = rec.marker
    emit(rep, args, f"classify: {sm.verdict}, P_inf {fl.kind}")
    return EXIT_OK if sm.verdict == SMOOTH else EXIT_FAIL


def cmd_count_points(args) -> int:
    F, rec = _polynomial_or_record(args.curve)
    factors = args.factors.split(",") if args.factors else (list(rec.count_factors) if rec else None)
    if not factors:
        raise InputError("count-points: give a corpus record or --factors")
    level = args.level or (rec.level if rec else max(parse_label(x).level for x in factors))
    sm = check_smooth(F)
    if sm.verdict != SMOOTH:
        emit({**_header(args), "command": "count-points", "polynomial": F, "smoothness": sm,
              "error": "smoothness: singular input refused"}, args, "count-points: refused, the curve is singular")
        return EXIT_FAIL
    try:
        primes = [int(p) for p in args.primes.split(",")] if args.primes else good_primes(
            level, 50, rec.count_min_prime if rec else 2)
        counts = point_count_report(F, level, factors, primes, _fixtures(args))
    except FixtureMissingError as exc:
        raise InputError(f"fixtures: {exc}") from exc
    except (ValueError, IndexError) as exc:
        raise InputError(f"count-points: {exc}") from exc
    bad = [c.p for c in counts if c.consistent is False]
    emit({**_header(args), "command": "count-points", "polynomial": F, "level": level, "factors": factors,
          "counts": [dataclasses.asdict(c) | {"consistent": c.consistent} for c in counts]}, args,
         f"count-points: {len(counts) - len(bad)} of {len(counts)} primes without inconsistency"
         + (f"; inconsistent at {bad}" if bad else ""))
    return EXIT_FAIL if bad else EXIT_OK


def cmd_reproduce_table(args) -> int:
    rows = []
    for r in table_records(load_corpus(args.corpus)):
        v = verify_record(r, _fixtures(args), point_counts=not args.no_counts)
        rows.append(_record_row(v, args))
    k = sum(1 for x in rows if x["status"] == VERIFIED)
    s = sum(1 for x in rows if x["status"] == SKIPPED)
    m = sum(1 for x in rows if x["status"] == MISMATCH)
    other = len(rows) - k - s - m
    summary = f"verified {k}/{len(rows)}, skipped {s} (missing fixtures), mismatched {m}"
    if other:
        summary += f", failed {other}"
    emit({**_header(args), "command": "reproduce-table", "summary": summary, "records": rows}, args, summary)
    return EXIT_FAIL if (m or other) else EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--deterministic", action="store_true", help="omit timings from reports")
    common.add_argument("--fixtures", help=f"fixture directory (default: ${FIXTURE_ENV} or the bundled set)")

    ap = argparse.ArgumentParser(prog="g3modular", description="Plane quartic models of genus-3 modular curves.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="validate eigenform package files")
    p.add_argument("paths", nargs="+")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("basis", parents=[common], help="print the normalized basis of a factor spec")
    p.add_argument("spec", help="record id, JSON spec file, or comma-separated newform labels")
    p.add_argument("--formula", action="store_true", help="closed formulas instead of echelon form")
    p.add_argument("--terms", type=int, default=20)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("find", parents=[common], help="search a relation and certify it")
    p.add_argument("spec", help="record id, JSON spec file, or comma-separated newform labels")
    p.add_argument("--degree", type=int)
    p.add_argument("--group", help="g0, g1 or custom:k (default: g0 iff all characters are trivial)")
    p.add_argument("--order", type=int, help="truncate the basis to M coefficients")
    p.add_argument("--no-counts", action="store_true", help="skip point counts")
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("verify", parents=[common], help="verify corpus records against fixtures")
    p.add_argument("records", nargs="*")
    p.add_argument("--all", action="store_true")
    p.add_argument("--group")
    p.add_argument("--no-counts", action="store_true")
    p.add_argument("--corpus", help="corpus file (default: the bundled records)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("classify", parents=[common], help="smoothness and the point (1:0:0) of a quartic")
    p.add_argument("polynomial", help="record id or polynomial text")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("count-points", parents=[common], help="point counts against traces of Frobenius")
    p.add_argument("curve", help="record id or polynomial text")
    p.add_argument("--primes", help="comma-separated primes (default: good primes below 50)")
    p.add_argument("--factors", help="comma-separated newform labels giving the expected traces")
    p.add_argument("--level", type=int)
    p.set_defaults(func=cmd_count_points)

    p = sub.add_parser("reproduce-table", parents=[common], help="verify every Table row")
    p.add_argument("--no-counts", action="store_true")
    p.add_argument("--corpus", help="corpus file (default: the bundled records)")
    p.set_defaults(func=cmd_reproduce_table)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "fixtures", None) and not Path(args.fixtures).is_dir():
        sys.stderr.write(f"input: fixture directory {args.fixtures} does not exist\n")
        return EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, KeyError, CorpusError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"input: {msg}" if not isinstance(exc, KeyError) else f"input: unknown record {msg}")
        sys.stderr.write("\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
