"""Regenerate the eigenform fixtures with PARI/GP (through cypari).

Development tool only: the package never imports PARI.  Newforms at a level
(and character) are sorted by their sequence of absolute traces
(Tr a_1, Tr a_2, ...) and labelled A, B, C, ... in that order.

    python tools/generate_fixtures.py tools/fixture_plan.json [--out DIR]

plan.json is a list of {"level": N, "character": [e, ...] | null,
"letters": ["A", ...] | null, "M": 400, "relabel": {"B": "C"}}.  ``relabel``
maps a published letter to the trace-order letter of the eigenform it names,
for levels whose historical lettering differs from trace order.
"""

from __future__ import annotations

import argparse
import json
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from cypari import pari

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from g3modular.forms_data import (DirichletCharacterCode, NewformLabel, SCHEMA_VERSION,  # noqa: E402
                                  fixture_filename, format_label, index_to_letters, ingest_package, letters_to_index,
                                  nebentypus_to_json)
from g3modular.number_field import NumberField  # noqa: E402

GP_HELPERS = r"""
g3_char(N,ex)=
{
 my(G=znstar(N,1),f=factor(N),gens=List(),vals=List(),k=1,pp,p,a,ph,g);
 for(i=1,#f~, p=f[i,1]; a=f[i,2]; pp=p^a; ph=eulerphi(pp);
   if(p==2 && a==1, next);
   if(p==2 && a==2, listput(gens,[pp,-1]); listput(vals,ex[k]/2); k++; next);
   if(p==2, listput(gens,[pp,-1]); listput(vals,ex[k]/2); k++;
            listput(gens,[pp,5]); listput(vals,ex[k]/2^(a-2)); k++; next);
   g=0; for(t=2,pp, if(gcd(t,pp)==1 && znorder(Mod(t,pp))==ph, g=t;break));
   listput(gens,[pp,g]); listput(vals,ex[k]/ph); k++);
 for(c=1,N, if(gcd(c,N)!=1,next); my(chi=znconreychar(G,c),ok=1);
   for(j=1,#gens, my(pp=gens[j][1],x=chinese(Mod(gens[j][2],pp),Mod(1,N/pp)));
      if(chareval(G,chi,lift(x))!=frac(vals[j]), ok=0;break));
   if(ok, return([G,chi])));
 error("no character with these exponents")
}
g3_abstr(c,dy,dt)=
{
 my(r=if(type(c)=="t_POLMOD" && variable(c.mod)==y, trace(c), dy*c));
 if(type(r)=="t_POLMOD", trace(r), dt*r)
}
g3_traces(mf,i,M,dt)=
{
 my(P=mffields(mf)[i],dy=poldegree(P,y),c=mfcoefs(mfeigenbasis(mf)[i],M));
 vector(M,n,g3_abstr(c[n+1],dy,dt))
}
"""


def _poly_coeffs(pol, var: str, deg: int) -> list[Fraction]:
    """Coordinates of a lifted PARI coefficient on 1, v, ..., v^(deg-1)."""
    if str(pari.type(pol)) in ('"t_INT"', '"t_FRAC"', "t_INT", "t_FRAC"):
        return [Fraction(str(pol))] + [Fraction(0)] * (deg - 1)
    return [Fraction(str(pari.polcoef(pol, k, var))) for k in range(deg)]


def _field_and_var(mf, i: int, order: int):
    """(monic integer field polynomial highest first, PARI variable name)."""
    P = pari.mffields(mf)[i]
    dy = int(pari.poldegree(P, "y"))
    if dy > 1 and order > 2:
        raise SystemExit("relative extensions over Q(chi) are not supported")
    if dy > 1:
        coeffs = [pari.polcoef(P, k, "y") for k in range(dy, -1, -1)]
        if str(pari.type(coeffs[0])) not in ('"t_INT"', "t_INT") or int(coeffs[0]) != 1:
            raise SystemExit(f"field polynomial {P} is not monic")
        return [int(c) for c in coeffs], "y", dy
    if order > 2:
        cyc = pari.polcyclo(order, "t")
        dt = int(pari.poldegree(cyc))
        return [int(pari.polcoef(cyc, k, "t")) for k in range(dt, -1, -1)], "t", dt
    return [1, 0], None, 1


def generate(level: int, character: list[int] | None, M: int, letters=None, relabel=None):
    code = DirichletCharacterCode.from_exponents(level, character) if character else DirichletCharacterCode.trivial(level)
    order = code.order
    if code.is_trivial():
        mf = pari.mfinit([level, 2], 0)
    else:
        gc = pari(f"g3_char({level},{list(code.exponents)})")
        mf = pari.mfinit([level, 2, gc], 0)
    forms = pari.mfeigenbasis(mf)
    version = ".".join(str(x) for x in pari.version())
    dt = int(pari.eulerphi(order)) if order > 2 else 1
    out = []
    for i in range(len(forms)):
        traces = tuple(Fraction(str(x)) for x in pari("g3_traces")(mf, i + 1, M, dt))
        out.append((traces, i))
    out.sort(key=lambda t: t[0])
    docs = []
    relabel = relabel or {}
    wanted = {}
    for rank, (traces, i) in enumerate(out):
        letter = index_to_letters(rank)
        wanted[letter] = (rank, traces, i, letter)
    original = dict(wanted)
    for new, old in relabel.items():
        wanted[new] = original[old][:3] + (old,)
    for letter in sorted(wanted, key=letters_to_index):
        rank, traces, i, source = wanted[letter]
        if letters and letter not in letters:
            continue
        if not letters and letter in relabel.values() and letter not in relabel:
            continue
        if not letters and int(pari.poldegree(pari.mffields(mf)[i], "y")) > 3:
            continue  # outside the supported coefficient fields
        poly, var, deg = _field_and_var(mf, i, order)
        raw = pari.liftall(pari.mfcoefs(forms[i], M))
        coeffs = []
        for n in range(1, M + 1):
            c = raw[n]
            coeffs.append(_poly_coeffs(c, var, deg) if var else [Fraction(str(c))])
        K = NumberField(poly, check=False)
        if tuple(K(c).trace() for c in coeffs) != traces:
            raise SystemExit(f"trace mismatch for eigenform {i} at level {level}")
        label = format_label(NewformLabel(level, letter, code))
        doc = {
            "schema_version": SCHEMA_VERSION,
            "level": level,
            "label": label,
            "nebentypus": nebentypus_to_json(code),
            "nebentypus_order": order,
            "field_poly": poly,
            "coefficients": [[str(x) for x in c] for c in coeffs],
            "provenance": (f"PARI/GP {version} mfeigenbasis of S_2^new({level}, {code.text()}); "
                           f"eigenform {i} of {len(out)}; " + (
                               "letters follow the order of absolute trace sequences" if source == letter else
                               f"published letter {letter} names trace-order position {source}, "
                               f"identified by matching the published plane quartic")),
        }
        if order > 2:
            doc["nebentypus_root"] = ["0", "1"] + ["0"] * (len(poly) - 3)
        docs.append(doc)
    return docs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("plan")
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/g3modular/data/fixtures"))
    args = ap.parse_args(argv)
    pari.allocatemem(2 * 10 ** 9)
    with tempfile.NamedTemporaryFile("w", suffix=".gp", delete=False) as fh:
        fh.write(GP_HELPERS)
    pari(f'read("{fh.name}")')
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for item in json.loads(Path(args.plan).read_text()):
        docs = generate(item["level"], item.get("character"), item["M"], item.get("letters"),
                        item.get("relabel"))
        for doc in docs:
            text = json.dumps(doc, separators=(",", ":"))
            ingest_package(text)  # full validation before anything is written
            (out / fixture_filename(doc["label"])).write_text(text + "\n")
            print(doc["label"], len(doc["coefficients"]), file=sys.stderr)


if __name__ == "__main__":
    main()
