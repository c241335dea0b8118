"""JSON structure-constant files and table serialization.

Structure file fields: ``ring``, ``basis``, ``unit`` or ``counit``, ``diff``,
``mult`` or ``comult``.  Omitted products and coproducts are zero.
"""

from __future__ import annotations

import json

from .complexes import HomologyTable
from .dg import DGAlgebra, DGCoalgebra
from .linalg import CoefficientRing, RingError


class SchemaError(ValueError):
    """A structure file does not match the schema; ``where`` points at the field."""

    def __init__(self, where: str, msg: str):
        self.where = where
        super().__init__(f"{where}: {msg}")


def _int(value, where):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(where, f"expected an integer, got {value!r}")
    return value


def _list(value, where):
    if not isinstance(value, list):
        raise SchemaError(where, f"expected an array, got {type(value).__name__}")
    return value


def parse_ring(data, where="ring") -> CoefficientRing:
    if not isinstance(data, dict) or "kind" not in data:
        raise SchemaError(where, 'expected {"kind": "prime_field", "p": ...} or {"kind": "integers"}')
    if data["kind"] == "integers":
        return CoefficientRing.integers()
    if data["kind"] == "prime_field":
        p = _int(data.get("p"), f"{where}.p")
        try:
            return CoefficientRing.gf(p)
        except RingError as e:
            raise SchemaError(f"{where}.p", str(e)) from None
    raise SchemaError(f"{where}.kind", f"unknown ring kind {data['kind']!r}")


def parse_structure(data: dict, label: str = ""):
    """Build a DGAlgebra or DGCoalgebra from parsed JSON (axioms not checked here)."""
    if not isinstance(data, dict):
        raise SchemaError("<top>", "expected a JSON object")
    ring = parse_ring(data.get("ring"))
    basis = []
    seen = set()
    for i, b in enumerate(_list(data.get("basis"), "basis")):
        where = f"basis[{i}]"
        if not isinstance(b, dict) or not isinstance(b.get("name"), str):
            raise SchemaError(f"{where}.name", "each basis entry needs a string name")
        if b["name"] in seen:
            raise SchemaError(f"{where}.name", f"duplicate basis name {b['name']!r}")
        seen.add(b["name"])
        basis.append((b["name"], _int(b.get("degree"), f"{where}.degree")))
    if not basis:
        raise SchemaError("basis", "basis is empty")

    def name(x, where):
        if x not in seen:
            raise SchemaError(where, f"unknown basis name {x!r}")
        return x

    diff = {}
    for i, e in enumerate(_list(data.get("diff", []), "diff")):
        where = f"diff[{i}]"
        src = name(e.get("from"), f"{where}.from")
        out = diff.setdefault(src, {})
        for j, term in enumerate(_list(e.get("to"), f"{where}.to")):
            if not isinstance(term, list) or len(term) != 2:
                raise SchemaError(f"{where}.to[{j}]", "expected [name, coeff]")
            tgt = name(term[0], f"{where}.to[{j}][0]")
            out[tgt] = out.get(tgt, 0) + _int(term[1], f"{where}.to[{j}][1]")

    has_unit, has_counit = "unit" in data, "counit" in data
    if has_unit == has_counit:
        raise SchemaError("<top>", "exactly one of 'unit' (algebra) or 'counit' (coalgebra) is required")
    if has_unit:
        if "comult" in data:
            raise SchemaError("comult", "an algebra file cannot carry a comultiplication")
        unit = name(data["unit"], "unit")
        mult = {}
        for i, e in enumerate(_list(data.get("mult", []), "mult")):
            where = f"mult[{i}]"
            key = (name(e.get("a"), f"{where}.a"), name(e.get("b"), f"{where}.b"))
            out = mult.setdefault(key, {})
            for j, term in enumerate(_list(e.get("out"), f"{where}.out")):
                if not isinstance(term, list) or len(term) != 2:
                    raise SchemaError(f"{where}.out[{j}]", "expected [name, coeff]")
                c = name(term[0], f"{where}.out[{j}][0]")
                out[c] = out.get(c, 0) + _int(term[1], f"{where}.out[{j}][1]")
        return DGAlgebra.build(ring, basis, unit, diff, mult, label=label)
    if "mult" in data:
        raise SchemaError("mult", "a coalgebra file cannot carry a multiplication")
    counit_raw = data["counit"]
    if not isinstance(counit_raw, dict) or not counit_raw:
        raise SchemaError("counit", "expected a non-empty map from basis name to integer")
    counit = {name(k, f"counit.{k}"): _int(v, f"counit.{k}") for k, v in counit_raw.items()}
    comult = {}
    for i, e in enumerate(_list(data.get("comult", []), "comult")):
        where = f"comult[{i}]"
        src = name(e.get("from"), f"{where}.from")
        out = comult.setdefault(src, {})
        for j, term in enumerate(_list(e.get("out"), f"{where}.out")):
            if not isinstance(term, list) or len(term) != 3:
                raise SchemaError(f"{where}.out[{j}]", "expected [nameL, nameR, coeff]")
            key = (name(term[0], f"{where}.out[{j}][0]"), name(term[1], f"{where}.out[{j}][1]"))
            out[key] = out.get(key, 0) + _int(term[2], f"{where}.out[{j}][2]")
    return DGCoalgebra.build(ring, basis, counit, diff, comult, label=label)


def parse_structure_file(path):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}:{e.lineno}:{e.colno}", e.msg) from None
    except OSError as e:
        raise SchemaError(str(path), e.strerror or str(e)) from None
    return parse_structure(data, label=str(path))


def structure_to_json(X) -> dict:
    """Inverse of :func:`parse_structure` (terms sorted for stable output)."""
    nm = X.names
    out = {"ring": X.ring.to_json(),
           "basis": [{"name": n, "degree": d} for n, d in zip(nm, X.degrees)]}
    if isinstance(X, DGAlgebra):
        out["unit"] = nm[X.unit]
    else:
        out["counit"] = {nm[i]: v for i, v in sorted(X.counit.items())}
    out["diff"] = [{"from": nm[i], "to": [[nm[j], c] for j, c in sorted(v.items())]}
                   for i, v in sorted(X.diff.items())]
    if isinstance(X, DGAlgebra):
        out["mult"] = [{"a": nm[a], "b": nm[b], "out": [[nm[c], k] for c, k in sorted(v.items())]}
                       for (a, b), v in sorted(X.mult.items())]
    else:
        out["comult"] = [{"from": nm[c], "out": [[nm[a], nm[b], k] for (a, b), k in sorted(v.items())]}
                         for c, v in sorted(X.comult.items())]
    return out


# ---------------------------------------------------------------------------
# tables


def _degree_text(d):
    return ",".join(str(x) for x in d) if isinstance(d, tuple) else str(d)


def table_rows(tab: HomologyTable) -> list[dict]:
    rows = []
    for d in sorted(tab.entries):
        e = tab.entries[d]
        rows.append({
            "degree": list(d) if isinstance(d, tuple) else d,
            "free_rank": e.group.free_rank,
            "torsion": list(e.group.torsion),
            "flag": e.flag,
            "annotation": e.note,
        })
    return rows


def table_to_json(tab: HomologyTable, **meta) -> dict:
    out = {"title": tab.title, "ring": tab.ring.to_json()}
    out.update(meta)
    out["rows"] = table_rows(tab)
    out["audit"] = list(tab.audit)
    return out


def format_table(tab: HomologyTable, **meta) -> str:
    head = ["degree", "free rank", "torsion", "flag", "annotation"]
    body = []
    for r in table_rows(tab):
        deg = r["degree"]
        body.append([
            _degree_text(tuple(deg)) if isinstance(deg, list) else str(deg),
            str(r["free_rank"]),
            " ".join(f"Z/{t}" for t in r["torsion"]) or "-",
            r["flag"],
            r["annotation"],
        ])
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h)
              for i, h in enumerate(head)]
    lines = []
    if tab.title:
        lines.append(f"# {tab.title} over {tab.ring}")
    for k, v in meta.items():
        lines.append(f"# {k}: {v}")

    def fmt(row):
        return "  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()

    lines.append(fmt(head))
    lines.extend(fmt(row) for row in body)
    for a in tab.audit:
        lines.append(f"# audit: {a}")
    return "\n".join(lines) + "\n"
