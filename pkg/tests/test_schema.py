import json

import pytest

from cohochschild.complexes import HomologyEntry, HomologyTable
from cohochschild.dg import DGAlgebra, DGCoalgebra
from cohochschild.linalg import CoefficientRing, HomologyGroup
from cohochschild.registry import dual_koszul_coalgebra, exterior_algebra, koszul_model_Fp_over_Z
from cohochschild.schema import (
    SchemaError,
    format_table,
    parse_structure,
    parse_structure_file,
    structure_to_json,
    table_to_json,
)

F3 = CoefficientRing.gf(3)

EXTERIOR = {
    "ring": {"kind": "prime_field", "p": 3},
    "basis": [{"name": "1", "degree": 0}, {"name": "e", "degree": 1}],
    "unit": "1",
    "mult": [{"a": "e", "b": "e", "out": []}],
}


def test_parse_algebra():
    A = parse_structure(EXTERIOR)
    assert isinstance(A, DGAlgebra)
    assert A.check_axioms().ok
    assert A.names == ("1", "e")


@pytest.mark.parametrize("X", [exterior_algebra(F3, [1, 2]), koszul_model_Fp_over_Z(2),
                               dual_koszul_coalgebra(3)], ids=lambda X: X.label)
def test_round_trip(X):
    data = structure_to_json(X)
    Y = parse_structure(json.loads(json.dumps(data)))
    assert type(Y) is type(X)
    assert structure_to_json(Y) == data


def bad(**changes):
    d = json.loads(json.dumps(EXTERIOR))
    for k, v in changes.items():
        if v is None:
            d.pop(k)
        else:
            d[k] = v
    return d


@pytest.mark.parametrize("data, where", [
    (bad(ring={"kind": "reals"}), "ring.kind"),
    (bad(ring={"kind": "prime_field", "p": 4}), "ring.p"),
    (bad(basis=[{"name": "1", "degree": 0}, {"name": "1", "degree": 1}]), "basis[1].name"),
    (bad(basis=[{"name": "1", "degree": "zero"}]), "basis[0].degree"),
    (bad(basis=[]), "basis"),
    (bad(unit="u"), "unit"),
    (bad(mult=[{"a": "e", "b": "q", "out": []}]), "mult[0].b"),
    (bad(mult=[{"a": "e", "b": "e", "out": [["1"]]}]), "mult[0].out[0]"),
    (bad(diff=[{"from": "e", "to": [["1", 1.5]]}]), "diff[0].to[0][1]"),
])
def test_errors_name_the_field(data, where):
    with pytest.raises(SchemaError) as exc:
        parse_structure(data)
    assert exc.value.where == where


def test_unit_and_counit_are_exclusive():
    with pytest.raises(SchemaError):
        parse_structure(bad(unit=None))
    with pytest.raises(SchemaError):
        parse_structure(bad(counit={"1": 1}))
    co = bad(unit=None, mult=None)
    co["counit"] = {"1": 1}
    co["mult"] = []
    with pytest.raises(SchemaError) as exc:
        parse_structure(co)
    assert exc.value.where == "mult"
    co.pop("mult")
    co["comult"] = [{"from": "1", "out": [["1", "1", 1]]}]
    assert isinstance(parse_structure(co), DGCoalgebra)


def test_json_syntax_error_has_line_and_column(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "ring": ,\n}')
    with pytest.raises(SchemaError) as exc:
        parse_structure_file(p)
    assert exc.value.where == f"{p}:2:11"
    with pytest.raises(SchemaError):
        parse_structure_file(tmp_path / "missing.json")


def test_table_json_and_text():
    tab = HomologyTable(CoefficientRing.integers(), {
        0: HomologyEntry(0, HomologyGroup(1), "certified"),
        1: HomologyEntry(1, HomologyGroup(0, (2, 4)), "unstable", "grows"),
    }, title="HH")
    tab.audit.append("checked")
    js = table_to_json(tab, levels=3)
    assert js["levels"] == 3
    assert js["rows"][1] == {"degree": 1, "free_rank": 0, "torsion": [2, 4],
                             "flag": "unstable", "annotation": "grows"}
    txt = format_table(tab, levels=3)
    assert "Z/2 Z/4" in txt and "# levels: 3" in txt and "# audit: checked" in txt
