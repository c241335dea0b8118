import pytest
from builders import random_complex
from hypothesis import given
from hypothesis import strategies as st

from cohochschild.bar import cohochschild
from cohochschild.complexes import (
    EDGE,
    INFINITE_RANK,
    UNBOUNDED_DEGREES,
    HomologyEntry,
    HomologyTable,
    Window,
)
from cohochschild.dg import AxiomError, DGCoalgebra
from cohochschild.duality import (
    ISO,
    TransportRefused,
    condition1_check,
    condition2_check,
    duality_transport_cohh,
    quasi_properness_report,
    tensor_rank_bound_demo,
    transport_from_table,
    truncated_duality_check,
)
from cohochschild.linalg import CoefficientRing, HomologyGroup, RingError
from cohochschild.registry import (
    dual_koszul_coalgebra,
    exterior_algebra,
    exterior_coalgebra,
    finite_vector_space,
    laurent_pattern_module,
    trivial_coalgebra,
)

F2, F3, Z = CoefficientRing.gf(2), CoefficientRing.gf(3), CoefficientRing.integers()
seeds = st.integers(0, 10**6)


@given(seeds, st.sampled_from([F2, F3, Z]), st.integers(0, 3))
def test_condition1_on_finite_complexes(seed, ring, n):
    C, _ = random_complex(seed, ring, -1, 1)
    rep = condition1_check(C, n)
    assert rep.chain_map
    assert all(v == ISO for v in rep.verdicts.values())
    assert rep.ok


@given(seeds, st.sampled_from([F2, F3, Z]))
def test_condition2_on_finite_complexes(seed, ring):
    C, _ = random_complex(seed, ring)
    rep = condition2_check(C)
    assert rep.ok and rep.chain_map


def test_unbounded_degrees_fail_condition1_in_the_limit():
    X = laurent_pattern_module(Window(-3, 3))
    assert X.limit == UNBOUNDED_DEGREES
    r1 = condition1_check(X, 1)
    assert r1.ok
    r2 = condition1_check(X, 2, Window(-1, 1))
    assert r2.finite_ok
    assert not r2.ok and "unbounded" in r2.limit_failure
    assert any("grows with the window" in n for n in r2.notes)


def test_infinite_rank_fails_both_conditions_in_the_limit():
    X = finite_vector_space(3, F2).complex
    assert X.limit == INFINITE_RANK
    assert condition1_check(X, 1).ok
    assert not condition1_check(X, 2).ok
    r = condition2_check(X)
    assert r.finite_ok and not r.ok
    assert "strictly larger" in r.limit_failure


def test_quasi_properness_reports():
    assert quasi_properness_report(exterior_algebra(F3, [1, 2])).ok
    assert quasi_properness_report(exterior_coalgebra(F3, [1])).ok
    assert quasi_properness_report(dual_koszul_coalgebra(2)).ok
    rep = quasi_properness_report(finite_vector_space(2, F2))
    assert not rep.ok
    assert any("Condition 2" in r for r in rep.reasons)
    assert "NOT quasi-proper" in rep.summary()
    with pytest.raises(TypeError):
        quasi_properness_report(42)


# -- transport ---------------------------------------------------------------------------


def entry(t, free=0, tors=(), flag="certified"):
    return HomologyEntry(t, HomologyGroup(free, tors), flag)


def test_transport_over_field_reflects_degrees():
    hh = HomologyTable(F3, {0: entry(0, 2), 1: entry(1, 1, flag="unstable")})
    out = transport_from_table(hh)
    assert out.rank(0) == 2 and out.rank(-1) == 1
    assert out.flag(-1) == "unstable"


def test_transport_over_z_moves_torsion_down():
    hh = HomologyTable(Z, {0: entry(0, 1), 1: entry(1, 0, (2,)), 2: entry(2, 0, (), "unstable")})
    out = transport_from_table(hh)
    assert out.group(0) == HomologyGroup(1)
    assert out.group(-2) == HomologyGroup(0, (2,))
    assert out.group(-1) == HomologyGroup()
    # degree -2 needs input degrees 2 and 1; the worse flag wins
    assert out.flag(-2) == "unstable"
    # degree -3 needs input degree 3, which is absent
    assert out.flag(-3) == EDGE
    assert 1 not in out.entries


def test_transport_refusal_and_override():
    C = finite_vector_space(3, F2)
    with pytest.raises(TransportRefused) as exc:
        duality_transport_cohh(C, 2, Window(0, 0))
    assert "Condition" in str(exc.value)
    tab = duality_transport_cohh(C, 2, Window(0, 0), force=True)
    assert tab.audit[0].startswith("refused:")
    assert tab.audit[1].startswith("override:")
    assert tab.rank(0) == cohochschild(C, 2, Window(0, 0)).rank(0)


@pytest.mark.parametrize("degs", [[1], [2], [1, 2], [-1], [1, 1]])
@pytest.mark.parametrize("ring", [F2, F3])
def test_transport_matches_direct_cohh(degs, ring):
    C = exterior_coalgebra(ring, degs)
    w = Window(-3, 3)
    direct = cohochschild(C, 3, w)
    via = duality_transport_cohh(C, 3, w)
    assert all(direct.rank(t) == via.rank(t) for t in w)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_transport_over_z_dual_koszul(p):
    w = Window(-5, 0)
    direct = cohochschild(dual_koszul_coalgebra(p), 8, w)
    via = duality_transport_cohh(dual_koszul_coalgebra(p), 8, w)
    assert all(direct.group(t) == via.group(t) for t in w)


def test_truncated_duality_check_guards():
    with pytest.raises(RingError):
        truncated_duality_check(dual_koszul_coalgebra(2), 2, Window(-1, 0))
    bad = DGCoalgebra.build(F2, [("u", 0), ("e", 1)], {"u": 1}, comult={"u": {("u", "u"): 1}})
    with pytest.raises(AxiomError):
        truncated_duality_check(bad, 2, Window(0, 1))
    chk = truncated_duality_check(trivial_coalgebra(F3), 3, Window(-2, 2))
    assert chk.ok and chk.diff == {}


# -- tensor rank demo ------------------------------------------------------------------------


@pytest.mark.parametrize("m", range(1, 7))
def test_tensor_rank_demo_separates(m):
    d = tensor_rank_bound_demo(m, trials=40)
    assert d.rank_h == m
    assert d.separated
    assert sorted(d.max_rank_by_terms) == list(range(1, m))
    assert f"m={m}" in d.summary()


def test_tensor_rank_demo_rejects_bad_m():
    with pytest.raises(ValueError):
        tensor_rank_bound_demo(0)
