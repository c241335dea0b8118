import pytest
from builders import random_complex
from hypothesis import given
from hypothesis import strategies as st

from cohochschild.complexes import (
    EDGE,
    EXACT,
    BoundsQuery,
    CertificateError,
    ChainComplex,
    GradedModule,
    Window,
    WindowError,
    check_certificates,
    direct_sum,
    dual,
    homology,
    predict_bounds,
    shift,
    tensor,
    tensor_basis,
    tensor_power,
    truncate_coconnective,
    truncate_connective,
)
from cohochschild.linalg import CoefficientRing, CompositionError, HomologyGroup, MatrixExact, RingError

Z = CoefficientRing.integers()
F3 = CoefficientRing.gf(3)
W = Window(-6, 6)

rings = st.sampled_from([Z, CoefficientRing.gf(2), F3, CoefficientRing.gf(5)])
seeds = st.integers(0, 10**6)


def groups(C, w=W):
    tab = homology(C, w)
    return {n: tab.group(n) for n in w}


def field_ranks(C, w=W):
    tab = homology(C, w)
    return {n: tab.rank(n) for n in w}


# -- windows and construction ------------------------------------------------


def test_window_parse_and_reflect():
    w = Window.parse("-1:3")
    assert (w.lo, w.hi) == (-1, 3)
    assert list(w) == [-1, 0, 1, 2, 3]
    assert w.reflect() == Window(-3, 1)
    assert 0 in w and 4 not in w
    with pytest.raises(ValueError):
        Window(2, 1)
    with pytest.raises(ValueError):
        Window.parse("1")


def test_complex_rejects_bad_data():
    with pytest.raises(CompositionError):
        ChainComplex.from_ranks(Z, {0: 1, 1: 1, 2: 1}, {1: [[1]], 2: [[1]]})
    with pytest.raises(ValueError):
        ChainComplex(GradedModule(Z, {0: 1, 1: 2}), {1: MatrixExact.from_rows([[1]], Z)})
    d = MatrixExact.from_rows([[1]], F3)
    with pytest.raises(RingError):
        ChainComplex(GradedModule(Z, {0: 1, 1: 1}), {1: d})
    with pytest.raises(ValueError):
        GradedModule(Z, {0: 2}, labels={0: ("a",)})


@given(seeds, rings)
def test_homology_matches_construction(seed, ring):
    C, expect = random_complex(seed, ring)
    got = groups(C)
    for n in W:
        assert got[n] == expect.get(n, HomologyGroup())


def test_edge_flag_outside_span():
    C = ChainComplex.from_ranks(F3, {0: 1, 1: 1}, span=(0, 1))
    tab = homology(C, Window(0, 1))
    assert tab.flag(0) == EDGE and tab.flag(1) == EDGE
    assert homology(ChainComplex.from_ranks(F3, {0: 1}), Window(0, 0)).flag(0) == EXACT
    with pytest.raises(WindowError):
        homology(C, Window(0, 2))


# -- tensor products ------------------------------------------------------------


@given(seeds, seeds, st.sampled_from([CoefficientRing.gf(2), F3]))
def test_kunneth_over_field(s1, s2, ring):
    C, _ = random_complex(s1, ring)
    D, _ = random_complex(s2, ring)
    hc, hd = field_ranks(C), field_ranks(D)
    h = field_ranks(tensor(C, D), Window(-12, 12))
    for n in range(-12, 13):
        assert h[n] == sum(hc[i] * hd.get(n - i, 0) for i in hc)


@given(seeds, seeds, seeds, rings)
def test_tensor_associative_up_to_homology(s1, s2, s3, ring):
    A, _ = random_complex(s1, ring, -1, 1)
    B, _ = random_complex(s2, ring, -1, 1)
    C, _ = random_complex(s3, ring, -1, 1)
    left, right = tensor(tensor(A, B), C), tensor(A, tensor(B, C))
    assert left.ranks == right.ranks
    w = Window(-4, 4)
    assert groups(left, w) == groups(right, w)


def test_tensor_torsion_kunneth_over_z():
    # Z --2--> Z tensored with itself: H = Z/2 in degrees 0 and 1
    C = ChainComplex.from_ranks(Z, {0: 1, 1: 1}, {1: [[2]]})
    got = groups(tensor(C, C), Window(0, 2))
    assert got == {0: HomologyGroup(0, (2,)), 1: HomologyGroup(0, (2,)), 2: HomologyGroup()}


@given(seeds, st.integers(0, 3))
def test_tensor_basis_matches_power(seed, n):
    C, _ = random_complex(seed, F3, -1, 1)
    P = tensor_power(C, n)
    for k in range(-n - 1, n + 2):
        assert len(tensor_basis(C, n, k)) == P.rank(k)


def test_tensor_labels_and_unit():
    C = ChainComplex.from_ranks(F3, {0: 1, 1: 1}, labels={0: ("a",), 1: ("b",)})
    P = tensor_power(C, 2)
    assert P.module.labels[1] == ("a⊗b", "b⊗a")
    U = tensor_power(C, 0)
    assert U.ranks == {0: 1}


def test_windowed_tensor_needs_window():
    C = ChainComplex.from_ranks(F3, {0: 1}, span=(0, 0))
    with pytest.raises(WindowError):
        tensor(C, C)


# -- duals, shifts, truncations ----------------------------------------------------


@given(seeds, st.sampled_from([CoefficientRing.gf(2), F3, CoefficientRing.gf(5)]))
def test_dual_rank_symmetry_over_field(seed, ring):
    C, _ = random_complex(seed, ring)
    hc, hd = field_ranks(C), field_ranks(dual(C))
    for n in W:
        assert hd[-n] == hc[n]


@given(seeds)
def test_dual_universal_coefficients_over_z(seed):
    C, _ = random_complex(seed, Z)
    hc, hd = groups(C, Window(-7, 7)), groups(dual(C))
    for i in W:
        assert hd[i].free_rank == hc[-i].free_rank
        assert hd[i].torsion == hc[-i - 1].torsion


@given(seeds, rings)
def test_double_dual_negates_differential(seed, ring):
    C, _ = random_complex(seed, ring)
    DD = dual(dual(C))
    assert DD.ranks == C.ranks
    for n in C.diffs:
        assert DD.d(n) == -C.d(n)


@given(seeds, rings, st.integers(-3, 3))
def test_shift_moves_homology(seed, ring, k):
    C, _ = random_complex(seed, ring)
    S = shift(C, k)
    h, hs = groups(C, Window(-10, 10)), groups(S, Window(-10, 10))
    for n in range(-6, 7):
        assert hs[n + k] == h[n]


@given(seeds, rings, st.integers(-2, 2))
def test_truncations(seed, ring, n):
    C, _ = random_complex(seed, ring)
    h = groups(C)
    hi = groups(truncate_connective(C, n))
    lo = groups(truncate_coconnective(C, n))
    for k in W:
        assert hi[k] == (h[k] if k >= n else HomologyGroup())
        assert lo[k] == (h[k] if k <= n else HomologyGroup())


def test_truncation_needs_covered_degrees():
    C = ChainComplex.from_ranks(F3, {0: 1}, span=(0, 0))
    with pytest.raises(WindowError):
        truncate_connective(C, 0)


@given(seeds, seeds, rings)
def test_direct_sum_adds_homology(s1, s2, ring):
    C, _ = random_complex(s1, ring)
    D, _ = random_complex(s2, ring)
    if ring.is_field:
        a, b, s = field_ranks(C), field_ranks(D), field_ranks(direct_sum([C, D]))
        assert all(s[n] == a[n] + b[n] for n in W)
    else:
        s = groups(direct_sum([C, D]))
        a, b = groups(C), groups(D)
        assert all(s[n].free_rank == a[n].free_rank + b[n].free_rank for n in W)


# -- connectivity bookkeeping ------------------------------------------------------------


def test_predict_bounds_examples():
    assert predict_bounds(BoundsQuery("dual", ((2, None),))) == (None, -2)
    assert predict_bounds(BoundsQuery("dual", ((None, 3),), 1)) == (-4, None)
    assert predict_bounds(BoundsQuery("tensor", ((0, 2), (1, 3)))) == (1, 5)
    assert predict_bounds(BoundsQuery("tensor", ((0, 2), (1, 3)), 1)) == (1, 6)
    assert predict_bounds(BoundsQuery("tensor", ((0, None), (1, 3)))) == (1, None)
    with pytest.raises(CertificateError):
        predict_bounds(BoundsQuery("dual", ((None, None),)))
    with pytest.raises(ValueError):
        predict_bounds(BoundsQuery("cone", ((0, 0),)))


@given(seeds, seeds, rings)
def test_predicted_bounds_hold(s1, s2, ring):
    C, _ = random_complex(s1, ring)
    D, _ = random_complex(s2, ring)
    C = C.with_(conn_lo=-2, conn_hi=2)
    D = D.with_(conn_lo=-2, conn_hi=2)
    assert check_certificates(tensor(C, D)) == []
    assert check_certificates(dual(C)) == []


def test_false_certificate_detected():
    C = ChainComplex.from_ranks(F3, {0: 1}, conn_lo=1)
    assert check_certificates(C) == [0]
