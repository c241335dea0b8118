"""Duality checks: Conditions 1 and 2, quasi-properness, and the transport of
Hochschild homology of C^∨ to coHochschild homology of C.

Condition 1 (tensor power n): the comparison (X^∨)^{⊗n} -> (X^{⊗n})^∨,
f_1⊗...⊗f_n ↦ (x_1⊗...⊗x_n ↦ (-1)^{Σ_{i<j}|f_j||x_i|} Π f_i(x_i)), is an iso.
Condition 2: the unit X -> X^∨∨ is an iso.

On finite data both always hold degreewise; inputs that stand for infinite
objects say so through ``limit`` and the reports carry the limit verdict.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .bar import hochschild, cohochschild
from .complexes import (
    CERTIFIED,
    EDGE,
    INFINITE_RANK,
    OBSERVED_STABLE,
    UNBOUNDED_DEGREES,
    UNSTABLE,
    ChainComplex,
    HomologyEntry,
    HomologyTable,
    Window,
    as_window,
    dual,
    tensor_basis,
    tensor_power,
)
from .dg import (
    AxiomError,
    DGAlgebra,
    DGCoalgebra,
    check_coalgebra_axioms,
    double_dual_unit,
    dualize_coalgebra,
)
from .linalg import (
    CoefficientRing,
    HomologyGroup,
    MatrixExact,
    RingError,
    kernel_basis,
    matrix_is_invertible,
    rank,
    solve_in_span,
)

ISO = "iso"
NOT_INJECTIVE = "not-injective"
NOT_SURJECTIVE = "not-surjective"


class TransportRefused(RuntimeError):
    def __init__(self, report):
        self.report = report
        super().__init__("refusing to transport: " + "; ".join(report.reasons))


def _sign(n):
    return -1 if n % 2 else 1


@dataclass
class ConditionReport:
    condition: int
    n: int | None
    window: Window | None
    verdicts: dict = field(default_factory=dict)     # degree -> iso / not-injective / not-surjective
    witnesses: dict = field(default_factory=dict)    # degree -> vector
    maps: dict = field(default_factory=dict)         # degree -> comparison matrix
    chain_map: bool = True
    limit_failure: str | None = None
    notes: list = field(default_factory=list)

    @property
    def finite_ok(self) -> bool:
        """Every covered degree is an isomorphism."""
        return self.chain_map and all(v == ISO for v in self.verdicts.values())

    @property
    def ok(self) -> bool:
        return self.finite_ok and self.limit_failure is None

    def summary(self) -> str:
        name = f"Condition {self.condition}" + (f" (n={self.n})" if self.n is not None else "")
        bad = {k: v for k, v in self.verdicts.items() if v != ISO}
        s = f"{name}: {'iso' if not bad else bad} in degrees {self.window}"
        if self.limit_failure:
            s += f"; fails in the limit: {self.limit_failure}"
        return s


def _verdict(M: MatrixExact):
    """(verdict, witness) for a square comparison matrix."""
    if M.rows == M.cols and matrix_is_invertible(M):
        return ISO, None
    K = kernel_basis(M)
    if K.cols:
        return NOT_INJECTIVE, K.column(0)
    # injective but not onto: find a target basis vector outside the image
    for i in range(M.rows):
        e = MatrixExact.from_columns([[int(r == i) for r in range(M.rows)]], M.ring, M.rows)
        try:
            solve_in_span(M, e)
        except ValueError:
            return NOT_SURJECTIVE, e.column(0)
    return NOT_SURJECTIVE, None


def _default_window(X: ChainComplex, n: int) -> Window:
    s = X.span if not X.is_complete else X.support
    if s is None:
        return Window(0, 0)
    lo, hi = s
    return Window(-n * hi, -n * lo) if n else Window(0, 0)


def condition1_limit_failure(limit, n) -> str | None:
    if n < 2:
        return None
    if limit == INFINITE_RANK:
        return "a degree of infinite rank: tensors of duals only reach finite-rank functionals"
    if limit == UNBOUNDED_DEGREES:
        return ("homology unbounded in both directions: each degree of (X^{⊗n})^∨ is an "
                "infinite product while (X^∨)^{⊗n} is an infinite sum")
    return None


def condition1_check(X: ChainComplex, n: int, w=None) -> ConditionReport:
    """Comparison (X^∨)^{⊗n} -> (X^{⊗n})^∨ in the degrees of ``w``."""
    w = as_window(w) or _default_window(X, n)
    rep = ConditionReport(1, n, w)
    R = X.ring
    if n == 0:
        # both sides are the unit
        for k in w:
            rep.verdicts[k] = ISO
            rep.maps[k] = MatrixExact.identity(1 if k == 0 else 0, R)
        return rep
    DX = dual(X)
    src = tensor_power(DX, n)
    tgt = dual(tensor_power(X, n))
    for k in w:
        sb = tensor_basis(DX, n, k)
        tb = {t: i for i, t in enumerate(tensor_basis(X, n, -k))}
        ent = {}
        for col, fs in enumerate(sb):
            xs = tuple((-d, i) for d, i in fs)
            row = tb.get(xs)
            if row is None:
                continue
            e = 0
            for a in range(n):
                for b in range(a + 1, n):
                    e += fs[b][0] * xs[a][0]
            ent[(row, col)] = _sign(e)
        M = MatrixExact(len(tb), len(sb), ent, R)
        rep.maps[k] = M
        rep.verdicts[k], wit = _verdict(M)
        if wit is not None:
            rep.witnesses[k] = wit
    for k in w:
        if k - 1 in w and src.covers(k) and src.covers(k - 1):
            if not (tgt.d(k) @ rep.maps[k] == rep.maps[k - 1] @ src.d(k)):
                rep.chain_map = False
    rep.limit_failure = condition1_limit_failure(X.limit, n)
    if X.limit == UNBOUNDED_DEGREES and X.span is not None:
        width = X.span[1] - X.span[0] + 1
        r0 = src.rank(0) if 0 in w else max(src.ranks.values(), default=0)
        rep.notes.append(f"degree-0 piece has rank {r0} from a window of width {width}; "
                         f"it grows with the window, so no finite stage captures the limit")
    return rep


def condition2_check(X: ChainComplex, w=None) -> ConditionReport:
    """The unit X -> X^∨∨ in the degrees of ``w``."""
    w = as_window(w)
    ddu = double_dual_unit(X, w)
    rep = ConditionReport(2, None, w or Window(min(ddu.iso, default=0), max(ddu.iso, default=0)))
    for k, M in ddu.eta.items():
        rep.maps[k] = M
        rep.verdicts[k], wit = _verdict(M)
        if wit is not None:
            rep.witnesses[k] = wit
    rep.chain_map = ddu.chain_map
    if X.limit == INFINITE_RANK:
        rep.limit_failure = ("infinite rank: the double dual of an infinite-dimensional "
                             "vector space is strictly larger")
        rep.notes.append("each finite truncation is honestly dualizable")
    return rep


@dataclass
class QuasiProperReport:
    label: str
    kind: str
    reports: list = field(default_factory=list)
    reasons: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.reasons

    def summary(self) -> str:
        head = f"{self.label}: {'quasi-proper' if self.ok else 'NOT quasi-proper'}"
        return "\n".join([head] + [f"  {r.summary()}" for r in self.reports]
                         + [f"  reason: {r}" for r in self.reasons])


def quasi_properness_report(obj, n_max: int = 3) -> QuasiProperReport:
    """Algebra: A satisfies Conditions 1 (n ≤ n_max) and 2.
    Coalgebra: C^∨ satisfies Condition 1 and C satisfies Condition 2."""
    if not isinstance(obj, (DGAlgebra, DGCoalgebra)):
        raise TypeError(f"expected a DG algebra or coalgebra, got {type(obj).__name__}")
    X = obj.complex
    label = obj.label or type(obj).__name__
    if isinstance(obj, DGAlgebra):
        out = QuasiProperReport(label, "algebra")
        c1_target = X
    elif isinstance(obj, DGCoalgebra):
        out = QuasiProperReport(label, "coalgebra")
        c1_target = dual(X)
    else:
        raise TypeError("expected a DGAlgebra or DGCoalgebra")
    for n in range(n_max + 1):
        r = condition1_check(c1_target, n)
        out.reports.append(r)
        if not r.ok:
            out.reasons.append(f"Condition 1 fails for n={n}: " + (r.limit_failure or "not iso"))
    r = condition2_check(X)
    out.reports.append(r)
    if not r.ok:
        out.reasons.append("Condition 2 fails: " + (r.limit_failure or "not iso"))
    return out


# ---------------------------------------------------------------------------
# transport

_FLAG_ORDER = {CERTIFIED: 0, OBSERVED_STABLE: 1, UNSTABLE: 2, EDGE: 3}


def _worse(*flags):
    return max(flags, key=lambda f: _FLAG_ORDER.get(f, 0))


def transport_from_table(hh: HomologyTable, ring: CoefficientRing | None = None, w=None) -> HomologyTable:
    """Degreewise dual of a homology table: (M^∨)_t = (M_{-t})^∨.

    Over a field the rank in degree t is the rank in degree -t.  Over Z the
    free part comes from H_{-t} and the torsion from H_{-t-1}.
    """
    ring = ring or hh.ring
    w = as_window(w)
    out = HomologyTable(ring, title=f"dual of {hh.title}" if hh.title else "")
    if ring.is_field:
        degrees = sorted({-s for s in hh})
    else:
        degrees = sorted({-s for s in hh} | {-s - 1 for s in hh})
    for t in degrees:
        if w is not None and t not in w:
            continue
        a = hh.entries.get(-t)
        if ring.is_field:
            grp = a.group if a else HomologyGroup()
            out.entries[t] = HomologyEntry(t, HomologyGroup(grp.free_rank), a.flag, a.note,
                                           tuple(HomologyGroup(g.free_rank) for g in a.growth))
            continue
        b = hh.entries.get(-t - 1)
        free = a.group.free_rank if a else 0
        tors = b.group.torsion if b else ()
        flags = [e.flag for e in (a, b) if e is not None]
        flag = _worse(*flags)
        notes = []
        if a is None or b is None:
            flag = EDGE
            notes.append(f"degree {-t if a is None else -t - 1} of the input is not available")
        growth = ()
        if a and b and len(a.growth) == len(b.growth):
            growth = tuple(HomologyGroup(x.free_rank, y.torsion) for x, y in zip(a.growth, b.growth))
        note = "; ".join(notes) or f"free part from degree {-t}, torsion from degree {-t - 1}"
        out.entries[t] = HomologyEntry(t, HomologyGroup(free, tors), flag, note, growth)
    return out


def duality_transport_cohh(C: DGCoalgebra, levels: int, w, force: bool = False,
                           workers: int = 1) -> HomologyTable:
    """coHH of C computed as the degreewise dual of HH of C^∨.

    Refuses unless C is quasi-proper; with ``force`` the refusal and the
    override are recorded in the table's audit trail.
    """
    w = as_window(w)
    report = quasi_properness_report(C)
    audit = []
    if not report.ok:
        if not force:
            raise TransportRefused(report)
        audit.append("refused: " + "; ".join(report.reasons))
        audit.append("override: --force given, transporting the finite truncation anyway; "
                     "the result describes the truncation, not the limit object")
    A = dualize_coalgebra(C, allow_truncation=force)
    hh = hochschild(A, levels, Window(-w.hi - 1, -w.lo), workers=workers)
    out = transport_from_table(hh, C.ring, w)
    out.title = f"coHH_*({C.label or 'C'}) via duality"
    out.audit = audit + [f"HH of the dual algebra at N={levels} over {hh.degrees()[0]}..{hh.degrees()[-1]}"]
    return out


@dataclass
class DualityCheck:
    ok: bool
    diff: dict           # degree t -> (rank coHH_t, rank HH_{-t}) where they differ
    cohh: HomologyTable
    hh: HomologyTable


def truncated_duality_check(C: DGCoalgebra, levels: int, w) -> DualityCheck:
    """rank coHH(C, N)_t == rank HH(C^∨, N)_{-t} for all t in w (field coefficients)."""
    if not C.ring.is_field:
        raise RingError("the degreewise rank identity needs field coefficients; "
                        "over Z use duality_transport_cohh")
    rep = check_coalgebra_axioms(C)
    if not rep.ok:
        raise AxiomError(rep)
    w = as_window(w)
    left = cohochschild(C, levels, w)
    right = hochschild(dualize_coalgebra(C, allow_truncation=True), levels, w.reflect())
    diff = {t: (left.rank(t), right.rank(-t)) for t in w if left.rank(t) != right.rank(-t)}
    return DualityCheck(not diff, diff, left, right)


# ---------------------------------------------------------------------------
# tensor rank demonstration


@dataclass
class TensorRankDemo:
    m: int
    rank_h: int
    max_rank_by_terms: dict      # r -> largest rank seen among r-term sums
    trials: int

    @property
    def separated(self) -> bool:
        return self.rank_h == self.m and all(v <= r for r, v in self.max_rank_by_terms.items())

    def summary(self) -> str:
        lines = [f"m={self.m}: identity pairing h on V_m⊗V_m has rank {self.rank_h}"]
        for r, v in sorted(self.max_rank_by_terms.items()):
            lines.append(f"  sums of {r} simple tensors: max rank {v} ≤ {r}")
        if self.m == 1:
            lines.append("  m=1: h is itself a simple tensor")
        else:
            lines.append(f"  h needs {self.m} simple tensors; the count grows without bound with m, "
                         "so h on an infinite-dimensional V is not a finite sum")
        return "\n".join(lines)


def tensor_rank_bound_demo(m: int, trials: int = 200, seed: int = 0) -> TensorRankDemo:
    """Rank of the identity pairing versus sums of r < m simple tensors (over Q)."""
    if m < 1:
        raise ValueError("m must be at least 1")
    Z = CoefficientRing.integers()
    h = MatrixExact.identity(m, Z)
    rng = random.Random(seed)
    best = {}
    for r in range(1, m):
        top = 0
        for _ in range(trials):
            M = MatrixExact.zero(m, m, Z)
            for _ in range(r):
                f = MatrixExact.from_columns([[rng.randint(-3, 3) for _ in range(m)]], Z, m)
                g = MatrixExact.from_columns([[rng.randint(-3, 3) for _ in range(m)]], Z, m)
                M = M + f @ g.T
            top = max(top, rank(M))
        best[r] = top
    return TensorRankDemo(m, rank(h), best, trials)
