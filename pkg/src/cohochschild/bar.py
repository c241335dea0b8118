"""Truncated cyclic bar and cobar total complexes and their homology.

Bar side (Hochschild homology of a DG algebra A): level n is A ⊗ Ā^{⊗n}
with Ā spanned by the non-unit basis vectors, in total degree internal + n.
With b = sum_{i=0}^{n} (-1)^i d_i, where d_i (i < n) multiplies slots i and
i+1 and the cyclic face is

    d_n(a0, ..., an) = (-1)^{|an|(|a0|+...+|a_{n-1}|)} (an·a0, a1, ..., a_{n-1}),

the total differential is D = b + (-1)^n δ, δ the Koszul-signed internal
differential.  Levels ≤ N form a subcomplex.

Cobar side (coHochschild homology of a DG coalgebra C with ε = u*): level n
is C ⊗ C̄^{⊗n}, C̄ = ker ε, in total degree internal - n.  Cofaces apply Δ
in slot i ≤ n; the cyclic coface sends (c0, ..., cn) to
(-1)^{|c0'|(|c0''|+|c1|+...+|cn|)} (c0'', c1, ..., cn, c0').  The total
differential is D = sum (-1)^i δ^i + (-1)^n d; levels > N span a subcomplex
and the truncation is the quotient by it.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

from .complexes import (
    CERTIFIED,
    OBSERVED_STABLE,
    UNSTABLE,
    BoundsQuery,
    HomologyEntry,
    HomologyTable,
    Window,
    as_window,
    predict_bounds,
)
from .dg import AxiomError, DGAlgebra, DGCoalgebra, check_algebra_axioms, check_coalgebra_axioms
from .linalg import (
    CompositionError,
    HomologyGroup,
    MatrixExact,
    homology_group,
    kernel_basis,
    sum_groups,
)

DEFAULT_ORACLE_CAP = 5000


class TruncationError(ValueError):
    pass


class OracleCapError(RuntimeError):
    pass


def _sign(n):
    return -1 if n % 2 else 1


@dataclass(frozen=True)
class StabilityCertificate:
    """Degree t of the level-N truncation equals the untruncated answer.

    ``side`` is "bar" (rule (N-1)(c+1) > t+1) or "cobar" (rule
    (N-1)(c+1) > -t+1); c is the connectivity of the augmentation ideal
    (bar) or coaugmentation coideal (cobar).
    """

    degree: int
    levels: int
    c: int
    side: str

    @property
    def lhs(self) -> int:
        return (self.levels - 1) * (self.c + 1)

    @property
    def rhs(self) -> int:
        return self.degree + 1 if self.side == "bar" else -self.degree + 1

    @property
    def holds(self) -> bool:
        return self.c >= 1 and self.lhs > self.rhs

    def __str__(self):
        t = "t+1" if self.side == "bar" else "-t+1"
        return f"(N-1)(c+1) > {t}: {self.lhs} > {self.rhs} (N={self.levels}, c={self.c})"


@dataclass(frozen=True, eq=False)
class TotalComplex:
    """Truncated total complex on a window of total degrees.

    ``cells[t]`` lists the basis cells (level, basis-index tuple) of total
    degree t, sorted by level so that the cells of level ≤ n form a prefix;
    ``d[t]`` maps degree t to degree t-1.  Cells and differentials are
    stored for degrees ``w.lo - 1 .. w.hi + 1``.
    """

    kind: str
    source: object
    levels: int
    window: Window
    cells: dict
    d: dict
    ring: object

    def level_count(self, t: int, n: int) -> int:
        """Number of cells of degree t with level ≤ n."""
        return sum(1 for lev, _ in self.cells.get(t, ()) if lev <= n)

    def piece_ranks(self) -> dict:
        """(level, total degree) -> rank."""
        out = {}
        for t, cs in self.cells.items():
            for lev, _ in cs:
                out[(lev, t)] = out.get((lev, t), 0) + 1
        return out

    def differential(self, t: int, n: int | None = None) -> MatrixExact:
        """d_t restricted to the level ≤ n truncation (n = N by default)."""
        M = self.d.get(t)
        rows = len(self.cells.get(t - 1, ()))
        cols = len(self.cells.get(t, ()))
        if M is None:
            M = MatrixExact.zero(rows, cols, self.ring)
        if n is None or n >= self.levels:
            return M
        r, c = self.level_count(t - 1, n), self.level_count(t, n)
        return M.submatrix(range(r), range(c))

    def homology_at(self, t: int, n: int | None = None) -> HomologyGroup:
        return homology_group(self.differential(t + 1, n), self.differential(t, n), self.ring)

    def check_d_squared(self):
        for t in range(self.window.lo, self.window.hi + 1):
            if not (self.differential(t) @ self.differential(t + 1)).is_zero():
                raise CompositionError(f"total differential squares to nonzero at degree {t + 1}")


# ---------------------------------------------------------------------------
# cell enumeration and boundary formulas


def _enumerate(first, rest, levels, degree_of, lo, hi):
    """Cells (n, tuple) with n ≤ levels whose total degree lies in [lo, hi]."""
    cells = {t: [] for t in range(lo, hi + 1)}
    for n in range(levels + 1):
        for tup in product(first, *([rest] * n)):
            t = degree_of(n, tup)
            if lo <= t <= hi:
                cells[t].append((n, tup))
    for t in cells:
        cells[t].sort()
    return cells


def _assemble(kind, source, levels, w, cells, boundary, ring):
    index = {t: {c: i for i, c in enumerate(cs)} for t, cs in cells.items()}
    d = {}
    for t in range(w.lo, w.hi + 2):
        src, tgt = cells.get(t, []), index.get(t - 1, {})
        ent = {}
        for j, cell in enumerate(src):
            for target, coeff in boundary(cell).items():
                i = tgt.get(target)
                if i is None:
                    # only level N+1 (dropped by truncation) may be missing
                    continue
                ent[(i, j)] = ent.get((i, j), 0) + coeff
        d[t] = MatrixExact(len(tgt), len(src), ent, ring)
    T = TotalComplex(kind, source, levels, w, cells, d, ring)
    T.check_d_squared()
    return T


def _bar_boundary(A: DGAlgebra, normalized: bool):
    deg, u = A.degrees, A.unit

    def boundary(cell):
        n, a = cell
        out = {}

        def put(tup, c):
            if normalized and u in tup[1:]:
                return
            key = (len(tup) - 1, tup)
            out[key] = out.get(key, 0) + c

        for i in range(n):
            for c, k in A.mul(a[i], a[i + 1]).items():
                put(a[:i] + (c,) + a[i + 2:], _sign(i) * k)
        if n >= 1:
            s = _sign(n) * _sign(deg[a[n]] * sum(deg[x] for x in a[:n]))
            for c, k in A.mul(a[n], a[0]).items():
                put((c,) + a[1:n], s * k)
        run = 0
        for i in range(n + 1):
            s = _sign(n) * _sign(run)
            for j, k in A.diff.get(a[i], {}).items():
                put(a[:i] + (j,) + a[i + 1:], s * k)
            run += deg[a[i]]
        return {key: c for key, c in out.items() if c}

    return boundary


def _cobar_boundary(C: DGCoalgebra, levels: int):
    deg = C.degrees
    u = C.coaugmentation

    def boundary(cell):
        n, c = cell
        out = {}
        dropped = {}

        def put(tup, k):
            if u in tup[1:]:
                dropped[tup] = dropped.get(tup, 0) + k
                return
            key = (len(tup) - 1, tup)
            out[key] = out.get(key, 0) + k

        if n < levels:
            for i in range(n + 1):
                for (x, y), k in C.delta(c[i]).items():
                    put(c[:i] + (x, y) + c[i + 1:], _sign(i) * k)
            rest = sum(deg[z] for z in c[1:])
            for (x, y), k in C.delta(c[0]).items():
                s = _sign(n + 1) * _sign(deg[x] * (deg[y] + rest))
                put((y,) + c[1:] + (x,), s * k)
        run = 0
        for i in range(n + 1):
            s = _sign(n) * _sign(run)
            for j, k in C.diff.get(c[i], {}).items():
                put(c[:i] + (j,) + c[i + 1:], s * k)
            run += deg[c[i]]
        bad = {t: k for t, k in dropped.items() if C.ring.reduce(k)}
        if bad:
            raise CompositionError(f"coboundary of {cell} leaves the conormalized complex: {bad}")
        return {key: k for key, k in out.items() if k}

    return boundary


def _check_window(w, levels):
    w = as_window(w)
    if w is None:
        raise TruncationError("a degree window is required")
    if levels < 0:
        raise TruncationError("levels must be non-negative")
    return w


def normalized_bar(A: DGAlgebra, levels: int, w, check: bool = True) -> TotalComplex:
    w = _check_window(w, levels)
    if check:
        rep = check_algebra_axioms(A)
        if not rep.ok:
            raise AxiomError(rep)
    deg = A.degrees
    bar = A.augmentation_ideal
    cells = _enumerate(range(len(A)), bar, levels,
                       lambda n, tup: sum(deg[x] for x in tup) + n, w.lo - 1, w.hi + 1)
    return _assemble("bar", A, levels, w, cells, _bar_boundary(A, True), A.ring)


def conormalized_cobar(C: DGCoalgebra, levels: int, w, check: bool = True) -> TotalComplex:
    w = _check_window(w, levels)
    if check:
        rep = check_coalgebra_axioms(C)
        if not rep.ok:
            raise AxiomError(rep)
    u = C.coaugmentation
    if u is None:
        raise TruncationError("the counit must be a single dual basis functional u*")
    deg = C.degrees
    cobar = [i for i in range(len(C)) if i != u]
    cells = _enumerate(range(len(C)), cobar, levels,
                       lambda n, tup: sum(deg[x] for x in tup) - n, w.lo - 1, w.hi + 1)
    return _assemble("cobar", C, levels, w, cells, _cobar_boundary(C, levels), C.ring)


# ---------------------------------------------------------------------------
# certification


def bar_connectivity(A: DGAlgebra) -> int | None:
    """c with Ā in degrees ≥ c ≥ 1 and A connective, else None."""
    if any(d < 0 for d in A.degrees):
        return None
    bar = [A.degrees[i] for i in A.augmentation_ideal]
    if not bar:
        return 10**9  # Ā = 0: every degree is exact at level 0
    c = min(bar)
    return c if c >= 1 else None


def cobar_connectivity(C: DGCoalgebra) -> int | None:
    """c with C̄ in degrees ≤ -c ≤ -1 and C coconnective, else None."""
    if any(d > 0 for d in C.degrees):
        return None
    u = C.coaugmentation
    bar = [C.degrees[i] for i in range(len(C)) if i != u]
    if not bar:
        return 10**9
    c = -max(bar)
    return c if c >= 1 else None


def _growth_note(growth):
    ranks = [g.free_rank for g in growth]
    diffs = {b - a for a, b in zip(ranks, ranks[1:])}
    seq = ",".join(str(g) for g in growth)
    if len(diffs) == 1 and len(ranks) > 1:
        (step,) = diffs
        return f"growth {seq} ({step:+d}/level)"
    return f"growth {seq}"


def _table(T: TotalComplex, c: int | None, side: str, workers: int = 1, title="") -> HomologyTable:
    N = T.levels

    def one(t):
        growth = tuple(T.homology_at(t, n) for n in range(N + 1))
        grp = growth[-1]
        cert = StabilityCertificate(t, N, c, side) if c is not None else None
        if cert is not None and cert.holds:
            if N >= 1 and growth[-2] != grp:
                raise AssertionError(f"certified degree {t} changed between N-1 and N")
            return HomologyEntry(t, grp, CERTIFIED, str(cert), growth)
        if N >= 1 and growth[-2] == grp:
            return HomologyEntry(t, grp, OBSERVED_STABLE, f"equal at N-1={N - 1} and N={N}", growth)
        return HomologyEntry(t, grp, UNSTABLE, _growth_note(growth), growth)

    degrees = list(T.window)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(one, degrees))
    else:
        entries = [one(t) for t in degrees]
    tab = HomologyTable(T.ring, {e.degree: e for e in entries}, title=title)
    tab.audit.append(f"{T.kind} complex truncated at level N={N}, window {T.window}")
    return tab


def _assert_bounds(tab: HomologyTable, lo, hi):
    for t in tab:
        if tab[t].group.is_zero:
            continue
        if (lo is not None and t < lo) or (hi is not None and t > hi):
            raise AssertionError(f"homology in degree {t} violates the predicted bounds ({lo}, {hi})")


def hochschild(A: DGAlgebra, levels: int, w, workers: int = 1, check: bool = True) -> HomologyTable:
    """Hochschild homology of A from the level-N truncated normalized bar complex."""
    T = normalized_bar(A, levels, w, check)
    c = bar_connectivity(A)
    tab = _table(T, c, "bar", workers, title=f"HH_*({A.label or 'A'})")
    if c is not None:
        # A and Ā^{⊗n} connective: the total complex is 0-connective
        lo, _ = predict_bounds(BoundsQuery("tensor", ((0, None), (0, None)), A.ring.global_dimension))
        _assert_bounds(tab, lo, None)
    return tab


def cohochschild(C: DGCoalgebra, levels: int, w, workers: int = 1, check: bool = True) -> HomologyTable:
    """coHochschild homology of C from the level-N truncated conormalized cobar complex."""
    T = conormalized_cobar(C, levels, w, check)
    c = cobar_connectivity(C)
    tab = _table(T, c, "cobar", workers, title=f"coHH_*({C.label or 'C'})")
    if c is not None:
        # levels sit in degrees ≤ -n(c+1) + (internal ≤ 0); nothing above 0
        _assert_bounds(tab, None, 0)
    return tab


# ---------------------------------------------------------------------------
# one-sided bar: Tor_A(k, k)


def _reduced_bar_boundary(A: DGAlgebra):
    deg, u = A.degrees, A.unit

    def boundary(cell):
        n, a = cell
        out = {}

        def put(tup, k):
            if u in tup:
                return
            key = (len(tup), tup)
            out[key] = out.get(key, 0) + k

        for i in range(n - 1):
            for c, k in A.mul(a[i], a[i + 1]).items():
                put(a[:i] + (c,) + a[i + 2:], _sign(i + 1) * k)
        run = 0
        for i in range(n):
            s = _sign(n) * _sign(run)
            for j, k in A.diff.get(a[i], {}).items():
                put(a[:i] + (j,) + a[i + 1:], s * k)
            run += deg[a[i]]
        return {key: k for key, k in out.items() if k}

    return boundary


def tor_one_sided(A: DGAlgebra, levels: int, w, by: str = "bar", check: bool = True) -> HomologyTable:
    """Tor_A(k, k) from the reduced bar complex Ā^{⊗•} truncated at level N.

    ``by="bar"`` indexes by bar degree s (internal degrees listed in the
    annotation; needs zero internal differential), ``by="total"`` by
    total degree internal + s.
    """
    w = _check_window(w, levels)
    if check:
        rep = check_algebra_axioms(A)
        if not rep.ok:
            raise AxiomError(rep)
    if not A.is_augmented():
        raise TruncationError("no augmentation: the non-unit basis vectors do not span an ideal")
    deg = A.degrees
    bar = A.augmentation_ideal
    R = A.ring
    boundary = _reduced_bar_boundary(A)
    if by == "total":
        cells = {t: [] for t in range(w.lo - 1, w.hi + 2)}
        for n in range(levels + 1):
            for tup in product(bar, repeat=n):
                t = sum(deg[x] for x in tup) + n
                if t in cells:
                    cells[t].append((n, tup))
        for t in cells:
            cells[t].sort()
        index = {t: {c: i for i, c in enumerate(cs)} for t, cs in cells.items()}
        d = {}
        for t in range(w.lo, w.hi + 2):
            ent = {}
            for j, cell in enumerate(cells[t]):
                for target, k in boundary(cell).items():
                    i = index[t - 1].get(target)
                    if i is not None:
                        ent[(i, j)] = ent.get((i, j), 0) + k
            d[t] = MatrixExact(len(cells[t - 1]), len(cells[t]), ent, R)
        T = TotalComplex("reduced bar", A, levels, w, cells, d, R)
        T.check_d_squared()
        c = bar_connectivity(A)
        return _table(T, c, "bar", title=f"Tor^{A.label or 'A'}(k,k)")
    if by != "bar":
        raise ValueError("by must be 'bar' or 'total'")
    if A.diff:
        raise TruncationError("bar-degree grading needs a zero internal differential; use by='total'")
    # bigraded: bar degree s, internal degree j; d lowers s by one and keeps j
    tab = HomologyTable(R, title=f"Tor^{A.label or 'A'}(k,k) by bar degree")
    cells = {}
    for s in range(0, min(levels, w.hi + 1) + 1):
        for tup in product(bar, repeat=s):
            j = sum(deg[x] for x in tup)
            cells.setdefault((s, j), []).append((s, tup))

    def mat(s, j):
        src, tgt = cells.get((s, j), []), cells.get((s - 1, j), [])
        index = {c: i for i, c in enumerate(tgt)}
        ent = {}
        for col, cell in enumerate(src):
            for target, k in boundary(cell).items():
                ent[(index[target], col)] = ent.get((index[target], col), 0) + k
        return MatrixExact(len(tgt), len(src), ent, R)

    for s in w:
        if s < 0 or s > levels:
            tab.entries[s] = HomologyEntry(s, HomologyGroup(), CERTIFIED if s < 0 else UNSTABLE,
                                           "" if s < 0 else f"beyond truncation level {levels}")
            continue
        parts, internal = [], []
        for j in sorted({jj for (ss, jj) in cells if ss == s}):
            g = homology_group(mat(s + 1, j) if s + 1 <= levels else
                               MatrixExact.zero(len(cells.get((s, j), [])), 0, R), mat(s, j), R)
            if not g.is_zero:
                internal.append(f"{g} at internal {j}")
                parts.append(g)
        grp = sum_groups(parts)
        if s < levels:
            tab.entries[s] = HomologyEntry(s, grp, CERTIFIED, "; ".join(internal) or "zero")
        else:
            tab.entries[s] = HomologyEntry(s, grp, UNSTABLE,
                                           "top truncation level; " + ("; ".join(internal) or "zero"))
    tab.audit.append(f"reduced bar complex truncated at level N={levels}")
    return tab


# ---------------------------------------------------------------------------
# unnormalized oracle


def oracle_cap() -> int:
    return int(os.environ.get("COHOCHSCHILD_ORACLE_CAP", DEFAULT_ORACLE_CAP))


def oracle_unnormalized_bar(A: DGAlgebra, levels: int, w) -> HomologyTable:
    """Hochschild homology from the unnormalized cyclic bar complex A^{⊗(n+1)}.

    A level-N truncation of the unnormalized complex carries spurious top
    classes from degenerate chains; they die one level up.  The oracle
    therefore reports the image of H_t(F_N) in H_t(F_{N+1}), computed as
    Z_t(F_N) / (B_t(F_{N+1}) ∩ F_N).  It shares no code with the
    normalized complex beyond the face formulas' definition.
    """
    w = _check_window(w, levels)
    deg = A.degrees
    cap = oracle_cap()
    n_cells = sum(len(A) ** (n + 1) for n in range(levels + 2))
    if n_cells > 50 * cap:
        raise OracleCapError(f"{n_cells} tuples to enumerate; the oracle is for small inputs "
                             f"(cap {cap} per degree, COHOCHSCHILD_ORACLE_CAP)")
    everything = range(len(A))
    cells = _enumerate(everything, everything, levels + 1,
                       lambda n, tup: sum(deg[x] for x in tup) + n, w.lo - 1, w.hi + 1)
    worst = max((len(cs) for cs in cells.values()), default=0)
    if worst > cap:
        raise OracleCapError(f"{worst} cells in one degree exceed the oracle cap {cap} "
                             f"(set COHOCHSCHILD_ORACLE_CAP to raise it)")
    T = _assemble("unnormalized bar", A, levels + 1, w, cells, _bar_boundary(A, False), A.ring)
    R = A.ring
    tab = HomologyTable(R, title=f"HH_*({A.label or 'A'}) [unnormalized oracle]")
    for t in w:
        low_t = T.level_count(t, levels)
        d_t = T.differential(t, levels)
        d_up = T.differential(t + 1)  # full level N+1 source
        # chains of degree t+1 in F_{N+1} whose boundary has no level-(N+1) part
        top_rows = list(range(low_t, len(T.cells.get(t, ()))))
        P = d_up.submatrix(top_rows, range(d_up.cols))
        K = kernel_basis(P)
        B = (d_up @ K).submatrix(range(low_t), range(K.cols))
        grp = homology_group(B, d_t, R)
        tab.entries[t] = HomologyEntry(t, grp, note="image of H(F_N) in H(F_{N+1})")
    tab.audit.append(f"unnormalized oracle at N={levels} (level {levels + 1} used for the image)")
    return tab
