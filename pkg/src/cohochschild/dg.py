"""DG algebras and DG coalgebras given by structure constants on a basis.

Both kinds keep a single global basis (``names``/``degrees``) and sparse
structure constants keyed by basis index:

* ``diff[i] = {j: c}`` means d(e_i) = sum c e_j;
* ``mult[(a, b)] = {c: k}`` means e_a e_b = sum k e_c;
* ``comult[c] = {(a, b): k}`` means Δ(e_c) = sum k e_a ⊗ e_b.

Missing entries are zero.  Per-degree matrices are derived on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .complexes import (
    INFINITE_RANK,
    UNBOUNDED_DEGREES,
    ChainComplex,
    GradedModule,
    WindowError,
    as_window,
    dual,
    dual_label,
)
from .linalg import CoefficientRing, MatrixExact, matrix_is_invertible


class AxiomError(ValueError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class DualizationError(ValueError):
    pass


def _clean(ring, vec):
    out = {}
    for k, v in vec.items():
        v = ring.reduce(v)
        if v:
            out[k] = v
    return out


def _add_into(ring, acc, vec, scale=1):
    for k, v in vec.items():
        x = ring.reduce(acc.get(k, 0) + scale * v)
        if x:
            acc[k] = x
        else:
            acc.pop(k, None)


@dataclass(frozen=True)
class Violation:
    axiom: str
    where: tuple
    detail: str = ""

    def __str__(self):
        return f"{self.axiom} at ({', '.join(self.where)})" + (f": {self.detail}" if self.detail else "")


@dataclass
class AxiomReport:
    kind: str
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def failed_axioms(self) -> list[str]:
        return sorted({v.axiom for v in self.violations})

    def add(self, axiom, where, detail=""):
        self.violations.append(Violation(axiom, tuple(where), detail))

    def raise_if_failed(self):
        if self.violations:
            raise AxiomError(self)
        return self

    def __str__(self):
        if self.ok:
            return f"{self.kind} axioms: pass"
        lines = [f"{self.kind} axioms: {len(self.violations)} violation(s)"]
        lines += [f"  {v}" for v in self.violations[:20]]
        if len(self.violations) > 20:
            lines.append(f"  ... {len(self.violations) - 20} more")
        return "\n".join(lines)


class _Structure:
    """Shared basis bookkeeping for algebras and coalgebras."""

    ring: CoefficientRing
    names: tuple
    degrees: tuple
    diff: dict

    def _init_basis(self):
        if len(self.names) != len(self.degrees):
            raise ValueError("names and degrees differ in length")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate basis names")
        index = {n: i for i, n in enumerate(self.names)}
        by_degree = {}
        pos = []
        for i, d in enumerate(self.degrees):
            lst = by_degree.setdefault(d, [])
            pos.append((d, len(lst)))
            lst.append(i)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "by_degree", dict(sorted(by_degree.items())))
        object.__setattr__(self, "pos", tuple(pos))
        object.__setattr__(self, "diff", {i: _clean(self.ring, v) for i, v in self.diff.items()
                                          if _clean(self.ring, v)})

    def __len__(self):
        return len(self.names)

    def degree(self, i) -> int:
        return self.degrees[i]

    def d_vec(self, vec: dict) -> dict:
        out = {}
        for i, c in vec.items():
            _add_into(self.ring, out, self.diff.get(i, {}), c)
        return out

    @property
    def complex(self) -> ChainComplex:
        ranks = {n: len(ix) for n, ix in self.by_degree.items()}
        labels = {n: tuple(self.names[i] for i in ix) for n, ix in self.by_degree.items()}
        ent = {}
        for i, out in self.diff.items():
            n, col = self.pos[i]
            for j, c in out.items():
                ent.setdefault(n, {})[(self.pos[j][1], col)] = c
        diffs = {n: MatrixExact(ranks.get(n - 1, 0), ranks[n], e, self.ring) for n, e in ent.items()}
        lo = min(self.degrees) if self.degrees else 0
        hi = max(self.degrees) if self.degrees else 0
        span = None
        if self.limit is not None:
            span = (lo, hi)
        return ChainComplex(GradedModule(self.ring, ranks, labels), diffs,
                            None if self.limit else lo, None if self.limit else hi,
                            span, self.limit)

    def _check_grading_diff(self, rep):
        for i, out in self.diff.items():
            for j in out:
                if self.degrees[j] != self.degrees[i] - 1:
                    rep.add("grading", (self.names[i], self.names[j]), "d must lower degree by 1")

    def _check_d_squared(self, rep, w):
        for i in range(len(self)):
            if w is not None and self.degrees[i] not in w:
                continue
            dd = self.d_vec(self.diff.get(i, {}))
            if dd:
                rep.add("d^2", (self.names[i],), f"d(d({self.names[i]})) = {self.format_vec(dd)}")

    def format_vec(self, vec) -> str:
        parts = []
        for k, c in sorted(vec.items()):
            name = self.names[k] if isinstance(k, int) else "⊗".join(self.names[x] for x in k)
            parts.append(f"{c}*{name}")
        return " + ".join(parts) or "0"

    @property
    def basis(self):
        return list(zip(self.names, self.degrees))


def _sign(n):
    return -1 if n % 2 else 1


@dataclass(frozen=True, eq=False)
class DGAlgebra(_Structure):
    ring: CoefficientRing
    names: tuple
    degrees: tuple
    unit: int
    diff: dict = field(default_factory=dict)
    mult: dict = field(default_factory=dict)
    label: str = ""
    limit: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        self._init_basis()
        mult = {}
        for k, v in self.mult.items():
            v = _clean(self.ring, v)
            if v:
                mult[tuple(k)] = v
        object.__setattr__(self, "mult", mult)
        if not 0 <= self.unit < len(self.names):
            raise ValueError("unit index out of range")

    @classmethod
    def build(cls, ring, basis, unit, diff=None, mult=None, label="", limit=None):
        """Build from names: ``basis=[(name, degree)]``, ``diff={a: {b: c}}``,
        ``mult={(a, b): {c: k}}``.  Elements of the unit are filled in."""
        names = [b[0] for b in basis]
        index = {n: i for i, n in enumerate(names)}
        u = index[unit]
        m = {}
        for (a, b), out in (mult or {}).items():
            m[(index[a], index[b])] = {index[c]: k for c, k in out.items()}
        for i in range(len(names)):
            m.setdefault((u, i), {i: 1})
            m.setdefault((i, u), {i: 1})
        dd = {index[a]: {index[b]: c for b, c in out.items()} for a, out in (diff or {}).items()}
        return cls(ring, names, [b[1] for b in basis], u, dd, m, label, limit)

    def mul(self, a: int, b: int) -> dict:
        return self.mult.get((a, b), {})

    def mul_vec(self, u: dict, v: dict) -> dict:
        out = {}
        for a, x in u.items():
            for b, y in v.items():
                _add_into(self.ring, out, self.mult.get((a, b), {}), x * y)
        return out

    def mult_matrix(self, i: int, j: int) -> MatrixExact:
        """C_i ⊗ C_j -> C_{i+j}, tensor basis ordered left index then right."""
        L, R, T = self.by_degree.get(i, []), self.by_degree.get(j, []), self.by_degree.get(i + j, [])
        ent = {}
        for x, a in enumerate(L):
            for y, b in enumerate(R):
                for c, k in self.mul(a, b).items():
                    ent[(self.pos[c][1], x * len(R) + y)] = k
        return MatrixExact(len(T), len(L) * len(R), ent, self.ring)

    @property
    def augmentation_ideal(self) -> list[int]:
        return [i for i in range(len(self)) if i != self.unit]

    def is_augmented(self) -> bool:
        """The span of the non-unit basis vectors is a dg ideal."""
        bar = set(self.augmentation_ideal)
        for (a, b), out in self.mult.items():
            if a in bar and b in bar and self.unit in out:
                return False
        return all(self.unit not in out for i, out in self.diff.items() if i in bar)

    def check_axioms(self, w=None) -> AxiomReport:
        return check_algebra_axioms(self, w)


@dataclass(frozen=True, eq=False)
class DGCoalgebra(_Structure):
    ring: CoefficientRing
    names: tuple
    degrees: tuple
    counit: dict
    diff: dict = field(default_factory=dict)
    comult: dict = field(default_factory=dict)
    label: str = ""
    limit: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "degrees", tuple(int(d) for d in self.degrees))
        self._init_basis()
        object.__setattr__(self, "counit", _clean(self.ring, self.counit))
        cm = {}
        for k, v in self.comult.items():
            v = {tuple(ab): c for ab, c in v.items()}
            v = _clean(self.ring, v)
            if v:
                cm[k] = v
        object.__setattr__(self, "comult", cm)

    @classmethod
    def build(cls, ring, basis, counit, diff=None, comult=None, label="", limit=None):
        names = [b[0] for b in basis]
        index = {n: i for i, n in enumerate(names)}
        cm = {index[c]: {(index[a], index[b]): k for (a, b), k in out.items()}
              for c, out in (comult or {}).items()}
        dd = {index[a]: {index[b]: c for b, c in out.items()} for a, out in (diff or {}).items()}
        eps = {index[n]: v for n, v in counit.items()}
        return cls(ring, names, [b[1] for b in basis], eps, dd, cm, label, limit)

    def delta(self, c: int) -> dict:
        return self.comult.get(c, {})

    def delta_vec(self, vec: dict) -> dict:
        out = {}
        for c, x in vec.items():
            _add_into(self.ring, out, self.delta(c), x)
        return out

    def comult_matrix(self, n: int, i: int) -> MatrixExact:
        """Component C_n -> C_i ⊗ C_{n-i} of Δ."""
        S, L, R = self.by_degree.get(n, []), self.by_degree.get(i, []), self.by_degree.get(n - i, [])
        ent = {}
        for col, c in enumerate(S):
            for (a, b), k in self.delta(c).items():
                if self.degrees[a] == i:
                    ent[(self.pos[a][1] * len(R) + self.pos[b][1], col)] = k
        return MatrixExact(len(L) * len(R), len(S), ent, self.ring)

    @property
    def coaugmentation(self) -> int | None:
        """The basis vector u with ε = u* (ε(u) = 1, zero elsewhere), if any."""
        if len(self.counit) == 1:
            (u, v), = self.counit.items()
            if v == 1:
                return u
        return None

    def check_axioms(self, w=None) -> AxiomReport:
        return check_coalgebra_axioms(self, w)


# ---------------------------------------------------------------------------
# axiom checkers


def check_algebra_axioms(A: DGAlgebra, w=None) -> AxiomReport:
    """Grading, d² = 0, unit, associativity and Leibniz, restricted to
    outputs whose degree lies in ``w`` (everything if None)."""
    w = as_window(w)
    ring = A.ring
    rep = AxiomReport("algebra")
    n = len(A)
    deg = A.degrees
    nm = A.names

    def inside(d):
        return w is None or d in w

    if deg[A.unit] != 0:
        rep.add("grading", (nm[A.unit],), "unit must have degree 0")
    A._check_grading_diff(rep)
    for (a, b), out in A.mult.items():
        for c in out:
            if deg[c] != deg[a] + deg[b]:
                rep.add("grading", (nm[a], nm[b], nm[c]), "product lands in the wrong degree")
    A._check_d_squared(rep, w)
    if A.diff.get(A.unit):
        rep.add("unit", (nm[A.unit],), "d(1) != 0")
    for a in range(n):
        if not inside(deg[a]):
            continue
        if A.mul(A.unit, a) != {a: 1}:
            rep.add("unit", (nm[A.unit], nm[a]), f"1*{nm[a]} = {A.format_vec(A.mul(A.unit, a))}")
        if A.mul(a, A.unit) != {a: 1}:
            rep.add("unit", (nm[a], nm[A.unit]), f"{nm[a]}*1 = {A.format_vec(A.mul(a, A.unit))}")
    for a, b, c in product(range(n), repeat=3):
        if not inside(deg[a] + deg[b] + deg[c]):
            continue
        left = A.mul_vec(A.mul(a, b), {c: 1})
        right = A.mul_vec({a: 1}, A.mul(b, c))
        if left != right:
            rep.add("associativity", (nm[a], nm[b], nm[c]),
                    f"(ab)c = {A.format_vec(left)}, a(bc) = {A.format_vec(right)}")
    for a, b in product(range(n), repeat=2):
        if not inside(deg[a] + deg[b] - 1):
            continue
        lhs = A.d_vec(A.mul(a, b))
        rhs = A.mul_vec(A.diff.get(a, {}), {b: 1})
        _add_into(ring, rhs, A.mul_vec({a: 1}, A.diff.get(b, {})), _sign(deg[a]))
        if lhs != rhs:
            rep.add("leibniz", (nm[a], nm[b]),
                    f"d(ab) = {A.format_vec(lhs)}, da.b ± a.db = {A.format_vec(rhs)}")
    return rep


def _tensor_d(C, vec):
    """(d⊗1 + 1⊗d) on a dict keyed by basis pairs."""
    out = {}
    for (a, b), x in vec.items():
        for a2, y in C.diff.get(a, {}).items():
            _add_into(C.ring, out, {(a2, b): y}, x)
        for b2, y in C.diff.get(b, {}).items():
            _add_into(C.ring, out, {(a, b2): y}, x * _sign(C.degrees[a]))
    return out


def check_coalgebra_axioms(C: DGCoalgebra, w=None) -> AxiomReport:
    """Grading, d² = 0, counit, coassociativity, co-Leibniz and ε∘d = 0."""
    w = as_window(w)
    ring = C.ring
    rep = AxiomReport("coalgebra")
    deg, nm = C.degrees, C.names

    def inside(d):
        return w is None or d in w

    C._check_grading_diff(rep)
    for c, out in C.comult.items():
        for a, b in out:
            if deg[a] + deg[b] != deg[c]:
                rep.add("grading", (nm[c], nm[a], nm[b]), "coproduct term in the wrong degree")
    for u in C.counit:
        if deg[u] != 0:
            rep.add("grading", (nm[u],), "counit is nonzero outside degree 0")
    if not C.counit:
        rep.add("counit", (), "counit is zero")
    C._check_d_squared(rep, w)
    for i in range(len(C)):
        if not inside(deg[i]):
            continue
        left, right = {}, {}
        for (a, b), k in C.delta(i).items():
            _add_into(ring, left, {b: C.counit.get(a, 0) * k})
            _add_into(ring, right, {a: C.counit.get(b, 0) * k})
        if left != {i: 1} or right != {i: 1}:
            rep.add("counit", (nm[i],), f"(ε⊗1)Δ = {C.format_vec(left)}, (1⊗ε)Δ = {C.format_vec(right)}")
        # coassociativity
        l3, r3 = {}, {}
        for (a, b), k in C.delta(i).items():
            for (a1, a2), m in C.delta(a).items():
                _add_into(ring, l3, {(a1, a2, b): k * m})
            for (b1, b2), m in C.delta(b).items():
                _add_into(ring, r3, {(a, b1, b2): k * m})
        if l3 != r3:
            bad = sorted(set(l3.items()) ^ set(r3.items()))[0][0]
            rep.add("coassociativity", (nm[i],) + tuple(nm[x] for x in bad),
                    "(Δ⊗1)Δ and (1⊗Δ)Δ differ")
        # co-Leibniz
        lhs = C.delta_vec(C.diff.get(i, {}))
        rhs = _tensor_d(C, C.delta(i))
        if lhs != rhs:
            rep.add("co-leibniz", (nm[i],), f"Δd = {C.format_vec(lhs)}, dΔ = {C.format_vec(rhs)}")
        eps_d = sum(C.counit.get(j, 0) * c for j, c in C.diff.get(i, {}).items())
        if ring.reduce(eps_d):
            rep.add("counit", (nm[i],), "ε∘d != 0")
    return rep


# ---------------------------------------------------------------------------
# dualization


def _require_finite(X, w, allow_truncation=False):
    if X.limit is not None and not allow_truncation:
        raise DualizationError(f"{X.label or 'input'} is a window onto an infinite object ({X.limit})")
    w = as_window(w)
    if w is not None and X.degrees:
        r = w.reflect()
        if not (r.lo <= min(X.degrees) and max(X.degrees) <= r.hi):
            raise WindowError(f"data in degrees {min(X.degrees)}..{max(X.degrees)} "
                              f"is not covered by the reflected window {r}")


def _dual_diff(X):
    """d on dual basis: d(x*) = (-1)^{|x*|+1} sum_y [x in dy] y*."""
    out = {}
    for y, img in X.diff.items():
        for x, c in img.items():
            sign = _sign(-X.degrees[x] + 1)
            out.setdefault(x, {})[y] = sign * c
    return out


def dualize_algebra(A: DGAlgebra, w=None, allow_truncation: bool = False) -> DGCoalgebra:
    """Linear dual of a finite-type algebra.

    Δ(c*) = sum_{a,b} μ_{ab}^c (-1)^{|a||b|} a*⊗b*, ε = 1*.
    ``allow_truncation`` dualizes a finite window onto an infinite object.
    """
    _require_finite(A, w, allow_truncation)
    comult = {}
    for (a, b), out in A.mult.items():
        s = _sign(A.degrees[a] * A.degrees[b])
        for c, k in out.items():
            comult.setdefault(c, {})[(a, b)] = s * k
    return DGCoalgebra(A.ring, [dual_label(x) for x in A.names], [-d for d in A.degrees],
                       {A.unit: 1}, _dual_diff(A), comult, _dual_title(A.label), A.limit)


def dualize_coalgebra(C: DGCoalgebra, w=None, allow_truncation: bool = False) -> DGAlgebra:
    """Linear dual of a finite-type coalgebra (always an algebra).

    μ(a*⊗b*) = sum_c Δ_c^{ab} (-1)^{|a||b|} c*; the unit is u* where ε = u*.
    """
    _require_finite(C, w, allow_truncation)
    u = C.coaugmentation
    if u is None:
        raise DualizationError("counit must be a single dual basis functional u* "
                               "so that its dual is a basis vector")
    mult = {}
    for c, out in C.comult.items():
        for (a, b), k in out.items():
            s = _sign(C.degrees[a] * C.degrees[b])
            mult.setdefault((a, b), {})[c] = s * k
    return DGAlgebra(C.ring, [dual_label(x) for x in C.names], [-d for d in C.degrees],
                     u, _dual_diff(C), mult, _dual_title(C.label), C.limit)


def _dual_title(label):
    if not label:
        return ""
    return label[:-2] if label.endswith("^∨") else label + "^∨"


def through_unit_map(X):
    """Rewrite a double dual in the basis η(x) = (-1)^{|x|} x**.

    η is the canonical unit X -> X^∨∨ for our dual sign convention; in the
    naive basis x** the differential of X^∨∨ is -d.
    """
    s = [_sign(d) for d in X.degrees]
    diff = {i: {j: s[i] * s[j] * c for j, c in out.items()} for i, out in X.diff.items()}
    common = dict(ring=X.ring, names=X.names, degrees=X.degrees, diff=diff, label=X.label,
                  limit=X.limit)
    if isinstance(X, DGAlgebra):
        mult = {(a, b): {c: s[a] * s[b] * s[c] * k for c, k in out.items()}
                for (a, b), out in X.mult.items()}
        return DGAlgebra(unit=X.unit, mult=mult, **common)
    comult = {c: {(a, b): s[a] * s[b] * s[c] * k for (a, b), k in out.items()}
              for c, out in X.comult.items()}
    return DGCoalgebra(counit=X.counit, comult=comult, **common)


def structure_constants(X) -> dict:
    """Name-keyed structure constants, for exact comparison."""
    nm = X.names
    data = {
        "basis": tuple(zip(nm, X.degrees)),
        "diff": {nm[i]: {nm[j]: c for j, c in out.items()} for i, out in X.diff.items()},
    }
    if isinstance(X, DGAlgebra):
        data["unit"] = nm[X.unit]
        data["mult"] = {(nm[a], nm[b]): {nm[c]: k for c, k in out.items()}
                        for (a, b), out in X.mult.items()}
    else:
        data["counit"] = {nm[i]: v for i, v in X.counit.items()}
        data["comult"] = {nm[c]: {(nm[a], nm[b]): k for (a, b), k in out.items()}
                          for c, out in X.comult.items()}
    return data


def round_trip(X):
    """(X^∨)^∨ identified with X through η; returns (double dual, exact?)."""
    if isinstance(X, DGAlgebra):
        back = dualize_coalgebra(dualize_algebra(X))
    else:
        back = dualize_algebra(dualize_coalgebra(X))
    back = through_unit_map(back)
    return back, structure_constants(back) == structure_constants(X)


# ---------------------------------------------------------------------------
# double dual and dualizability


@dataclass
class DoubleDualReport:
    eta: dict                       # degree -> matrix X_n -> (X^∨∨)_n
    iso: dict                       # degree -> bool
    chain_map: bool

    @property
    def ok(self) -> bool:
        return self.chain_map and all(self.iso.values())


def double_dual_unit(X: ChainComplex, w=None) -> DoubleDualReport:
    """η: X -> X^∨∨, x ↦ (-1)^{|x|} x**, checked degreewise over ``w``."""
    w = as_window(w)
    if w is None:
        s = X.support if X.is_complete else X.span
        w = as_window(s or (0, 0))
    for n in w:
        if not X.covers(n):
            raise WindowError(f"degree {n} not covered by span {X.span}")
    # the double dual is computed on the whole data, then read off in w
    XX = dual(dual(X))
    eta, iso = {}, {}
    chain = True
    for n in w:
        e = MatrixExact.identity(X.rank(n), X.ring).scale(_sign(n))
        eta[n] = e
        iso[n] = XX.rank(n) == X.rank(n) and matrix_is_invertible(e)
    for n in w:
        if n - 1 in w and not (XX.d(n) @ eta[n] == eta[n - 1] @ X.d(n)):
            chain = False
    return DoubleDualReport(eta, iso, chain)


def is_dualizable(X: ChainComplex) -> tuple[bool, str]:
    """Dualizable means finitely generated homology in finitely many degrees.

    Finite windows onto infinite objects must say so through ``X.limit``.
    """
    if X.limit == UNBOUNDED_DEGREES:
        return False, "homology is nonzero in unboundedly many degrees (attested by input)"
    if X.limit == INFINITE_RANK:
        return False, "homology has infinite rank in some degree (attested by input)"
    if X.span is not None:
        raise WindowError("support is only known on a window and no boundedness attestation is given")
    return True, "finite rank in finitely many degrees"
