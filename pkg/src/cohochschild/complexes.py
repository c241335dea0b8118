"""Graded modules and chain complexes of free modules over GF(p) or Z.

Conventions (fixed once, used everywhere):

* differentials are homological, ``d_n: C_n -> C_{n-1}``, stored as matrices
  acting on column vectors (shape ``rank(n-1) x rank(n)``);
* tensor products use ``d(a⊗b) = da⊗b + (-1)^|a| a⊗db`` and order the basis
  of degree n by left degree, then left index, then right index;
* the dual has ``(C^∨)_i = (C_{-i})^∨`` and ``(d f)(x) = (-1)^{|f|+1} f(dx)``,
  which makes evaluation ``C^∨ ⊗ C -> R`` a chain map;
* ``shift(C, k)`` puts C_n in degree n+k and multiplies d by (-1)^k.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Iterable

from .linalg import (
    CoefficientRing,
    CompositionError,
    HomologyGroup,
    MatrixExact,
    RingError,
    homology_group,
    image_coordinates,
    kernel_basis,
    solve_in_span,
)

# attestation values for complexes that are finite windows onto infinite objects
UNBOUNDED_DEGREES = "unbounded-degrees"
INFINITE_RANK = "infinite-rank"


class WindowError(ValueError):
    """Requested degrees are not covered by the data of a complex."""


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    lo: int
    hi: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"window [{self.lo}, {self.hi}] is empty")

    @classmethod
    def parse(cls, text: str) -> "Window":
        a, b = text.split(":")
        return cls(int(a), int(b))

    def __iter__(self):
        return iter(range(self.lo, self.hi + 1))

    def __contains__(self, n):
        return self.lo <= n <= self.hi

    def reflect(self) -> "Window":
        return Window(-self.hi, -self.lo)

    def widen(self, k: int = 1) -> "Window":
        return Window(self.lo - k, self.hi + k)

    def __str__(self):
        return f"[{self.lo}, {self.hi}]"


def as_window(w) -> Window | None:
    if w is None or isinstance(w, Window):
        return w
    return Window(*w)


@dataclass(frozen=True)
class GradedModule:
    ring: CoefficientRing
    ranks: dict
    labels: dict | None = None

    def __post_init__(self):
        ranks = {int(n): int(r) for n, r in self.ranks.items() if r}
        if any(r < 0 for r in ranks.values()):
            raise ValueError("ranks must be non-negative")
        object.__setattr__(self, "ranks", dict(sorted(ranks.items())))
        if self.labels is not None:
            labels = {n: tuple(v) for n, v in self.labels.items() if ranks.get(n)}
            for n, r in ranks.items():
                if len(labels.get(n, ())) != r:
                    raise ValueError(f"degree {n}: {r} basis vectors but "
                                     f"{len(labels.get(n, ()))} labels")
            object.__setattr__(self, "labels", labels)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    @property
    def support(self) -> tuple[int, int] | None:
        if not self.ranks:
            return None
        ks = list(self.ranks)
        return ks[0], ks[-1]

    def label(self, n: int, i: int) -> str:
        if self.labels is None:
            return f"e{n}_{i}"
        return self.labels[n][i]


@dataclass(frozen=True, eq=False)
class ChainComplex:
    """A bounded chain complex of free modules.

    ``span`` is the degree range on which the data is valid; ``None`` means
    the data is complete (every degree not listed is zero).  ``limit``
    attests that the data is a finite window onto an infinite object
    (``"unbounded-degrees"`` or ``"infinite-rank"``).  ``conn_lo`` /
    ``conn_hi`` are homological certificates: H_i = 0 for i < conn_lo and
    for i > conn_hi.
    """

    module: GradedModule
    diffs: dict = field(default_factory=dict)
    conn_lo: int | None = None
    conn_hi: int | None = None
    span: tuple | None = None
    limit: str | None = None

    def __post_init__(self):
        ring = self.module.ring
        diffs = {}
        for n, d in self.diffs.items():
            if d.ring != ring:
                raise RingError(f"differential d_{n} is over {d.ring}, complex over {ring}")
            want = (self.module.rank(n - 1), self.module.rank(n))
            if d.shape != want:
                raise ValueError(f"d_{n} has shape {d.shape}, expected {want}")
            if not d.is_zero():
                diffs[int(n)] = d
        object.__setattr__(self, "diffs", dict(sorted(diffs.items())))
        if self.span is not None:
            object.__setattr__(self, "span", (int(self.span[0]), int(self.span[1])))
        for n, d in self.diffs.items():
            below = self.diffs.get(n - 1)
            if below is not None and not (below @ d).is_zero():
                raise CompositionError(f"d_{n - 1} ∘ d_{n} != 0")

    # construction helpers -------------------------------------------------

    @classmethod
    def from_ranks(cls, ring, ranks, diffs=None, labels=None, **kw):
        """Build from plain data; ``diffs`` may map n to nested row lists."""
        mod = GradedModule(ring, ranks, labels)
        ds = {}
        for n, d in (diffs or {}).items():
            if not isinstance(d, MatrixExact):
                d = MatrixExact.from_rows(d, ring, mod.rank(n))
            ds[n] = d
        return cls(mod, ds, **kw)

    @classmethod
    def unit(cls, ring) -> "ChainComplex":
        return cls.from_ranks(ring, {0: 1}, labels={0: ("1",)}, conn_lo=0, conn_hi=0)

    # access ---------------------------------------------------------------

    @property
    def ring(self) -> CoefficientRing:
        return self.module.ring

    @property
    def ranks(self) -> dict:
        return self.module.ranks

    def rank(self, n: int) -> int:
        return self.module.rank(n)

    def d(self, n: int) -> MatrixExact:
        got = self.diffs.get(n)
        if got is not None:
            return got
        return MatrixExact.zero(self.rank(n - 1), self.rank(n), self.ring)

    @property
    def support(self):
        return self.module.support

    @property
    def is_complete(self) -> bool:
        return self.span is None

    def covers(self, n: int) -> bool:
        return self.span is None or self.span[0] <= n <= self.span[1]

    def with_(self, **changes) -> "ChainComplex":
        return replace(self, **changes)

    def chain_bounds(self) -> tuple[int | None, int | None]:
        """Degree bounds read off the chains themselves (complete data only)."""
        if not self.is_complete:
            return None, None
        s = self.support
        return (0, 0) if s is None else s


# ---------------------------------------------------------------------------
# homology tables

CERTIFIED = "certified"
OBSERVED_STABLE = "observed-stable"
UNSTABLE = "unstable"
EXACT = "exact"
EDGE = "edge"


@dataclass(frozen=True)
class HomologyEntry:
    degree: int
    group: HomologyGroup
    flag: str = EXACT
    note: str = ""
    growth: tuple = ()

    @property
    def free_rank(self) -> int:
        return self.group.free_rank

    @property
    def torsion(self) -> tuple:
        return self.group.torsion


@dataclass
class HomologyTable:
    ring: CoefficientRing
    entries: dict = field(default_factory=dict)
    audit: list = field(default_factory=list)
    title: str = ""

    def __getitem__(self, n) -> HomologyEntry:
        return self.entries[n]

    def __contains__(self, n):
        return n in self.entries

    def __iter__(self):
        return iter(sorted(self.entries))

    def degrees(self) -> list[int]:
        return sorted(self.entries)

    def rank(self, n: int) -> int:
        e = self.entries.get(n)
        return 0 if e is None else e.group.free_rank

    def torsion(self, n: int) -> tuple:
        e = self.entries.get(n)
        return () if e is None else e.group.torsion

    def group(self, n: int) -> HomologyGroup:
        e = self.entries.get(n)
        return HomologyGroup() if e is None else e.group

    def flag(self, n: int) -> str:
        return self.entries[n].flag

    def nonzero_degrees(self) -> list[int]:
        return [n for n in self if not self.entries[n].group.is_zero]

    def as_dict(self) -> dict:
        return {n: (e.group.free_rank, e.group.torsion) for n, e in sorted(self.entries.items())}


def homology(C: ChainComplex, w, workers: int = 1) -> HomologyTable:
    """Per-degree homology of ``C`` over the window ``w``.

    Degrees whose neighbours fall outside ``C.span`` are computed from the
    available data and flagged ``edge``.
    """
    w = as_window(w)
    for n in w:
        if not C.covers(n):
            raise WindowError(f"degree {n} is outside the data span {C.span}")

    def one(n):
        grp = homology_group(C.d(n + 1), C.d(n), C.ring)
        if C.covers(n - 1) and C.covers(n + 1):
            return HomologyEntry(n, grp, EXACT)
        return HomologyEntry(n, grp, EDGE, note=f"adjacent data missing outside span {C.span}")

    degrees = list(w)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, degrees))
    else:
        results = [one(n) for n in degrees]
    return HomologyTable(C.ring, {e.degree: e for e in results})


def check_certificates(C: ChainComplex, w=None) -> list[int]:
    """Degrees in which the homology contradicts ``conn_lo`` / ``conn_hi``."""
    if w is None:
        s = C.support if C.is_complete else C.span
        if s is None:
            return []
        w = Window(s[0], s[1])
    w = as_window(w)
    bad = []
    tab = homology(C, w)
    for n in tab:
        if tab[n].group.is_zero:
            continue
        if (C.conn_lo is not None and n < C.conn_lo) or (C.conn_hi is not None and n > C.conn_hi):
            bad.append(n)
    return bad


# ---------------------------------------------------------------------------
# connectivity bookkeeping


@dataclass(frozen=True)
class BoundsQuery:
    """Input to :func:`predict_bounds`.

    ``op`` is ``"dual"`` (one input) or ``"tensor"`` (two or more inputs);
    each input is a ``(connective, coconnective)`` pair, either may be None.
    """

    op: str
    inputs: tuple
    global_dimension: int = 0


def predict_bounds(query: BoundsQuery) -> tuple[int | None, int | None]:
    """(connective, coconnective) bounds for a dual or tensor product.

    dual:   n-connective -> (-n)-coconnective;
            n-coconnective -> -(n+d)-connective.
    tensor: m-, n-connective -> (m+n)-connective;
            m-, n-coconnective -> (m+n+d)-coconnective.
    """
    d = query.global_dimension
    if query.op == "dual":
        (lo, hi), = query.inputs
        if lo is None and hi is None:
            raise CertificateError("dual: no connectivity certificate on the input")
        return (None if hi is None else -(hi + d), None if lo is None else -lo)
    if query.op == "tensor":
        los = [lo for lo, _ in query.inputs]
        his = [hi for _, hi in query.inputs]
        new_lo = None if any(x is None for x in los) else sum(los)
        new_hi = None
        if not any(x is None for x in his):
            # each additional factor can add up to d through Tor
            new_hi = sum(his) + d * (len(his) - 1)
        if new_lo is None and new_hi is None:
            raise CertificateError("tensor: certificates missing on some input")
        return new_lo, new_hi
    raise ValueError(f"unknown operation {query.op!r}")


def _bounds_or_none(query):
    try:
        return predict_bounds(query)
    except CertificateError:
        return None, None


# ---------------------------------------------------------------------------
# constructions


def _combine_limit(*cs):
    kinds = {c.limit for c in cs if c.limit}
    if INFINITE_RANK in kinds:
        return INFINITE_RANK
    return UNBOUNDED_DEGREES if kinds else None


def tensor_blocks(C: ChainComplex, D: ChainComplex, n: int) -> list[tuple[int, int, int]]:
    """Blocks (i, j, offset) making up (C⊗D)_n, in basis order."""
    out = []
    off = 0
    for i in sorted(C.ranks):
        j = n - i
        if D.rank(j):
            out.append((i, j, off))
            off += C.rank(i) * D.rank(j)
    return out


def tensor(C: ChainComplex, D: ChainComplex, w=None) -> ChainComplex:
    """C ⊗ D restricted to the degrees of ``w`` (all degrees if None)."""
    if C.ring != D.ring:
        raise RingError(f"cannot tensor complexes over {C.ring} and {D.ring}")
    ring = C.ring
    w = as_window(w)
    full = None
    if C.support and D.support:
        full = Window(C.support[0] + D.support[0], C.support[1] + D.support[1])
    if w is None:
        if not (C.is_complete and D.is_complete):
            raise WindowError("tensor of windowed complexes needs an explicit window")
        degrees = list(full) if full else []
        span = None
    else:
        degrees = list(w)
        covered = full is None or (w.lo <= full.lo and full.hi <= w.hi)
        span = None if (covered and C.is_complete and D.is_complete) else (w.lo, w.hi)

    ranks, labels = {}, {}
    blocks = {}
    for n in degrees:
        bl = tensor_blocks(C, D, n)
        if not bl:
            continue
        blocks[n] = bl
        ranks[n] = sum(C.rank(i) * D.rank(j) for i, j, _ in bl)
        labels[n] = tuple(f"{C.module.label(i, a)}⊗{D.module.label(j, b)}"
                          for i, j, _ in bl for a in range(C.rank(i)) for b in range(D.rank(j)))

    diffs = {}
    for n in degrees:
        if n not in blocks or (n - 1) not in blocks:
            continue
        target = {(i, j): off for i, j, off in blocks[n - 1]}
        ent = {}
        for i, j, off in blocks[n]:
            rD = D.rank(j)
            if (i - 1, j) in target:
                toff = target[(i - 1, j)]
                for (a2, a), v in C.d(i).entries.items():
                    for b in range(rD):
                        ent[(toff + a2 * rD + b, off + a * rD + b)] = v
            if (i, j - 1) in target:
                toff = target[(i, j - 1)]
                rD2 = D.rank(j - 1)
                sign = -1 if i % 2 else 1
                for (b2, b), v in D.d(j).entries.items():
                    for a in range(C.rank(i)):
                        key = (toff + a * rD2 + b2, off + a * rD + b)
                        ent[key] = ent.get(key, 0) + sign * v
        diffs[n] = MatrixExact(ranks[n - 1], ranks[n], ent, ring)

    lo, hi = _bounds_or_none(BoundsQuery(
        "tensor", ((C.conn_lo, C.conn_hi), (D.conn_lo, D.conn_hi)), ring.global_dimension))
    return ChainComplex(GradedModule(ring, ranks, labels), diffs, lo, hi, span,
                        _combine_limit(C, D))


def tensor_power(C: ChainComplex, n: int, w=None) -> ChainComplex:
    """C^{⊗n}; the unit complex for n = 0."""
    if n == 0:
        return ChainComplex.unit(C.ring)
    w = as_window(w)
    out = C
    for m in range(2, n + 1):
        step = w if m == n else None
        if step is None and not C.is_complete:
            lo, hi = C.span
            step = Window(m * lo, m * hi)
        out = tensor(out, C, step)
    return out


def dual_label(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def dual(C: ChainComplex, w=None) -> ChainComplex:
    """Linear dual C^∨ = Hom(C, R), optionally restricted to the window ``w``."""
    w = as_window(w)
    if w is not None and not C.is_complete:
        for n in w.reflect():
            if not C.covers(n):
                raise WindowError(f"reflected degree {n} not covered by span {C.span}")
    ring = C.ring
    ranks = {-n: r for n, r in C.ranks.items() if w is None or -n in w}
    labels = None
    if C.module.labels is not None:
        labels = {-n: tuple(dual_label(x) for x in C.module.labels[n]) for n in C.ranks if -n in ranks}
    diffs = {}
    for i in ranks:
        if i - 1 not in ranks:
            continue
        sign = 1 if i % 2 else -1  # (-1)^{i+1}
        diffs[i] = C.d(1 - i).T.scale(sign)
    lo, hi = _bounds_or_none(BoundsQuery("dual", ((C.conn_lo, C.conn_hi),), ring.global_dimension))
    span = None if C.span is None else (-C.span[1], -C.span[0])
    if w is not None:
        span = (w.lo, w.hi) if span is None else (max(span[0], w.lo), min(span[1], w.hi))
        if C.is_complete and C.support and w.lo <= -C.support[1] and -C.support[0] <= w.hi:
            span = None
    return ChainComplex(GradedModule(ring, ranks, labels), diffs, lo, hi, span, C.limit)


def shift(C: ChainComplex, k: int) -> ChainComplex:
    """Σ^k C: degree n moves to n+k, differential multiplied by (-1)^k."""
    sign = -1 if k % 2 else 1
    ranks = {n + k: r for n, r in C.ranks.items()}
    labels = None
    if C.module.labels is not None:
        labels = {n + k: v for n, v in C.module.labels.items()}
    diffs = {n + k: d.scale(sign) for n, d in C.diffs.items()}
    span = None if C.span is None else (C.span[0] + k, C.span[1] + k)
    return ChainComplex(GradedModule(C.ring, ranks, labels), diffs,
                        None if C.conn_lo is None else C.conn_lo + k,
                        None if C.conn_hi is None else C.conn_hi + k, span, C.limit)


def _restrict(C: ChainComplex, keep) -> ChainComplex:
    ranks = {n: r for n, r in C.ranks.items() if keep(n)}
    labels = None
    if C.module.labels is not None:
        labels = {n: v for n, v in C.module.labels.items() if n in ranks}
    diffs = {n: d for n, d in C.diffs.items() if n in ranks and n - 1 in ranks}
    return ChainComplex(GradedModule(C.ring, ranks, labels), diffs, span=C.span, limit=C.limit)


def truncate_connective(C: ChainComplex, n: int) -> ChainComplex:
    """Good truncation τ_{≥n}: C_k for k > n, Z_n = ker d_n in degree n."""
    if not (C.covers(n) and C.covers(n - 1) and C.covers(n + 1)):
        raise WindowError(f"truncation at {n} needs degrees {n - 1}..{n + 1}")
    K = kernel_basis(C.d(n))
    top = solve_in_span(K, C.d(n + 1))
    ranks = {k: r for k, r in C.ranks.items() if k > n}
    if K.cols:
        ranks[n] = K.cols
    labels = None
    if C.module.labels is not None:
        labels = {k: v for k, v in C.module.labels.items() if k > n}
        if K.cols:
            labels[n] = tuple(f"z{n}_{i}" for i in range(K.cols))
    diffs = {k: d for k, d in C.diffs.items() if k > n + 1}
    diffs[n + 1] = top
    span = None if C.span is None else (C.span[0], C.span[1])
    out = ChainComplex(GradedModule(C.ring, ranks, labels), diffs, span=span, limit=C.limit)
    lo = n if C.conn_lo is None else max(n, C.conn_lo)
    return out.with_(conn_lo=lo, conn_hi=C.conn_hi)


def truncate_coconnective(C: ChainComplex, n: int) -> ChainComplex:
    """Good truncation τ_{≤n}.

    Degrees ≤ n are kept; degree n+1 becomes C_{n+1}/ker d_{n+1}, which is
    free (the kernel is saturated), so d_{n+1} descends injectively and
    H_n is unchanged while everything above vanishes.
    """
    if not (C.covers(n) and C.covers(n + 1)):
        raise WindowError(f"truncation at {n} needs degrees {n}..{n + 1}")
    comp, _ = image_coordinates(C.d(n + 1))
    ranks = {k: r for k, r in C.ranks.items() if k <= n}
    if comp.cols:
        ranks[n + 1] = comp.cols
    labels = None
    if C.module.labels is not None:
        labels = {k: v for k, v in C.module.labels.items() if k <= n}
        if comp.cols:
            labels[n + 1] = tuple(f"q{n + 1}_{i}" for i in range(comp.cols))
    diffs = {k: d for k, d in C.diffs.items() if k <= n}
    diffs[n + 1] = C.d(n + 1) @ comp
    out = ChainComplex(GradedModule(C.ring, ranks, labels), diffs, span=C.span, limit=C.limit)
    hi = n if C.conn_hi is None else min(n, C.conn_hi)
    return out.with_(conn_lo=C.conn_lo, conn_hi=hi)


def direct_sum(parts: Iterable[ChainComplex]) -> ChainComplex:
    parts = list(parts)
    ring = parts[0].ring
    ranks, labels, offsets = {}, {}, []
    for C in parts:
        off = {}
        for n, r in C.ranks.items():
            off[n] = ranks.get(n, 0)
            ranks[n] = ranks.get(n, 0) + r
            labels.setdefault(n, [])
            labels[n] += [C.module.label(n, i) for i in range(r)]
        offsets.append(off)
    diffs = {}
    for C, off in zip(parts, offsets):
        for n, d in C.diffs.items():
            ent = diffs.setdefault(n, {})
            for (i, j), v in d.entries.items():
                ent[(off[n - 1] + i, off[n] + j)] = v
    mats = {n: MatrixExact(ranks.get(n - 1, 0), ranks[n], e, ring) for n, e in diffs.items()}
    return ChainComplex(GradedModule(ring, ranks, labels), mats)


def tensor_basis(C: ChainComplex, n: int, k: int) -> list[tuple]:
    """Basis of (C^{⊗n})_k as tuples ((degree, index), ...), in the order
    used by ``tensor_power``."""
    if n == 0:
        return [()] if k == 0 else []
    out = []
    for i in sorted(_power_degrees(C, n - 1)):
        j = k - i
        if not C.rank(j):
            continue
        for left in tensor_basis(C, n - 1, i):
            out.extend(left + ((j, b),) for b in range(C.rank(j)))
    return out


def _power_degrees(C: ChainComplex, n: int) -> set:
    degs = {0}
    for _ in range(n):
        degs = {a + b for a in degs for b in C.ranks}
    return degs
