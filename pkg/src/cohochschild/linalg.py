"""Exact linear algebra over prime fields GF(p) and the integers.

Matrices are stored sparsely as ``{(row, col): value}`` with zero entries
absent.  Elimination routines densify internally: GF(p) work runs on numpy
``int64`` arrays (p is small, so products never overflow), integer work runs
on Python ints so that entries can grow without bound.

Pivot choice is always the lowest-index admissible entry, which makes every
basis returned here a deterministic function of the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


class RingError(ValueError):
    pass


class CompositionError(ValueError):
    """Raised when two maps cannot be composed or do not compose to zero."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class CoefficientRing:
    """GF(p) (``kind='prime_field'``) or Z (``kind='integers'``)."""

    kind: str
    p: int | None = None

    def __post_init__(self):
        if self.kind == "prime_field":
            if self.p is None or not is_prime(self.p):
                raise RingError(f"GF(p) needs a prime p, got {self.p!r}")
        elif self.kind == "integers":
            if self.p is not None:
                raise RingError("the integers take no characteristic")
        else:
            raise RingError(f"unknown ring kind {self.kind!r}")

    @classmethod
    def gf(cls, p: int) -> "CoefficientRing":
        return cls("prime_field", p)

    @classmethod
    def integers(cls) -> "CoefficientRing":
        return cls("integers")

    @classmethod
    def parse(cls, text: str) -> "CoefficientRing":
        """Parse ``gfp:3``, ``gf3``, ``z`` or ``integers``."""
        t = text.strip().lower()
        if t in ("z", "zz", "integers", "int"):
            return cls.integers()
        for prefix in ("gfp:", "gf:", "gf", "fp:", "f"):
            if t.startswith(prefix):
                try:
                    return cls.gf(int(t[len(prefix):]))
                except ValueError:
                    break
        raise RingError(f"cannot parse ring {text!r}")

    @property
    def is_field(self) -> bool:
        return self.kind == "prime_field"

    @property
    def global_dimension(self) -> int:
        return 0 if self.is_field else 1

    def reduce(self, x: int) -> int:
        return x % self.p if self.is_field else x

    def is_unit(self, x: int) -> bool:
        x = self.reduce(x)
        return x != 0 if self.is_field else x in (1, -1)

    def inv(self, x: int) -> int:
        if not self.is_unit(x):
            raise ZeroDivisionError(f"{x} is not invertible in {self}")
        return pow(x, -1, self.p) if self.is_field else x

    def to_json(self) -> dict:
        if self.is_field:
            return {"kind": "prime_field", "p": self.p}
        return {"kind": "integers"}

    def __str__(self):
        return f"GF({self.p})" if self.is_field else "Z"


@dataclass(frozen=True, eq=False)
class MatrixExact:
    """Sparse matrix over a :class:`CoefficientRing`."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)
    ring: CoefficientRing = field(default_factory=CoefficientRing.integers)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("matrix dimensions must be non-negative")
        clean = {}
        for (i, j), v in self.entries.items():
            if not (0 <= i < self.rows and 0 <= j < self.cols):
                raise IndexError(f"entry ({i}, {j}) outside {self.rows}x{self.cols}")
            v = self.ring.reduce(int(v))
            if v:
                clean[(i, j)] = v
        object.__setattr__(self, "entries", clean)

    # construction -------------------------------------------------------

    @classmethod
    def zero(cls, rows, cols, ring):
        return cls(rows, cols, {}, ring)

    @classmethod
    def identity(cls, n, ring):
        return cls(n, n, {(i, i): 1 for i in range(n)}, ring)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ring, cols: int | None = None):
        nr = len(rows)
        nc = cols if cols is not None else (len(rows[0]) if nr else 0)
        ent = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(nr, nc, ent, ring)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], ring, rows: int):
        ent = {(i, j): v for j, c in enumerate(columns) for i, v in enumerate(c) if v}
        return cls(rows, len(columns), ent, ring)

    # views ----------------------------------------------------------------

    @property
    def shape(self):
        return (self.rows, self.cols)

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def column(self, j: int) -> list[int]:
        col = [0] * self.rows
        for (i, jj), v in self.entries.items():
            if jj == j:
                col[i] = v
        return col

    def columns(self) -> list[list[int]]:
        cols = [[0] * self.rows for _ in range(self.cols)]
        for (i, j), v in self.entries.items():
            cols[j][i] = v
        return cols

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if not isinstance(other, MatrixExact):
            return NotImplemented
        return (self.shape == other.shape and self.ring == other.ring
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.shape, self.ring, frozenset(self.entries.items())))

    def __repr__(self):
        return f"MatrixExact({self.rows}x{self.cols} over {self.ring}, {self.to_rows()})"

    # arithmetic -----------------------------------------------------------

    def transpose(self) -> "MatrixExact":
        return MatrixExact(self.cols, self.rows,
                           {(j, i): v for (i, j), v in self.entries.items()}, self.ring)

    @property
    def T(self):
        return self.transpose()

    def scale(self, c: int) -> "MatrixExact":
        return MatrixExact(self.rows, self.cols,
                           {k: c * v for k, v in self.entries.items()}, self.ring)

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other: "MatrixExact") -> "MatrixExact":
        if self.shape != other.shape or self.ring != other.ring:
            raise CompositionError(f"cannot add {self.shape} and {other.shape}")
        ent = dict(self.entries)
        for k, v in other.entries.items():
            ent[k] = ent.get(k, 0) + v
        return MatrixExact(self.rows, self.cols, ent, self.ring)

    def __sub__(self, other):
        return self + (-other)

    def __matmul__(self, other: "MatrixExact") -> "MatrixExact":
        if self.cols != other.rows:
            raise CompositionError(f"cannot compose {self.shape} after {other.shape}")
        if self.ring != other.ring:
            raise RingError("ring mismatch in product")
        by_row: dict[int, list] = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        ent: dict = {}
        for (i, k), a in self.entries.items():
            for j, b in by_row.get(k, ()):
                ent[(i, j)] = ent.get((i, j), 0) + a * b
        return MatrixExact(self.rows, other.cols, ent, self.ring)

    def apply(self, vec: Sequence[int]) -> list[int]:
        out = [0] * self.rows
        for (i, j), v in self.entries.items():
            out[i] += v * vec[j]
        return [self.ring.reduce(x) for x in out]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "MatrixExact":
        rpos = {r: a for a, r in enumerate(rows)}
        cpos = {c: b for b, c in enumerate(cols)}
        ent = {(rpos[i], cpos[j]): v for (i, j), v in self.entries.items()
               if i in rpos and j in cpos}
        return MatrixExact(len(rows), len(cols), ent, self.ring)


def hstack(mats: Sequence[MatrixExact], rows: int, ring) -> MatrixExact:
    ent = {}
    off = 0
    for m in mats:
        for (i, j), v in m.entries.items():
            ent[(i, j + off)] = v
        off += m.cols
    return MatrixExact(rows, off, ent, ring)


# ---------------------------------------------------------------------------
# GF(p)


def _require_field(M: MatrixExact):
    if not M.ring.is_field:
        raise RingError(f"operation needs a prime field, got {M.ring}")


def _rref_mod_p(A: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p; returns (R, pivot columns)."""
    A = A.copy() % p
    nr, nc = A.shape
    pivots = []
    r = 0
    for c in range(nc):
        if r == nr:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), -1, p)) % p
        col = A[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            A[nzr] = (A[nzr] - np.outer(col[nzr], A[r])) % p
        pivots.append(c)
        r += 1
    return A, pivots


def _dense(M: MatrixExact) -> np.ndarray:
    A = np.zeros((M.rows, M.cols), dtype=np.int64)
    for (i, j), v in M.entries.items():
        A[i, j] = v
    return A


def rank_field(M: MatrixExact) -> int:
    """Rank of ``M`` over GF(p)."""
    _require_field(M)
    if M.is_zero():
        return 0
    # eliminate along the shorter side
    A = _dense(M)
    if A.shape[0] > A.shape[1]:
        A = A.T
    return len(_rref_mod_p(A, M.ring.p)[1])


# ---------------------------------------------------------------------------
# Z


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return x0, y0, a


@dataclass
class _ColumnEchelon:
    """``M @ V == E`` with ``V`` unimodular.

    The first ``rank`` columns of ``E`` are independent; the rest are zero.
    """
    E: list[list[int]]
    V: list[list[int]]
    rank: int


def _int_column_echelon(rows: list[list[int]], ncols: int) -> _ColumnEchelon:
    m, n = len(rows), ncols
    E = [list(r) for r in rows]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(j1, j2, a, b, c, d):
        # columns (j1, j2) <- (a*c1 + c*c2, b*c1 + d*c2), det = ad - bc = 1
        for R in (E, V):
            for row in R:
                x, y = row[j1], row[j2]
                row[j1] = a * x + c * y
                row[j2] = b * x + d * y

    def swap(j1, j2):
        for R in (E, V):
            for row in R:
                row[j1], row[j2] = row[j2], row[j1]

    r = 0
    for i in range(m):
        if r == n:
            break
        for j in range(r + 1, n):
            b = E[i][j]
            if b == 0:
                continue
            a = E[i][r]
            if a == 0:
                swap(r, j)
                continue
            if b % a == 0:
                col_op(r, j, 1, -(b // a), 0, 1)
                continue
            x, y, g = _xgcd(a, b)
            # [[x, -b/g], [y, a/g]] has determinant 1
            col_op(r, j, x, -(b // g), y, a // g)
        if E[i][r] != 0:
            if E[i][r] < 0:
                for R in (E, V):
                    for row in R:
                        row[r] = -row[r]
            r += 1
    return _ColumnEchelon(E, V, r)


def _rank_bareiss(rows: list[list[int]]) -> int:
    """Rank over Q by fraction-free elimination; intermediate entries are minors."""
    A = [list(r) for r in rows if any(r)]
    if not A:
        return 0
    m, n = len(A), len(A[0])
    prev, r = 1, 0
    for c in range(n):
        piv = next((i for i in range(r, m) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        p = A[r][c]
        for i in range(r + 1, m):
            a = A[i][c]
            A[i] = [(p * x - a * y) // prev for x, y in zip(A[i], A[r])]
        prev, r = p, r + 1
        if r == m:
            break
    return r


def rank(M: MatrixExact) -> int:
    """Rank over the fraction field (GF(p) or Q)."""
    if M.ring.is_field:
        return rank_field(M)
    if M.is_zero():
        return 0
    return _rank_bareiss(M.to_rows())


def kernel_basis(M: MatrixExact) -> MatrixExact:
    """Columns span ker M.  Over Z the basis is saturated (primitive)."""
    ring = M.ring
    n = M.cols
    if ring.is_field:
        if M.is_zero():
            return MatrixExact.identity(n, ring)
        R, piv = _rref_mod_p(_dense(M), ring.p)
        free = [c for c in range(n) if c not in set(piv)]
        cols = []
        for f in free:
            v = [0] * n
            v[f] = 1
            for r, pc in enumerate(piv):
                v[pc] = int(-R[r, f]) % ring.p
            cols.append(v)
        return MatrixExact.from_columns(cols, ring, n)
    ech = _int_column_echelon(M.to_rows(), n)
    cols = [[ech.V[i][j] for i in range(n)] for j in range(ech.rank, n)]
    return MatrixExact.from_columns(cols, ring, n)


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SmithForm:
    invariant_factors: list[int]
    U: MatrixExact | None = None
    V: MatrixExact | None = None


def smith_normal_form(M: MatrixExact, transforms: bool = False) -> SmithForm:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    With ``transforms=True`` also returns unimodular U, V with U @ M @ V
    diagonal.  Pivots are chosen by minimal absolute value to keep entries
    small.
    """
    if M.ring.is_field:
        raise RingError("smith_normal_form works over the integers")
    ring = M.ring
    m, n = M.shape
    A = M.to_rows()
    U = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    V = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def row_swap(i, j):
        A[i], A[j] = A[j], A[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def col_swap(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def row_add(dst, src, q):  # row dst += q * row src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        if U is not None:
            U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def col_add(dst, src, q):
        for row in A:
            row[dst] += q * row[src]
        if V is not None:
            for row in V:
                row[dst] += q * row[src]

    def row_neg(i):
        A[i] = [-a for a in A[i]]
        if U is not None:
            U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        row_swap(t, pi)
        col_swap(t, pj)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    row_add(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    col_add(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        done = False
            if not done:
                # a remainder is now smaller than the pivot: move it in
                cand = [(abs(A[i][t]), i, t) for i in range(t + 1, m) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t + 1, n) if A[t][j]]
                _, ci, cj = min(cand)
                if ci != t:
                    row_swap(t, ci)
                else:
                    col_swap(t, cj)
                continue
            # divisibility of the remaining block by the pivot
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if A[i][j] % A[t][t]), None)
            if bad is None:
                break
            row_add(t, bad[0], 1)
        if A[t][t] < 0:
            row_neg(t)
        t += 1

    factors = [A[i][i] for i in range(min(m, n)) if A[i][i]]
    if not transforms:
        return SmithForm(factors)
    return SmithForm(factors, MatrixExact.from_rows(U, ring, m), MatrixExact.from_rows(V, ring, n))


def invariant_factors(M: MatrixExact) -> list[int]:
    return smith_normal_form(M).invariant_factors


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyGroup:
    """Z^free_rank ⊕ ⊕ Z/t_i (or GF(p)^free_rank)."""

    free_rank: int = 0
    torsion: tuple = ()

    def __post_init__(self):
        t = tuple(sorted(int(x) for x in self.torsion))
        if any(x <= 1 for x in t):
            raise ValueError("torsion factors must exceed 1")
        if any(b % a for a, b in zip(t, t[1:])):
            raise ValueError(f"torsion {t} is not a divisibility chain")
        object.__setattr__(self, "torsion", t)

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("R" if self.free_rank == 1 else f"R^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"


def sum_groups(groups) -> HomologyGroup:
    """Direct sum, with the torsion renormalized to invariant factors."""
    groups = list(groups)
    orders = [t for g in groups for t in g.torsion]
    free = sum(g.free_rank for g in groups)
    if not orders:
        return HomologyGroup(free)
    D = MatrixExact(len(orders), len(orders), {(i, i): t for i, t in enumerate(orders)},
                    CoefficientRing.integers())
    return HomologyGroup(free, tuple(t for t in invariant_factors(D) if t > 1))


def homology_group(d_in: MatrixExact, d_out: MatrixExact, ring: CoefficientRing) -> HomologyGroup:
    """ker(d_out) / im(d_in) for a composable pair V_in -> V -> V_out."""
    if d_in.rows != d_out.cols:
        raise CompositionError(
            f"d_in has {d_in.rows} rows but d_out has {d_out.cols} columns")
    if d_in.ring != ring or d_out.ring != ring:
        raise RingError("matrices are not over the stated ring")
    if not (d_out @ d_in).is_zero():
        raise CompositionError("d_out @ d_in != 0")
    n = d_out.cols
    if ring.is_field:
        nullity = n - rank_field(d_out)
        return HomologyGroup(nullity - rank_field(d_in))
    k = n - rank(d_out)
    if k == 0:
        return HomologyGroup()
    # ker d_out is saturated, so the torsion of ker/im equals the torsion of
    # coker d_in, read off the invariant factors of d_in
    inv = invariant_factors(d_in) if not d_in.is_zero() else []
    return HomologyGroup(k - len(inv), tuple(d for d in inv if d > 1))


def solve_in_span(basis: MatrixExact, target: MatrixExact) -> MatrixExact:
    """X with ``basis @ X == target``.  Over Z the basis columns must be saturated."""
    ring = basis.ring
    if ring.is_field:
        A = np.hstack([_dense(basis), _dense(target)])
        R, piv = _rref_mod_p(A, ring.p)
        k = basis.cols
        if any(c >= k for c in piv):
            raise ValueError("target not in the span of basis")
        rows = [[0] * target.cols for _ in range(k)]
        for r, c in enumerate(piv):
            for j in range(target.cols):
                rows[c][j] = int(R[r, k + j])
        return MatrixExact.from_rows(rows, ring, target.cols)
    X = _left_inverse_saturated(basis) @ target
    if not basis @ X == target:
        raise ValueError("target not in the span of basis")
    return X


def _left_inverse_saturated(B: MatrixExact) -> MatrixExact:
    """L with L @ B == I for a saturated integer basis B (n x k)."""
    n, k = B.shape
    # column echelon of B^T: B^T @ V = E with E = [H | 0], H k x k lower triangular;
    # saturated B means H is unimodular, so (H^{-1} (V[:, :k])^T) is a left inverse.
    ech = _int_column_echelon(B.T.to_rows(), n)
    if ech.rank != k:
        raise ValueError("basis columns are dependent")
    H = [[ech.E[i][j] for j in range(k)] for i in range(k)]
    Hinv = _unimodular_lower_inverse(H)
    Vk = MatrixExact.from_rows([[ech.V[i][j] for j in range(k)] for i in range(n)], B.ring, k)
    # B^T V_k = H  =>  (V_k H^{-1})^T B = I
    return (Vk @ MatrixExact.from_rows(Hinv, B.ring, k)).T


def _unimodular_lower_inverse(H: list[list[int]]) -> list[list[int]]:
    """Exact inverse of a square integer matrix in column echelon form with unit pivots."""
    k = len(H)
    aug = [list(H[i]) + [int(i == j) for j in range(k)] for i in range(k)]
    for c in range(k):
        r = next((i for i in range(c, k) if aug[i][c] in (1, -1)), None)
        if r is None:
            raise ValueError("basis is not saturated")
        aug[c], aug[r] = aug[r], aug[c]
        if aug[c][c] == -1:
            aug[c] = [-x for x in aug[c]]
        for i in range(k):
            if i != c and aug[i][c]:
                q = aug[i][c]
                aug[i] = [a - q * b for a, b in zip(aug[i], aug[c])]
    return [row[k:] for row in aug]


def matrix_is_invertible(M: MatrixExact) -> bool:
    """Square and invertible over its ring (unimodular over Z)."""
    if M.rows != M.cols:
        return False
    if M.ring.is_field:
        return rank_field(M) == M.rows
    inv = invariant_factors(M)
    return len(inv) == M.rows and all(d == 1 for d in inv)


def image_coordinates(M: MatrixExact) -> tuple[MatrixExact, MatrixExact]:
    """Split of the domain of M as (basis of a complement of ker, basis of ker).

    Over Z both bases come from one unimodular change of basis, so
    together they form a basis of the domain.
    """
    ring = M.ring
    n = M.cols
    if ring.is_field:
        K = kernel_basis(M)
        # extend K to a basis: add standard vectors not in the span
        chosen = K.columns()
        comp = []
        for j in range(n):
            e = [int(i == j) for i in range(n)]
            if rank_field(MatrixExact.from_columns(chosen + comp + [e], ring, n)) > len(chosen) + len(comp):
                comp.append(e)
        return MatrixExact.from_columns(comp, ring, n), K
    ech = _int_column_echelon(M.to_rows(), n)
    comp = [[ech.V[i][j] for i in range(n)] for j in range(ech.rank)]
    ker = [[ech.V[i][j] for i in range(n)] for j in range(ech.rank, n)]
    return MatrixExact.from_columns(comp, ring, n), MatrixExact.from_columns(ker, ring, n)


def vectors_span(vectors: Iterable[Sequence[int]], ring: CoefficientRing, dim: int) -> MatrixExact:
    return MatrixExact.from_columns([list(v) for v in vectors], ring, dim)
