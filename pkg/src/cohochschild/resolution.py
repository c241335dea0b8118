"""Ext over an exterior algebra Λ(z) from an explicit periodic free resolution.

P_s is free of rank one on a generator g_s, ∂g_s = c_s z g_{s-1}; all maps
have degree 0, so |g_s| = |g_0| + s|z|.  A Λ-linear map f: P_s -> M of
degree j is determined by f(g_s) ∈ M_{|g_s|+j}, and

    (δf)(g_{s+1}) = f(∂g_{s+1}) = c_{s+1} (-1)^{j|z|} z·f(g_s).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .complexes import CERTIFIED, HomologyEntry, HomologyTable, as_window
from .linalg import CoefficientRing, MatrixExact, homology_group


class ResolutionError(ValueError):
    pass


def _sign(n):
    return -1 if n % 2 else 1


@dataclass(frozen=True, eq=False)
class LambdaModule:
    """A graded module over Λ(z): free ranks per degree and the z-action
    ``action[n]: M_n -> M_{n+|z|}``."""

    ring: CoefficientRing
    z_degree: int
    ranks: dict
    action: dict = field(default_factory=dict)

    def __post_init__(self):
        ranks = {int(n): int(r) for n, r in self.ranks.items() if r}
        object.__setattr__(self, "ranks", ranks)
        for n, M in self.action.items():
            if M.shape != (self.rank(n + self.z_degree), self.rank(n)):
                raise ResolutionError(f"z-action on degree {n} has shape {M.shape}")
            after = self.z(n + self.z_degree)
            if not (after @ M).is_zero():
                raise ResolutionError(f"z·z acts nontrivially on degree {n}")

    def rank(self, n) -> int:
        return self.ranks.get(n, 0)

    def z(self, n) -> MatrixExact:
        M = self.action.get(n)
        if M is None:
            return MatrixExact.zero(self.rank(n + self.z_degree), self.rank(n), self.ring)
        return M

    def shift(self, k: int) -> "LambdaModule":
        """Σ^k M (Ω = Σ^{-1}); the z-action picks up the sign (-1)^{k|z|}."""
        s = _sign(k * self.z_degree)
        return LambdaModule(self.ring, self.z_degree, {n + k: r for n, r in self.ranks.items()},
                            {n + k: M.scale(s) for n, M in self.action.items()})

    def direct_sum(self, other: "LambdaModule") -> "LambdaModule":
        ranks, action = {}, {}
        for n in set(self.ranks) | set(other.ranks):
            ranks[n] = self.rank(n) + other.rank(n)
        for n in ranks:
            a, b = self.z(n), other.z(n)
            ent = dict(a.entries)
            for (i, j), v in b.entries.items():
                ent[(a.rows + i, a.cols + j)] = v
            action[n] = MatrixExact(ranks.get(n + self.z_degree, 0), ranks[n], ent, self.ring)
        return LambdaModule(self.ring, self.z_degree, ranks, action)


def trivial_module(ring, z_degree=-1, degree=0) -> LambdaModule:
    """The ground ring in one degree with z acting by zero."""
    return LambdaModule(ring, z_degree, {degree: 1})


@dataclass(frozen=True)
class PeriodicResolution:
    """Generators g_0, ..., g_S in degrees ``shifts`` with ∂g_s = multipliers[s] z g_{s-1}."""

    ring: CoefficientRing
    z_degree: int
    shifts: tuple
    multipliers: tuple
    z_squared: int = 0   # 0 for an exterior algebra

    def __post_init__(self):
        if len(self.shifts) != len(self.multipliers):
            raise ResolutionError("one multiplier per generator is required (the first is unused)")
        for s in range(1, len(self.shifts)):
            if self.shifts[s] != self.shifts[s - 1] + self.z_degree:
                raise ResolutionError(f"∂g_{s} = c z g_{s - 1} has degree "
                                      f"{self.shifts[s - 1] + self.z_degree}, but |g_{s}| = {self.shifts[s]}")
        for s in range(2, len(self.shifts)):
            if self.ring.reduce(self.multipliers[s] * self.multipliers[s - 1] * self.z_squared):
                raise ResolutionError(f"∂∂g_{s} != 0")

    @property
    def length(self) -> int:
        return len(self.shifts) - 1


def periodic_resolution(ring, length: int, z_degree: int = -1) -> PeriodicResolution:
    """⋯ -> Ω²Λ -> ΩΛ -> Λ -> k: g_s in degree s|z|, every multiplier 1."""
    return PeriodicResolution(ring, z_degree, tuple(s * z_degree for s in range(length + 1)),
                              (1,) * (length + 1))


def hom_degree(res: PeriodicResolution, M: LambdaModule, s: int, j: int) -> int:
    """Rank of Hom_Λ(P_s, M)_j = M_{|g_s|+j}."""
    return M.rank(res.shifts[s] + j)


def _coboundary(res, M, s, j):
    """Hom_j(P_s, M) -> Hom_j(P_{s+1}, M)."""
    src = res.shifts[s] + j
    c = res.multipliers[s + 1] * _sign(j * res.z_degree)
    return M.z(src).scale(c)


def ext_from_resolution(res: PeriodicResolution, M: LambdaModule, w=None) -> HomologyTable:
    """Ext^s_j for s = 0..length-1, keyed by (s, j); zero groups are omitted.

    The top resolution degree is used only as the target of the last
    coboundary.  ``w`` restricts internal degrees j (default: all that occur).
    """
    if M.z_degree != res.z_degree:
        raise ResolutionError("module and resolution use different degrees for z")
    if M.ring != res.ring:
        raise ResolutionError("module and resolution are over different rings")
    w = as_window(w)
    tab = HomologyTable(res.ring, title="Ext_Λ")
    R = res.ring
    for s in range(res.length):
        js = sorted({n - res.shifts[s] for n in M.ranks})
        for j in js:
            if w is not None and j not in w:
                continue
            d_out = _coboundary(res, M, s, j)
            if s == 0:
                d_in = MatrixExact.zero(M.rank(res.shifts[0] + j), 0, R)
            else:
                d_in = _coboundary(res, M, s - 1, j)
            grp = homology_group(d_in, d_out, R)
            if not grp.is_zero:
                tab.entries[(s, j)] = HomologyEntry((s, j), grp, CERTIFIED,
                                                    f"Ext^{s} in internal degree {j}")
    tab.audit.append(f"periodic resolution of length {res.length}")
    return tab


def formality_obstructions(p: int, s_values=range(1, 5)) -> dict:
    """Hom_Λ(Ω^{s+2}Λ, Ω^s(k ⊕ Ωk))_0 over Λ_{F_p}(z_{-1}), for each s.

    Returns {s: rank}.  These groups hold the obstructions to formality.
    """
    R = CoefficientRing.gf(p)
    res = periodic_resolution(R, max(s_values) + 3)
    k = trivial_module(R)
    target = k.direct_sum(k.shift(-1))
    out = {}
    for s in s_values:
        out[s] = hom_degree(res, target.shift(-s), s + 2, 0)
    return out


def ext_trivial(p: int, length: int = 5) -> HomologyTable:
    """Ext_{Λ(z_{-1})}(F_p, F_p) through resolution degree ``length - 1``."""
    R = CoefficientRing.gf(p)
    return ext_from_resolution(periodic_resolution(R, length), trivial_module(R))

