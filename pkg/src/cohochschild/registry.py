"""Named example (co)algebras and complexes, plus random finite-type algebras."""

from __future__ import annotations

import random
from itertools import combinations

from .complexes import INFINITE_RANK, UNBOUNDED_DEGREES, ChainComplex, as_window
from .dg import DGAlgebra, DGCoalgebra, check_algebra_axioms
from .linalg import CoefficientRing, MatrixExact, matrix_is_invertible, solve_in_span


class RegistryError(KeyError):
    pass


def _ring(ring):
    if isinstance(ring, CoefficientRing):
        return ring
    if isinstance(ring, int):
        return CoefficientRing.gf(ring)
    return CoefficientRing.parse(ring)


def _gen_names(degrees, names):
    if names is not None:
        return list(names)
    if len(degrees) == 1:
        return ["z" if degrees[0] < 0 else "y"]
    return [f"x{i + 1}" for i in range(len(degrees))]


def _monomial_name(names, S):
    return "".join(names[i] for i in S) if S else "1"


def _exterior_sign(degrees, S, T):
    """Sign with x_S x_T = sign * x_{S∪T} (S, T disjoint sorted tuples)."""
    s = 0
    for a in S:
        for b in T:
            if b < a:
                s += degrees[a] * degrees[b]
    return -1 if s % 2 else 1


def _subsets(k):
    return [S for r in range(k + 1) for S in combinations(range(k), r)]


def exterior_algebra(ring, degrees, names=None, diff=None) -> DGAlgebra:
    """Λ(x_1, ..., x_k) with |x_i| = degrees[i]; x_i^2 = 0, graded commutative.

    ``diff`` optionally gives d on generators as {gen index: {monomial tuple: coeff}};
    it is extended as a derivation.
    """
    R = _ring(ring)
    degrees = list(degrees)
    gn = _gen_names(degrees, names)
    subsets = _subsets(len(degrees))
    idx = {S: i for i, S in enumerate(subsets)}
    mnames = [_monomial_name(gn, S) for S in subsets]
    mdeg = [sum(degrees[i] for i in S) for S in subsets]
    mult = {}
    for S in subsets:
        for T in subsets:
            if set(S) & set(T):
                continue
            U = tuple(sorted(S + T))
            mult[(idx[S], idx[T])] = {idx[U]: _exterior_sign(degrees, S, T)}
    label = f"Λ_{R}({', '.join(f'{n}_{d}' for n, d in zip(gn, degrees))})"
    A = DGAlgebra(R, mnames, mdeg, idx[()], {}, mult, label)
    if diff:
        A = _extend_derivation(A, {idx[(g,)]: {idx[tuple(m)]: c for m, c in out.items()}
                                   for g, out in diff.items()},
                               [(S, idx) for S in subsets])
    return A


def _extend_derivation(A: DGAlgebra, on_gens: dict, words) -> DGAlgebra:
    """d(g1 g2 ... gk) = sum_i (-1)^{|g1|+...+|g_{i-1}|} g1 ... d(gi) ... gk."""
    diff = {}
    for S, idx in words:
        if len(S) == 0:
            continue
        gens = [idx[(g,)] for g in S]
        total = {}
        for i, g in enumerate(gens):
            sign = -1 if sum(A.degrees[x] for x in gens[:i]) % 2 else 1
            term = {A.unit: 1}
            for j, h in enumerate(gens):
                term = A.mul_vec(term, on_gens.get(h, {}) if j == i else {h: 1})
            for k, v in term.items():
                total[k] = total.get(k, 0) + sign * v
        diff[idx[S]] = total
    return DGAlgebra(A.ring, A.names, A.degrees, A.unit, diff, A.mult, A.label)


def exterior_coalgebra(ring, degrees, names=None) -> DGCoalgebra:
    """Exterior coalgebra: Δ(x_S) = sum over splittings S = T ⊔ U of ±x_T⊗x_U,
    with the sign making x_T x_U = ±x_S in the exterior algebra."""
    R = _ring(ring)
    degrees = list(degrees)
    gn = _gen_names(degrees, names)
    subsets = _subsets(len(degrees))
    idx = {S: i for i, S in enumerate(subsets)}
    comult = {}
    for S in subsets:
        out = {}
        for T in _subsets(len(S)):
            left = tuple(S[i] for i in T)
            right = tuple(x for x in S if x not in left)
            out[(idx[left], idx[right])] = _exterior_sign(degrees, left, right)
        comult[idx[S]] = out
    label = f"Λ^c_{R}({', '.join(f'{n}_{d}' for n, d in zip(gn, degrees))})"
    return DGCoalgebra(R, [_monomial_name(gn, S) for S in subsets],
                       [sum(degrees[i] for i in S) for S in subsets],
                       {idx[()]: 1}, {}, comult, label)


def truncated_polynomial_algebra(ring, degree: int, n: int, name="x") -> DGAlgebra:
    """k[x]/(x^n) with |x| = degree (plain associative, zero differential)."""
    if n < 1:
        raise ValueError("truncation must be at least 1")
    R = _ring(ring)
    names = ["1"] + [name if i == 1 else f"{name}^{i}" for i in range(1, n)]
    mult = {(i, j): {i + j: 1} for i in range(n) for j in range(n) if i + j < n}
    return DGAlgebra(R, names, [i * degree for i in range(n)], 0, {}, mult,
                     f"{R}[{name}_{degree}]/({name}^{n})")


def koszul_model_Fp_over_Z(p: int) -> DGAlgebra:
    """Z·1 ⊕ Z·e with |e| = 1, de = p·1, e² = 0; its homology is F_p."""
    R = CoefficientRing.integers()
    return DGAlgebra.build(R, [("1", 0), ("e", 1)], "1", diff={"e": {"1": p}},
                           label=f"Koszul model of F_{p} over Z")


def dual_koszul_coalgebra(p: int) -> DGCoalgebra:
    """Linear dual of the Koszul model: u in degree 0, e in degree -1, du = -p·e."""
    R = CoefficientRing.integers()
    return DGCoalgebra.build(
        R, [("u", 0), ("e", -1)], {"u": 1}, diff={"u": {"e": -p}},
        comult={"u": {("u", "u"): 1}, "e": {("e", "u"): 1, ("u", "e"): 1}},
        label=f"dual Koszul coalgebra of F_{p} over Z")


def ground_ring(ring) -> DGAlgebra:
    R = _ring(ring)
    return DGAlgebra.build(R, [("1", 0)], "1", label=f"{R}")


def trivial_coalgebra(ring) -> DGCoalgebra:
    R = _ring(ring)
    return DGCoalgebra.build(R, [("u", 0)], {"u": 1}, comult={"u": {("u", "u"): 1}},
                             label=f"{R} (trivial coalgebra)")


def laurent_pattern_module(window, ring="gfp:2") -> ChainComplex:
    """Rank 1 in every degree of ``window``: a finite view of a Laurent pattern
    that continues in both directions forever."""
    w = as_window(window)
    R = _ring(ring)
    ranks = {n: 1 for n in w}
    labels = {n: (f"x^{n}",) for n in w}
    return ChainComplex.from_ranks(R, ranks, labels=labels, span=(w.lo, w.hi),
                                   limit=UNBOUNDED_DEGREES)


def finite_vector_space(m: int, ring="gfp:2") -> DGCoalgebra:
    """m grouplike points, the rank-m truncation of an infinite grouplike coalgebra.

    Basis f0 = g_0 and f_i = g_i - g_0, so that f0 is the coaugmentation:
    Δf0 = f0⊗f0 and Δf_i = f_i⊗f_i + f_i⊗f0 + f0⊗f_i.
    """
    if m < 1:
        raise ValueError("m must be positive")
    R = _ring(ring)
    names = ["f0"] + [f"f{i}" for i in range(1, m)]
    comult = {0: {(0, 0): 1}}
    for i in range(1, m):
        comult[i] = {(i, i): 1, (i, 0): 1, (0, i): 1}
    return DGCoalgebra(R, names, [0] * m, {0: 1}, {}, comult,
                       f"{R}^{m} grouplike (truncation)", limit=INFINITE_RANK)


# ---------------------------------------------------------------------------
# random algebras


def _random_invertible(n, p, rng):
    R = CoefficientRing.gf(p)
    while True:
        rows = [[rng.randrange(p) for _ in range(n)] for _ in range(n)]
        M = MatrixExact.from_rows(rows, R, n)
        if matrix_is_invertible(M):
            return M


def change_basis(A: DGAlgebra, P: dict) -> DGAlgebra:
    """Re-express A in the basis f_j = sum_i P[n][i, j] e_i (per degree n).

    The unit must be fixed by P.
    """
    R = A.ring
    n = len(A)
    # global change matrix and its inverse
    ent = {}
    for deg, ix in A.by_degree.items():
        M = P.get(deg, MatrixExact.identity(len(ix), R))
        for (i, j), v in M.entries.items():
            ent[(ix[i], ix[j])] = v
    G = MatrixExact(n, n, ent, R)
    if G.column(A.unit) != [int(i == A.unit) for i in range(n)]:
        raise ValueError("basis change must fix the unit")
    Ginv = solve_in_span(G, MatrixExact.identity(n, R))

    def to_new(vec):
        col = [vec.get(i, 0) for i in range(n)]
        return {i: c for i, c in enumerate(Ginv.apply(col)) if c}

    cols = [dict((i, c) for i, c in enumerate(G.column(j)) if c) for j in range(n)]
    diff = {j: to_new(A.d_vec(cols[j])) for j in range(n)}
    mult = {(a, b): to_new(A.mul_vec(cols[a], cols[b])) for a in range(n) for b in range(n)}
    names = [nm if j == A.unit else f"f{j}" for j, nm in enumerate(A.names)]
    return DGAlgebra(R, names, A.degrees, A.unit, diff, mult, A.label + " (rebased)")


def random_algebra(rng: random.Random, p: int | None = None, max_gens: int = 3) -> DGAlgebra:
    """A random finite-type DG algebra over GF(p), p in {2, 3, 5}.

    Exterior on up to ``max_gens`` generators (optionally with a Koszul
    differential dy = c x) or a truncated polynomial algebra, followed by a
    random degreewise change of basis fixing the unit.
    """
    p = p or rng.choice([2, 3, 5])
    R = CoefficientRing.gf(p)
    if rng.random() < 0.3:
        A = truncated_polynomial_algebra(R, rng.choice([-2, -1, 1, 2]), rng.randint(2, 4))
    else:
        k = rng.randint(1, max_gens)
        degrees = [rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(k)]
        diff = None
        if k >= 2 and rng.random() < 0.5:
            # dy = c x needs |x| even and |y| = |x| + 1 odd
            x = rng.choice([2, -2])
            degrees[0], degrees[1] = x, x + 1
            diff = {1: {(0,): rng.randrange(1, p)}}
        A = exterior_algebra(R, degrees, diff=diff)
    P = {}
    for deg, ix in A.by_degree.items():
        if deg == 0:
            # keep the unit; mix only the other degree-0 vectors among themselves
            others = [j for j, i in enumerate(ix) if i != A.unit]
            if len(ix) > 1:
                sub = _random_invertible(len(others), p, rng)
                ent = {(ix.index(A.unit), ix.index(A.unit)): 1}
                for (a, b), v in sub.entries.items():
                    ent[(others[a], others[b])] = v
                P[deg] = MatrixExact(len(ix), len(ix), ent, R)
        else:
            P[deg] = _random_invertible(len(ix), p, rng)
    B = change_basis(A, P)
    check_algebra_axioms(B).raise_if_failed()
    return B


REGISTRY_ALGEBRAS = {
    "exterior": exterior_algebra,
    "truncated-polynomial": truncated_polynomial_algebra,
    "koszul": koszul_model_Fp_over_Z,
    "ground": ground_ring,
}

REGISTRY_COALGEBRAS = {
    "exterior-coalgebra": exterior_coalgebra,
    "dual-koszul": dual_koszul_coalgebra,
    "trivial-coalgebra": trivial_coalgebra,
    "grouplike": finite_vector_space,
}


def example_registry(name: str, ring="gfp:2", p: int = 2, gen_degrees=(1,), truncation: int = 2):
    """Look up a named example; parameters not used by the example are ignored."""
    if name == "exterior":
        return exterior_algebra(ring, gen_degrees)
    if name == "exterior-coalgebra":
        return exterior_coalgebra(ring, gen_degrees)
    if name == "truncated-polynomial":
        return truncated_polynomial_algebra(ring, gen_degrees[0], truncation)
    if name == "koszul":
        return koszul_model_Fp_over_Z(p)
    if name == "dual-koszul":
        return dual_koszul_coalgebra(p)
    if name == "ground":
        return ground_ring(ring)
    if name == "trivial-coalgebra":
        return trivial_coalgebra(ring)
    if name == "grouplike":
        return finite_vector_space(truncation, ring)
    raise RegistryError(f"unknown example {name!r}; known: {', '.join(registry_names())}")


def registry_names() -> list[str]:
    return sorted(REGISTRY_ALGEBRAS) + sorted(REGISTRY_COALGEBRAS)
