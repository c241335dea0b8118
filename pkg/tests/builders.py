"""Random complexes with known homology, for property tests."""

import random

from cohochschild.complexes import ChainComplex, GradedModule
from cohochschild.linalg import CoefficientRing, HomologyGroup, MatrixExact, sum_groups


def _elementary_pair(n, rng, ring):
    """(P, P^{-1}) for a random invertible n x n matrix built from row operations."""
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    Q = [row[:] for row in P]
    for _ in range(2 * n):
        if n < 2:
            break
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        # P <- E P, Q <- Q E^{-1} with E = I + c e_ij
        P[i] = [a + c * b for a, b in zip(P[i], P[j])]
        for row in Q:
            row[j] -= c * row[i]
    return MatrixExact.from_rows(P, ring, n), MatrixExact.from_rows(Q, ring, n)


def random_complex(seed: int, ring: CoefficientRing, lo: int = -2, hi: int = 2):
    """A complex in degrees lo..hi plus its expected homology.

    Built as a sum of pieces R (a cycle) and R --k--> R (torsion Z/k over Z,
    acyclic over a field when k is a unit), then hidden by a random change
    of basis in every degree.  Returns (complex, {degree: HomologyGroup}).
    """
    rng = random.Random(seed)
    pieces = []          # (top degree, k) with k = 0 meaning a single cycle
    for _ in range(rng.randint(1, 5)):
        n = rng.randint(lo, hi)
        if n > lo and rng.random() < 0.6:
            k = rng.choice([1, 2, 3, 4, 6]) if not ring.is_field else rng.randint(1, ring.p - 1)
            pieces.append((n, k))
        else:
            pieces.append((n, 0))
    ranks, ent = {}, {}
    expect = {}
    for n, k in pieces:
        if k == 0:
            ranks[n] = ranks.get(n, 0) + 1
            f, t = expect.get(n, (0, []))
            expect[n] = (f + 1, t)
        else:
            a, b = ranks.get(n - 1, 0), ranks.get(n, 0)
            ranks[n - 1], ranks[n] = a + 1, b + 1
            ent.setdefault(n, {})[(a, b)] = k
            if not ring.is_field and abs(k) > 1:
                f, t = expect.get(n - 1, (0, []))
                expect[n - 1] = (f, sorted(t + [abs(k)]))
    diffs = {n: MatrixExact(ranks.get(n - 1, 0), ranks[n], e, ring) for n, e in ent.items()}
    change = {n: _elementary_pair(r, rng, ring) for n, r in ranks.items()}
    mixed = {}
    for n, d in diffs.items():
        P_below = change[n - 1][0]
        Pinv = change[n][1]
        mixed[n] = P_below @ d @ Pinv
    C = ChainComplex(GradedModule(ring, ranks), mixed)
    return C, {n: _group(f, t) for n, (f, t) in expect.items()}


def _group(free, orders):
    return sum_groups([HomologyGroup(free)] + [HomologyGroup(0, (k,)) for k in orders])
