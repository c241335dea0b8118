"""Independent reference computations used to check the exact routines.

Nothing here shares code with the package beyond plain integer lists.
"""

from itertools import combinations, product
from math import gcd


def det(rows):
    """Integer determinant by cofactor expansion (tiny matrices only)."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * det(minor)
    return total


def determinantal_divisors(rows):
    """gcd of all k x k minors for k = 1..; stops at the first zero."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    out = []
    for k in range(1, min(m, n) + 1):
        g = 0
        for rs in combinations(range(m), k):
            for cs in combinations(range(n), k):
                g = gcd(g, det([[rows[i][j] for j in cs] for i in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def invariant_factors_by_minors(rows):
    d = determinantal_divisors(rows)
    prev = 1
    out = []
    for x in d:
        out.append(x // prev)
        prev = x
    return out


def _apply(rows, v, p):
    return tuple(sum(a * b for a, b in zip(r, v)) % p for r in rows)


def brute_homology_dim(d_in, d_out, n_mid, p):
    """dim ker(d_out) - dim im(d_in) by enumerating GF(p)^n (tiny n only)."""
    ker = sum(1 for v in product(range(p), repeat=n_mid)
              if not any(_apply(d_out, v, p)) ) if d_out else p ** n_mid
    n_in = len(d_in[0]) if d_in and d_in[0] else 0
    image = {_apply(d_in, v, p) for v in product(range(p), repeat=n_in)} if n_in else {(0,) * n_mid}
    k, i = 0, 0
    while p ** k < ker:
        k += 1
    while p ** i < len(image):
        i += 1
    return k - i
