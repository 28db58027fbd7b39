"""Independent reference computations for the algebraic engine."""

import random
from itertools import combinations

from rainbowpack.algebra import P


def det_mod(mat, p=P):
    """Determinant by plain Gaussian elimination over GF(p)."""
    a = [[x % p for x in row] for row in mat]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det = det * a[c][c] % p
        inv = pow(a[c][c], p - 2, p)
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            if f:
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[c])]
    return det % p


def random_skew(n, rng, p=P):
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            x = rng.randrange(p)
            m[i][j] = x
            m[j][i] = (-x) % p
    return m


# polynomials: dict frozenset(edge ids) -> int

def poly_add(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) + sign * v
        if out[k] == 0:
            del out[k]
    return out


def symbolic_pfaffian(n, entry):
    """Pfaffian by expansion along the first row.

    ``entry(i, j)`` (i < j) returns the polynomial of matrix entry (i, j).
    """

    def rec(nodes):
        if not nodes:
            return {frozenset(): 1}
        first, rest = nodes[0], nodes[1:]
        out = {}
        for pos, j in enumerate(rest):
            a = entry(first, j)
            if not a:
                continue
            sub = rec(rest[:pos] + rest[pos + 1:])
            sign = 1 if pos % 2 == 0 else -1
            for ma, ca in a.items():
                for mb, cb in sub.items():
                    key = ma | mb
                    out[key] = out.get(key, 0) + sign * ca * cb
        return {k: v for k, v in out.items() if v}

    return rec(tuple(range(n)))


def matching_sign(pairs):
    """Sign of the permutation (u1 v1 u2 v2 ...) with each pair sorted."""
    perm = [x for u, v in sorted(pairs) for x in (u, v)]
    inv = sum(1 for i, j in combinations(range(len(perm)), 2) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def inclusion_exclusion_poly(n, edges, masks, nreq):
    """Sum over requirement subsets S of (-1)^|S| Pf(edges carrying S removed)."""
    total = {}
    for s in range(1 << nreq):
        keep = {}
        for e, ((u, v), m) in enumerate(zip(edges, masks)):
            if not m & s:
                keep[(min(u, v), max(u, v))] = e

        def entry(i, j, keep=keep):
            e = keep.get((i, j))
            return {frozenset([e]): 1} if e is not None else {}

        sign = -1 if bin(s).count("1") % 2 else 1
        total = poly_add(total, symbolic_pfaffian(n, entry), sign)
    return total


def admissible_matching_poly(n, edges, masks, nreq):
    """Signed monomials of perfect matchings whose edges carry every requirement."""
    full = (1 << nreq) - 1
    out = {}
    for combo in combinations(range(len(edges)), n // 2):
        nodes = [x for e in combo for x in edges[e]]
        if len(set(nodes)) != n:
            continue
        got = 0
        for e in combo:
            got |= masks[e]
        if got == full:
            out[frozenset(combo)] = matching_sign([edges[e] for e in combo])
    return out


def evaluate(poly, values, p=P):
    acc = 0
    for mono, c in poly.items():
        term = c
        for e in mono:
            term = term * values[e] % p
        acc = (acc + term) % p
    return acc
