"""Randomized algebraic matching engine over GF(P).

A *term system* is a graph on nodes ``0..n-1`` given as a list of terms
``(u, v, weight, mask)``.  Several terms may join the same pair of nodes.  The
bits of ``mask`` name the requirements a term satisfies; a perfect matching
together with one term per matched pair is *admissible* when every
requirement bit is carried by some chosen term.

For random field values ``r_t`` the Tutte-style skew matrix with entries
``sum r_t * y**weight_t`` has a Pfaffian whose monomials are exactly the
(matching, term choice) pairs.  Summing ``(-1)**|S| * Pf`` over requirement
subsets ``S`` (terms carrying a bit of ``S`` removed) keeps only admissible
pairs.  The sum is a polynomial in ``y``; it is evaluated at enough integer
points and interpolated, and its lowest non-vanishing coefficient is the
minimum admissible weight.  A vanishing coefficient may be a false negative
(Schwartz-Zippel); a non-vanishing one is always genuine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import networkx as nx
import numpy as np

from .model import RandomizedFailure

P = 2**31 - 1
"""Field modulus.  Products of two residues fit in a signed 64-bit integer."""

MAX_EVALUATIONS = 1 << 22
"""Upper limit on (subset, point) Pfaffian evaluations per trial."""

_CHUNK_ELEMENTS = 1 << 22


class CapacityError(ValueError):
    """The interpolation degree or subset count exceeds configured limits."""


Term = tuple[int, int, int, int]


# ---------------------------------------------------------------------------
# field helpers


def _inv_vec(a: np.ndarray) -> np.ndarray:
    """Elementwise inverse mod P by Fermat exponentiation."""
    result = np.ones_like(a)
    base = a % P
    e = P - 2
    while e:
        if e & 1:
            result = (result * base) % P
        base = (base * base) % P
        e >>= 1
    return result


def pfaffian_batch(mats: np.ndarray) -> np.ndarray:
    """Pfaffians of a stack of skew-symmetric matrices over GF(P).

    ``mats`` has shape ``(B, m, m)`` with residues in ``[0, P)``; ``m`` must be
    even.  Uses pivoted skew elimination: with pivot ``a = A[0, j]`` the
    Pfaffian is ``(-1)**(j-1) * a * Pf(R + (q1 q0^T - q0 q1^T) / a)`` over the
    remaining indices.
    """
    A = np.asarray(mats, dtype=np.int64) % P
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ValueError("expected a stack of square matrices")
    B, m, _ = A.shape
    if m % 2:
        raise ValueError("odd order: the Pfaffian is defined for even order only")
    result = np.ones(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    bidx = np.arange(B)
    while m > 0:
        nz = A[:, 0, 1:] != 0
        has = nz.any(axis=1)
        j = np.argmax(nz, axis=1) + 1
        alive &= has
        a = np.where(has, A[bidx, 0, j], 1)
        sign = np.where((j - 1) % 2 == 1, P - 1, 1)
        result = (result * a) % P
        result = (result * sign) % P
        if m == 2:
            break
        if np.all(j == 1):
            R = A[:, 2:, 2:]
            q0 = A[:, 0, 2:]
            q1 = A[:, 1, 2:]
        else:
            t = np.arange(m - 2)[None, :] + 1
            rest = t + (t >= j[:, None])
            R = A[bidx[:, None, None], rest[:, :, None], rest[:, None, :]]
            q0 = A[bidx[:, None], 0, rest]
            q1 = A[bidx[:, None], j[:, None], rest]
        ainv = _inv_vec(a)[:, None, None]
        outer = (q1[:, :, None] * q0[:, None, :] - q0[:, :, None] * q1[:, None, :]) % P
        A = (R + (outer * ainv) % P) % P
        m -= 2
    return np.where(alive, result, 0)


def pfaffian(matrix) -> int:
    """Pfaffian of one skew-symmetric matrix over GF(P)."""
    A = np.asarray(matrix, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if A.shape[0] % 2:
        raise ValueError("odd order: the Pfaffian is defined for even order only")
    if not np.array_equal(A % P, (-A.T) % P):
        raise ValueError("matrix is not skew-symmetric")
    if A.shape[0] == 0:
        return 1
    return int(pfaffian_batch(A[None])[0])


def interpolate(xs: Sequence[int], ys: Sequence[int]) -> list[int]:
    """Coefficients (ascending) of the polynomial through the points, mod P."""
    n = len(xs)
    coef = [y % P for y in ys]
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            num = (coef[i] - coef[i - 1]) % P
            den = (xs[i] - xs[i - level]) % P
            coef[i] = num * pow(den, P - 2, P) % P
    poly = [0] * n
    for i in range(n - 1, -1, -1):
        # poly = poly * (x - xs[i]) + coef[i]
        shifted = [0] + poly[:-1]
        poly = [(s - xs[i] * p) % P for s, p in zip(shifted, poly)]
        poly[0] = (poly[0] + coef[i]) % P
    return poly


# ---------------------------------------------------------------------------
# term systems


@dataclass
class _System:
    n: int
    terms: list[Term]
    nreq: int


def _restrict(system: _System, alive: Sequence[bool], required: int) -> tuple[_System, list[int]]:
    """Drop dead nodes, keep only ``required`` bits (re-indexed densely)."""
    relabel = {}
    for v in range(system.n):
        if alive[v]:
            relabel[v] = len(relabel)
    bits = [b for b in range(system.nreq) if required >> b & 1]
    remap = {b: i for i, b in enumerate(bits)}
    terms = []
    origin = []
    for idx, (u, v, w, mask) in enumerate(system.terms):
        if u in relabel and v in relabel:
            new_mask = 0
            for b in bits:
                if mask >> b & 1:
                    new_mask |= 1 << remap[b]
            terms.append((relabel[u], relabel[v], w, new_mask))
            origin.append(idx)
    return _System(len(relabel), terms, len(bits)), origin


def forced_requirements(system: _System) -> int:
    """Requirement bits that every perfect matching satisfies.

    A bit is forced when some node has incident terms and all of them carry
    the bit.
    """
    full = (1 << system.nreq) - 1
    inter = [full] * system.n
    seen = [False] * system.n
    for u, v, _, mask in system.terms:
        inter[u] &= mask
        inter[v] &= mask
        seen[u] = seen[v] = True
    forced = 0
    for x, s in zip(inter, seen):
        if s:
            forced |= x
    return forced


def _pair_weights(system: _System, pick_max: bool = False) -> dict[tuple[int, int], int]:
    best: dict[tuple[int, int], int] = {}
    for u, v, w, _ in system.terms:
        key = (min(u, v), max(u, v))
        if key not in best or (w > best[key] if pick_max else w < best[key]):
            best[key] = w
    return best


def perfect_matching_extreme(n: int, pair_weights: dict[tuple[int, int], int],
                             maximize: bool = False) -> Optional[tuple[int, list[tuple[int, int]]]]:
    """Exact minimum (or maximum) weight perfect matching, ``None`` if none."""
    if n == 0:
        return 0, []
    if n % 2:
        return None
    g = nx.Graph()
    g.add_nodes_from(range(n))
    top = max(pair_weights.values(), default=0) + 1
    for (u, v), w in sorted(pair_weights.items()):
        g.add_edge(u, v, weight=(w + 1) if maximize else (top - w))
    mate = nx.max_weight_matching(g, maxcardinality=True)
    if 2 * len(mate) != n:
        return None
    pairs = sorted((min(u, v), max(u, v)) for u, v in mate)
    return sum(pair_weights[p] for p in pairs), pairs


def weight_bounds(system: _System, exact_threshold: int = 8) -> Optional[tuple[int, int]]:
    """Bounds ``lo <= weight <= hi`` valid for every perfect matching.

    Cheap per-node bounds are used when they are already tight; otherwise
    exact extreme perfect matchings are computed (this also detects the
    absence of any perfect matching).
    """
    n = system.n
    if n == 0:
        return 0, 0
    if n % 2:
        return None
    lo_node = [None] * n
    hi_node = [None] * n
    for u, v, w, _ in system.terms:
        for x in (u, v):
            lo_node[x] = w if lo_node[x] is None else min(lo_node[x], w)
            hi_node[x] = w if hi_node[x] is None else max(hi_node[x], w)
    if any(x is None for x in lo_node):
        return None
    lo = -(-sum(lo_node) // 2)
    hi = sum(hi_node) // 2
    if hi - lo <= exact_threshold:
        return lo, hi
    low = perfect_matching_extreme(n, _pair_weights(system))
    if low is None:
        return None
    high = perfect_matching_extreme(n, _pair_weights(system, pick_max=True), maximize=True)
    return low[0], high[0]


def _trials_needed(n: int, budget: int, exponent: float) -> int:
    per_trial = max(n // 2, 1) / P
    target = float(n + budget + 2) ** (-exponent)
    return max(1, math.ceil(math.log(target) / math.log(per_trial)))


def _coefficients(system: _System, lo: int, hi: int, rng: np.random.Generator) -> list[int]:
    """One randomized evaluation: coefficients of weights ``lo..hi`` mod P."""
    n, nreq = system.n, system.nreq
    npts = hi - lo + 1
    nsub = 1 << nreq
    if nsub * npts > MAX_EVALUATIONS or npts >= P:
        raise CapacityError(
            f"{nsub} subsets x {npts} interpolation points exceeds the evaluation limit")
    n_terms = len(system.terms)
    arr = np.array(system.terms, dtype=np.int64).reshape(n_terms, 4)
    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    w = arr[:, 2]
    mask = arr[:, 3]
    r = rng.integers(1, P, size=n_terms, dtype=np.int64)

    ys = np.arange(1, npts + 1, dtype=np.int64)
    ypow = np.empty((npts, n_terms), dtype=np.int64)
    for wt in np.unique(w):
        col = np.array([pow(int(y), int(wt), P) for y in ys], dtype=np.int64)
        ypow[:, w == wt] = col[:, None]
    vals = (ypow * r[None, :]) % P

    order = np.lexsort((v, u))
    keys = (u * n + v)[order]
    starts = np.flatnonzero(np.r_[True, keys[1:] != keys[:-1]])
    ukeys = keys[starts]
    uu, vv = ukeys // n, ukeys % n
    vals = vals[:, order]
    mask = mask[order]

    subsets = np.arange(nsub, dtype=np.int64)
    active = (mask[None, :] & subsets[:, None]) == 0
    sub_sign = np.array([1 if bin(s).count("1") % 2 == 0 else P - 1 for s in range(nsub)],
                        dtype=np.int64)

    total = np.zeros(npts, dtype=np.int64)
    pairs = [(s, j) for j in range(npts) for s in range(nsub)]
    chunk = max(1, _CHUNK_ELEMENTS // max(n * n, 1))
    for start in range(0, len(pairs), chunk):
        block = pairs[start:start + chunk]
        s_idx = np.array([p[0] for p in block])
        j_idx = np.array([p[1] for p in block])
        contrib = np.where(active[s_idx], vals[j_idx], 0)
        agg = np.add.reduceat(contrib, starts, axis=1) % P if n_terms else contrib
        mats = np.zeros((len(block), n, n), dtype=np.int64)
        mats[:, uu, vv] = agg
        mats[:, vv, uu] = (P - agg) % P
        pf = pfaffian_batch(mats)
        pf = (pf * sub_sign[s_idx]) % P
        np.add.at(total, j_idx, pf)
        total %= P

    # divide out y**lo
    values = []
    for j, y in enumerate(ys):
        values.append(int(total[j]) * pow(int(y), (P - 1 - lo) % (P - 1), P) % P)
    return interpolate([int(y) for y in ys], values)


def min_weight(system: _System, budget: int, seed, exponent: float = 2.0) -> Optional[int]:
    """Minimum admissible weight ``<= budget``, or ``None``.

    Never reports a weight below the true minimum; reports ``None`` or a larger
    value only with small probability.
    """
    if system.n % 2:
        return None
    if system.n == 0:
        return 0 if system.nreq == 0 else None
    present = 0
    for *_, mask in system.terms:
        present |= mask
    full = (1 << system.nreq) - 1
    if present != full:
        return None
    bounds = weight_bounds(system)
    if bounds is None:
        return None
    lo, hi = bounds
    if lo > budget:
        return None
    forced = forced_requirements(system)
    if forced:
        system, _ = _restrict(system, [True] * system.n, full & ~forced)
    if system.nreq == 0:
        exact = perfect_matching_extreme(system.n, _pair_weights(system))
        if exact is None or exact[0] > budget:
            return None
        return exact[0]
    rng = np.random.default_rng(seed)
    trials = _trials_needed(system.n, budget, exponent)
    best = None
    for _ in range(trials):
        coef = _coefficients(system, lo, hi, rng)
        for i, c in enumerate(coef):
            if c and lo + i <= budget:
                if best is None or lo + i < best:
                    best = lo + i
                break
        if best == lo:
            break
    return best


def extract(system: _System, target_weight: int, seed: int, exponent: float = 2.0,
            retries: int = 3) -> tuple[list[int], int]:
    """Admissible perfect matching of weight at most ``target_weight`` (term indices).

    Terms are tried in input order; a term is kept when the residual system
    (endpoints removed, its requirement bits satisfied) still reaches the
    residual weight.  Once every remaining requirement is forced, the rest is
    completed by an exact minimum-weight perfect matching.
    """
    full = (1 << system.nreq) - 1
    for attempt in range(retries + 1):
        alive = [True] * system.n
        required = full
        chosen: list[int] = []
        used = 0
        pos = 0
        calls = 0
        failed = False
        while True:
            residual, origin = _restrict(system, alive, required)
            if residual.nreq:
                active_local = ((1 << residual.nreq) - 1) & ~forced_requirements(residual)
            else:
                active_local = 0
            if not active_local:
                break
            bits = [b for b in range(system.nreq) if required >> b & 1]
            active = 0
            for i, b in enumerate(bits):
                if active_local >> i & 1:
                    active |= 1 << b
            found = False
            while pos < len(system.terms):
                idx = pos
                pos += 1
                u, v, w, mask = system.terms[idx]
                if not (alive[u] and alive[v]) or not (mask & active) or used + w > target_weight:
                    continue
                alive[u] = alive[v] = False
                trial, _ = _restrict(system, alive, required & ~mask)
                calls += 1
                got = min_weight(trial, target_weight - used - w,
                                 [int(seed) & (2**64 - 1), attempt, calls], exponent)
                if got == target_weight - used - w:
                    chosen.append(idx)
                    used += w
                    required &= ~mask
                    found = True
                    break
                alive[u] = alive[v] = True
            if not found:
                failed = True
                break
        if failed:
            continue
        residual, origin = _restrict(system, alive, 0)
        best_term: dict[tuple[int, int], int] = {}
        for local, (u, v, w, _) in enumerate(residual.terms):
            key = (min(u, v), max(u, v))
            if key not in best_term or w < residual.terms[best_term[key]][2]:
                best_term[key] = local
        finish = perfect_matching_extreme(
            residual.n, {k: residual.terms[t][2] for k, t in best_term.items()})
        if finish is None or used + finish[0] > target_weight:
            continue
        chosen.extend(origin[best_term[p]] for p in finish[1])
        weight = used + finish[0]
        if is_admissible(system, chosen):
            return chosen, weight
    raise RandomizedFailure("matching extraction failed after retries",
                            {"weight": target_weight, "retries": retries})


def is_admissible(system: _System, chosen: Sequence[int]) -> bool:
    covered = [0] * system.n
    mask = 0
    for idx in chosen:
        u, v, _, m = system.terms[idx]
        if u == v:
            return False
        covered[u] += 1
        covered[v] += 1
        mask |= m
    return all(c == 1 for c in covered) and mask == (1 << system.nreq) - 1
