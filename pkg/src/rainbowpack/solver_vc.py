"""Exact vector covering with few small vectors.

Vectors that cover a container alone are set aside first.  For a target
count of covered containers, small vectors are grouped into containers;
groups that already cover are done, the others ("partial" containers) need
one or two large vectors.  The remaining containers are empty and get two
or three large vectors each (any three large vectors cover).  A perfect
over-the-rainbow matching chooses the one- and two-vector containers; two
blocker sets fix how many of each there are.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from . import otr
from .model import Assignment, Instance, RandomizedFailure, Vector, add, geq, sub, total, validate
from .otr import ColoredGraph
from .smallness import split_small_large
from .solver_vp import _mix, enumerate_partitions

EMPTY = "empty"
BLOCKER = "blocker"


@dataclass(frozen=True)
class CoverGuess:
    groups: tuple[tuple[int, ...], ...]
    full: tuple[int, ...]  # group indices covered by small vectors alone
    partial: tuple[int, ...]  # group indices needing large vectors
    junk: Optional[int]  # group dumped into some covered container
    target: int
    singles: int

    @property
    def open_count(self) -> int:
        return self.target - len(self.full)

    @property
    def partial_count(self) -> int:
        return len(self.partial)


@dataclass(frozen=True)
class CoverGraph:
    """Node ``i < m`` is ``large[i]``, ``m + i`` its copy, then ``B1``, then ``B2``."""

    graph: ColoredGraph
    large: tuple[int, ...]
    residual: dict
    singles: int
    pairs: int
    triples: int
    copy_blockers: int
    vector_blockers: int


def preprocess_singletons(instance: Instance) -> tuple[Instance, int, tuple[int, ...]]:
    """Remove vectors that cover a container alone.

    Returns the reduced instance, how many were removed and the kept indices.
    """
    cap = instance.capacity
    keep = tuple(j for j, v in enumerate(instance.vectors) if not geq(v, cap))
    return instance.subinstance(keep), instance.n - len(keep), keep


def residual_demand(instance: Instance, group: Sequence[int]) -> Vector:
    load = total([instance.vectors[j] for j in group], instance.dimension)
    return tuple(max(x, 0) for x in sub(instance.capacity, load))


def counts(m: int, guess: CoverGuess) -> Optional[tuple[int, int]]:
    """``(pairs, triples)`` for a guess, or ``None`` when it is infeasible by counting.

    ``D`` containers other than the one-vector ones need at least two large
    vectors each; as many as possible take three (surplus vectors are dumped
    into a covered container) while leaving a two-vector container for every
    partial one not served by a single vector.
    """
    rest = m - guess.singles
    d = guess.open_count - guess.singles
    need_pairs = guess.partial_count - guess.singles
    if d < need_pairs or rest < 2 * d:
        return None
    triples = min(rest - 2 * d, d - need_pairs)
    return d - triples, triples


def build_otr_instance(instance: Instance, large: Sequence[int],
                       guess: CoverGuess) -> Optional[CoverGraph]:
    m = len(large)
    if guess.singles > guess.partial_count or guess.singles < 0:
        return None
    got = counts(m, guess)
    if got is None:
        return None
    pairs, triples = got
    copy_blockers = m - guess.singles
    vector_blockers = m - guess.singles - 2 * pairs
    residual = {}
    colors: list = []
    for label, gi in enumerate(guess.partial, start=1):
        residual[label] = residual_demand(instance, guess.groups[gi])
        colors.append(label)
    has_top = guess.singles + pairs > guess.partial_count
    if has_top:
        residual[EMPTY] = instance.capacity
        colors.append(EMPTY)
    if copy_blockers + vector_blockers > 0:
        colors.append(BLOCKER)
    vecs = [instance.vectors[j] for j in large]
    edges: list[tuple[int, int]] = []
    cmaps: list[dict] = []
    partial_labels = [c for c in colors if c not in (EMPTY, BLOCKER)]
    pair_labels = partial_labels + ([EMPTY] if has_top else [])
    for a in range(m):
        for b in range(a + 1, m):
            s = add(vecs[a], vecs[b])
            cm = {c: (0 if c == EMPTY else 1) for c in pair_labels if geq(s, residual[c])}
            if cm:
                edges.append((a, b))
                cmaps.append(cm)
    for a in range(m):
        cm = {c: 1 for c in partial_labels if geq(vecs[a], residual[c])}
        if cm:
            edges.append((a, m + a))
            cmaps.append(cm)
    for a in range(m):
        for j in range(copy_blockers):
            edges.append((m + a, 2 * m + j))
            cmaps.append({BLOCKER: 0})
    for a in range(m):
        for j in range(vector_blockers):
            edges.append((a, 2 * m + copy_blockers + j))
            cmaps.append({BLOCKER: 0})
    graph = ColoredGraph(2 * m + copy_blockers + vector_blockers, tuple(colors), tuple(edges), tuple(cmaps), guess.partial_count)
    return CoverGraph(graph, tuple(large), residual, guess.singles, pairs, triples, copy_blockers, vector_blockers)


def iter_guesses(instance: Instance, small: Sequence[int], target: int) -> Iterator[CoverGuess]:
    for parts in enumerate_partitions(small, len(small)):
        groups = tuple(tuple(p) for p in parts)
        full = tuple(i for i, g in enumerate(groups) if not any(residual_demand(instance, g)))
        rest = [i for i in range(len(groups)) if i not in full]
        for junk in [None] + rest:
            partial = tuple(i for i in rest if i != junk)
            if len(full) < target and len(partial) > target - len(full):
                continue
            for singles in range(len(partial) + 1):
                yield CoverGuess(groups, full, partial, junk, target, singles)


def translate(n: int, guess: CoverGuess, cg: CoverGraph, sol: Optional[otr.RainbowSolution],
              ) -> list[Optional[int]]:
    """Placement over the reduced instance (containers numbered from 0)."""
    placement: list[Optional[int]] = [None] * n
    next_free = 0
    for gi in guess.full:
        for j in guess.groups[gi]:
            placement[j] = next_free
        next_free += 1
    home = {}
    for label, gi in enumerate(guess.partial, start=1):
        home[label] = next_free
        for j in guess.groups[gi]:
            placement[j] = next_free
        next_free += 1
    m = len(cg.large) if cg else 0
    leftover: list[int] = []
    if sol is not None:
        seen = [c for c in sol.colors if c not in (EMPTY, BLOCKER)]
        if sorted(seen) != sorted(home):
            raise RandomizedFailure("a partial container was not used exactly once")
        for e, color in zip(sol.matching, sol.colors):
            u, v = cg.graph.edges[e]
            if color == BLOCKER:
                if v >= 2 * m + cg.copy_blockers:
                    leftover.append(cg.large[u])
                continue
            members = [cg.large[u]] + ([cg.large[v]] if v < m else [])
            if color == EMPTY:
                target = next_free
                next_free += 1
            else:
                target = home[color]
            for j in members:
                placement[j] = target
    leftover.sort()
    last = None
    for i in range(cg.triples if cg else 0):
        for j in leftover[3 * i: 3 * i + 3]:
            placement[j] = next_free
        last = next_free
        next_free += 1
    dump = last if last is not None else 0
    for j in leftover[3 * (cg.triples if cg else 0):]:
        placement[j] = dump
    if guess.junk is not None:
        for j in guess.groups[guess.junk]:
            placement[j] = dump
    for j in range(n):
        if placement[j] is None:
            placement[j] = dump
    return placement


def decide(instance: Instance, small: Sequence[int], large: Sequence[int], target: int,
           rng_seed: int, error_exponent: float = 2.0, engine: str = "sieve",
           retries: int = 3) -> Optional[tuple[list[Optional[int]], dict]]:
    """A placement of the reduced instance covering at least ``target`` containers."""
    if target == 0:
        return [0] * instance.n, {"target": 0}
    for gi, guess in enumerate(iter_guesses(instance, small, target)):
        if guess.open_count <= 0:
            plain = CoverGuess(guess.groups, guess.full, (), None, target, 0)
            placement = translate(instance.n, plain, None, None)
            return placement, {"target": target, "groups": [list(g) for g in guess.groups]}
        cg = build_otr_instance(instance, large, guess)
        if cg is None:
            continue
        ctx = {"target": target, "groups": [list(g) for g in guess.groups], "partial": list(guess.partial),
               "junk": guess.junk, "singles": guess.singles, "pairs": cg.pairs, "triples": cg.triples}
        try:
            sol = otr.solve(cg.graph, _mix([rng_seed, target, gi]), error_exponent, engine, retries)
        except RandomizedFailure as exc:
            raise RandomizedFailure(str(exc), ctx) from exc
        if sol is None:
            continue
        ctx["matching_weight"] = sol.weight
        return translate(instance.n, guess, cg, sol), ctx
    return None


def solve(instance: Instance, rng_seed: int = 0, error_exponent: float = 2.0,
          engine: str = "sieve", retries: int = 3) -> Assignment:
    """Maximum number of covered containers, with a witnessing placement."""
    reduced, singles, keep = preprocess_singletons(instance)
    split = split_small_large(reduced, "cover")
    small, large = split.small, split.large
    lo, hi = len(large) // 3, reduced.n // 2
    best = decide(reduced, small, large, lo, rng_seed, error_exponent, engine, retries)
    if best is None:
        raise RandomizedFailure("the trivial lower bound was rejected", {"target": lo})
    best_c = lo
    lo += 1
    while lo <= hi:
        mid = (lo + hi) // 2
        found = decide(reduced, small, large, mid, rng_seed, error_exponent, engine, retries)
        if found is not None:
            best, best_c = found, mid
            lo = mid + 1
        else:
            hi = mid - 1
    inner, ctx = best
    placement: list[Optional[int]] = [None] * instance.n
    slot = 0
    for j in range(instance.n):
        if geq(instance.vectors[j], instance.capacity):
            placement[j] = slot
            slot += 1
    for local, j in enumerate(keep):
        placement[j] = singles + inner[local]
    trial = Assignment(tuple(placement), 0)
    covered = validate(instance, trial, "cover").objective
    if covered < singles + best_c:
        raise RandomizedFailure("covering failed validation", ctx)
    ctx = dict(ctx, singletons=singles)
    return Assignment(tuple(placement), covered, ctx)
