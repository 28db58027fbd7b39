"""Exact vector packing with few small vectors.

For a guessed container count, the small vectors are distributed over
partially filled containers, some of those are declared finalized (they get
no large vector), and the large vectors are placed into the remaining
containers by a perfect over-the-rainbow matching: a node and a copy node
per large vector, an edge per pair (or vector alone) fitting a
container, colored by the containers it fits, plus blocker nodes that force
exactly the right number of two-vector containers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import otr
from .model import (Assignment, Instance, InstanceError, RandomizedFailure, Vector, add, leq,
                    sub, total, validate)
from .otr import ColoredGraph
from .smallness import split_small_large

EMPTY = "empty"
BLOCKER = "blocker"


def enumerate_partitions(items: Sequence, max_blocks: int) -> Iterator[list[list]]:
    """Set partitions into at most ``max_blocks`` blocks, restricted-growth order.

    >>> [p for p in enumerate_partitions("ab", 2)]
    [[['a', 'b']], [['a'], ['b']]]
    """
    items = list(items)
    n = len(items)
    if n == 0:
        yield []
        return
    if max_blocks < 1:
        return
    rgs = [0] * n

    def rec(i: int, blocks: int):
        if i == n:
            parts: list[list] = [[] for _ in range(blocks)]
            for item, b in zip(items, rgs):
                parts[b].append(item)
            yield parts
            return
        for b in range(min(blocks + 1, max_blocks)):
            rgs[i] = b
            yield from rec(i + 1, max(blocks, b + 1))

    rgs[0] = 0
    yield from rec(1, 1)


@dataclass(frozen=True)
class ColorSpec:
    label: object
    residual: Vector
    kind: str  # "partial", "empty", "blocker"
    group: Optional[int] = None


@dataclass(frozen=True)
class GuessState:
    groups: tuple[tuple[int, ...], ...]
    finalized: frozenset
    containers: int

    @property
    def finalized_count(self) -> int:
        return len(self.finalized)


@dataclass(frozen=True)
class PackingGraph:
    """Rainbow instance for one guess; node ``i`` is ``large[i]``, ``m + i`` its copy."""

    graph: ColoredGraph
    large: tuple[int, ...]
    colors: tuple[ColorSpec, ...]
    single_slots: int
    double_slots: int
    blockers: int


def group_load(instance: Instance, group: Sequence[int]) -> Vector:
    return total([instance.vectors[j] for j in group], instance.dimension)


def build_otr_instance(instance: Instance, large: Sequence[int],
                       guess: GuessState) -> Optional[PackingGraph]:
    """Colored graph for a guess, or ``None`` when the guess is rejected."""
    cap = instance.capacity
    loads = [group_load(instance, g) for g in guess.groups]
    if any(not leq(load, cap) for load in loads) or len(guess.groups) > guess.containers:
        return None
    m = len(large)
    slots = guess.containers - guess.finalized_count
    double_slots = m - slots
    single_slots = slots - double_slots
    if double_slots < 0 or single_slots < 0:
        return None
    colors: list[ColorSpec] = []
    label = 0
    for gi, load in enumerate(loads):
        if gi not in guess.finalized:
            label += 1
            colors.append(ColorSpec(label, sub(cap, load), "partial", gi))
    if slots > len(colors):
        colors.append(ColorSpec(EMPTY, cap, "empty"))
    if double_slots > 0:
        colors.append(ColorSpec(BLOCKER, cap, "blocker"))
    vecs = [instance.vectors[j] for j in large]
    edges: list[tuple[int, int]] = []
    cmaps: list[dict] = []
    fitting = [c for c in colors if c.kind != "blocker"]
    for a in range(m):
        for b in range(a + 1, m):
            pair = add(vecs[a], vecs[b])
            cm = {c.label: 1 for c in fitting if leq(pair, c.residual)}
            if cm:
                edges.append((a, b))
                cmaps.append(cm)
    for a in range(m):
        cm = {c.label: 1 for c in fitting if leq(vecs[a], c.residual)}
        if cm:
            edges.append((a, m + a))
            cmaps.append(cm)
    for a in range(m):
        for j in range(2 * double_slots):
            edges.append((m + a, 2 * m + j))
            cmaps.append({BLOCKER: 1})
    graph = ColoredGraph(2 * m + 2 * double_slots, tuple(c.label for c in colors), tuple(edges),
                         tuple(cmaps), m + double_slots)
    return PackingGraph(graph, tuple(large), tuple(colors), single_slots, double_slots, 2 * double_slots)


def translate(instance: Instance, guess: GuessState, pg: PackingGraph,
              sol: otr.RainbowSolution) -> Assignment:
    """Turn a rainbow solution into a placement.

    Groups keep container ``i`` (their index); the first edge of a partial
    color joins that group's container, repeats and ``empty`` open new ones.
    """
    placement: list[Optional[int]] = [None] * instance.n
    for gi, g in enumerate(guess.groups):
        for j in g:
            placement[j] = gi
    next_free = len(guess.groups)
    group_of = {c.label: c.group for c in pg.colors if c.kind == "partial"}
    used: set = set()
    m = len(pg.large)
    for e, color in zip(sol.matching, sol.colors):
        if color == BLOCKER:
            continue
        u, v = pg.graph.edges[e]
        members = [pg.large[u]] + ([pg.large[v]] if v < m else [])
        if color in group_of and color not in used:
            target = group_of[color]
            used.add(color)
        else:
            target = next_free
            next_free += 1
        for j in members:
            placement[j] = target
    return Assignment(tuple(placement), next_free)


def _check_fits(instance: Instance) -> None:
    for j, v in enumerate(instance.vectors):
        if not leq(v, instance.capacity):
            raise InstanceError(f"vector {j} exceeds the capacity on its own")


def volume_bound(instance: Instance) -> int:
    load = total(instance.vectors, instance.dimension)
    best = 0
    for x, t in zip(load, instance.capacity):
        if t > 0:
            best = max(best, math.ceil(Fraction(x) / t))
    return best


def iter_guesses(small: Sequence[int], containers: int, instance: Instance) -> Iterator[GuessState]:
    """Partitions outer, finalized subsets inner; over-packed groups skipped early."""
    cap = instance.capacity
    for parts in enumerate_partitions(small, min(containers, len(small)) if small else 0):
        groups = tuple(tuple(p) for p in parts)
        if any(not leq(group_load(instance, g), cap) for g in groups):
            continue
        for mask in range(1 << len(groups)):
            fin = frozenset(i for i in range(len(groups)) if mask >> i & 1)
            yield GuessState(groups, fin, containers)


def decide(instance: Instance, small: Sequence[int], large: Sequence[int], containers: int,
           rng_seed: int, error_exponent: float = 2.0, engine: str = "sieve",
           retries: int = 3) -> Optional[Assignment]:
    """A packing into exactly ``containers`` non-empty containers, or ``None``."""
    for gi, guess in enumerate(iter_guesses(small, containers, instance)):
        pg = build_otr_instance(instance, large, guess)
        if pg is None:
            continue
        seed = [int(rng_seed) & (2**64 - 1), containers, gi]
        try:
            sol = otr.solve(pg.graph, _mix(seed), error_exponent, engine, retries)
        except RandomizedFailure as exc:
            raise RandomizedFailure(str(exc), {"containers": containers, "groups": guess.groups,
                                               "finalized": sorted(guess.finalized)}) from exc
        if sol is None:
            continue
        a = translate(instance, guess, pg, sol)
        trace = {"containers": containers, "groups": [list(g) for g in guess.groups],
                 "finalized": sorted(guess.finalized), "matching_weight": sol.weight}
        return Assignment(a.placement, a.objective, trace)
    return None


def _mix(parts: Sequence[int]) -> int:
    """Deterministic 64-bit seed from a tuple of integers."""
    import numpy as np

    return int(np.random.SeedSequence([int(p) & (2**64 - 1) for p in parts]).generate_state(1, np.uint64)[0])


def solve(instance: Instance, rng_seed: int = 0, error_exponent: float = 2.0,
          engine: str = "sieve", retries: int = 3) -> Assignment:
    """Minimum number of containers, with a witnessing packing.

    Binary search over the container count (feasibility is monotone up to ``n``); each count is
    decided by enumerating guesses and solving the rainbow instance.
    """
    _check_fits(instance)
    n = instance.n
    if n == 0:
        return Assignment((), 0, {"containers": 0})
    split = split_small_large(instance, "pack")
    small, large = split.small, split.large
    lo = max(math.ceil(len(large) / 2), volume_bound(instance), 1)
    hi = n
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        found = decide(instance, small, large, mid, rng_seed, error_exponent, engine, retries)
        if found is not None:
            best = found
            hi = mid - 1
        else:
            lo = mid + 1
    if best is None:
        # all-singletons fallback; only reachable through false negatives at containers = n
        raise RandomizedFailure("no packing found up to n containers", {"containers": n})
    report = validate(instance, best, "pack")
    if not report.valid:
        raise RandomizedFailure("packing failed validation", {"violations": report.violations})
    return best
