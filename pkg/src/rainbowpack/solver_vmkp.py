"""Exact vector multiple knapsack with few small vectors.

A guess picks which small vectors to pack, how they are grouped into
containers, which of those containers get no large vector, and how many
empty containers receive large vectors.  The large vectors are then chosen
by a minimum-weight perfect over-the-rainbow matching where a container edge
costs ``2 * max_profit`` minus the profit it packs, so the matching weight is
``2 * receiving * max_profit`` minus the packed large profit (``receiving`` = containers taking
large vectors).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Optional, Sequence

from . import otr
from .model import Assignment, Instance, InstanceError, RandomizedFailure, add, leq, sub, validate
from .otr import ColoredGraph
from .smallness import split_small_large
from .solver_vp import _mix, enumerate_partitions, group_load

EMPTY = "empty"
BLOCKER = "blocker"


@dataclass(frozen=True)
class KnapsackGuess:
    chosen: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    finalized: frozenset
    empty_used: int

    @property
    def open_groups(self) -> tuple[int, ...]:
        return tuple(i for i in range(len(self.groups)) if i not in self.finalized)

    @property
    def receiving(self) -> int:
        return len(self.open_groups) + self.empty_used


@dataclass(frozen=True)
class KnapsackGraph:
    """Node ``i < m`` is ``large[i]``, ``m + i`` its copy, blockers follow."""

    graph: ColoredGraph
    large: tuple[int, ...]
    home: dict  # partial color -> group index
    receiving: int
    max_profit: int
    blockers: int

    @property
    def budget(self) -> int:
        return 2 * self.receiving * self.max_profit


def largest_large_profit(instance: Instance, large: Sequence[int]) -> int:
    return max((instance.profit(j) for j in large), default=0)


def build_otr_instance(instance: Instance, large: Sequence[int],
                       guess: KnapsackGuess) -> Optional[KnapsackGraph]:
    """Colored graph for a guess, or ``None`` when ``receiving`` is 0 or exceeds the large count."""
    m = len(large)
    receiving = guess.receiving
    if receiving < 1 or receiving > m:
        return None
    cap = instance.capacity
    max_profit = largest_large_profit(instance, large)
    residual = {}
    home = {}
    for label, gi in enumerate(guess.open_groups, start=1):
        residual[label] = sub(cap, group_load(instance, guess.groups[gi]))
        home[label] = gi
    if guess.empty_used > 0:
        residual[EMPTY] = cap
    nb = 2 * m - 2 * receiving
    colors = tuple(residual) + ((BLOCKER,) if nb > 0 else ())
    vecs = [instance.vectors[j] for j in large]
    prof = [instance.profit(j) for j in large]
    edges: list[tuple[int, int]] = []
    cmaps: list[dict] = []
    for a in range(m):
        for b in range(a + 1, m):
            s = add(vecs[a], vecs[b])
            w = 2 * max_profit - prof[a] - prof[b]
            cm = {c: w for c, r in residual.items() if leq(s, r)}
            if cm:
                edges.append((a, b))
                cmaps.append(cm)
    for a in range(m):
        w = 2 * max_profit - prof[a]
        cm = {c: w for c, r in residual.items() if leq(vecs[a], r)}
        if cm:
            edges.append((a, m + a))
            cmaps.append(cm)
    for x in range(2 * m):
        for j in range(nb):
            edges.append((x, 2 * m + j))
            cmaps.append({BLOCKER: 0})
    graph = ColoredGraph(2 * m + nb, colors, tuple(edges), tuple(cmaps), 2 * receiving * max_profit)
    return KnapsackGraph(graph, tuple(large), home, receiving, max_profit, nb)


def iter_guesses(instance: Instance, small: Sequence[int], available: int) -> Iterator[KnapsackGuess]:
    cap = instance.capacity
    for r in range(len(small) + 1):
        for chosen in combinations(small, r):
            for parts in enumerate_partitions(chosen, min(available, len(chosen)) if chosen else 0):
                groups = tuple(tuple(p) for p in parts)
                if len(groups) > available or any(not leq(group_load(instance, g), cap) for g in groups):
                    continue
                for mask in range(1 << len(groups)):
                    fin = frozenset(i for i in range(len(groups)) if mask >> i & 1)
                    for empty_used in range(available - len(groups) + 1):
                        yield KnapsackGuess(chosen, groups, fin, empty_used)


def translate(instance: Instance, guess: KnapsackGuess, kg: Optional[KnapsackGraph],
              sol: Optional[otr.RainbowSolution]) -> tuple[list[Optional[int]], int]:
    """Placement plus packed large profit."""
    placement: list[Optional[int]] = [None] * instance.n
    for gi, g in enumerate(guess.groups):
        for j in g:
            placement[j] = gi
    if sol is None:
        return placement, 0
    next_free = len(guess.groups)
    used: set = set()
    m = len(kg.large)
    to_blocker = [0] * (2 * m)
    packed = 0
    for e, color in zip(sol.matching, sol.colors):
        x, y = kg.graph.edges[e]
        if color == BLOCKER:
            to_blocker[x] += 1
            continue
        members = [kg.large[x]] + ([kg.large[y]] if y < m else [])
        if color in kg.home and color not in used:
            target = kg.home[color]
            used.add(color)
        else:
            target = next_free
            next_free += 1
        for j in members:
            placement[j] = target
            packed += instance.profit(j)
    for i, j in enumerate(kg.large):
        unpacked = to_blocker[i] == 1 and to_blocker[m + i] == 1
        if unpacked != (placement[j] is None):
            raise RandomizedFailure("blocker structure does not match the unpacked vectors")
    if next_free > (instance.containers or 0):
        raise RandomizedFailure("more containers used than available")
    return placement, packed


def solve(instance: Instance, rng_seed: int = 0, error_exponent: float = 2.0,
          engine: str = "sieve", retries: int = 3) -> Assignment:
    """Maximum total profit, with a witnessing placement."""
    if instance.profits is None or instance.containers is None:
        raise InstanceError("knapsack needs profits and a container count")
    available = instance.containers
    n = instance.n
    if available == 0 or n == 0:
        return Assignment((None,) * n, 0, {"receiving": 0})
    # vectors that fit nowhere can never be packed
    fits = tuple(j for j in range(n) if leq(instance.vectors[j], instance.capacity))
    sub_inst = instance.subinstance(fits)
    split = split_small_large(sub_inst, "pack")
    small = tuple(fits[j] for j in split.small)
    large = tuple(fits[j] for j in split.large)

    best_profit = -1
    best: Optional[tuple] = None
    cache: dict = {}
    lower: dict = {}
    for gi, guess in enumerate(iter_guesses(instance, small, available)):
        small_profit = sum(instance.profit(j) for j in guess.chosen)
        if guess.receiving == 0:
            if small_profit > best_profit:
                best_profit, best = small_profit, (gi, guess, None, None)
            continue
        kg = build_otr_instance(instance, large, guess)
        if kg is None:
            continue
        key = (tuple(sorted(tuple(sub(instance.capacity, group_load(instance, guess.groups[i])))
                            for i in guess.open_groups)), guess.empty_used)
        if key not in lower:
            bounds = otr.weight_bounds(kg.graph)
            lower[key] = None if bounds is None else bounds[0]
        if lower[key] is None or small_profit + kg.budget - lower[key] <= best_profit:
            continue
        if key not in cache:
            cache[key] = (otr.min_weight(kg.graph, _mix([rng_seed, gi]), error_exponent, engine), gi)
        target_weight, seed_idx = cache[key]
        if target_weight is None:
            continue
        profit = small_profit + kg.budget - target_weight
        if profit > best_profit:
            best_profit, best = profit, (seed_idx, guess, kg, target_weight)

    if best is None:
        return Assignment((None,) * n, 0, {"receiving": 0})
    seed_idx, guess, kg, target_weight = best
    trace = {"groups": [list(g) for g in guess.groups], "finalized": sorted(guess.finalized),
             "empty_used": guess.empty_used, "receiving": guess.receiving}
    sol = None
    if kg is not None:
        try:
            sol = otr.solve(kg.graph, _mix([rng_seed, seed_idx]), error_exponent, engine, retries)
        except RandomizedFailure as exc:
            raise RandomizedFailure(str(exc), trace) from exc
        if sol is None or sol.weight != target_weight:
            raise RandomizedFailure("extraction disagreed with the decision step", trace)
        trace["matching_weight"] = sol.weight
    placement, packed_large = translate(instance, guess, kg, sol)
    if kg is not None and sol.weight + packed_large != kg.budget:
        raise AssertionError("matching weight and packed large profit do not add up")
    result = Assignment(tuple(placement), best_profit, trace)
    report = validate(instance, result, "knapsack")
    if not report.valid:
        raise RandomizedFailure("knapsack solution failed validation", trace)
    return result
