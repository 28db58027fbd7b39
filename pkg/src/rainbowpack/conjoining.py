"""Perfect conjoining matchings of minimum weight.

A conjoining instance is a graph whose nodes are partitioned into classes,
plus a pattern graph on the classes (self-loops allowed).  A perfect matching
is conjoining when every pattern edge ``{i, j}`` is crossed by a matched edge
with one endpoint in class ``i`` and the other in class ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import algebra
from .algebra import CapacityError, pfaffian  # noqa: F401  (re-exported)
from .model import RandomizedFailure

DEFAULT_BRUTE_FORCE_CAP = 16


@dataclass(frozen=True)
class ConjoiningInstance:
    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[int, ...]
    classes: tuple[int, ...]
    pattern: tuple[tuple[int, int], ...]
    budget: int

    def __post_init__(self):
        if len(self.classes) != self.n_nodes:
            raise ValueError("every node needs exactly one class")
        if len(self.weights) != len(self.edges):
            raise ValueError("one weight per edge")
        seen = set()
        for (u, v), w in zip(self.edges, self.weights):
            if u == v or not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"bad edge {(u, v)}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            if not isinstance(w, int) or w < 0:
                raise ValueError("weights must be non-negative integers")
        object.__setattr__(self, "pattern",
                           tuple((min(i, j), max(i, j)) for i, j in self.pattern))

    @property
    def num_classes(self) -> int:
        top = max(self.classes, default=-1)
        for i, j in self.pattern:
            top = max(top, i, j)
        return top + 1

    def crosses(self, edge: tuple[int, int], pattern_edge: tuple[int, int]) -> bool:
        a, b = sorted((self.classes[edge[0]], self.classes[edge[1]]))
        return (a, b) == pattern_edge

    def has_loops(self) -> bool:
        return any(i == j for i, j in self.pattern)

    def to_system(self) -> algebra._System:
        terms = []
        for e, w in zip(self.edges, self.weights):
            mask = 0
            for p, h in enumerate(self.pattern):
                if self.crosses(e, h):
                    mask |= 1 << p
            terms.append((e[0], e[1], w, mask))
        return algebra._System(self.n_nodes, terms, len(self.pattern))


@dataclass(frozen=True)
class LayeredInstance:
    """Loop-free instance plus the map from its edges back to the input edges.

    Node ``v`` becomes an out-node ``3v``, an in-node ``3v+1`` and a spare
    ``3v+2``; class ``h`` becomes ``2h`` (out side) and ``2h+1`` (in side);
    all spares share the final class ``2 * num_classes``.
    """

    instance: ConjoiningInstance
    edge_origin: tuple[Optional[int], ...]


@dataclass(frozen=True)
class ConjoiningSolution:
    matching: tuple[int, ...]  # edge indices
    weight: int
    satisfied: tuple[tuple[int, int], ...]


def eliminate_self_loops(inst: ConjoiningInstance) -> LayeredInstance:
    """Layer an instance so that its pattern graph has no self-loops.

    Pattern edges are directed from the smaller class to the larger one; each
    input edge ``{v, w}`` yields both out(v)-in(w) and out(w)-in(v).
    """
    t = inst.num_classes
    n = inst.n_nodes
    edges: list[tuple[int, int]] = []
    weights: list[int] = []
    origin: list[Optional[int]] = []
    for v in range(n):
        edges += [(3 * v, 3 * v + 2), (3 * v + 1, 3 * v + 2)]
        weights += [0, 0]
        origin += [None, None]
    for idx, ((v, w), gamma) in enumerate(zip(inst.edges, inst.weights)):
        edges += [(3 * v, 3 * w + 1), (3 * w, 3 * v + 1)]
        weights += [gamma, gamma]
        origin += [idx, idx]
    classes = []
    for v in range(n):
        h = inst.classes[v]
        classes += [2 * h, 2 * h + 1, 2 * t]
    pattern = tuple((2 * i, 2 * j + 1) for i, j in inst.pattern)
    layered = ConjoiningInstance(3 * n, tuple(edges), tuple(weights), tuple(classes),
                                 pattern, inst.budget)
    return LayeredInstance(layered, tuple(origin))


def lift_layered(layered: LayeredInstance, solution: ConjoiningSolution,
                 original: ConjoiningInstance) -> ConjoiningSolution:
    """Map a layered solution back to the input instance."""
    picked = sorted({layered.edge_origin[e] for e in solution.matching
                     if layered.edge_origin[e] is not None})
    return _certify(original, picked)


def _certify(inst: ConjoiningInstance, matching: Sequence[int]) -> ConjoiningSolution:
    covered = [0] * inst.n_nodes
    for e in matching:
        for x in inst.edges[e]:
            covered[x] += 1
    if any(c != 1 for c in covered):
        raise RandomizedFailure("extracted edge set is not a perfect matching")
    satisfied = tuple(h for h in inst.pattern
                      if any(inst.crosses(inst.edges[e], h) for e in matching))
    if len(set(satisfied)) != len(set(inst.pattern)):
        raise RandomizedFailure("extracted matching misses a pattern edge")
    weight = sum(inst.weights[e] for e in matching)
    if weight > inst.budget:
        raise RandomizedFailure("extracted matching exceeds the budget")
    return ConjoiningSolution(tuple(sorted(matching)), weight, tuple(sorted(set(satisfied))))


def decide_min_weight(inst: ConjoiningInstance, rng_seed: int = 0,
                      error_exponent: float = 2.0) -> Optional[int]:
    """Minimum weight of a perfect conjoining matching within the budget.

    One-sided: a returned weight is always attained; ``None`` (or a value
    above the optimum) is returned wrongly with probability at most
    ``(n + budget) ** -error_exponent``.  Self-loops in the pattern are
    handled directly by the inclusion-exclusion (an edge inside class ``i``
    crosses the loop on ``i``).
    """
    return algebra.min_weight(inst.to_system(), inst.budget,
                              [int(rng_seed) & (2**64 - 1)], error_exponent)


def extract_matching(inst: ConjoiningInstance, target_weight: int, rng_seed: int = 0,
                     error_exponent: float = 2.0, retries: int = 3) -> ConjoiningSolution:
    chosen, _ = algebra.extract(inst.to_system(), target_weight, rng_seed, error_exponent, retries)
    return _certify(inst, chosen)


def solve(inst: ConjoiningInstance, rng_seed: int = 0, error_exponent: float = 2.0,
          retries: int = 3, layered: bool = False) -> Optional[ConjoiningSolution]:
    """Decide, then extract.  ``layered`` routes through :func:`eliminate_self_loops`."""
    target = eliminate_self_loops(inst) if layered else None
    work = target.instance if target else inst
    target_weight = decide_min_weight(work, rng_seed, error_exponent)
    if target_weight is None:
        return None
    sol = extract_matching(work, target_weight, rng_seed, error_exponent, retries)
    if target:
        return lift_layered(target, sol, inst)
    return sol


def iter_perfect_matchings(n: int, adjacency: Sequence[Sequence[tuple[int, int]]]):
    """Yield perfect matchings as lists of edge ids.

    ``adjacency[u]`` lists ``(neighbour, edge_id)``.
    """
    matched = [False] * n
    stack: list[int] = []

    def rec():
        u = next((x for x in range(n) if not matched[x]), None)
        if u is None:
            yield list(stack)
            return
        matched[u] = True
        for v, e in adjacency[u]:
            if not matched[v]:
                matched[v] = True
                stack.append(e)
                yield from rec()
                stack.pop()
                matched[v] = False
        matched[u] = False

    yield from rec()


def brute_force_conjoining(inst: ConjoiningInstance,
                           cap: int = DEFAULT_BRUTE_FORCE_CAP) -> Optional[ConjoiningSolution]:
    """Exhaustive minimum-weight perfect conjoining matching (testing oracle)."""
    if inst.n_nodes > cap:
        raise ValueError(f"brute force capped at {cap} nodes, got {inst.n_nodes}")
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(inst.n_nodes)]
    for e, (u, v) in enumerate(inst.edges):
        adjacency[u].append((v, e))
        adjacency[v].append((u, e))
    pattern = set(inst.pattern)
    best = None
    for m in iter_perfect_matchings(inst.n_nodes, adjacency):
        hit = {h for h in pattern for e in m if inst.crosses(inst.edges[e], h)}
        if hit != pattern:
            continue
        w = sum(inst.weights[e] for e in m)
        if w <= inst.budget and (best is None or w < best[0]):
            best = (w, sorted(m))
    if best is None:
        return None
    return ConjoiningSolution(tuple(best[1]), best[0], tuple(sorted(pattern)))
