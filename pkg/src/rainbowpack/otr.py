"""Perfect over-the-rainbow matchings.

Each edge carries a non-empty set of colors with a weight per color.  A
solution is a perfect matching plus one color per matched edge such that
every color is used at least once; its weight is the sum of the chosen
per-color weights.

Two engines are available.  ``"conjoining"`` reduces to a conjoining
instance (one graph copy per color plus knock-out sets) and solves that.
``"sieve"`` runs the same inclusion-exclusion directly on the colored graph,
with one random variable per (edge, color) pair; it works on matrices
roughly twice as many times smaller as there are colors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Optional, Sequence

from . import algebra, conjoining
from .conjoining import ConjoiningInstance
from .model import RandomizedFailure

Color = Hashable
ENGINES = ("sieve", "conjoining")


@dataclass(frozen=True)
class ColoredGraph:
    """``edge_colors[e]`` maps each color allowed on edge ``e`` to its weight there."""

    n_nodes: int
    colors: tuple[Color, ...]
    edges: tuple[tuple[int, int], ...]
    edge_colors: tuple[dict, ...]
    budget: int

    def __post_init__(self):
        if len(self.edges) != len(self.edge_colors):
            raise ValueError("one color map per edge")
        palette = set(self.colors)
        if len(palette) != len(self.colors):
            raise ValueError("duplicate colors")
        for (u, v), cmap in zip(self.edges, self.edge_colors):
            if u == v or not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"bad edge {(u, v)}")
            if not cmap:
                raise ValueError("every edge needs at least one color")
            if not set(cmap) <= palette:
                raise ValueError(f"unknown colors on edge {(u, v)}")
            if any(not isinstance(w, int) or w < 0 for w in cmap.values()):
                raise ValueError("weights must be non-negative integers")

    def color_index(self) -> dict:
        return {c: i for i, c in enumerate(self.colors)}

    def to_system(self) -> tuple[algebra._System, list[tuple[int, Color]]]:
        index = self.color_index()
        terms = []
        origin = []
        for e, ((u, v), cmap) in enumerate(zip(self.edges, self.edge_colors)):
            for c in sorted(cmap, key=index.__getitem__):
                terms.append((u, v, cmap[c], 1 << index[c]))
                origin.append((e, c))
        return algebra._System(self.n_nodes, terms, len(self.colors)), origin


@dataclass(frozen=True)
class RainbowSolution:
    matching: tuple[int, ...]  # edge indices, ascending
    colors: tuple[Color, ...]  # chosen color per edge, aligned with ``matching``
    weight: int


@dataclass(frozen=True)
class ConjoiningReduction:
    """Back-map of :func:`reduce_to_conjoining`.

    ``edge_origin[e]`` is ``(input edge, color)`` for edges inside a color
    copy and ``None`` for knock-out edges.
    """

    instance: ConjoiningInstance
    edge_origin: tuple[Optional[tuple[int, Color]], ...]
    copy_of: tuple[Optional[tuple[int, Color]], ...]  # per reduced node
    n_original: int

    def to_text(self) -> str:
        """Debug dump: node list with class labels, then the edge list."""
        inst = self.instance
        lines = [f"nodes {inst.n_nodes}"]
        for x in range(inst.n_nodes):
            src = self.copy_of[x]
            label = f"copy {src[0]} {src[1]}" if src else "knockout"
            lines.append(f"node {x} class {inst.classes[x]} {label}")
        for (u, v), w, src in zip(inst.edges, inst.weights, self.edge_origin):
            tag = f"edge {src[0]} color {src[1]}" if src else "knockout"
            lines.append(f"edge {u} {v} weight {w} {tag}")
        for i, j in inst.pattern:
            lines.append(f"pattern {i} {j}")
        lines.append(f"budget {inst.budget}")
        return "\n".join(lines) + "\n"


def reduce_to_conjoining(cg: ColoredGraph) -> ConjoiningReduction:
    """One copy of the graph per color plus a knock-out set per node.

    Copy ``c`` of node ``v`` is node ``c * n + v``; the (colors - 1) knock-out
    nodes of ``v`` follow all copies.  Classes are the copies (one self-loop
    each) and one extra loop-free class holding every knock-out node.
    """
    n = cg.n_nodes
    k = len(cg.colors)
    edges: list[tuple[int, int]] = []
    weights: list[int] = []
    origin: list[Optional[tuple[int, Color]]] = []
    for ci, c in enumerate(cg.colors):
        for e, ((u, v), cmap) in enumerate(zip(cg.edges, cg.edge_colors)):
            if c in cmap:
                edges.append((ci * n + u, ci * n + v))
                weights.append(cmap[c])
                origin.append((e, c))
    base = k * n
    knock = max(k - 1, 0)
    for v in range(n):
        for ci in range(k):
            for j in range(knock):
                edges.append((ci * n + v, base + v * knock + j))
                weights.append(0)
                origin.append(None)
    total = base + knock * n
    classes = tuple(x // n if x < base else k for x in range(total))
    pattern = tuple((ci, ci) for ci in range(k))
    copy_of = tuple((x % n, cg.colors[x // n]) if x < base else None for x in range(total))
    inst = ConjoiningInstance(total, tuple(edges), tuple(weights), classes, pattern, cg.budget)
    return ConjoiningReduction(inst, tuple(origin), copy_of, n)


def validate_solution(cg: ColoredGraph, sol: RainbowSolution) -> bool:
    covered = [0] * cg.n_nodes
    for e, c in zip(sol.matching, sol.colors):
        if c not in cg.edge_colors[e]:
            return False
        for x in cg.edges[e]:
            covered[x] += 1
    weight = sum(cg.edge_colors[e][c] for e, c in zip(sol.matching, sol.colors))
    return (all(x == 1 for x in covered) and set(sol.colors) == set(cg.colors)
            and weight == sol.weight and weight <= cg.budget)


def _trivial(cg: ColoredGraph) -> Optional[RainbowSolution]:
    if cg.n_nodes == 0 and not cg.colors:
        return RainbowSolution((), (), 0)
    return None


def _seed(rng_seed: int) -> int:
    return int(rng_seed) & (2**64 - 1)


def min_weight(cg: ColoredGraph, rng_seed: int = 0, error_exponent: float = 2.0,
               engine: str = "sieve") -> Optional[int]:
    """Decision only: minimum solution weight within the budget, or ``None``."""
    if not cg.colors:
        return 0 if cg.n_nodes == 0 else None
    if engine == "sieve":
        system, _ = cg.to_system()
        return algebra.min_weight(system, cg.budget, [_seed(rng_seed)], error_exponent)
    if engine == "conjoining":
        red = reduce_to_conjoining(cg)
        return conjoining.decide_min_weight(red.instance, rng_seed, error_exponent)
    raise ValueError(f"unknown engine {engine!r}")


def weight_bounds(cg: ColoredGraph) -> Optional[tuple[int, int]]:
    """Deterministic bounds on the weight of any perfect matching (colors ignored)."""
    system, _ = cg.to_system()
    return algebra.weight_bounds(system)


def solve(cg: ColoredGraph, rng_seed: int = 0, error_exponent: float = 2.0,
          engine: str = "sieve", retries: int = 3, layered: bool = False) -> Optional[RainbowSolution]:
    """Minimum-weight perfect over-the-rainbow matching within the budget.

    Returns ``None`` when none is found (a false negative has probability at
    most ``(n + budget) ** -error_exponent``); a returned solution is always
    re-validated.  ``layered`` (conjoining engine only) also applies
    self-loop elimination before the algebraic step.
    """
    if not cg.colors:
        return _trivial(cg)
    seed = _seed(rng_seed)
    if engine == "sieve":
        system, origin = cg.to_system()
        target_weight = algebra.min_weight(system, cg.budget, [seed], error_exponent)
        if target_weight is None:
            return None
        chosen, _ = algebra.extract(system, target_weight, seed, error_exponent, retries)
        picked = sorted(origin[t] for t in chosen)
    elif engine == "conjoining":
        red = reduce_to_conjoining(cg)
        sol = conjoining.solve(red.instance, seed, error_exponent, retries, layered=layered)
        if sol is None:
            return None
        check_knockout_structure(red, sol.matching)
        picked = sorted(red.edge_origin[e] for e in sol.matching if red.edge_origin[e])
    else:
        raise ValueError(f"unknown engine {engine!r}")
    weight = sum(cg.edge_colors[e][c] for e, c in picked)
    result = RainbowSolution(tuple(e for e, _ in picked), tuple(c for _, c in picked), weight)
    if not validate_solution(cg, result):
        raise RandomizedFailure("rainbow solution failed validation")
    return result


def check_knockout_structure(red: ConjoiningReduction, matching: Sequence[int]) -> None:
    """Each input node has exactly one copy matched outside its knock-out set."""
    outside: dict[int, int] = {}
    for e in matching:
        src = red.edge_origin[e]
        if src is None:
            continue
        for x in red.instance.edges[e]:
            v = red.copy_of[x][0]
            outside[v] = outside.get(v, 0) + 1
    if any(outside.get(v, 0) != 1 for v in range(red.n_original)):
        raise RandomizedFailure("knock-out gadget violated")


def brute_force(cg: ColoredGraph, cap: int = 16) -> Optional[RainbowSolution]:
    """Exhaustive optimum over perfect matchings and color assignments."""
    if cg.n_nodes > cap:
        raise ValueError(f"brute force capped at {cap} nodes, got {cg.n_nodes}")
    if not cg.colors:
        return _trivial(cg)
    index = cg.color_index()
    full = (1 << len(cg.colors)) - 1
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(cg.n_nodes)]
    for e, (u, v) in enumerate(cg.edges):
        adjacency[u].append((v, e))
        adjacency[v].append((u, e))
    best = None
    for m in conjoining.iter_perfect_matchings(cg.n_nodes, adjacency):
        # dp[mask] = (weight, colors) cheapest coloring covering mask
        dp: dict[int, tuple[int, tuple]] = {0: (0, ())}
        for e in m:
            nxt: dict[int, tuple[int, tuple]] = {}
            for mask, (w, cols) in dp.items():
                for c, wc in cg.edge_colors[e].items():
                    key = mask | 1 << index[c]
                    cand = (w + wc, cols + (c,))
                    if key not in nxt or cand[0] < nxt[key][0]:
                        nxt[key] = cand
            dp = nxt
        if full in dp:
            w, cols = dp[full]
            if w <= cg.budget and (best is None or w < best[0]):
                order = sorted(range(len(m)), key=m.__getitem__)
                best = (w, tuple(m[i] for i in order), tuple(cols[i] for i in order))
    if best is None:
        return None
    return RainbowSolution(best[1], best[2], best[0])

