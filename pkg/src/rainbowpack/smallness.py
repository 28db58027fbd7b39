"""Split vectors into large ones (a largest 3-incompatible set) and small ones.

A triple "fits" if it could share one container: in pack mode its sum is at
most the capacity, in cover mode its sum fails to cover the capacity.  The
small vectors form a minimum hitting set of all fitting triples, found by
plain 3-way branching with iterative deepening.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Optional, Sequence

from .model import Instance, add, geq, leq

Triple = tuple[int, int, int]


@dataclass(frozen=True)
class SmallnessResult:
    small: tuple[int, ...]
    large: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.small)


class BranchCounter:
    """Leaf counter for the hitting-set search (per deepening round)."""

    def __init__(self):
        self.rounds: list[int] = []

    @property
    def total(self) -> int:
        return sum(self.rounds)


def triple_fits(instance: Instance, triple: Sequence[int], mode: str) -> bool:
    a, b, c = (instance.vectors[i] for i in triple)
    s = add(add(a, b), c)
    if mode == "pack":
        return leq(s, instance.capacity)
    if mode == "cover":
        return not geq(s, instance.capacity)
    raise ValueError(f"unknown mode {mode!r}")


def enumerate_fit_triples(instance: Instance, mode: str = "pack") -> list[Triple]:
    return [t for t in combinations(range(instance.n), 3) if triple_fits(instance, t, mode)]


def _branch(triples: Sequence[Triple], chosen: list[int], budget: int,
            counter: Optional[list[int]]) -> Optional[list[int]]:
    hit = set(chosen)
    for t in triples:
        if not hit.intersection(t):
            break
    else:
        if counter is not None:
            counter[0] += 1
        return sorted(chosen)
    if budget == 0:
        if counter is not None:
            counter[0] += 1
        return None
    for element in sorted(t):
        chosen.append(element)
        found = _branch(triples, chosen, budget - 1, counter)
        chosen.pop()
        if found is not None:
            return found
    return None


def min_hitting_set_3(triples: Sequence[Triple], k_max: int,
                      counter: Optional[BranchCounter] = None) -> Optional[tuple[int, ...]]:
    """Minimum hitting set of size at most ``k_max``, or ``None``.

    Rounds with budget 0, 1, ... are run until one succeeds, so the first set
    found has minimum size.  Within a round the first un-hit triple (list
    order) is branched on, elements in ascending order.
    """
    for budget in range(k_max + 1):
        leaves = [0]
        found = _branch(triples, [], budget, leaves)
        if counter is not None:
            counter.rounds.append(leaves[0])
        if found is not None:
            return tuple(found)
    return None


def split_small_large(instance: Instance, mode: str = "pack",
                      counter: Optional[BranchCounter] = None) -> SmallnessResult:
    triples = enumerate_fit_triples(instance, mode)
    small = min_hitting_set_3(triples, instance.n, counter)
    assert small is not None  # all of V always hits
    small_set = set(small)
    large = tuple(j for j in range(instance.n) if j not in small_set)
    return SmallnessResult(small, large)


def is_three_incompatible(instance: Instance, indices: Sequence[int], mode: str = "pack") -> bool:
    return not any(triple_fits(instance, t, mode) for t in combinations(indices, 3))
