"""Deterministic exact 1-D bin packing with few small items.

After guessing how small items share bins, which of those bins get no large
item and which get exactly one, the large items are placed greedily from
the largest down, branching only over which partially filled bin takes the
smallest remaining large item.  No randomness is involved.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .model import Assignment, Instance, InstanceError, validate
from .smallness import split_small_large
from .solver_vp import enumerate_partitions


class ItemPool:
    """Remaining large items ordered by ``(size, -index)``.

    The maximum is the largest item, lowest index first among equal sizes.
    """

    def __init__(self, items: Sequence[tuple[Fraction, int]] = ()):
        self._keys = sorted((s, -j) for s, j in items)

    def __len__(self) -> int:
        return len(self._keys)

    def copy(self) -> "ItemPool":
        other = ItemPool()
        other._keys = list(self._keys)
        return other

    def largest(self) -> tuple[Fraction, int]:
        s, neg = self._keys[-1]
        return s, -neg

    def smallest(self) -> tuple[Fraction, int]:
        s, neg = self._keys[0]
        return s, -neg

    def largest_at_most(self, x: Fraction) -> Optional[tuple[Fraction, int]]:
        pos = bisect.bisect_right(self._keys, (x, math.inf))
        if pos == 0:
            return None
        s, neg = self._keys[pos - 1]
        return s, -neg

    def remove(self, size: Fraction, index: int) -> None:
        pos = bisect.bisect_left(self._keys, (size, -index))
        if pos == len(self._keys) or self._keys[pos] != (size, -index):
            raise KeyError(index)
        del self._keys[pos]


@dataclass
class PartialBin:
    group: int
    small_load: Fraction
    capacity: Fraction

    @property
    def residual(self) -> Fraction:
        return self.capacity - self.small_load


def branch_bound(k: int) -> int:
    f = math.factorial(k)
    return f * f * (k + 1) * 2**k


def fill_single_large(bins: Sequence[PartialBin], pool: ItemPool) -> Optional[list[int]]:
    """Largest fitting item per bin, in the given order; ``None`` if one gets nothing.

    Removes the chosen items from ``pool``.
    """
    chosen = []
    for b in bins:
        hit = pool.largest_at_most(b.residual)
        if hit is None:
            return None
        pool.remove(*hit)
        chosen.append(hit[1])
    return chosen


class _Search:
    def __init__(self, sizes: Sequence[Fraction], capacity: Fraction):
        self.sizes = sizes
        self.cap = capacity
        self.branches = 0
        self.best: Optional[tuple[int, tuple]] = None

    def leaf(self) -> None:
        self.branches += 1

    def record(self, count: int, placement: dict, fixed: int, extra: list) -> None:
        if self.best is None or count < self.best[0]:
            full = dict(placement)
            for b, members in enumerate(extra):
                for j in members:
                    full[j] = fixed + b
            self.best = (count, tuple(sorted(full.items())))

    def run(self, pool: ItemPool, open_bins: list[PartialBin], placement: dict, fixed: int,
            extra: list) -> None:
        if len(pool) == 0:
            self.leaf()
            if not open_bins:
                self.record(fixed + len(extra), placement, fixed, extra)
            return
        big = pool.largest()
        tiny = pool.smallest()
        case_two = len(pool) > 1 and any(big[0] + tiny[0] <= b.residual for b in open_bins)
        if case_two:
            for i, b in enumerate(open_bins):
                if tiny[0] > b.residual:
                    continue
                rest = pool.copy()
                rest.remove(*tiny)
                partner = rest.largest_at_most(b.residual - tiny[0])
                if partner is None:
                    self.leaf()
                    continue
                rest.remove(*partner)
                placement[tiny[1]] = placement[partner[1]] = b.group
                self.run(rest, open_bins[:i] + open_bins[i + 1:], placement, fixed, extra)
                del placement[tiny[1]], placement[partner[1]]
            return
        rest = pool.copy()
        rest.remove(*big)
        partner = rest.largest_at_most(self.cap - big[0])
        members = [big[1]]
        if partner is not None:
            rest.remove(*partner)
            members.append(partner[1])
        extra.append(members)
        self.run(rest, open_bins, placement, fixed, extra)
        extra.pop()


def solve(instance: Instance) -> Assignment:
    """Minimum number of bins; the trace records the explored branch count."""
    if instance.dimension != 1:
        raise InstanceError("the deterministic solver handles one dimension only")
    cap = instance.capacity[0]
    sizes = [v[0] for v in instance.vectors]
    for j, s in enumerate(sizes):
        if s > cap:
            raise InstanceError(f"item {j} exceeds the capacity on its own")
    if instance.n == 0:
        return Assignment((), 0, {"branches": 0, "k": 0})
    split = split_small_large(instance, "pack")
    small, large = split.small, split.large
    search = _Search(sizes, cap)
    base_pool = ItemPool([(sizes[j], j) for j in large])

    for parts in enumerate_partitions(small, len(small)):
        loads = [sum((sizes[j] for j in g), Fraction(0)) for g in parts]
        if any(x > cap for x in loads):
            search.leaf()
            continue
        bins = sorted((PartialBin(i, x, cap) for i, x in enumerate(loads)),
                      key=lambda b: (-b.small_load, b.group))
        placement = {j: gi for gi, g in enumerate(parts) for j in g}
        p = len(bins)
        for no_large in range(p + 1):
            rest = bins[no_large:]
            for mask in range(1 << len(rest)):
                singles = [b for i, b in enumerate(rest) if mask >> i & 1]
                doubles = [b for i, b in enumerate(rest) if not mask >> i & 1]
                pool = base_pool.copy()
                chosen = fill_single_large(singles, pool)
                if chosen is None:
                    search.leaf()
                    continue
                for b, j in zip(singles, chosen):
                    placement[j] = b.group
                search.run(pool, doubles, placement, p, [])
                for j in chosen:
                    del placement[j]

    assert search.best is not None
    count, pairs = search.best
    result = Assignment(tuple(c for _, c in pairs), count,
                        {"branches": search.branches, "k": split.k})
    report = validate(instance, result, "pack")
    if not report.valid:
        raise AssertionError(f"deterministic packing invalid: {report.violations}")
    return result
