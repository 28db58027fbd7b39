"""Exhaustive reference solvers for packing, covering and multiple knapsack.

All three walk the objects in index order and try every existing container
plus one new one (containers are opened in first-use order, which removes the
factorial container symmetry).  They are correctness anchors, not solvers.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .model import Assignment, Instance, InstanceError, add, geq, leq


class OracleBudgetExceeded(InstanceError):
    pass


@dataclass(frozen=True)
class OracleBudget:
    max_objects: int = 12
    max_containers: Optional[int] = None
    wall_clock: Optional[float] = None  # seconds

    def check(self, instance: Instance) -> None:
        if instance.n > self.max_objects:
            raise OracleBudgetExceeded(
                f"oracle limited to {self.max_objects} objects, got {instance.n}")
        if (self.max_containers is not None and instance.containers is not None
                and instance.containers > self.max_containers):
            raise OracleBudgetExceeded(
                f"oracle limited to {self.max_containers} containers")


DEFAULT_BUDGET = OracleBudget()


class _Clock:
    def __init__(self, budget: OracleBudget):
        self.deadline = None if budget.wall_clock is None else time.monotonic() + budget.wall_clock
        self.ticks = 0

    def tick(self) -> None:
        self.ticks += 1
        if self.deadline is not None and self.ticks % 1024 == 0 and time.monotonic() > self.deadline:
            raise OracleBudgetExceeded("oracle wall-clock cap reached")


def brute_force_pack(instance: Instance, budget: OracleBudget = DEFAULT_BUDGET,
                     prune: bool = True) -> Assignment:
    """Minimum number of containers."""
    budget.check(instance)
    cap = instance.capacity
    if any(not leq(v, cap) for v in instance.vectors):
        raise InstanceError("some vector exceeds the capacity on its own")
    n = instance.n
    clock = _Clock(budget)
    loads: list[tuple[Fraction, ...]] = []
    placement = [0] * n
    best: list = [n + 1, None]

    def rec(j: int) -> None:
        clock.tick()
        if prune and len(loads) >= best[0]:
            return
        if j == n:
            if len(loads) < best[0]:
                best[0], best[1] = len(loads), tuple(placement)
            return
        v = instance.vectors[j]
        for c in range(len(loads)):
            new = add(loads[c], v)
            if leq(new, cap):
                old = loads[c]
                loads[c] = new
                placement[j] = c
                rec(j + 1)
                loads[c] = old
        loads.append(v)
        placement[j] = len(loads) - 1
        rec(j + 1)
        loads.pop()

    rec(0)
    return Assignment(best[1], best[0])


def brute_force_cover(instance: Instance, budget: OracleBudget = DEFAULT_BUDGET,
                      prune: bool = True) -> Assignment:
    """Maximum number of covered containers; every object is placed."""
    budget.check(instance)
    cap = instance.capacity
    n = instance.n
    if n == 0:
        return Assignment((), 0)
    clock = _Clock(budget)
    loads: list[tuple[Fraction, ...]] = []
    placement = [0] * n
    best: list = [-1, None]

    def covered() -> int:
        return sum(1 for load in loads if geq(load, cap))

    def rec(j: int) -> None:
        clock.tick()
        if prune:
            done = covered()
            if done + (len(loads) - done) + (n - j) <= best[0]:
                return
        if j == n:
            got = covered()
            if got > best[0]:
                best[0], best[1] = got, tuple(placement)
            return
        v = instance.vectors[j]
        for c in range(len(loads)):
            old = loads[c]
            loads[c] = add(old, v)
            placement[j] = c
            rec(j + 1)
            loads[c] = old
        loads.append(v)
        placement[j] = len(loads) - 1
        rec(j + 1)
        loads.pop()

    rec(0)
    return Assignment(best[1], best[0])


def brute_force_knapsack(instance: Instance, budget: OracleBudget = DEFAULT_BUDGET,
                         prune: bool = True) -> Assignment:
    """Maximum packed profit over ``instance.containers`` containers."""
    if instance.profits is None or instance.containers is None:
        raise InstanceError("knapsack needs profits and a container count")
    budget.check(instance)
    cap = instance.capacity
    n = instance.n
    available = instance.containers
    clock = _Clock(budget)
    suffix = [0] * (n + 1)
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1] + instance.profits[j]
    loads: list[tuple[Fraction, ...]] = []
    placement: list[Optional[int]] = [None] * n
    best: list = [-1, None]

    def rec(j: int, profit: int) -> None:
        clock.tick()
        if prune and profit + suffix[j] <= best[0]:
            return
        if j == n:
            if profit > best[0]:
                best[0], best[1] = profit, tuple(placement)
            return
        v = instance.vectors[j]
        p = instance.profits[j]
        for c in range(len(loads)):
            new = add(loads[c], v)
            if leq(new, cap):
                old = loads[c]
                loads[c] = new
                placement[j] = c
                rec(j + 1, profit + p)
                loads[c] = old
        if len(loads) < available and leq(v, cap):
            loads.append(v)
            placement[j] = len(loads) - 1
            rec(j + 1, profit + p)
            loads.pop()
        placement[j] = None
        rec(j + 1, profit)

    rec(0, 0)
    return Assignment(best[1], best[0])


ORACLES = {"pack": brute_force_pack, "cover": brute_force_cover,
           "knapsack": brute_force_knapsack, "binpack": brute_force_pack}
