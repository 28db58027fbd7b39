"""Exact-arithmetic instances, assignments and feasibility checks.

Every coordinate is a :class:`fractions.Fraction`; no floating point is used
anywhere in feasibility logic.  Containers are numbered from 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, NamedTuple, Optional, Sequence

Vector = tuple[Fraction, ...]

MODES = ("pack", "cover", "knapsack")


class InstanceError(ValueError):
    """Raised for malformed or unsupported instances."""


class RandomizedFailure(RuntimeError):
    """The randomized engine exhausted its retries on a feasible branch."""

    def __init__(self, message: str, context: Optional[dict] = None):
        super().__init__(message)
        self.context = dict(context or {})


def to_fraction(value: Any) -> Fraction:
    """Parse a rational literal ("p/q", decimal string or int) exactly."""
    if isinstance(value, bool):
        raise InstanceError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InstanceError(f"not a rational: {value!r}") from exc
    raise InstanceError(f"rationals must be strings or ints, got {value!r}")


def format_fraction(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def add(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def sub(u: Sequence[Fraction], v: Sequence[Fraction]) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def leq(u: Sequence[Fraction], v: Sequence[Fraction]) -> bool:
    return all(a <= b for a, b in zip(u, v))


def geq(u: Sequence[Fraction], v: Sequence[Fraction]) -> bool:
    return all(a >= b for a, b in zip(u, v))


def total(vectors: Sequence[Sequence[Fraction]], d: int) -> Vector:
    acc = [Fraction(0)] * d
    for v in vectors:
        for i, x in enumerate(v):
            acc[i] += x
    return tuple(acc)


@dataclass(frozen=True)
class Instance:
    """A packing/covering/knapsack instance.

    ``profits`` and ``containers`` are only meaningful for the knapsack mode.
    """

    dimension: int
    capacity: Vector
    vectors: tuple[Vector, ...]
    profits: Optional[tuple[int, ...]] = None
    containers: Optional[int] = None

    def __post_init__(self):
        d = self.dimension
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise InstanceError("dimension must be a positive integer")
        cap = tuple(to_fraction(x) for x in self.capacity)
        if len(cap) != d:
            raise InstanceError(f"capacity has {len(cap)} entries, expected {d}")
        vecs = []
        for j, v in enumerate(self.vectors):
            row = tuple(to_fraction(x) for x in v)
            if len(row) != d:
                raise InstanceError(f"vector {j} has {len(row)} entries, expected {d}")
            vecs.append(row)
        if any(x < 0 for x in cap) or any(x < 0 for v in vecs for x in v):
            raise InstanceError("negative coordinate")
        object.__setattr__(self, "capacity", cap)
        object.__setattr__(self, "vectors", tuple(vecs))
        if self.profits is not None:
            profits = tuple(self.profits)
            if len(profits) != len(vecs):
                raise InstanceError("profits and vectors differ in length")
            if any(not isinstance(p, int) or isinstance(p, bool) or p < 0 for p in profits):
                raise InstanceError("profits must be non-negative integers")
            if self.containers is None:
                raise InstanceError("profits given without a container count")
            object.__setattr__(self, "profits", profits)
        if self.containers is not None:
            c = self.containers
            if not isinstance(c, int) or isinstance(c, bool) or c < 0:
                raise InstanceError("containers must be a non-negative integer")

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def max_profit(self) -> int:
        return max(self.profits, default=0) if self.profits else 0

    def profit(self, j: int) -> int:
        return self.profits[j] if self.profits is not None else 0

    def subinstance(self, indices: Sequence[int]) -> "Instance":
        profits = None
        if self.profits is not None:
            profits = tuple(self.profits[j] for j in indices)
        return Instance(self.dimension, self.capacity,
                        tuple(self.vectors[j] for j in indices),
                        profits, self.containers)


@dataclass(frozen=True)
class Assignment:
    """Placement of every object into a container index, or ``None`` (unpacked).

    ``trace`` records the accepting guess of the solver that produced it and is
    excluded from equality.
    """

    placement: tuple[Optional[int], ...]
    objective: int
    trace: Optional[dict] = field(default=None, compare=False)

    def to_json(self) -> dict:
        return {"objective": self.objective, "placement": list(self.placement)}


class Violation(NamedTuple):
    kind: str  # "excess", "unplaced", "range", "objective"
    container: Optional[int]
    dimension: Optional[int]
    amount: Fraction


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple[Violation, ...]
    objective: int

    def to_json(self) -> dict:
        return {
            "valid": self.valid,
            "objective": self.objective,
            "violations": [
                {"kind": v.kind, "container": v.container, "dimension": v.dimension,
                 "amount": format_fraction(Fraction(v.amount))}
                for v in self.violations
            ],
        }


def parse_instance(text: bytes | str) -> Instance:
    """Parse the JSON instance format.

    >>> parse_instance('{"dimension":1,"capacity":["1"],"vectors":[["1/3"]]}').vectors
    ((Fraction(1, 3),),)
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise InstanceError("instance is not UTF-8") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InstanceError("instance must be a JSON object")
    unknown = set(data) - {"dimension", "capacity", "vectors", "profits", "containers"}
    if unknown:
        raise InstanceError(f"unknown fields: {sorted(unknown)}")
    for key in ("dimension", "capacity", "vectors"):
        if key not in data:
            raise InstanceError(f"missing field {key!r}")
    if not isinstance(data["capacity"], list) or not isinstance(data["vectors"], list):
        raise InstanceError("capacity and vectors must be arrays")
    if any(not isinstance(v, list) for v in data["vectors"]):
        raise InstanceError("each vector must be an array")
    profits = data.get("profits")
    if profits is not None:
        if not isinstance(profits, list):
            raise InstanceError("profits must be an array")
        profits = tuple(profits)
    return Instance(data["dimension"], tuple(data["capacity"]),
                    tuple(tuple(v) for v in data["vectors"]),
                    profits, data.get("containers"))


def dump_instance(instance: Instance) -> str:
    data: dict[str, Any] = {
        "dimension": instance.dimension,
        "capacity": [format_fraction(x) for x in instance.capacity],
        "vectors": [[format_fraction(x) for x in v] for v in instance.vectors],
    }
    if instance.profits is not None:
        data["profits"] = list(instance.profits)
    if instance.containers is not None:
        data["containers"] = instance.containers
    return json.dumps(data)


def container_loads(instance: Instance, placement: Sequence[Optional[int]]) -> dict[int, Vector]:
    groups: dict[int, list[Vector]] = {}
    for j, c in enumerate(placement):
        if c is not None:
            groups.setdefault(c, []).append(instance.vectors[j])
    return {c: total(vs, instance.dimension) for c, vs in sorted(groups.items())}


def validate(instance: Instance, assignment: Assignment, mode: str) -> ValidationReport:
    """Re-check an assignment against the capacity constraints.

    Pack mode: every object placed, no container over capacity, objective is
    the number of used containers.  Cover mode: every object placed, objective
    is the number of containers meeting the capacity in every dimension.
    Knapsack mode: ``None`` allowed, indices below ``containers``, no overflow,
    objective is the packed profit.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    placement = assignment.placement
    violations: list[Violation] = []
    if len(placement) != instance.n:
        violations.append(Violation("range", None, None, Fraction(len(placement) - instance.n)))
        return ValidationReport(False, tuple(violations), 0)

    for j, c in enumerate(placement):
        if c is None:
            if mode != "knapsack":
                violations.append(Violation("unplaced", None, None, Fraction(j)))
        elif c < 0 or (mode == "knapsack" and c >= (instance.containers or 0)):
            violations.append(Violation("range", c, None, Fraction(j)))

    loads = container_loads(instance, placement)
    cap = instance.capacity
    if mode in ("pack", "knapsack"):
        for c, load in loads.items():
            for dim, (x, t) in enumerate(zip(load, cap)):
                if x > t:
                    violations.append(Violation("excess", c, dim, x - t))

    if mode == "pack":
        objective = len(loads)
    elif mode == "cover":
        objective = sum(1 for load in loads.values() if geq(load, cap))
    else:
        objective = sum(instance.profit(j) for j, c in enumerate(placement) if c is not None)
    if objective != assignment.objective:
        violations.append(Violation("objective", None, None,
                                    Fraction(assignment.objective - objective)))
    return ValidationReport(not violations, tuple(violations), objective)
