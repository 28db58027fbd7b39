"""Exact solvers for vector packing, covering and multiple knapsack with few small vectors."""

from .model import (Assignment, Instance, InstanceError, RandomizedFailure,
                    ValidationReport, dump_instance, parse_instance, validate)

__all__ = [
    "Assignment", "Instance", "InstanceError", "RandomizedFailure", "ValidationReport",
    "dump_instance", "parse_instance", "validate",
]
__version__ = "0.1.0"
