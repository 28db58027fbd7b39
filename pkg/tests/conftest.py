import random
from fractions import Fraction

import pytest

from rainbowpack.model import Instance


def frac_instance(sizes, capacity="1", profits=None, containers=None):
    """1-D instance from decimal strings."""
    return Instance(1, (Fraction(capacity),), tuple((Fraction(s),) for s in sizes),
                    profits, containers)


WORKED_SIZES = ("0.1", "0.15", "0.2", "0.3", "0.4", "0.9")


@pytest.fixture
def worked_example():
    """Six items: three small (0.1, 0.15, 0.2) and three large (0.3, 0.4, 0.9)."""
    return frac_instance(WORKED_SIZES)


@pytest.fixture
def rng():
    return random.Random(20261018)


ACCEPTANCE_LINES: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    """Record (and print) one acceptance line, then assert it."""
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
