"""Random instance families for tests and benchmarks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional

from .model import Instance


def _coord(rng: random.Random, lo: Fraction, hi: Fraction, denom: int) -> Fraction:
    a = int(lo * denom) + 1
    b = max(a, int(hi * denom))
    return Fraction(rng.randint(a, b), denom)


def mixed_instance(rng: random.Random, n: int, d: int, n_small: int, denom: int = 40,
                   profits: bool = False, containers: Optional[int] = None,
                   max_profit: int = 10) -> Instance:
    """``n_small`` tiny vectors plus vectors of size roughly a third to a whole.

    Capacity is 1 in every dimension.  The split is a hint only; smallness is
    still decided exactly by the solvers.
    """
    vecs = []
    for j in range(n):
        if j < n_small:
            row = tuple(_coord(rng, Fraction(0), Fraction(1, 6), denom) for _ in range(d))
        else:
            row = tuple(_coord(rng, Fraction(1, 4), Fraction(9, 10), denom) for _ in range(d))
        vecs.append(row)
    rng.shuffle(vecs)
    prof = tuple(rng.randint(0, max_profit) for _ in range(n)) if profits else None
    if profits and containers is None:
        containers = rng.randint(0, 3)
    return Instance(d, (Fraction(1),) * d, tuple(vecs), prof, containers if profits else None)


def cover_instance(rng: random.Random, n: int, d: int, n_small: int,
                   denom: int = 40) -> Instance:
    """Mostly vectors around half the capacity, so pairs sometimes cover."""
    vecs = []
    for j in range(n):
        if j < n_small:
            row = tuple(_coord(rng, Fraction(0), Fraction(1, 5), denom) for _ in range(d))
        else:
            row = tuple(_coord(rng, Fraction(7, 20), Fraction(13, 10), denom) for _ in range(d))
        vecs.append(row)
    rng.shuffle(vecs)
    return Instance(d, (Fraction(1),) * d, tuple(vecs))


def pairable_instance(rng: random.Random, n_large: int, k: int, d: int = 1,
                      denom: int = 1000) -> Instance:
    """Large vectors in (0.35, 0.5] (any two fit together, no three do) plus
    ``k`` small ones of size 1/100 to 1/10."""
    vecs = [tuple(_coord(rng, Fraction(35, 100), Fraction(1, 2), denom) for _ in range(d))
            for _ in range(n_large)]
    vecs += [tuple(_coord(rng, Fraction(1, 100), Fraction(1, 10), denom) for _ in range(d))
             for _ in range(k)]
    rng.shuffle(vecs)
    return Instance(d, (Fraction(1),) * d, tuple(vecs))
