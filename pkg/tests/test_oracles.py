import random

import pytest

from rainbowpack import generators
from rainbowpack.oracles import (OracleBudget, OracleBudgetExceeded, brute_force_cover,
                                 brute_force_knapsack, brute_force_pack)

from conftest import frac_instance


def test_examples(worked_example):
    assert brute_force_pack(worked_example).objective == 3
    assert brute_force_pack(frac_instance(["0.5"])).objective == 1
    assert brute_force_pack(frac_instance(["0.6"] * 4)).objective == 4
    assert brute_force_cover(frac_instance(["0.6", "0.5"])).objective == 1
    assert brute_force_cover(frac_instance([])).objective == 0
    inst = frac_instance(["0.6", "0.7"], profits=(5, 6), containers=1)
    assert brute_force_knapsack(inst).objective == 6
    inst = frac_instance(["0.6", "0.7"], profits=(5, 6), containers=0)
    assert brute_force_knapsack(inst).objective == 0


def test_budget_limits():
    with pytest.raises(OracleBudgetExceeded):
        brute_force_pack(frac_instance(["0.1"] * 13))
    with pytest.raises(OracleBudgetExceeded):
        brute_force_pack(frac_instance(["0.1"] * 4), OracleBudget(max_objects=3))
    inst = frac_instance(["0.1"], profits=(1,), containers=5)
    with pytest.raises(OracleBudgetExceeded):
        brute_force_knapsack(inst, OracleBudget(max_containers=4))


def test_wall_clock_cap():
    inst = frac_instance(["0.05"] * 12)
    with pytest.raises(OracleBudgetExceeded):
        brute_force_cover(inst, OracleBudget(wall_clock=0.0), prune=False)


@pytest.mark.parametrize("oracle,kw", [(brute_force_pack, {}), (brute_force_cover, {}),
                                       (brute_force_knapsack, {"profits": True})])
def test_pruning_and_order_do_not_change_optimum(oracle, kw):
    rng = random.Random(91)
    for _ in range(25):
        inst = generators.mixed_instance(rng, rng.randint(0, 7), rng.randint(1, 2),
                                         rng.randint(0, 3), **kw)
        a = oracle(inst).objective
        assert oracle(inst, prune=False).objective == a
        order = list(range(inst.n))
        rng.shuffle(order)
        assert oracle(inst.subinstance(order)).objective == a
