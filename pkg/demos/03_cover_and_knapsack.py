"""Covering and multiple knapsack on the same handful of 2-D vectors."""

import random

from rainbowpack import generators, oracles, solver_vc, solver_vmkp

rng = random.Random(3)
inst = generators.cover_instance(rng, 7, 2, 2)
print("vectors:", [[str(x) for x in v] for v in inst.vectors])

c = solver_vc.solve(inst, rng_seed=1)
print("covered containers:", c.objective, "oracle:", oracles.brute_force_cover(inst).objective)
print("placement:", c.placement)

kinst = generators.mixed_instance(rng, 7, 2, 2, profits=True, containers=2)
k = solver_vmkp.solve(kinst, rng_seed=1)
print("profits:", kinst.profits, "containers:", kinst.containers)
print("best profit:", k.objective, "oracle:", oracles.brute_force_knapsack(kinst).objective)
print("placement (None = left out):", k.placement)
