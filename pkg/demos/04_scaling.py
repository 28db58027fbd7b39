"""Time the packing solver as the number of large items grows, k held at 2."""

import random
import time

import numpy as np

from rainbowpack import generators, solver_vp

ns = [10, 20, 40, 80]
times = []
for n in ns:
    inst = generators.pairable_instance(random.Random(n), n, 2)
    t = time.perf_counter()
    a = solver_vp.solve(inst, rng_seed=0)
    times.append(time.perf_counter() - t)
    print(f"n={n:3d}  bins={a.objective:3d}  {times[-1]:.2f}s")

slope = np.polyfit(np.log(ns), np.log(times), 1)[0]
print(f"log-log slope {slope:.2f}")
