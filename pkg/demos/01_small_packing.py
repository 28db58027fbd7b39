"""Pack six items, three of them small, and look at how the answer was found."""

from fractions import Fraction

from rainbowpack import Instance, validate
from rainbowpack import solver_bp_det, solver_vp
from rainbowpack.smallness import split_small_large

sizes = ["0.1", "0.15", "0.2", "0.3", "0.4", "0.9"]
inst = Instance(1, (Fraction(1),), tuple((Fraction(s),) for s in sizes))

# which items count as small: the fewest whose removal leaves no triple that fits together
split = split_small_large(inst)
print("small:", [sizes[j] for j in split.small], "large:", [sizes[j] for j in split.large])

# randomized solver; the trace names the accepting guess
a = solver_vp.solve(inst, rng_seed=7)
print("bins used:", a.objective)
print("accepting guess:", a.trace)
for b in sorted(set(a.placement)):
    print("  bin", b, [sizes[j] for j, c in enumerate(a.placement) if c == b])
print("valid:", validate(inst, a, "pack").valid)

# the deterministic branching solver agrees
d = solver_bp_det.solve(inst)
print("deterministic:", d.objective, "bins,", d.trace["branches"], "branches explored")
