"""A perfect matching that uses every colour, solved algebraically and by brute force."""

from rainbowpack import otr
from rainbowpack.otr import ColoredGraph

# a 6-cycle with two chords; each edge offers some colours at some cost
edges = ((0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (0, 3), (1, 4))
costs = ({"red": 1}, {"blue": 2}, {"red": 1, "green": 3}, {"blue": 1},
         {"green": 1}, {"red": 2, "blue": 2}, {"green": 0}, {"red": 4})
g = ColoredGraph(6, ("red", "blue", "green"), edges, costs, budget=10)

for engine in otr.ENGINES:
    sol = otr.solve(g, rng_seed=1, engine=engine)
    picked = [(edges[e], c) for e, c in zip(sol.matching, sol.colors)]
    print(f"{engine:>10}: weight {sol.weight}  {picked}")

print("brute force:", otr.brute_force(g).weight)

# the same instance as a conjoining problem: one graph copy per colour
red = otr.reduce_to_conjoining(g)
print(red.to_text().splitlines()[0], "in the reduced graph,",
      len(red.instance.edges), "edges")
