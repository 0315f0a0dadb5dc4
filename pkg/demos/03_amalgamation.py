"""
Amalgamation and a finite generic prefix
========================================

Lifts in L amalgamate: glue the universal witnesses freely over the common
part and read off the canonical lift.  Repeating one-point extensions gives
finite approximations of the generic lift, whose shadow contains every
small C5-free graph.
"""

# %%
from univlift import canonical_lift, complete, cycle
from univlift.amalgam import (
    AmalgamProblem,
    extension_property_check,
    generic_build,
    lift_amalgam,
    universality_check,
)
from univlift.decompose import build_catalogue

c5 = cycle(5)
cat = build_catalogue([c5])

# %%
# Two edges sharing a vertex.  The result is the canonical lift of the
# 2-edge path, and neither edge gains tuples.
edge = canonical_lift(complete(2), cat)
z = edge.restrict([0])
r = lift_amalgam(AmalgamProblem(edge, edge, z, (1,), (0,)))
print(r)

# %%
# For triangle-free graphs the builder saturates quickly.
u = generic_build([complete(3)], rounds=4, size_cap=2)
print(u.n, "vertices")
print("unrealised extensions over sets of size <= 1:", len(extension_property_check(u, k=2)))
print("contains all triangle-free graphs on 3 vertices:", universality_check(u, n=3))

# %%
# For C5 the prefix grows with every round.  Two rounds are too few to hold
# every C5-free graph on 3 vertices, three rounds are enough.
for rounds in (2, 3):
    u = generic_build([c5], rounds=rounds, size_cap=2)
    print(rounds, "rounds:", u.n, "vertices; universal at n=3:", universality_check(u, n=3))
