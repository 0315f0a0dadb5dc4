"""
Even-odd metric spaces
======================

Distances are pairs (shortest even walk, shortest odd walk) with w for
"no such walk".  Graphs give such spaces, spaces amalgamate by shortest
walks, and Katětov-style nodes build a space into which all of them embed.
"""

# %%
import numpy as np

from univlift import cycle, graph_to_evenodd
from univlift.evenodd import (
    EvenOddPair,
    build_kl_prefix,
    edge_graph_of_space,
    evenodd_amalgam,
    find_isometric_embedding,
    in_class_Kl,
    katetov_embed,
    katetov_space,
    random_space,
    validate_space,
)
from univlift.relcore import make_graph

# %%
print(EvenOddPair(2, 1) + EvenOddPair(2, 1))
s = graph_to_evenodd(cycle(5))
print(s.d(0, 1), s.d(0, 2), s.d(0, 0))

# %%
# Gluing two 5-cycles at a vertex; the result is again a graph space.
u = evenodd_amalgam(s, s, [0], [0])
print(u.point_count, "points, violations:", validate_space(u))

# %%
# K5: no pair has a + b <= 5.  Graphs of odd girth 7 qualify, and the edge
# graph of the space gives the graph back.
c7 = graph_to_evenodd(cycle(7))
print(in_class_Kl(c7, 5), in_class_Kl(s, 5), edge_graph_of_space(c7) == cycle(7))
prefix = build_kl_prefix([c7, graph_to_evenodd(make_graph(3, [(0, 1), (1, 2)]))], 5)
print("prefix of", prefix.point_count, "points; C7 embeds at", find_isometric_embedding(c7, prefix))

# %%
# Any valid space embeds point by point as Katětov nodes.
rng = np.random.default_rng(0)
r = random_space(5, rng, 10, 0.5)
nodes = katetov_embed(r)
print(r)
print("reproduced:", katetov_space(nodes) == r)
