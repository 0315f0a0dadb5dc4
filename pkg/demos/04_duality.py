"""
Finite duals of tree families
=============================

When every forbidden structure is a relational tree, all pieces have one
root and the lifted class is described by unary labels.  The labelled
one-vertex lifts become the vertices of a template D with Forb_h(F) = CSP(D).
"""

# %%
from univlift import construct_dual, cycle, directed_path, hom_exists
from univlift.duality import dual_candidate, is_relational_tree, verify_dual_pair
from univlift.relcore import complete, core_of, transitive_tournament

# %%
# The dual of the directed path with k edges is the transitive tournament
# on k vertices, up to homomorphic equivalence.
for k in (1, 2, 3):
    d = construct_dual([directed_path(k)])
    tt = transitive_tournament(k)
    print(k, core_of(d), hom_exists(d, tt) and hom_exists(tt, d))

# %%
# Every template vertex carries the set of pieces it stands for.
dc = dual_candidate([directed_path(2)])
for v, labels in enumerate(dc.vertex_labels):
    print(v, sorted(labels))
print("verified up to 4 vertices:", verify_dual_pair([directed_path(2)], dc.structure, 4))

# %%
# C5 is not a tree, so no finite template works.  K3 fails first on the
# 5-cycle itself, K2 only on the 7-cycle.
print(is_relational_tree(cycle(5)))
print(verify_dual_pair([cycle(5)], complete(3), 7), verify_dual_pair([cycle(5)], complete(2), 7))
