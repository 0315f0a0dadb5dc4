"""
Pieces of a structure
=====================

A minimal cut splits a connected structure, and a piece is the cut together
with one of the components, rooted at the cut.  Pieces are the building
blocks of the lifted class.
"""

# %%
from univlift import cycle, minimal_cuts, petersen, pieces_of
from univlift.decompose import build_catalogue, max_min_cut_arity, minimal_homomorphic_images

c5 = cycle(5)
print("minimal cuts of C5:", minimal_cuts(c5))

# %%
# Up to rooted isomorphism (roots may be permuted) C5 has two pieces: the
# short and the long way around between two non-adjacent vertices.
for p in pieces_of(c5):
    print(p.structure, "rooted at", p.roots)

# %%
# The Petersen graph has many minimal cuts but only a few piece shapes.
pet = petersen()
print(len(minimal_cuts(pet)), "minimal cuts,", len(pieces_of(pet)), "pieces")

# %%
# The catalogue fixes the order of the pieces of a family; its lifted
# signature adds one relation P1, P2, ... per piece.
cat = build_catalogue([c5])
print(cat.lifted_signature)
print("largest minimal cut:", max_min_cut_arity([c5]))

# %%
# Minimal homomorphic images: quotients of C5 that still receive C5 but
# none of whose proper induced parts do.
for img in minimal_homomorphic_images(c5, loopless=True):
    print(img)
