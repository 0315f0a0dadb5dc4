"""
Lifts, universal witnesses and the forbidden family
===================================================

A lift decorates a structure with one relation per piece.  The canonical
lift records where each piece maps; the class L collects induced sublifts
of canonical lifts of C5-free graphs.  Membership is decided either through
the universal witness or by excluding a finite family of lifts.
"""

# %%
import random

from univlift import Lift, canonical_lift, cycle, forbidden_family, member_of_L, path
from univlift.liftclass import member_via_forbidden, universal_witness
from univlift.relcore import Structure

c5 = cycle(5)
fp = forbidden_family([c5])
cat = fp.catalogue

# %%
# The 2-edge path: P1 holds the pairs joined by a walk of length 2, P2 the
# pairs joined by a walk of length 3.
x = canonical_lift(path(2), cat)
print(x)
print("in L:", member_of_L(x))

# %%
# A single vertex claiming both a 2-walk and a 3-walk back to itself: its
# universal witness glues a triangle and a 4-cycle at one vertex, and C5
# maps into that.
bad = Lift.build(cat, Structure(c5.signature, 1), {0: [(0, 0)], 1: [(0, 0)]})
print(universal_witness(bad))
print("in L:", member_of_L(bad))

# %%
# F' is finite and small.  Plain members are forbidden outright, rooted
# members are forbidden unless their root tuple is present.
print(len(fp.plain), "plain and", len(fp.rooted), "rooted members")
print("largest member:", max(m.n for m in fp.plain), "vertices")

# %%
# The two membership tests agree on random lifts.
rng = random.Random(0)
agree = 0
for _ in range(500):
    n = rng.randint(0, 4)
    a = Structure(c5.signature, n, [{(u, v) for u in range(n) for v in range(n) if u != v and rng.random() < 0.3}])
    a = Structure(a.signature, n, [a.relations[0] | {(v, u) for u, v in a.relations[0]}])
    ext = [{tuple(rng.randrange(n) for _ in range(2)) for _ in range(rng.randint(0, 3))} if n else set() for _ in cat.pieces]
    y = Lift.build(cat, a, ext)
    agree += member_of_L(y) == member_via_forbidden(y, fp)
print(agree, "of 500 agree")
