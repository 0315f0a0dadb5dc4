import random

import networkx as nx
import pytest

from univlift.relcore import Signature, Structure, make_digraph, make_graph


def to_nx(s: Structure) -> nx.Graph:
    """Gaifman-free view of a loopless symmetric graph structure."""
    g = nx.Graph()
    g.add_nodes_from(range(s.n))
    g.add_edges_from((a, b) for a, b in s.relations[0] if a != b)
    return g


def random_graph(rng: random.Random, n: int, p: float = 0.4) -> Structure:
    return make_graph(n, [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p])


def random_digraph(rng: random.Random, n: int, p: float = 0.3, loops: bool = False) -> Structure:
    return make_digraph(n, [(a, b) for a in range(n) for b in range(n) if (loops or a != b) and rng.random() < p])


@pytest.fixture
def rng():
    return random.Random(0)


GRAPH = Signature.graph()


def random_lift(rng: random.Random, cat, max_n: int = 5):
    """Random lift over the catalogue: a perturbed canonical lift or random extended tuples."""
    from univlift.liftclass import Lift, canonical_lift

    n = rng.randint(0, max_n)
    p = rng.choice([0.2, 0.35, 0.5])
    if rng.random() < 0.6:
        edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < p]
        if n and rng.random() < 0.1:
            edges.append((0, 0))
        a = make_graph(n, edges)
    else:
        a = make_digraph(n, [(x, y) for x in range(n) for y in range(n) if rng.random() < p * 0.6])
    if rng.random() < 0.6:
        ext = [set(e) for e in canonical_lift(a, cat).extended]
        for _ in range(rng.choice([0, 0, 1, 1, 2])):
            if not n or not len(cat):
                break
            i = rng.randrange(len(cat))
            t = tuple(rng.randrange(n) for _ in range(cat.pieces[i].arity))
            if t in ext[i] and rng.random() < 0.5:
                ext[i].discard(t)
            else:
                ext[i].add(t)
    else:
        ext = [set() for _ in cat.pieces]
        for i, piece in enumerate(cat.pieces):
            for _ in range(rng.randint(0, 6) if n else 0):
                ext[i].add(tuple(rng.randrange(n) for _ in range(piece.arity)))
    return Lift.build(cat, a, ext)



def random_forb_graph(rng: random.Random, fam, lo: int = 0, hi: int = 6) -> Structure:
    from univlift.relcore import hom_exists

    while True:
        a = random_graph(rng, rng.randint(lo, hi), rng.choice([0.3, 0.5]))
        if not any(hom_exists(f, a) for f in fam):
            return a


def random_amalgam_problem(rng: random.Random, cat, max_part: int = 5):
    """x and y are sublifts of canonical lifts sharing z.

    Half of the time both come from the same structure, otherwise y comes
    from an unrelated structure into whose canonical lift z embeds.
    """
    from univlift.amalgam import AmalgamProblem
    from univlift.liftclass import canonical_lift
    from univlift.relcore import find_embedding

    fam = cat.family

    def pick(lift, keep):
        rest = [v for v in range(lift.n) if v not in keep]
        extra = rng.sample(rest, rng.randint(0, min(len(rest), max_part - len(keep))))
        verts = list(keep) + extra
        rng.shuffle(verts)
        pos = {v: k for k, v in enumerate(verts)}
        return lift.restrict(verts), tuple(pos[v] for v in keep)

    a = random_forb_graph(rng, fam, 1)
    la = canonical_lift(a, cat)
    zverts = rng.sample(range(a.n), rng.randint(0, min(a.n, max_part - 1)))
    z = la.restrict(zverts)
    x, ex = pick(la, zverts)
    if rng.random() < 0.5:
        y, ey = pick(la, zverts)
        return AmalgamProblem(x, y, z, ex, ey)
    for _ in range(30):
        lb = canonical_lift(random_forb_graph(rng, fam, z.n), cat)
        emb = find_embedding(z.structure, lb.structure)
        if emb is not None:
            y, ey = pick(lb, list(emb.image))
            return AmalgamProblem(x, y, z, ex, ey)
    y, ey = pick(la, zverts)
    return AmalgamProblem(x, y, z, ex, ey)


def random_extension_space(core, extra: int, rng, max_entry: int = 12, density: float = 0.5, tries: int = 50):
    """A valid space whose first points induce ``core`` exactly, plus ``extra`` random points.

    Random partial distances touching the new points are closed under walks;
    draws that would shorten a distance inside ``core`` are resampled, and
    the last resort leaves the new points unreachable from ``core``.
    """
    import numpy as np

    from univlift.evenodd import OMEGA, walk_closure

    k = core.point_count
    n = k + extra
    evens = list(range(2, max_entry + 1, 2))
    odds = list(range(1, max_entry + 1, 2))
    for attempt in range(tries + 1):
        even = np.full((n, n), OMEGA)
        odd = np.full((n, n), OMEGA)
        even[:k, :k], odd[:k, :k] = core.even, core.odd
        for u in range(k, n):
            even[u, u] = 0
            if rng.random() < density / 2:
                odd[u, u] = rng.choice(odds)
            for v in range(u):
                if attempt == tries and v < k:
                    continue
                if rng.random() < density:
                    even[u, v] = even[v, u] = rng.choice(evens)
                if rng.random() < density:
                    odd[u, v] = odd[v, u] = rng.choice(odds)
        out = walk_closure(even, odd)
        if out.induced(range(k)) == core:
            return out
    raise AssertionError("unreachable: the last attempt keeps core isolated")
