from itertools import product

import networkx as nx
import pytest

from conftest import GRAPH, random_digraph, random_graph, to_nx
from univlift.relcore import (
    Signature,
    Structure,
    VertexMap,
    canonical_form,
    complete,
    connected_components,
    core_of,
    cycle,
    disjoint_union,
    empty_structure,
    find_embedding,
    find_homomorphism,
    find_homomorphism_with_pins,
    find_isomorphism,
    gaifman_graph,
    is_homomorphism,
    is_minimal_family,
    iter_homomorphisms,
    iter_structures,
    make_digraph,
    make_graph,
    path,
)


def brute_homs(a, b, injective=False):
    out = []
    for img in product(range(b.n), repeat=a.n):
        if injective and len(set(img)) < a.n:
            continue
        if all(tuple(img[v] for v in t) in tb for ta, tb in zip(a.relations, b.relations) for t in ta):
            out.append(img)
    return out


def test_structure_validation():
    with pytest.raises(ValueError):
        Structure(GRAPH, 2, [[(0, 2)]])
    with pytest.raises(ValueError):
        Structure(GRAPH, 2, [[(0,)]])
    with pytest.raises(KeyError):
        Structure(GRAPH, 2, {"arc": [(0, 1)]})
    assert Structure(GRAPH, 2, {"edge": [(0, 1)]}) == make_digraph(2, [(0, 1)])


def test_is_homomorphism_examples():
    c5 = cycle(5)
    assert is_homomorphism(VertexMap(c5, c5, range(5)))
    k2 = complete(2)
    assert not is_homomorphism(VertexMap(k2, empty_structure(GRAPH, 1), (0, 0)))
    assert is_homomorphism(VertexMap(c5, c5, [(v + 1) % 5 for v in range(5)]))


def test_find_homomorphism_examples():
    assert find_homomorphism(cycle(5), cycle(4)) is None
    m = find_homomorphism(cycle(5), complete(3))
    assert m is not None and is_homomorphism(m)
    assert find_homomorphism(empty_structure(GRAPH, 0), cycle(3)).image == ()


def test_pinned_examples():
    p = path(2)  # u=0, m=1, v=2
    m = find_homomorphism_with_pins(p, cycle(4), {0: 0, 2: 2})
    assert m is not None and m[1] in (1, 3)
    assert find_homomorphism_with_pins(p, cycle(4), {0: 0, 2: 1}) is None
    full = {0: 0, 1: 1, 2: 2}
    assert find_homomorphism_with_pins(p, cycle(4), full).image == (0, 1, 2)


def test_embedding_examples():
    assert find_embedding(complete(2), complete(3)) is not None
    assert find_embedding(path(2), complete(3)) is None
    c5 = cycle(5)
    assert find_embedding(c5, c5) is not None


def test_hom_search_matches_brute_force(rng):
    for _ in range(60):
        a = random_digraph(rng, rng.randint(1, 4), 0.35, loops=True)
        b = random_digraph(rng, rng.randint(1, 4), 0.45, loops=True)
        assert sorted(iter_homomorphisms(a, b)) == brute_homs(a, b)
        assert sorted(iter_homomorphisms(a, b, injective=True)) == brute_homs(a, b, injective=True)


def test_core_examples():
    assert core_of(complete(3)).n == 3
    c = core_of(path(2))
    assert c.n == 2 and find_isomorphism(c, complete(2)) is not None
    c = core_of(disjoint_union(complete(2), complete(2)))
    assert find_isomorphism(c, complete(2)) is not None


def test_minimal_family_examples():
    assert is_minimal_family([complete(3)])
    assert not is_minimal_family([cycle(3), cycle(5)])
    # C7 maps onto C5 (odd cycles map to shorter odd cycles), so the pair is not minimal
    assert find_homomorphism(cycle(7), cycle(5)) is not None
    assert not is_minimal_family([cycle(5), cycle(7)])


def test_gaifman_examples():
    sig = Signature((("r", 3),))
    g = gaifman_graph(Structure(sig, 3, [[(0, 1, 2)]]))
    assert g == complete(3)
    loopy = make_graph(3, [(0, 1), (1, 1)])
    assert gaifman_graph(loopy) == make_graph(3, [(0, 1)])
    assert gaifman_graph(empty_structure(sig, 4)) == empty_structure(GRAPH, 4)


def test_components_examples():
    assert len(connected_components(cycle(5))) == 1
    assert len(connected_components(disjoint_union(complete(2), complete(2)))) == 2
    assert len(connected_components(empty_structure(GRAPH, 3))) == 3


def test_canonical_form_is_isomorphism_invariant(rng):
    graphs = [random_graph(rng, 6, 0.45) for _ in range(40)]
    for g in graphs:
        perm = list(range(6))
        rng.shuffle(perm)
        assert canonical_form(g) == canonical_form(g.relabel(perm, 6))
    for g in graphs[:15]:
        for h in graphs[:15]:
            assert (canonical_form(g) == canonical_form(h)) == nx.is_isomorphic(to_nx(g), to_nx(h))


@pytest.mark.parametrize(
    "n, symmetric, loops, expected",
    [
        # unlabelled graphs, graphs with loops allowed, binary relations
        (5, True, False, 34),
        (6, True, False, 156),
        (4, True, True, 90),
        (3, False, True, 104),
    ],
)
def test_enumeration_counts(n, symmetric, loops, expected):
    assert sum(1 for _ in iter_structures(GRAPH, n, symmetric=symmetric, loops=loops)) == expected
