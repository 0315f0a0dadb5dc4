import random

import pytest

from conftest import GRAPH, random_amalgam_problem
from univlift.amalgam import (
    AmalgamationError,
    AmalgamProblem,
    amalgam_embedding_of_y,
    extension_property_check,
    forb_h_structures,
    free_amalgam,
    generic_build,
    lift_amalgam,
    one_point_extensions,
    universality_check,
)
from univlift.decompose import build_catalogue
from univlift.liftclass import Lift, canonical_lift, member_of_L
from univlift.relcore import (
    Structure,
    complete,
    cycle,
    disjoint_union,
    find_embedding,
    find_isomorphism,
    hom_exists,
    iter_structures,
    make_graph,
    path,
)

C5 = cycle(5)
CAT5 = build_catalogue([C5])
K3 = complete(3)


def test_free_amalgam_examples():
    a, b = path(2), cycle(4)
    assert free_amalgam(a, b, [], []) == disjoint_union(a, b)
    assert free_amalgam(a, a, range(a.n), range(a.n)) == a
    assert free_amalgam(complete(2), complete(2), [1], [0]) == make_graph(3, [(0, 1), (1, 2)])


def test_free_amalgam_symmetric_up_to_iso(rng):
    for _ in range(20):
        a = make_graph(4, [(0, 1), (1, 2), (2, 3)])
        b = make_graph(3, [(0, 1), (0, 2)])
        ca = rng.sample(range(4), 1)
        cb = rng.sample(range(3), 1)
        ab = free_amalgam(a, b, ca, cb)
        ba = free_amalgam(b, a, cb, ca)
        assert find_isomorphism(ab, ba) is not None


def test_free_amalgam_rejects_bad_gluing():
    with pytest.raises(AmalgamationError):
        free_amalgam(complete(2), complete(2), [0, 1], [0])
    with pytest.raises(AmalgamationError):
        free_amalgam(complete(2), Structure(GRAPH, 2), [0, 1], [0, 1])
    with pytest.raises(AmalgamationError):
        free_amalgam(complete(2), complete(2), [0, 0], [0, 1])


def test_lift_amalgam_of_identical_parts():
    x = canonical_lift(path(2), CAT5)
    ident = tuple(range(x.n))
    assert lift_amalgam(AmalgamProblem(x, x, x, ident, ident)) == x


def test_lift_amalgam_two_edges():
    edge = canonical_lift(complete(2), CAT5)
    z = edge.restrict([0])
    r = lift_amalgam(AmalgamProblem(edge, edge, z, (1,), (0,)))
    assert r == canonical_lift(path(2), CAT5)
    assert r.restrict([0, 1]) == edge
    assert member_of_L(r)


def test_lift_amalgam_rejects_lifts_outside_L():
    bad = canonical_lift(C5, CAT5)
    z = Lift.empty(CAT5)
    with pytest.raises(AmalgamationError):
        lift_amalgam(AmalgamProblem(bad, bad, z, (), ()))


def test_problem_rejects_non_induced_z():
    x = canonical_lift(complete(2), CAT5)
    z = canonical_lift(Structure(GRAPH, 2), CAT5)
    with pytest.raises(AmalgamationError):
        AmalgamProblem(x, x, z, (0, 1), (0, 1))


def test_random_amalgams():
    rng = random.Random(7)
    for _ in range(150):
        p = random_amalgam_problem(rng, CAT5)
        r = lift_amalgam(p)
        assert member_of_L(r)
        assert r.restrict(range(p.x.n)) == p.x
        assert r.restrict(amalgam_embedding_of_y(p)) == p.y
        assert not hom_exists(C5, r.shadow)


def test_one_point_extensions_are_in_L():
    z = canonical_lift(complete(2), CAT5)
    exts = one_point_extensions(z)
    assert exts
    for t in exts:
        assert member_of_L(t)
        assert t.restrict([0, 1]) == z
    assert len({t.structure for t in exts}) == len(exts)


def test_single_vertex_lifts_for_c5():
    exts = one_point_extensions(Lift.empty(CAT5))
    # a P2 loop alone glues a triangle, which forces the P1 loop; both close a 5-walk
    assert [t.extended for t in exts] == [(frozenset(), frozenset()), (frozenset({(0, 0)}), frozenset())]


def test_generic_build_zero_rounds():
    assert generic_build([C5], 0, 3).n == 0


def test_generic_build_k3_contains_small_triangle_free_graphs():
    u = generic_build([K3], 4, 2, check=True)
    shadow = u.shadow
    for a in forb_h_structures([K3], 3):
        assert find_embedding(a, shadow) is not None
    assert extension_property_check(u, k=2) == []
    assert universality_check(u, n=3)


def test_generic_build_monotone_in_rounds():
    prev = generic_build([C5], 1, 2)
    for r in (2, 3):
        cur = generic_build([C5], r, 2, max_vertices=60)
        assert cur.restrict(range(prev.n)) == prev
        prev = cur


def test_generic_build_max_vertices():
    assert generic_build([C5], 5, 3, max_vertices=10).n == 10


def test_deleting_a_vertex_breaks_saturation():
    u = generic_build([K3], 6, 1)
    assert u.n == 4
    assert extension_property_check(u, k=2) == []
    for v in range(u.n):
        rest = [w for w in range(u.n) if w != v]
        assert extension_property_check(u.restrict(rest), k=2)


def test_extension_check_on_empty_lift():
    fails = extension_property_check(Lift.empty(CAT5), k=1)
    assert len(fails) == len(one_point_extensions(Lift.empty(CAT5)))
    assert all(s == () for s, _ in fails)


def test_universality_examples():
    assert universality_check(Lift.empty(CAT5), n=0)
    assert not universality_check(Lift.empty(CAT5), n=1)


def test_forb_h_structures_k3_count():
    # triangle-free graphs: 1, 1, 2, 3, 7, 14 on 0..5 vertices
    counts = [sum(1 for a in iter_structures(GRAPH, n, symmetric=True) if not hom_exists(K3, a)) for n in range(6)]
    assert counts == [1, 1, 2, 3, 7, 14]
    assert sum(1 for _ in forb_h_structures([K3], 5)) == sum(counts)
