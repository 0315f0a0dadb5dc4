from itertools import combinations, product

import pytest

from conftest import GRAPH, random_graph, random_lift
from univlift.decompose import build_catalogue
from univlift.liftclass import (
    Lift,
    RootedLift,
    canonical_lift,
    forbidden_family,
    indicator_product,
    indicator_projection,
    is_covering,
    member_of_L,
    member_via_forbidden,
    piece_pair,
    universal_witness,
)
from univlift.relcore import (
    Signature,
    Structure,
    SignatureMismatch,
    VertexMap,
    complete,
    cycle,
    find_homomorphism_with_pins,
    hom_exists,
    is_homomorphism,
    iter_structures,
    make_graph,
    path,
)

C5 = cycle(5)
CAT5 = build_catalogue([C5])
FAMILIES = {"k3": [complete(3)], "c5": [C5], "c5c7": [C5, cycle(7)]}


@pytest.fixture(scope="module")
def f_primes():
    return {name: forbidden_family(fam) for name, fam in FAMILIES.items()}


def test_catalogue_order_for_c5():
    # P1 is the 2-edge path, P2 the 3-edge path
    assert [p.structure.n for p in CAT5.pieces] == [3, 4]


def test_canonical_lift_of_k2():
    x = canonical_lift(complete(2), CAT5)
    assert x.ext(0) == {(0, 0), (1, 1)}
    assert x.ext(1) == {(0, 1), (1, 0)}


def test_canonical_lift_of_edgeless_vertex():
    x = canonical_lift(Structure(GRAPH, 1), CAT5)
    assert x.extended == (frozenset(), frozenset())


def test_canonical_lift_of_c5_has_distance_two_pairs():
    x = canonical_lift(C5, CAT5)
    dist2 = {(v, (v + s) % 5) for v in range(5) for s in (2, 3)}
    assert dist2 <= x.ext(0)


def test_canonical_lift_restricted():
    x = canonical_lift(C5, CAT5, [0, 2])
    assert x.n == 2
    assert x.shadow == Structure(GRAPH, 2)
    assert (0, 1) in x.ext(0)


def test_canonical_lift_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        canonical_lift(Structure(Signature((("r", 3),)), 1), CAT5)


def test_witness_of_empty_extension_is_shadow():
    x = Lift.build(CAT5, path(3))
    assert universal_witness(x) == path(3)


def test_witness_glues_two_walk():
    x = Lift.build(CAT5, Structure(GRAPH, 1), {0: [(0, 0)]})
    assert universal_witness(x) == make_graph(2, [(0, 1)])


def test_witness_vertex_count(rng):
    for _ in range(50):
        x = random_lift(rng, CAT5)
        expect = x.n + sum(len(x.ext(i)) * (p.structure.n - p.arity) for i, p in enumerate(CAT5.pieces))
        assert universal_witness(x).n == expect


def test_witness_maps_back_onto_forb_member(rng):
    fam = [C5]
    seen = 0
    for _ in range(60):
        a = random_graph(rng, rng.randint(1, 6), 0.4)
        if hom_exists(C5, a):
            continue
        seen += 1
        uw = universal_witness(canonical_lift(a, CAT5))
        assert find_homomorphism_with_pins(uw, a, {v: v for v in range(a.n)}) is not None
        assert member_of_L(canonical_lift(a, CAT5), fam)
    assert seen > 10


def test_sublifts_of_canonical_lifts_are_in_L(rng):
    for _ in range(30):
        a = random_graph(rng, 5, 0.5)
        if hom_exists(C5, a):
            continue
        full = canonical_lift(a, CAT5)
        for k in range(a.n + 1):
            for s in combinations(range(a.n), k):
                assert member_of_L(full.restrict(list(s)))


def test_member_examples():
    assert member_of_L(Lift.empty(CAT5))
    fake = Lift.build(CAT5, complete(2), {0: [(0, 0), (1, 1), (0, 1)], 1: [(0, 1), (1, 0)]})
    assert not member_of_L(fake)
    assert not member_of_L(canonical_lift(C5, CAT5))


def test_is_covering():
    assert is_covering(canonical_lift(C5, CAT5), C5)
    assert not is_covering(Lift.empty(CAT5), C5)
    # one vertex with a P1 loop and a P2 loop closes a 5-walk through it
    x = Lift.build(CAT5, Structure(GRAPH, 1), {0: [(0, 0)], 1: [(0, 0)]})
    assert is_covering(x, C5)
    rl = RootedLift(Lift.build(CAT5, Structure(GRAPH, 2), {1: [(0, 1)]}), (0, 1), 0)
    # a 3-walk 0..1 plus nothing else gives no 2-walk from 0 to 1
    assert not is_covering(rl, CAT5.pieces[0])
    rl = RootedLift(Lift.build(CAT5, make_graph(3, [(0, 2), (2, 1)])), (0, 1), 0)
    assert is_covering(rl, CAT5.pieces[0])


def test_is_covering_errors():
    rl = RootedLift(Lift.build(CAT5, Structure(GRAPH, 2), {0: [(0, 1)]}), (0, 1), 0)
    with pytest.raises(ValueError):
        is_covering(rl, CAT5.pieces[0])
    with pytest.raises(ValueError):
        is_covering(Lift.empty(CAT5), CAT5.pieces[0])
    with pytest.raises(ValueError):
        RootedLift(Lift.empty(CAT5, 1), (0,), 0)


def test_forbidden_family_k3_matches_forb_h():
    fam = [complete(3)]
    fp = forbidden_family(fam)
    assert len(fp.catalogue) == 0
    for n in range(6):
        for a in iter_structures(GRAPH, n, symmetric=True):
            x = Lift.build(fp.catalogue, a)
            assert member_via_forbidden(x, fp) == (not hom_exists(complete(3), a))


def test_forbidden_family_vertex_bound(f_primes):
    for name, fam in FAMILIES.items():
        fp = f_primes[name]
        bound = max(f.n for f in fam)
        assert all((m if isinstance(m, Lift) else m.lift).n <= bound for m in fp.members)


def test_forbidden_family_parallel_is_identical():
    assert forbidden_family([C5]) == forbidden_family([C5], jobs=2)


def test_member_via_forbidden_examples():
    fp = forbidden_family([C5])
    assert member_via_forbidden(Lift.empty(CAT5), fp)
    assert not member_via_forbidden(canonical_lift(C5, CAT5), fp)
    with pytest.raises(SignatureMismatch):
        member_via_forbidden(Lift.empty(build_catalogue([complete(3)])), fp)


def test_membership_agrees_on_small_lifts_exhaustively():
    # every lift on at most two vertices over the C5 catalogue
    fp = forbidden_family([C5])
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for n in range(3):
        verts = [t for t in pairs if max(t) < n]
        for a in iter_structures(GRAPH, n, loops=True):
            for e1 in range(1 << len(verts)):
                for e2 in range(1 << len(verts)):
                    ext = [
                        [t for k, t in enumerate(verts) if e >> k & 1] for e in (e1, e2)
                    ]
                    x = Lift.build(CAT5, a, ext)
                    assert member_via_forbidden(x, fp) == member_of_L(x), x


@pytest.mark.parametrize("name,count", [("c5", 300), ("c5c7", 100)])
def test_membership_agrees_on_random_lifts(rng, f_primes, name, count):
    fam, fp = FAMILIES[name], f_primes[name]
    for _ in range(count):
        x = random_lift(rng, fp.catalogue)
        assert member_via_forbidden(x, fp) == member_of_L(x, fam), x


def test_indicator_single_tuple_is_copy():
    h = path(3)
    s = Structure(Signature((("s", 2),)), 2, [[(0, 1)]])
    ip = indicator_product(s, h, (0, 2))
    assert ip.structure.n == h.n
    assert hom_exists(ip.structure, h) and hom_exists(h, ip.structure)


def test_indicator_disjoint_tuples():
    h = path(3)
    s = Structure(Signature((("s", 2),)), 4, [[(0, 1), (2, 3)]])
    ip = indicator_product(s, h, (0, 2))
    assert ip.structure.n == 2 * h.n
    assert ip.structure.tuple_count == 2 * h.tuple_count


def test_indicator_errors():
    s = Structure(Signature((("s", 2),)), 2, [[(0, 1)]])
    with pytest.raises(ValueError):
        indicator_product(s, path(3), (0,))
    with pytest.raises(ValueError):
        indicator_product(s, path(3), (0, 0))


def test_indicator_projection_is_homomorphism():
    h, roots, labels = piece_pair(C5, (0, 2))
    assert len(roots) == 4
    sig = Signature((("s", 4),))
    s = Structure(sig, 8, [[(0, 1, 2, 3), (0, 4, 2, 5), (6, 1, 7, 3)]])
    ip = indicator_product(s, h, roots)
    proj = indicator_projection(ip, labels)
    assert is_homomorphism(VertexMap(ip.structure, C5, proj))


def test_piece_pair_needs_two_components():
    with pytest.raises(ValueError):
        piece_pair(C5, (0, 1))
