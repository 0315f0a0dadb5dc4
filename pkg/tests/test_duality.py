import random

import pytest

from conftest import GRAPH, random_digraph
from univlift.decompose import build_catalogue, max_min_cut_arity
from univlift.duality import (
    IncidenceGraph,
    NotATree,
    construct_dual,
    csp_membership,
    dual_candidate,
    find_duality_counterexample,
    iter_templates,
    monadic_catalogue,
    monadic_csp_template,
    verify_dual_pair,
)
from univlift.liftclass import Lift, forbidden_family, member_of_L
from univlift.relcore import (
    Signature,
    SignatureMismatch,
    Structure,
    complete,
    core_of,
    cycle,
    directed_path,
    hom_exists,
    iter_structures,
    make_digraph,
    transitive_tournament,
)
from univlift.duality import is_relational_tree


def hom_equivalent(a, b):
    return hom_exists(a, b) and hom_exists(b, a)


def test_relational_tree_examples():
    assert is_relational_tree(make_digraph(2, [(0, 1)]))
    assert not is_relational_tree(cycle(3))
    assert is_relational_tree(directed_path(2))
    assert IncidenceGraph.of(directed_path(2)).n == 3
    ternary = Structure(Signature((("r", 3),)), 3, [[(0, 1, 2)]])
    assert is_relational_tree(ternary)
    # a repeated vertex inside a tuple gives parallel incidence edges
    assert not is_relational_tree(Structure(Signature((("r", 3),)), 2, [[(0, 1, 1)]]))
    assert not is_relational_tree(Structure(GRAPH, 0))


def test_trees_have_cut_arity_one():
    rng = random.Random(3)
    seen = 0
    for _ in range(300):
        a = random_digraph(rng, rng.randint(2, 6), 0.25)
        if is_relational_tree(a) and a.n > 2:
            seen += 1
            assert max_min_cut_arity([a]) == 1
    assert seen > 5


def test_dual_of_single_edge():
    d = construct_dual([directed_path(1)])
    assert d == Structure(GRAPH, 1)


@pytest.mark.parametrize("k", [2, 3])
def test_dual_of_directed_path(k):
    d = construct_dual([directed_path(k)])
    assert hom_equivalent(d, transitive_tournament(k))
    assert verify_dual_pair([directed_path(k)], d, 4)


def test_dual_rejects_non_trees():
    with pytest.raises(NotATree):
        construct_dual([cycle(5)])
    with pytest.raises(ValueError):
        construct_dual([])


def test_dual_labels_and_vertex_count():
    dc = dual_candidate([directed_path(3)])
    cat = build_catalogue([directed_path(3)])
    assert len(dc.vertex_labels) == dc.structure.n <= 2 ** len(cat)
    assert frozenset() in dc.vertex_labels


@pytest.mark.parametrize("k", [2, 3])
def test_dual_lift_is_in_L(k):
    # the whole labelled template lies in L, so greedy addition in any order ends here
    fam = [directed_path(k)]
    dc = dual_candidate(fam)
    cat = build_catalogue(fam)
    ext = {i: [(v,) for v, lab in enumerate(dc.vertex_labels) if i in lab] for i in range(len(cat))}
    assert member_of_L(Lift.build(cat, dc.structure, ext), fam)


@pytest.mark.parametrize("k", [2, 3])
def test_core_of_dual_is_maximal(k):
    fam = [directed_path(k)]
    d = core_of(construct_dual(fam))
    for t in ((a, b) for a in range(d.n) for b in range(d.n)):
        if t in d.relations[0]:
            continue
        bigger = d.with_tuples({0: [t]})
        assert not verify_dual_pair(fam, bigger, k + 1)


def test_raw_dual_is_not_tuple_maximal():
    # the vertex with no labels can take an edge into the P1 vertex without creating a 2-edge path
    fam = [directed_path(2)]
    dc = dual_candidate(fam)
    empty = dc.vertex_labels.index(frozenset())
    target = dc.vertex_labels.index(frozenset({0}))
    assert (empty, target) not in dc.structure.relations[0]
    assert verify_dual_pair(fam, dc.structure.with_tuples({0: [(empty, target)]}), 5)


def test_verify_dual_examples():
    assert verify_dual_pair([directed_path(1)], Structure(GRAPH, 1), 3)
    assert verify_dual_pair([directed_path(2)], make_digraph(2, [(0, 1)]), 4)
    assert not verify_dual_pair([directed_path(2)], Structure(GRAPH, 1), 3)
    assert not verify_dual_pair([cycle(5)], complete(3), 7)


def test_counterexample_is_a_witness():
    assert find_duality_counterexample([cycle(5)], complete(2), 6) is None
    a = find_duality_counterexample([cycle(5)], complete(2), 7)
    # an odd cycle of length 7 is C5-hom-free but not bipartite
    assert a.n == 7
    assert not hom_exists(cycle(5), a) and not hom_exists(a, complete(2))


def test_parallel_counterexample_matches_serial():
    fam, d = [directed_path(3)], make_digraph(2, [(0, 1)])
    assert find_duality_counterexample(fam, d, 4) == find_duality_counterexample(fam, d, 4, jobs=2)


def test_c5_has_no_small_dual():
    for d in iter_templates(GRAPH, 3, symmetric=True):
        assert not verify_dual_pair([cycle(5)], d, 7)


def test_csp_examples():
    assert csp_membership(cycle(5), complete(3))
    assert csp_membership(cycle(4), cycle(4))
    assert not csp_membership(complete(3), complete(2))
    with pytest.raises(SignatureMismatch):
        csp_membership(Structure(Signature((("r", 3),)), 1), complete(2))


def test_csp_monotone_under_deletion(rng):
    for _ in range(40):
        a = random_digraph(rng, 5, 0.3)
        h = random_digraph(rng, 3, 0.5, loops=False)
        if not csp_membership(a, h):
            continue
        for ri, t in list(a.tuples()):
            assert csp_membership(a.without_tuple(ri, t), h)


def test_monadic_template_with_nothing_forbidden():
    cat = monadic_catalogue(GRAPH, 1)
    dc = monadic_csp_template([], cat)
    assert dc.structure.n == 2
    assert len(dc.structure.relations[0]) == 4


def test_monadic_template_from_forbidden_family():
    for k in (2, 3):
        fam = [directed_path(k)]
        dc = monadic_csp_template(forbidden_family(fam))
        assert hom_equivalent(dc.structure, construct_dual(fam))


def test_monadic_template_errors():
    with pytest.raises(ValueError):
        monadic_csp_template([])
    with pytest.raises(ValueError):
        monadic_csp_template(forbidden_family([cycle(5)]))


def test_template_enumeration_counts():
    # graphs with loops allowed on 1, 2, 3 vertices: 2, 6, 20 classes
    counts = [sum(1 for _ in iter_structures(GRAPH, n, symmetric=True, loops=True)) for n in (1, 2, 3)]
    assert counts == [2, 6, 20]
    assert sum(1 for _ in iter_templates(GRAPH, 3, symmetric=True)) == 28
