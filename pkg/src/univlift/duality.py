"""Relational trees, finite duals from monadic lifts, and brute-force duality checks."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterator, Sequence

from .decompose import PieceCatalogue, RootedPiece, build_catalogue
from .liftclass import ForbiddenFamily, Lift, member_of_L, member_via_forbidden
from .relcore import (
    Signature,
    SignatureMismatch,
    Structure,
    connected_components,
    hom_exists,
    iter_structures,
)


class NotATree(ValueError):
    pass


@dataclass(frozen=True)
class IncidenceGraph:
    """Bipartite multigraph between vertices and blocks ``(relation index, tuple)``.

    ``edges`` lists one ``(vertex, block index)`` pair per tuple position, so a
    vertex repeated inside a tuple gives parallel edges.
    """

    n: int
    blocks: tuple[tuple[int, tuple[int, ...]], ...]
    edges: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, a: Structure) -> IncidenceGraph:
        blocks = tuple(a.tuples())
        edges = tuple((v, b) for b, (_, t) in enumerate(blocks) for v in t)
        return cls(a.n, blocks, edges)

    def is_tree(self) -> bool:
        nodes = self.n + len(self.blocks)
        if nodes == 0 or len(self.edges) != nodes - 1:
            return False
        if len(set(self.edges)) != len(self.edges):
            return False
        parent = list(range(nodes))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for v, b in self.edges:
            rv, rb = find(v), find(self.n + b)
            if rv == rb:
                return False
            parent[rv] = rb
        return True


def is_relational_tree(a: Structure) -> bool:
    """The incidence graph is a tree (connected, acyclic, no repeated vertex in a tuple)."""
    return IncidenceGraph.of(a).is_tree()


@dataclass(frozen=True)
class DualCandidate:
    """A template whose vertex ``v`` stands for the label set ``vertex_labels[v]`` of unary pieces."""

    structure: Structure
    vertex_labels: tuple[frozenset, ...]


def _monadic_catalogue(fam: Sequence[Structure]) -> PieceCatalogue:
    cat = build_catalogue(fam)
    if any(p.arity != 1 for p in cat.pieces):
        raise NotATree("catalogue has pieces with more than one root")
    return cat


def _label_sets(cat: PieceCatalogue, accept) -> list[frozenset]:
    out = []
    n = len(cat)
    for k in range(n + 1):
        for labels in combinations(range(n), k):
            x = Lift.build(cat, Structure(cat.signature, 1), {i: [(0,)] for i in labels})
            if accept(x):
                out.append(frozenset(labels))
    return out


def _template(cat: PieceCatalogue, accept) -> DualCandidate:
    labels = _label_sets(cat, accept)
    sig = cat.signature
    rels = [set() for _ in sig.relations]
    for ri, arity in enumerate(sig.arities):
        for t in product(range(len(labels)), repeat=arity):
            verts = sorted(set(t))
            pos = {v: k for k, v in enumerate(verts)}
            shadow = Structure(sig, len(verts), {sig.names[ri]: [tuple(pos[v] for v in t)]})
            ext = {i: [(pos[v],) for v in verts if i in labels[v]] for i in range(len(cat))}
            if accept(Lift.build(cat, shadow, ext)):
                rels[ri].add(t)
    return DualCandidate(Structure(sig, len(labels), rels), tuple(labels))


def dual_candidate(fam: Sequence[Structure]) -> DualCandidate:
    """Dual template of a family of relational trees, with the label set of every vertex.

    Vertices are the label sets whose one-vertex lift lies in L; a tuple is
    present when the lift on its vertices carrying their labels and this one
    tuple lies in L.
    """
    fam = list(fam)
    if not fam:
        raise ValueError("empty family")
    for k, f in enumerate(fam):
        if not is_relational_tree(f):
            raise NotATree(f"family member {k} is not a relational tree")
    cat = _monadic_catalogue(fam)
    return _template(cat, lambda x: member_of_L(x, fam))


def construct_dual(fam: Sequence[Structure]) -> Structure:
    return dual_candidate(fam).structure


def _signature_universe(fam: Sequence[Structure], d: Structure, symmetric: bool | None) -> bool:
    if symmetric is None:
        return all(f.is_symmetric() for f in fam) and d.is_symmetric()
    return symmetric


def _disagrees(fam: Sequence[Structure], d: Structure, a: Structure) -> bool:
    return (not any(hom_exists(f, a) for f in fam)) != hom_exists(a, d)


def _first_disagreement(args) -> int | None:
    fam, d, chunk = args
    for i, a in enumerate(chunk):
        if _disagrees(fam, d, a):
            return i
    return None


def find_duality_counterexample(
    fam: Sequence[Structure], d: Structure, n: int, symmetric: bool | None = None, jobs: int = 1
) -> Structure | None:
    """A structure on at most ``n`` vertices on which Forb_h(fam) and CSP(d) disagree, or None.

    Only connected structures are searched; this is exact when every family
    member is connected, since both sides split over components.  When the
    family is non-empty and ``d`` has no vertex carrying every constant tuple,
    structures with such a vertex agree on both sides and are skipped.  With
    ``symmetric`` (default: family and ``d`` symmetric) the universe is
    undirected graphs.  ``jobs > 1`` checks each size in worker processes and
    still returns the first counterexample in enumeration order.
    """
    fam = list(fam)
    sig = d.signature
    if any(f.signature != sig for f in fam):
        raise SignatureMismatch("family and template signatures differ")
    symmetric = _signature_universe(fam, d, symmetric)
    all_connected = all(len(connected_components(f)) <= 1 for f in fam)
    skip_loops = bool(fam) and not d.has_loop_vertex()
    loops = not (skip_loops and len(sig) == 1)
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for k in range(n + 1):
            cands = [
                a
                for a in iter_structures(sig, k, symmetric=symmetric, connected=all_connected, loops=loops)
                if not (skip_loops and a.has_loop_vertex())
            ]
            if pool is None:
                hit = next((a for a in cands if _disagrees(fam, d, a)), None)
                if hit is not None:
                    return hit
                continue
            size = max(1, -(-len(cands) // (4 * jobs)))
            chunks = [cands[i : i + size] for i in range(0, len(cands), size)]
            for chunk, idx in zip(chunks, pool.map(_first_disagreement, [(fam, d, c) for c in chunks])):
                if idx is not None:
                    return chunk[idx]
    finally:
        if pool is not None:
            pool.shutdown()
    return None


def verify_dual_pair(
    fam: Sequence[Structure], d: Structure, n: int, symmetric: bool | None = None, jobs: int = 1
) -> bool:
    """Forb_h(fam) and CSP(d) agree on every structure with at most ``n`` vertices."""
    return find_duality_counterexample(fam, d, n, symmetric, jobs) is None


def csp_membership(a: Structure, template: Structure) -> bool:
    if a.signature != template.signature:
        raise SignatureMismatch("instance and template signatures differ")
    return hom_exists(a, template)


def monadic_csp_template(
    f_prime: ForbiddenFamily | Sequence[Lift], catalogue: PieceCatalogue | None = None
) -> DualCandidate:
    """Template H built from a forbidden family of monadic lifts.

    Vertices are the label sets whose one-vertex lift is allowed; a tuple is
    added when the lift on its vertices with their labels and just this tuple
    is allowed.  A ``ForbiddenFamily`` is read with its own (embedding)
    semantics; a plain list of lifts forbids homomorphisms, and then every
    member may carry at most one non-unary tuple.
    """
    if isinstance(f_prime, ForbiddenFamily):
        cat = f_prime.catalogue
        accept = lambda x: member_via_forbidden(x, f_prime)  # noqa: E731
    else:
        members = list(f_prime)
        if catalogue is None:
            if not members:
                raise ValueError("an empty list of lifts needs the catalogue")
            catalogue = members[0].catalogue
        cat = catalogue
        for m in members:
            if m.structure.signature != cat.lifted_signature:
                raise SignatureMismatch("member uses another catalogue")
            if sum(len(ts) for ts in m.shadow.relations) > 1:
                raise ValueError("members may carry at most one non-unary tuple")
        accept = lambda x: not any(hom_exists(m.structure, x.structure) for m in members)  # noqa: E731
    if any(p.arity != 1 for p in cat.pieces):
        raise ValueError("lifted relations must be unary")
    return _template(cat, accept)


def monadic_catalogue(signature: Signature, unary: int) -> PieceCatalogue:
    """Stand-alone catalogue with ``unary`` unary lifted relations over ``signature``.

    The family is a single vertex, so the catalogue carries no real pieces;
    the unary relations are placeholders named ``P1 .. Pk``.
    """
    v = Structure(signature, 1)
    return PieceCatalogue((v,), tuple(RootedPiece(v, (0,)) for _ in range(unary)), tuple((0, (0,)) for _ in range(unary)))


def iter_templates(signature: Signature, max_n: int, symmetric: bool = False) -> Iterator[Structure]:
    """Candidate templates: all isomorphism classes on 1..max_n vertices, loops allowed."""
    for k in range(1, max_n + 1):
        yield from iter_structures(signature, k, symmetric=symmetric, loops=True)
