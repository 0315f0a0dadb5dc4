"""Minimal cuts, pieces, rooted isomorphism and minimal homomorphic images."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterator, Sequence

from .relcore import (
    Signature,
    Structure,
    canonical_form,
    components_of_mask,
    find_isomorphism,
    gaifman_adjacency,
    hom_exists,
    is_connected,
    mask_to_list,
)


class DecompositionError(ValueError):
    pass


@dataclass(frozen=True)
class RootedPiece:
    """A connected structure with an ordered tuple of distinct roots.

    ``support`` optionally records, for each vertex, the vertex of the
    structure the piece was cut from.
    """

    structure: Structure
    roots: tuple[int, ...]
    support: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        if len(set(self.roots)) != len(self.roots):
            raise ValueError(f"roots {self.roots} are not distinct")
        if any(not 0 <= r < self.structure.n for r in self.roots):
            raise ValueError("root outside the structure")
        if not is_connected(self.structure):
            raise ValueError("pieces are connected structures")

    @property
    def arity(self) -> int:
        return len(self.roots)

    @property
    def interior(self) -> list[int]:
        rs = set(self.roots)
        return [v for v in range(self.structure.n) if v not in rs]

    def key(self, permute_roots: bool = False) -> tuple:
        if not permute_roots:
            return canonical_form(self.structure, self.roots)
        return min(canonical_form(self.structure, p) for p in permutations(self.roots))


def minimal_cuts(a: Structure) -> list[tuple[int, ...]]:
    """All inclusion-minimal vertex cuts of the Gaifman graph, by size then lexicographically."""
    if a.n < 2:
        raise DecompositionError("minimal cuts need at least two vertices")
    adj = gaifman_adjacency(a)
    full = (1 << a.n) - 1
    if len(components_of_mask(adj, full)) != 1:
        raise DecompositionError("structure is not connected")
    found = []
    out = []
    for k in range(1, a.n - 1):
        for sub in combinations(range(a.n), k):
            mask = 0
            for v in sub:
                mask |= 1 << v
            if any(c & mask == c for c in found):
                continue
            if len(components_of_mask(adj, full & ~mask)) >= 2:
                found.append(mask)
                out.append(sub)
    return out


def iter_pieces(a: Structure) -> Iterator[RootedPiece]:
    """Every piece of ``a`` (one per minimal cut and component), without deduplication.

    The piece keeps the original vertex order, and its roots are the cut in
    ascending order.
    """
    adj = gaifman_adjacency(a)
    full = (1 << a.n) - 1
    for cut in minimal_cuts(a):
        cmask = 0
        for v in cut:
            cmask |= 1 << v
        for comp in components_of_mask(adj, full & ~cmask):
            verts = mask_to_list(comp | cmask)
            pos = {v: i for i, v in enumerate(verts)}
            yield RootedPiece(a.induced(verts), tuple(pos[v] for v in cut), tuple(verts))


def pieces_of(a: Structure) -> list[RootedPiece]:
    """Pieces of a connected structure up to rooted isomorphism and root permutation."""
    if not is_connected(a):
        raise DecompositionError("pieces are defined for connected structures")
    if a.n < 2:
        return []
    out, seen = [], set()
    for p in iter_pieces(a):
        k = p.key(permute_roots=True)
        if k not in seen:
            seen.add(k)
            out.append(p)
    return out


def rooted_isomorphic(p: RootedPiece, q: RootedPiece, permute_roots: bool = False) -> bool:
    """Isomorphism of the underlying structures sending roots to roots in order.

    With ``permute_roots`` any bijection between the root tuples is allowed.
    """
    if p.structure.signature != q.structure.signature or p.arity != q.arity:
        return False
    targets = permutations(q.roots) if permute_roots else [q.roots]
    for qr in targets:
        pins = dict(zip(p.roots, qr))
        if find_isomorphism(p.structure, q.structure, pins) is not None:
            return True
    return False


def piece_of_piece_check(a: Structure, p1: RootedPiece, p2: RootedPiece) -> bool:
    """Test one instance of the pieces-of-pieces property.

    ``p1`` must be a piece of ``a`` and ``p2`` a piece of ``p1.structure``,
    both with ``support`` recorded.  Returns True iff ``R1 ∩ P2 ⊆ R2`` holds
    and ``p2`` (read inside ``a``) is a piece of ``a``.
    """
    if p1.support is None or p2.support is None:
        raise DecompositionError("pieces need their support to be compared")
    pieces_a = {(frozenset(p.support), tuple(p.support[r] for r in p.roots)) for p in iter_pieces(a)}
    r1 = tuple(p1.support[r] for r in p1.roots)
    if (frozenset(p1.support), r1) not in pieces_a or a.induced(p1.support) != p1.structure:
        raise DecompositionError("p1 is not a piece of a")
    inner = {(frozenset(p.support), tuple(p.support[r] for r in p.roots)) for p in iter_pieces(p1.structure)}
    r2_local = tuple(p2.support[r] for r in p2.roots)
    if (frozenset(p2.support), r2_local) not in inner:
        raise DecompositionError("p2 is not a piece of p1")
    p2_in_a = frozenset(p1.support[v] for v in p2.support)
    r2 = tuple(p1.support[v] for v in r2_local)
    if not (set(r1) & p2_in_a) <= set(r2):
        return False
    return (p2_in_a, r2) in pieces_a


def _set_partitions(n: int) -> Iterator[list[int]]:
    # restricted growth strings
    if n == 0:
        yield []
        return
    labels = [0] * n

    def rec(i, top):
        if i == n:
            yield list(labels)
            return
        for b in range(top + 2):
            labels[i] = b
            yield from rec(i + 1, max(top, b))

    labels[0] = 0
    yield from rec(1, 0)


def quotients(a: Structure) -> Iterator[tuple[list[int], Structure]]:
    """All images of ``a`` under surjective vertex maps, one per set partition."""
    for labels in _set_partitions(a.n):
        yield labels, a.relabel(labels, (max(labels) + 1) if labels else 0)


def minimal_homomorphic_images(
    f: Structure,
    family: Sequence[Structure] | None = None,
    loopless: bool = False,
) -> list[Structure]:
    """Quotients ``A`` of ``f`` whose proper induced substructures all avoid the family.

    ``family`` defaults to ``[f]``.  With ``loopless`` only quotients whose
    tuples have pairwise distinct entries are kept.
    """
    family = [f] if family is None else list(family)
    out, seen = [], set()
    for _, q in quotients(f):
        if loopless and any(len(set(t)) < len(t) for ts in q.relations for t in ts):
            continue
        key = canonical_form(q)
        if key in seen:
            continue
        seen.add(key)
        minimal = True
        for v in range(q.n):
            sub = q.induced([u for u in range(q.n) if u != v])
            if any(hom_exists(g, sub) for g in family):
                minimal = False
                break
        if minimal:
            out.append(q)
    return out


def max_min_cut_arity(fam: Sequence[Structure]) -> int:
    best = 0
    for f in fam:
        if f.n >= 2:
            best = max([best] + [len(c) for c in minimal_cuts(f)])
    return best


@dataclass(frozen=True)
class PieceCatalogue:
    """Pieces of every family member, deduplicated up to rooted isomorphism and root permutation.

    The order is fixed: it names the lifted relations ``P1, P2, ...``.
    """

    family: tuple[Structure, ...]
    pieces: tuple[RootedPiece, ...]
    origins: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def signature(self) -> Signature:
        return self.family[0].signature

    @property
    def lifted_signature(self) -> Signature:
        return self.signature.extend((f"P{i + 1}", p.arity) for i, p in enumerate(self.pieces))

    def __len__(self):
        return len(self.pieces)


def build_catalogue(fam: Sequence[Structure]) -> PieceCatalogue:
    fam = tuple(fam)
    if not fam:
        raise DecompositionError("empty family")
    sig = fam[0].signature
    if any(f.signature != sig for f in fam):
        raise DecompositionError("family members must share a signature")
    pieces, origins, seen = [], [], set()
    for fi, f in enumerate(fam):
        if not is_connected(f):
            raise DecompositionError(f"family member {fi} is not connected")
        if f.n < 2:
            continue
        for p in iter_pieces(f):
            k = p.key(permute_roots=True)
            if k in seen:
                continue
            seen.add(k)
            pieces.append(RootedPiece(p.structure, p.roots))
            origins.append((fi, tuple(p.support[r] for r in p.roots)))
    return PieceCatalogue(fam, tuple(pieces), tuple(origins))
