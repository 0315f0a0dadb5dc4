"""Lifts by piece relations: canonical lifts, universal witnesses, the class L and its forbidden family.

A lift is stored as one ``Structure`` over the lifted signature (the base
relations followed by ``P1 .. PN``, one per catalogue piece), so homomorphisms
and embeddings of lifts reuse the search engine of ``relcore``.  The tuple
recorded in ``Pi`` for a homomorphism ``phi`` of piece ``i`` is ``phi(roots)``
in the piece's own root order.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Mapping, Sequence

from .decompose import PieceCatalogue, RootedPiece, _set_partitions, build_catalogue, iter_pieces
from .relcore import (
    Signature,
    SignatureMismatch,
    Structure,
    canonical_form,
    components_of_mask,
    gaifman_adjacency,
    hom_exists,
    iter_homomorphisms,
    mask_to_list,
)


@dataclass(frozen=True)
class Lift:
    catalogue: PieceCatalogue = field(repr=False)
    structure: Structure

    def __post_init__(self):
        if self.structure.signature != self.catalogue.lifted_signature:
            raise SignatureMismatch("lift signature does not match the catalogue")

    @classmethod
    def build(
        cls,
        catalogue: PieceCatalogue,
        shadow: Structure,
        extended: Mapping[int, Iterable[tuple[int, ...]]] | Sequence[Iterable[tuple[int, ...]]] = (),
    ) -> Lift:
        """Lift from a shadow and extended relations keyed by catalogue index (0-based)."""
        if shadow.signature != catalogue.signature:
            raise SignatureMismatch("shadow signature differs from the family signature")
        ext = [()] * len(catalogue)
        items = extended.items() if isinstance(extended, Mapping) else enumerate(extended)
        for i, ts in items:
            ext[i] = ts
        sig = catalogue.lifted_signature
        return cls(catalogue, Structure(sig, shadow.n, list(shadow.relations) + list(ext)))

    @classmethod
    def empty(cls, catalogue: PieceCatalogue, n: int = 0) -> Lift:
        return cls(catalogue, Structure(catalogue.lifted_signature, n))

    @property
    def n(self) -> int:
        return self.structure.n

    @property
    def shadow(self) -> Structure:
        return self.structure.reduct(self.catalogue.signature)

    @property
    def extended(self) -> tuple[frozenset, ...]:
        return self.structure.relations[len(self.catalogue.signature):]

    def ext(self, i: int) -> frozenset:
        return self.extended[i]

    def restrict(self, vertices: Sequence[int]) -> Lift:
        """Induced sublift, renumbered in the given order."""
        return Lift(self.catalogue, self.structure.induced(vertices))

    def with_ext(self, i: int, tuples: Iterable[tuple[int, ...]]) -> Lift:
        base = len(self.catalogue.signature)
        return Lift(self.catalogue, self.structure.with_tuples({base + i: tuples}))

    def __repr__(self):
        return f"Lift({self.structure!r})"


@dataclass(frozen=True)
class RootedLift:
    lift: Lift
    roots: tuple[int, ...]
    root_index: int

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        if any(not 0 <= r < self.lift.n for r in self.roots):
            raise ValueError("roots must be vertices of the lift")
        if not 0 <= self.root_index < len(self.lift.catalogue):
            raise ValueError("root index outside the catalogue")
        if len(self.roots) != self.lift.catalogue.pieces[self.root_index].arity:
            raise ValueError("root tuple length differs from the piece arity")

    @property
    def root_tuple_present(self) -> bool:
        return self.roots in self.lift.ext(self.root_index)


# ---------------------------------------------------------------------------
# canonical lift and universal witness


def piece_images(piece: RootedPiece, a: Structure, vertices: Sequence[int] | None = None) -> set[tuple[int, ...]]:
    """Root images ``phi(R)`` over all homomorphisms ``phi`` of the piece into ``a``.

    With ``vertices`` only root tuples inside that set are tested.
    """
    cand = range(a.n) if vertices is None else list(vertices)
    out = set()
    p, roots = piece.structure, piece.roots
    for t in product(cand, repeat=len(roots)):
        if hom_exists(p, a, pins=dict(zip(roots, t))):
            out.add(t)
    return out


def canonical_lift(a: Structure, cat: PieceCatalogue, vertices: Sequence[int] | None = None) -> Lift:
    """L(a): for every piece, every root tuple realised by a homomorphism of the piece into ``a``.

    With ``vertices`` the result is L(a) restricted (induced) to those vertices.
    """
    if a.signature != cat.signature:
        raise SignatureMismatch("structure signature differs from the family signature")
    ext = [piece_images(p, a, vertices) for p in cat.pieces]
    full = Lift.build(cat, a, ext)
    return full if vertices is None else full.restrict(list(vertices))


@dataclass(frozen=True)
class Witness:
    """UW(x) with bookkeeping.

    ``copies[c] = (i, tuple, vmap)`` maps piece ``i`` vertices to witness
    vertices; ``owner[w]`` is the copy owning interior vertex ``w`` or -1 for
    shadow vertices; ``sources[(ri, t)]`` lists where a witness tuple comes
    from: ``("s", ri, t)`` for the shadow, ``("c", c)`` for a copy.
    """

    structure: Structure
    copies: tuple
    owner: tuple[int, ...]
    sources: dict


def witness(x: Lift) -> Witness:
    cat = x.catalogue
    shadow = x.shadow
    n = shadow.n
    rels = [set(ts) for ts in shadow.relations]
    sources: dict = {}
    for ri, t in shadow.tuples():
        sources.setdefault((ri, t), set()).add(("s", ri, t))
    copies = []
    owner = [-1] * n
    for i, piece in enumerate(cat.pieces):
        p = piece.structure
        rpos = {r: j for j, r in enumerate(piece.roots)}
        for t in sorted(x.ext(i)):
            c = len(copies)
            vmap = []
            for v in range(p.n):
                if v in rpos:
                    vmap.append(t[rpos[v]])
                else:
                    vmap.append(n)
                    owner.append(c)
                    n += 1
            for ri, s in p.tuples():
                img = tuple(vmap[v] for v in s)
                rels[ri].add(img)
                sources.setdefault((ri, img), set()).add(("c", c))
            copies.append((i, t, tuple(vmap)))
    st = Structure(cat.signature, n, rels)
    return Witness(st, tuple(copies), tuple(owner), {k: frozenset(v) for k, v in sources.items()})


def universal_witness(x: Lift) -> Structure:
    """UW(x): the shadow with a fresh copy of piece ``i`` glued along every tuple of ``Pi``.

    Shadow vertices come first, then the interior vertices of the copies in
    catalogue order and, within a relation, in sorted tuple order.
    """
    return witness(x).structure


def member_of_L(x: Lift, fam: Sequence[Structure] | None = None) -> bool:
    """Membership in L via the universal witness.

    ``x`` is in L iff no family member maps into UW(x) and the canonical lift
    of UW(x) induces exactly ``x`` on the vertices of ``x``.
    """
    fam = x.catalogue.family if fam is None else fam
    uw = universal_witness(x)
    if any(hom_exists(f, uw) for f in fam):
        return False
    return canonical_lift(uw, x.catalogue, range(x.n)) == x


def is_covering(y: Lift | RootedLift, target: Structure | RootedPiece) -> bool:
    """Plain case: ``target`` maps into UW(y).  Rooted case: piece ``i`` maps into UW(y) fixing its roots."""
    if isinstance(y, RootedLift):
        piece = y.lift.catalogue.pieces[y.root_index]
        if isinstance(target, RootedPiece) and canonical_form(target.structure, target.roots) != canonical_form(
            piece.structure, piece.roots
        ):
            raise ValueError("target is not the piece at the root index")
        if y.root_tuple_present:
            raise ValueError("a covering rooted lift must not contain its root tuple")
        uw = universal_witness(y.lift)
        return hom_exists(piece.structure, uw, pins=dict(zip(piece.roots, y.roots)))
    if isinstance(target, RootedPiece):
        raise ValueError("rooted target needs a RootedLift")
    return hom_exists(target, universal_witness(y))


# ---------------------------------------------------------------------------
# the forbidden family


@dataclass(frozen=True)
class ForbiddenFamily:
    """Representatives of F′.

    ``plain`` members forbid any injective homomorphism into a lift;
    ``rooted`` members forbid injective homomorphisms sending the roots to a
    tuple absent from the relation at the root index.
    """

    catalogue: PieceCatalogue
    plain: tuple[Lift, ...]
    rooted: tuple[RootedLift, ...]

    @property
    def members(self) -> list[Lift | RootedLift]:
        return list(self.plain) + list(self.rooted)

    def __len__(self):
        return len(self.plain) + len(self.rooted)


def _minimal_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(map(repr, s))))
    out: list[frozenset] = []
    for s in uniq:
        if not any(o <= s for o in out):
            out.append(s)
    return out


def _hitting_sets(needs: list[frozenset]) -> list[frozenset]:
    """Inclusion-minimal sets meeting every set in ``needs``."""
    results = []

    def rec(chosen, k):
        while k < len(needs) and needs[k] & chosen:
            k += 1
        if k == len(needs):
            results.append(chosen)
            return
        for tok in sorted(needs[k], key=repr):
            rec(chosen | {tok}, k + 1)

    rec(frozenset(), 0)
    return _minimal_sets(results)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)


def _component_options(src: Structure, comp: list[int], cat: PieceCatalogue):
    """Ways to send a component of ``src - S`` into the interior of a glued piece.

    Each option is ``(i, pairs)`` where ``pairs`` lists ``(s, j)``: the
    attachment vertex ``s`` of S occurs at root position ``j`` of piece ``i``.
    A vertex may occur at several positions when the copy has repeated roots.
    """
    inside = set(comp)
    pos = {v: k for k, v in enumerate(comp)}
    occ = []
    rels = [set() for _ in src.relations]
    for ri, t in src.tuples():
        if not inside & set(t):
            continue
        img = []
        for v in t:
            if v in inside:
                img.append(pos[v])
            else:
                img.append(len(comp) + len(occ))
                occ.append(v)
        rels[ri].add(tuple(img))
    local = Structure(src.signature, len(comp) + len(occ), rels)
    out = []
    for i, piece in enumerate(cat.pieces):
        interior = piece.interior
        if len(interior) == 0:
            continue
        doms = {k: interior for k in range(len(comp))}
        doms.update({len(comp) + k: piece.roots for k in range(len(occ))})
        rpos = {r: j for j, r in enumerate(piece.roots)}
        seen = set()
        for h in iter_homomorphisms(local, piece.structure, domains=doms):
            pairs = frozenset((occ[k], rpos[h[len(comp) + k]]) for k in range(len(occ)))
            if pairs not in seen:
                seen.add(pairs)
                out.append((i, pairs))
    return out


def _used_parts(src: Structure, cat: PieceCatalogue, roots: tuple[int, ...] | None = None, root_index: int = -1):
    """Minimal lifts X (with a root tuple when ``roots`` is given) such that ``src -> UW(X)``.

    Yields ``(structure, root tuple)`` pairs; the homomorphism sends the roots
    of ``src`` to the root tuple.  Every homomorphism into a universal witness
    splits into the part S landing on lift vertices, a quotient of S, and the
    components of ``src - S``, each inside the interior of one glued piece.
    """
    sig = cat.lifted_signature
    base = len(cat.signature)
    adj = gaifman_adjacency(src)
    full = (1 << src.n) - 1
    fixed = set(roots or ())
    free = [v for v in range(src.n) if v not in fixed]
    seen = set()
    for k in range(len(free) + 1):
        for extra in combinations(free, k):
            s_set = sorted(fixed | set(extra))
            smask = 0
            for v in s_set:
                smask |= 1 << v
            comps = [mask_to_list(c) for c in components_of_mask(adj, full & ~smask)]
            options = [_component_options(src, c, cat) for c in comps]
            if any(not o for o in options):
                continue
            inner = [t for t in src.tuples() if all((smask >> v) & 1 for v in t[1])]
            for choice in product(*options):
                uf = _UnionFind()
                for v in s_set:
                    uf.find(("v", v))
                for c, (i, pairs) in enumerate(choice):
                    for j in range(cat.pieces[i].arity):
                        uf.find(("r", c, j))
                    for s, j in pairs:
                        uf.union(("v", s), ("r", c, j))
                classes = sorted({uf.find(x) for x in list(uf.parent)}, key=repr)
                cid = {r: k for k, r in enumerate(classes)}
                cls = {x: cid[uf.find(x)] for x in list(uf.parent)}
                for labels in _set_partitions(len(classes)):
                    m = max(labels) + 1 if labels else 0
                    lab = {x: labels[c] for x, c in cls.items()}
                    ext = [set() for _ in cat.pieces]
                    root_sources = {}
                    for c, (i, _) in enumerate(choice):
                        piece = cat.pieces[i]
                        t = tuple(lab[("r", c, j)] for j in range(piece.arity))
                        ext[i].add(t)
                        rp = {r: j for j, r in enumerate(piece.roots)}
                        for ri, u in piece.structure.tuples():
                            if all(w in rp for w in u):
                                img = (ri, tuple(t[rp[w]] for w in u))
                                root_sources.setdefault(img, set()).add(("c", c))
                    rt = tuple(lab[("v", r)] for r in roots) if roots is not None else None
                    if roots is not None and rt in ext[root_index]:
                        continue
                    needs = []
                    for ri, t in inner:
                        img = (ri, tuple(lab[("v", v)] for v in t))
                        needs.append(frozenset({("s",) + img} | root_sources.get(img, set())))
                    for hs in _hitting_sets(_minimal_sets(needs)):
                        rels = [set() for _ in sig.relations]
                        for tok in hs:
                            if tok[0] == "s":
                                rels[tok[1]].add(tok[2])
                        for i, ts in enumerate(ext):
                            rels[base + i] = ts
                        key = (m, rt, tuple(frozenset(r) for r in rels))
                        if key in seen:
                            continue
                        seen.add(key)
                        yield Structure(sig, m, rels), rt



def _dominates(small, big) -> bool:
    """Every lift containing ``big`` (in the Forb_e sense) also contains ``small``."""
    if isinstance(small, Lift):
        target = big.structure if isinstance(big, Lift) else big.lift.structure
        return hom_exists(small.structure, target, injective=True)
    if isinstance(big, Lift) or small.root_index != big.root_index:
        return False
    return any(
        tuple(h[r] for r in small.roots) == big.roots
        for h in iter_homomorphisms(small.lift.structure, big.lift.structure, injective=True)
    )


def _parts_job(args):
    src, cat, roots, index = args
    if roots is None:
        return list(_used_parts(src, cat))
    return list(_used_parts(src, cat, roots, index))


def forbidden_family(
    fam: Sequence[Structure], cat: PieceCatalogue | None = None, minimize: bool = True, jobs: int = 1
) -> ForbiddenFamily:
    """Representatives of F′ for the family.

    Plain members are the minimal lifts X with some member of ``fam`` mapping
    into UW(X); rooted members are the minimal lifts X with a tuple ``x``
    outside ``Pi`` such that piece ``i`` maps into UW(X) sending its roots to
    ``x``.  Both are enumerated by splitting a homomorphism into the part
    landing on lift vertices and the components landing inside glued pieces.
    With ``minimize`` members dominated by another member are dropped.
    ``jobs > 1`` enumerates the sources in worker processes; the result does
    not depend on it.
    """
    fam = tuple(fam)
    cat = build_catalogue(fam) if cat is None else cat
    tasks = [(f, cat, None, -1) for f in fam]
    tasks += [(piece.structure, cat, piece.roots, i) for i, piece in enumerate(cat.pieces)]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_parts_job, tasks))
    else:
        results = [_parts_job(t) for t in tasks]
    found: dict = {}
    for (_, _, roots, i), parts in zip(tasks, results):
        for st, rt in parts:
            if roots is None:
                key = (-1, canonical_form(st))
                if key not in found:
                    found[key] = Lift(cat, st)
            else:
                key = (i, canonical_form(st, rt))
                if key not in found:
                    found[key] = RootedLift(Lift(cat, st), rt, i)
    members = list(found.values())
    if minimize:
        members.sort(key=lambda m: (_lift_of(m).n, _lift_of(m).structure.tuple_count, isinstance(m, RootedLift)))
        kept = []
        for m in members:
            if not any(_dominates(k, m) for k in kept):
                kept.append(m)
        members = kept
    return ForbiddenFamily(
        cat,
        tuple(m for m in members if isinstance(m, Lift)),
        tuple(m for m in members if isinstance(m, RootedLift)),
    )


def _lift_of(m: Lift | RootedLift) -> Lift:
    return m if isinstance(m, Lift) else m.lift


def member_via_forbidden(x: Lift, f_prime: ForbiddenFamily) -> bool:
    """Forb_e test against the forbidden family."""
    if x.structure.signature != f_prime.catalogue.lifted_signature:
        raise SignatureMismatch("lift and forbidden family use different catalogues")
    xs = x.structure
    for m in f_prime.plain:
        if hom_exists(m.structure, xs, injective=True):
            return False
    for m in f_prime.rooted:
        rel = x.ext(m.root_index)
        for h in iter_homomorphisms(m.lift.structure, xs, injective=True):
            if tuple(h[r] for r in m.roots) not in rel:
                return False
    return True


# ---------------------------------------------------------------------------
# indicator construction


@dataclass(frozen=True)
class IndicatorProduct:
    """``S * (H, R)`` with, for every vertex, the ``(tuple index, H vertex)`` pairs in its class."""

    structure: Structure
    members: tuple[tuple[tuple[int, int], ...], ...]


def indicator_product(s: Structure, h: Structure, roots: Sequence[int]) -> IndicatorProduct:
    """Replace every tuple of the single relation of ``s`` by a copy of ``h`` glued along ``roots``.

    ``(u, roots[k])`` and ``(v, roots[k'])`` are identified when ``u[k] == v[k']``.
    """
    if len(s.signature) != 1:
        raise ValueError("s must have exactly one relation")
    roots = tuple(roots)
    if s.signature.arities[0] != len(roots):
        raise ValueError(f"relation arity {s.signature.arities[0]} differs from {len(roots)} roots")
    if len(set(roots)) != len(roots):
        raise ValueError("roots must be distinct")
    rpos = {r: k for k, r in enumerate(roots)}
    stuples = sorted(s.relations[0])
    ids: dict = {}
    members: list[list] = []
    cls_of = {}
    for ti, u in enumerate(stuples):
        for a in range(h.n):
            key = ("s", u[rpos[a]]) if a in rpos else ("h", ti, a)
            if key not in ids:
                ids[key] = len(ids)
                members.append([])
            members[ids[key]].append((ti, a))
            cls_of[ti, a] = ids[key]
    rels = [
        {tuple(cls_of[ti, a] for a in t) for ti in range(len(stuples)) for t in ts}
        for ts in h.relations
    ]
    st = Structure(h.signature, len(ids), rels)
    return IndicatorProduct(st, tuple(tuple(m) for m in members))


def piece_pair(f: Structure, cut: Sequence[int]) -> tuple[Structure, tuple[int, ...], tuple[int, ...]]:
    """Disjoint union H of the two pieces of ``f`` at ``cut`` with interleaved roots.

    Returns ``(H, roots, labels)`` where ``labels[v]`` is the vertex of ``f``
    that vertex ``v`` of H was copied from.  The cut must leave exactly two
    components.
    """
    cut = tuple(sorted(cut))
    parts = [p for p in iter_pieces(f) if tuple(p.support[r] for r in p.roots) == cut]
    if len(parts) != 2:
        raise ValueError(f"cut {cut} does not split f into exactly two components")
    p1, p2 = parts
    labels = tuple(p1.support) + tuple(p2.support)
    off = p1.structure.n
    rels = [
        set(t1) | {tuple(v + off for v in t) for t in t2}
        for t1, t2 in zip(p1.structure.relations, p2.structure.relations)
    ]
    h = Structure(f.signature, len(labels), rels)
    roots = []
    for r1, r2 in zip(p1.roots, p2.roots):
        roots += [r1, r2 + off]
    return h, tuple(roots), labels


def indicator_projection(ip: IndicatorProduct, labels: Sequence[int]) -> tuple[int, ...]:
    """The map ``[(x, a)] -> labels[a]``; raises if a class is sent to two vertices."""
    out = []
    for cls in ip.members:
        imgs = {labels[a] for _, a in cls}
        if len(imgs) != 1:
            raise ValueError("projection is not well defined on a class")
        out.append(imgs.pop())
    return tuple(out)
