"""Free and lifted amalgamation, and a finite builder for generic prefixes of L."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product
from typing import Iterator, Sequence

from .decompose import PieceCatalogue, build_catalogue
from .liftclass import Lift, canonical_lift, member_of_L, witness
from .relcore import (
    Structure,
    VertexMap,
    find_embedding,
    hom_exists,
    is_embedding,
    iter_structures,
)


class AmalgamationError(ValueError):
    pass


@dataclass(frozen=True)
class AmalgamProblem:
    """Lifts ``x``, ``y`` and a common induced sublift ``z`` given by two embeddings."""

    x: Lift
    y: Lift
    z: Lift
    embed_zx: tuple[int, ...]
    embed_zy: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "embed_zx", tuple(self.embed_zx))
        object.__setattr__(self, "embed_zy", tuple(self.embed_zy))
        for target, emb in ((self.x, self.embed_zx), (self.y, self.embed_zy)):
            if len(emb) != self.z.n or not is_embedding(VertexMap(self.z.structure, target.structure, emb)):
                raise AmalgamationError("z does not embed as an induced sublift")


def _glue(a: Structure, b: Structure, c_in_a: Sequence[int], c_in_b: Sequence[int]) -> tuple[Structure, list[int]]:
    if a.signature != b.signature:
        raise AmalgamationError("signatures differ")
    if len(c_in_a) != len(c_in_b) or len(set(c_in_a)) != len(c_in_a) or len(set(c_in_b)) != len(c_in_b):
        raise AmalgamationError("gluing maps must be injective and of equal length")
    if a.induced(list(c_in_a)) != b.induced(list(c_in_b)):
        raise AmalgamationError("the glued parts induce different structures")
    bmap = [-1] * b.n
    for u, v in zip(c_in_a, c_in_b):
        bmap[v] = u
    n = a.n
    for v in range(b.n):
        if bmap[v] < 0:
            bmap[v] = n
            n += 1
    rels = [set(ta) | {tuple(bmap[v] for v in t) for t in tb} for ta, tb in zip(a.relations, b.relations)]
    return Structure(a.signature, n, rels), bmap


def free_amalgam(a: Structure, b: Structure, c_in_a: VertexMap | Sequence[int], c_in_b: VertexMap | Sequence[int]) -> Structure:
    """Free amalgam of ``a`` and ``b`` over a common induced substructure.

    Vertices of ``a`` keep their numbers; the remaining vertices of ``b``
    follow in order.  Tuples are the union of both images.
    """
    ia = c_in_a.image if isinstance(c_in_a, VertexMap) else tuple(c_in_a)
    ib = c_in_b.image if isinstance(c_in_b, VertexMap) else tuple(c_in_b)
    return _glue(a, b, ia, ib)[0]


def lift_amalgam(p: AmalgamProblem, fam: Sequence[Structure] | None = None, check: bool = True) -> Lift:
    """Amalgam of ``p.x`` and ``p.y`` over ``p.z`` inside L.

    The shadows are replaced by their universal witnesses, these are freely
    amalgamated over the shadow of ``z`` and the canonical lift of the result
    is restricted to the vertices of ``x`` followed by the new vertices of
    ``y``.
    """
    cat = p.x.catalogue
    fam = cat.family if fam is None else tuple(fam)
    if check:
        for name, lift in (("x", p.x), ("y", p.y)):
            if not member_of_L(lift, fam):
                raise AmalgamationError(f"{name} is not in L")
    wx, wy = witness(p.x).structure, witness(p.y).structure
    d, bmap = _glue(wx, wy, p.embed_zx, p.embed_zy)
    order = list(range(p.x.n)) + [bmap[v] for v in range(p.y.n) if v not in set(p.embed_zy)]
    result = canonical_lift(d, cat, order)
    if check:
        ypos = {w: k for k, w in enumerate(order)}
        if result.restrict(range(p.x.n)) != p.x:
            raise AssertionError("amalgam does not induce x")
        if result.restrict([ypos[bmap[v]] for v in range(p.y.n)]) != p.y:
            raise AssertionError("amalgam does not induce y")
        if any(hom_exists(f, d) for f in fam):
            raise AssertionError("amalgamated witness admits a forbidden structure")
    return result


def amalgam_embedding_of_y(p: AmalgamProblem) -> tuple[int, ...]:
    """Positions of the vertices of ``y`` in the output of ``lift_amalgam``."""
    zy = {v: k for k, v in enumerate(p.embed_zy)}
    out, nxt = [], p.x.n
    for v in range(p.y.n):
        if v in zy:
            out.append(p.embed_zx[zy[v]])
        else:
            out.append(nxt)
            nxt += 1
    return tuple(out)


# ---------------------------------------------------------------------------
# one-point extensions


def graph_universe(fam: Sequence[Structure]) -> bool:
    """Families of symmetric binary structures are treated over undirected graphs."""
    return all(f.is_symmetric() for f in fam)


def _units(cat: PieceCatalogue, m: int, symmetric: bool) -> list[tuple[int, list]]:
    # every tuple containing the new vertex m, grouped into (level, tuples) units
    base = len(cat.signature)
    units = []
    for ri, arity in enumerate(cat.lifted_signature.arities):
        seen = set()
        for t in product(range(m + 1), repeat=arity):
            if m not in t or t in seen:
                continue
            group = [t]
            if symmetric and ri < base:
                rev = t[::-1]
                if rev != t:
                    group.append(rev)
            seen.update(group)
            level = max((v for v in t if v != m), default=-1)
            units.append((level, group, ri))
    return units


@lru_cache(maxsize=4096)
def _one_point_cached(s: Lift, symmetric: bool) -> tuple[Lift, ...]:
    cat = s.catalogue
    m = s.n
    units = _units(cat, m, symmetric)
    levels = sorted({u[0] for u in units})
    by_level = {lv: [u for u in units if u[0] == lv] for lv in levels}
    start = [set(ts) for ts in s.structure.relations]
    results = []

    def rec(li, rels):
        if li == len(levels):
            results.append(Lift(cat, Structure(cat.lifted_signature, m + 1, rels)))
            return
        lv = levels[li]
        us = by_level[lv]
        keep = list(range(lv + 1)) + [m]
        for bits in product((0, 1), repeat=len(us)):
            new = [set(r) for r in rels]
            for b, (_, group, ri) in zip(bits, us):
                if b:
                    new[ri].update(group)
            st = Structure(cat.lifted_signature, m + 1, new)
            if member_of_L(Lift(cat, st.induced(keep))):
                rec(li + 1, new)

    rec(0, start)
    return tuple(results)


def one_point_extensions(s: Lift, symmetric: bool | None = None) -> list[Lift]:
    """All lifts in L on ``s.n + 1`` vertices inducing ``s`` on the first ``s.n`` vertices.

    The search adds tuples through the new vertex one old vertex at a time
    and prunes with membership of the partial lift, which is valid because L
    is hereditary.  With ``symmetric`` base relations stay symmetric.
    """
    if symmetric is None:
        symmetric = graph_universe(s.catalogue.family)
    return list(_one_point_cached(s, symmetric))


def _ext_key(rels: Sequence[set], arities: Sequence[int], s: Sequence[int], w: int) -> tuple:
    # tuples on s + [w] through w, relabelled with w as len(s)
    local = list(s) + [w]
    m = len(s)
    key = []
    for ri, arity in enumerate(arities):
        for t in product(range(m + 1), repeat=arity):
            if m in t and tuple(local[v] for v in t) in rels[ri]:
                key.append((ri, t))
    return tuple(key)


# ---------------------------------------------------------------------------
# generic prefix


class _Builder:
    """A growing lift U together with a witness W such that U is induced by L(W)."""

    def __init__(self, cat: PieceCatalogue, fam: Sequence[Structure], check: bool):
        self.cat = cat
        self.fam = tuple(fam)
        self.check = check
        self.sig = cat.lifted_signature
        self.base = len(cat.signature)
        self.urels = [set() for _ in self.sig.relations]
        self.un = 0
        self.u2w: list[int] = []
        self.w2u: dict[int, int] = {}
        self.wn = 0
        self.wrels = [set() for _ in cat.signature.relations]
        self.wadj: list[set] = []
        self.winc: list[list] = []
        self.radius = max((p.structure.n for p in cat.pieces), default=1)
        self.fradius = max(f.n for f in fam)

    def lift(self) -> Lift:
        return Lift(self.cat, Structure(self.sig, self.un, self.urels))

    def _add_w_vertex(self) -> int:
        self.wadj.append(set())
        self.winc.append([])
        self.wn += 1
        return self.wn - 1

    def _add_w_tuple(self, ri: int, t: tuple[int, ...]):
        if t in self.wrels[ri]:
            return
        self.wrels[ri].add(t)
        for v in set(t):
            self.winc[v].append((ri, t))
            self.wadj[v].update(u for u in t if u != v)

    def _ball(self, centers: Sequence[int], radius: int) -> list[int]:
        dist = {c: 0 for c in centers}
        q = deque(centers)
        while q:
            v = q.popleft()
            if dist[v] == radius:
                continue
            for u in self.wadj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    q.append(u)
        return sorted(dist)

    def _w_induced(self, verts: Sequence[int]) -> tuple[Structure, dict[int, int]]:
        pos = {v: k for k, v in enumerate(verts)}
        rels = [set() for _ in self.wrels]
        for v in verts:
            for ri, t in self.winc[v]:
                if all(u in pos for u in t):
                    rels[ri].add(tuple(pos[u] for u in t))
        return Structure(self.cat.signature, len(verts), rels), pos

    def realize(self, s: Sequence[int], t: Lift) -> int:
        """Add a vertex realising the one-point extension ``t`` of the sublift on ``s``."""
        wit = witness(t).structure
        m = len(s)
        gmap = []
        for v in range(wit.n):
            gmap.append(self.u2w[s[v]] if v < m else self._add_w_vertex())
        for ri, tup in wit.tuples():
            self._add_w_tuple(ri, tuple(gmap[v] for v in tup))
        new_w = gmap[m]
        v = self.un
        self.un += 1
        self.u2w.append(new_w)
        self.w2u[new_w] = v
        # shadow tuples through v come from t alone (free amalgamation)
        local = list(s) + [v]
        for ri in range(self.base):
            for tup in t.structure.relations[ri]:
                if m in tup:
                    self.urels[ri].add(tuple(local[x] for x in tup))
        # extended tuples through v: pinned piece searches near v in W
        ball = self._ball([new_w], self.radius)
        sub, pos = self._w_induced(ball)
        near_u = [self.w2u[w] for w in ball if w in self.w2u]
        for i, piece in enumerate(self.cat.pieces):
            for tup in product(near_u, repeat=piece.arity):
                if v not in tup:
                    continue
                pins = {r: pos[self.u2w[x]] for r, x in zip(piece.roots, tup)}
                if hom_exists(piece.structure, sub, pins=pins):
                    self.urels[self.base + i].add(tup)
        if self.check:
            fresh = gmap[m:]
            ball = self._ball(fresh, self.fradius)
            sub, _ = self._w_induced(ball)
            if any(hom_exists(f, sub) for f in self.fam):
                raise AssertionError("witness acquired a forbidden structure")
            if self.lift().restrict(local) != t:
                raise AssertionError("new vertex does not realise the extension")
        return v


def _sublift(rels, sig, cat, verts) -> Lift:
    pos = {v: k for k, v in enumerate(verts)}
    out = [
        {tuple(pos[x] for x in t) for t in ts if all(x in pos for x in t)} for ts in rels
    ]
    return Lift(cat, Structure(sig, len(verts), out))


def _missing_for(u_rels, un, sig, cat, s, symmetric) -> Iterator[Lift]:
    sub = _sublift(u_rels, sig, cat, s)
    realized = {_ext_key(u_rels, sig.arities, s, w) for w in range(un) if w not in set(s)}
    m = len(s)
    for t in one_point_extensions(sub, symmetric):
        key = _ext_key(t.structure.relations, sig.arities, list(range(m)), m)
        if key not in realized:
            yield t


def generic_build(
    fam: Sequence[Structure],
    rounds: int,
    size_cap: int,
    symmetric: bool | None = None,
    max_vertices: int | None = None,
    check: bool = False,
) -> Lift:
    """Finite approximation of the generic lift.

    Each round sweeps over the vertex subsets S (size at most ``size_cap``,
    by size then lexicographically) of the lift as it stood at the start of
    the round, and adds one vertex for every one-point extension of S in L
    that no vertex realises yet.  ``max_vertices`` stops the growth early.
    """
    fam = tuple(fam)
    cat = build_catalogue(fam)
    if symmetric is None:
        symmetric = graph_universe(fam)
    b = _Builder(cat, fam, check)
    for _ in range(rounds):
        start_n = b.un
        grew = False
        for k in range(min(size_cap, start_n) + 1):
            for s in combinations(range(start_n), k):
                for t in _missing_for(b.urels, b.un, b.sig, cat, list(s), symmetric):
                    # re-test: an earlier addition in this sweep may realise t
                    key = _ext_key(t.structure.relations, b.sig.arities, list(range(k)), k)
                    if any(_ext_key(b.urels, b.sig.arities, list(s), w) == key for w in range(start_n, b.un)):
                        continue
                    if max_vertices is not None and b.un >= max_vertices:
                        return b.lift()
                    b.realize(list(s), t)
                    grew = True
        if not grew:
            break
    return b.lift()


def extension_property_check(u: Lift, fam: Sequence[Structure] | None = None, k: int = 1, symmetric: bool | None = None) -> list[tuple[tuple[int, ...], Lift]]:
    """Pairs (S, T) with ``|S| < k`` and T a one-point extension of the sublift on S in L not realised in ``u``."""
    fam = u.catalogue.family if fam is None else tuple(fam)
    if symmetric is None:
        symmetric = graph_universe(fam)
    rels = [set(ts) for ts in u.structure.relations]
    sig = u.structure.signature
    failures = []
    for size in range(min(k - 1, u.n) + 1):
        for s in combinations(range(u.n), size):
            for t in _missing_for(rels, u.n, sig, u.catalogue, list(s), symmetric):
                failures.append((s, t))
    return failures


def forb_h_structures(fam: Sequence[Structure], n: int, symmetric: bool | None = None) -> Iterator[Structure]:
    """Isomorphism classes of structures on at most ``n`` vertices admitting no homomorphism from the family."""
    fam = tuple(fam)
    if symmetric is None:
        symmetric = graph_universe(fam)
    sig = fam[0].signature
    for k in range(n + 1):
        for a in iter_structures(sig, k, symmetric=symmetric):
            if not any(hom_exists(f, a) for f in fam):
                yield a


def universality_check(u: Lift, fam: Sequence[Structure] | None = None, n: int = 0, symmetric: bool | None = None) -> bool:
    """Every structure of Forb_h(fam) with at most ``n`` vertices embeds into the shadow of ``u``."""
    fam = u.catalogue.family if fam is None else tuple(fam)
    shadow = u.shadow
    return all(find_embedding(a, shadow) is not None for a in forb_h_structures(fam, n, symmetric))
