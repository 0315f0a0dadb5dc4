"""Finite relational structures and homomorphism search.

Vertices are the integers ``0..n-1``.  Every relation of a structure is a
frozenset of vertex tuples; tuples may repeat vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations, product
from typing import Iterable, Iterator, Mapping, Sequence


class SignatureMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    """Ordered list of ``(name, arity)`` pairs."""

    relations: tuple[tuple[str, int], ...]

    def __post_init__(self):
        rels = tuple((str(name), int(arity)) for name, arity in self.relations)
        object.__setattr__(self, "relations", rels)
        names = [name for name, _ in rels]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate relation names in {names}")
        for name, arity in rels:
            if arity < 1:
                raise ValueError(f"relation {name!r} has arity {arity} < 1")

    @classmethod
    def graph(cls) -> Signature:
        return cls((("edge", 2),))

    def __len__(self):
        return len(self.relations)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.relations)

    @property
    def arities(self) -> tuple[int, ...]:
        return tuple(arity for _, arity in self.relations)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no relation named {name!r}") from None

    def extend(self, more: Iterable[tuple[str, int]]) -> Signature:
        return Signature(self.relations + tuple(more))

    def prefix(self, k: int) -> Signature:
        return Signature(self.relations[:k])

    def starts_with(self, other: Signature) -> bool:
        return self.relations[: len(other)] == other.relations


@dataclass(frozen=True)
class Structure:
    """A finite relational structure.

    ``relations`` may be given as a sequence aligned with the signature or as
    a mapping from relation name to tuples; it is normalised to a tuple of
    frozensets.
    """

    signature: Signature
    n: int
    relations: tuple[frozenset, ...] = field(default=())

    def __post_init__(self):
        sig = self.signature
        rels = self.relations
        if isinstance(rels, Mapping):
            unknown = set(rels) - set(sig.names)
            if unknown:
                raise KeyError(f"unknown relations {sorted(unknown)}")
            rels = [rels.get(name, ()) for name in sig.names]
        rels = list(rels)
        if not rels:
            rels = [()] * len(sig)
        if len(rels) != len(sig):
            raise ValueError(f"expected {len(sig)} relations, got {len(rels)}")
        norm = []
        for (name, arity), tuples in zip(sig.relations, rels):
            ts = frozenset(tuple(int(v) for v in t) for t in tuples)
            for t in ts:
                if len(t) != arity:
                    raise ValueError(f"tuple {t} in {name!r} has length {len(t)}, arity is {arity}")
                for v in t:
                    if not 0 <= v < self.n:
                        raise ValueError(f"tuple {t} in {name!r} mentions vertex {v} outside 0..{self.n - 1}")
            norm.append(ts)
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        object.__setattr__(self, "relations", tuple(norm))

    def __repr__(self):
        body = "; ".join(
            f"{name} " + " ".join("(" + " ".join(map(str, t)) + ")" for t in sorted(ts))
            for name, ts in zip(self.signature.names, self.relations)
            if ts
        )
        return f"Structure(n={self.n}; {body})"

    def rel(self, name: str) -> frozenset:
        return self.relations[self.signature.index(name)]

    def tuples(self) -> Iterator[tuple[int, tuple[int, ...]]]:
        """Yield ``(relation index, tuple)`` in a fixed order."""
        for ri, ts in enumerate(self.relations):
            for t in sorted(ts):
                yield ri, t

    @property
    def tuple_count(self) -> int:
        return sum(len(ts) for ts in self.relations)

    def induced(self, vertices: Sequence[int]) -> Structure:
        """Substructure induced on ``vertices``, renumbered in the given order."""
        pos = {v: i for i, v in enumerate(vertices)}
        if len(pos) != len(vertices):
            raise ValueError("induced() needs distinct vertices")
        rels = [
            [tuple(pos[v] for v in t) for t in ts if all(v in pos for v in t)]
            for ts in self.relations
        ]
        return Structure(self.signature, len(vertices), rels)

    def relabel(self, image: Sequence[int], n: int | None = None) -> Structure:
        """Image of the structure under the vertex map ``image`` (not necessarily injective)."""
        n = max(image, default=-1) + 1 if n is None else n
        rels = [[tuple(image[v] for v in t) for t in ts] for ts in self.relations]
        return Structure(self.signature, n, rels)

    def reduct(self, signature: Signature) -> Structure:
        """Forget every relation after the first ``len(signature)``."""
        if not self.signature.starts_with(signature):
            raise SignatureMismatch("reduct signature is not a prefix")
        return Structure(signature, self.n, self.relations[: len(signature)])

    def with_tuples(self, extra: Mapping[int, Iterable[tuple[int, ...]]]) -> Structure:
        rels = [set(ts) for ts in self.relations]
        for ri, ts in extra.items():
            rels[ri].update(tuple(t) for t in ts)
        return Structure(self.signature, self.n, rels)

    def without_tuple(self, ri: int, t: tuple[int, ...]) -> Structure:
        rels = list(self.relations)
        rels[ri] = rels[ri] - {tuple(t)}
        return Structure(self.signature, self.n, rels)

    def add_vertices(self, k: int) -> Structure:
        return Structure(self.signature, self.n + k, self.relations)

    def is_symmetric(self) -> bool:
        """True when every relation is binary and symmetric."""
        for arity, ts in zip(self.signature.arities, self.relations):
            if arity != 2 or any((b, a) not in ts for a, b in ts):
                return False
        return True

    def has_loop_vertex(self) -> bool:
        """Some vertex carries the constant tuple in every relation."""
        return any(
            all((v,) * arity in ts for arity, ts in zip(self.signature.arities, self.relations))
            for v in range(self.n)
        )


@dataclass(frozen=True)
class VertexMap:
    source: Structure
    target: Structure
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        if len(self.image) != self.source.n:
            raise ValueError(f"map covers {len(self.image)} of {self.source.n} vertices")
        if any(not 0 <= w < self.target.n for w in self.image):
            raise ValueError("map sends a vertex outside the target")

    def __getitem__(self, v: int) -> int:
        return self.image[v]

    def compose(self, after: VertexMap) -> VertexMap:
        """``after ∘ self``."""
        return VertexMap(self.source, after.target, tuple(after.image[w] for w in self.image))

    @property
    def injective(self) -> bool:
        return len(set(self.image)) == len(self.image)


# ---------------------------------------------------------------------------
# constructors


def make_graph(n: int, edges: Iterable[tuple[int, int]]) -> Structure:
    """Undirected graph stored as a symmetric ``edge`` relation."""
    ts = set()
    for a, b in edges:
        ts.add((a, b))
        ts.add((b, a))
    return Structure(Signature.graph(), n, [ts])


def make_digraph(n: int, arcs: Iterable[tuple[int, int]]) -> Structure:
    return Structure(Signature.graph(), n, [set(map(tuple, arcs))])


def cycle(k: int) -> Structure:
    return make_graph(k, [(i, (i + 1) % k) for i in range(k)])


def complete(k: int) -> Structure:
    return make_graph(k, combinations(range(k), 2))


def path(k: int) -> Structure:
    """Undirected path with ``k`` edges."""
    return make_graph(k + 1, [(i, i + 1) for i in range(k)])


def directed_path(k: int) -> Structure:
    return make_digraph(k + 1, [(i, i + 1) for i in range(k)])


def transitive_tournament(k: int) -> Structure:
    return make_digraph(k, combinations(range(k), 2))


def petersen() -> Structure:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return make_graph(10, outer + spokes + inner)


def empty_structure(signature: Signature, n: int = 0) -> Structure:
    return Structure(signature, n, [()] * len(signature))


def disjoint_union(a: Structure, b: Structure) -> Structure:
    _check_same_signature(a, b)
    shifted = b.relabel([v + a.n for v in range(b.n)], a.n + b.n)
    return Structure(a.signature, a.n + b.n, [x | y for x, y in zip(a.relations, shifted.relations)])


def _check_same_signature(a: Structure, b: Structure):
    if a.signature != b.signature:
        raise SignatureMismatch(f"{a.signature.relations} vs {b.signature.relations}")


# ---------------------------------------------------------------------------
# homomorphism search


class _TargetIndex:
    """Tuples of a target structure indexed by (position, vertex)."""

    def __init__(self, b: Structure):
        self.b = b
        self.by_pos = []
        self.by_vertex = []
        for arity, ts in zip(b.signature.arities, b.relations):
            idx = [dict() for _ in range(arity)]
            touching = {}
            for t in ts:
                for p, w in enumerate(t):
                    idx[p].setdefault(w, []).append(t)
                for w in set(t):
                    touching.setdefault(w, []).append(t)
            self.by_pos.append(idx)
            self.by_vertex.append(touching)
        self._pattern_cache = {}

    def pattern_domains(self, ri: int, t: tuple[int, ...]) -> dict[int, int]:
        """Per source vertex of ``t``: bitmask of target vertices compatible with the tuple shape."""
        shape = _shape(t)
        key = (ri, shape)
        hit = self._pattern_cache.get(key)
        if hit is None:
            hit = [0] * len(t)
            for s in self.b.relations[ri]:
                if _fits(s, shape):
                    for p, w in enumerate(s):
                        hit[p] |= 1 << w
            self._pattern_cache[key] = hit
        out = {}
        for p, v in enumerate(t):
            out[v] = out.get(v, -1) & hit[p]
        return out


def _shape(t) -> tuple[int, ...]:
    # equality pattern of a tuple, e.g. (0, 1, 0) for (7, 3, 7)
    seen = {}
    return tuple(seen.setdefault(v, len(seen)) for v in t)


def _fits(s, shape) -> bool:
    # target tuple repeats a vertex wherever the source pattern does
    first = {}
    for p, k in enumerate(shape):
        if first.setdefault(k, s[p]) != s[p]:
            return False
    return True


@lru_cache(maxsize=512)
def _target_index(b: Structure) -> _TargetIndex:
    return _TargetIndex(b)


def iter_homomorphisms(
    a: Structure,
    b: Structure,
    pins: Mapping[int, int] | None = None,
    injective: bool = False,
    strong: bool = False,
    domains: Mapping[int, Iterable[int]] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Yield every homomorphism ``a -> b`` as a tuple of images.

    ``strong`` additionally requires that tuples of ``b`` among image vertices
    pull back to tuples of ``a``; it implies ``injective``.  ``domains``
    restricts the candidate images of individual vertices.  The search is a
    backtracking with forward checking over bitmask domains; the next vertex
    is the one with the fewest candidates (ties broken by index), so the
    output order is deterministic.
    """
    _check_same_signature(a, b)
    n, m = a.n, b.n
    if n == 0:
        yield ()
        return
    if strong:
        injective = True
    if injective and n > m:
        return
    idx = _target_index(b)
    full = (1 << m) - 1
    dom = [full] * n
    cons = [[] for _ in range(n)]
    for ri, ts in enumerate(a.relations):
        for t in ts:
            for v, mask in idx.pattern_domains(ri, t).items():
                dom[v] &= mask
            for v in set(t):
                cons[v].append((ri, t))
    if pins:
        for v, w in pins.items():
            if not 0 <= w < m:
                return
            dom[v] &= 1 << w
    if domains:
        for v, ws in domains.items():
            mask = 0
            for w in ws:
                mask |= 1 << w
            dom[v] &= mask
    if any(d == 0 for d in dom):
        return
    if injective and pins and len(set(pins.values())) != len(pins):
        return

    assign = [-1] * n
    inverse = {}
    a_rels = a.relations
    by_pos = idx.by_pos
    by_vertex = idx.by_vertex

    def propagate(v, w, dom):
        for ri, t in cons[v]:
            p0 = t.index(v)
            cands = by_pos[ri][p0].get(w)
            if not cands:
                return False
            free = {}
            ok_any = False
            for s in cands:
                local = {}
                good = True
                for p, u in enumerate(t):
                    x = assign[u]
                    if x >= 0:
                        if s[p] != x:
                            good = False
                            break
                    elif local.setdefault(u, s[p]) != s[p]:
                        good = False
                        break
                if not good:
                    continue
                ok_any = True
                for u, x in local.items():
                    free[u] = free.get(u, 0) | (1 << x)
            if not ok_any:
                return False
            for u, mask in free.items():
                dom[u] &= mask
                if dom[u] == 0:
                    return False
        if injective:
            bit = ~(1 << w)
            for u in range(n):
                if assign[u] < 0:
                    dom[u] &= bit
                    if dom[u] == 0:
                        return False
        if strong:
            for ri, touching in enumerate(by_vertex):
                for s in touching.get(w, ()):
                    if all(x in inverse for x in s):
                        if tuple(inverse[x] for x in s) not in a_rels[ri]:
                            return False
        return True

    def rec(depth, dom):
        if depth == n:
            yield tuple(assign)
            return
        best, best_count = -1, m + 1
        for u in range(n):
            if assign[u] < 0:
                c = dom[u].bit_count()
                if c < best_count:
                    best, best_count = u, c
                    if c <= 1:
                        break
        v = best
        mask = dom[v]
        while mask:
            low = mask & -mask
            w = low.bit_length() - 1
            mask ^= low
            assign[v] = w
            if strong:
                inverse[w] = v
            nd = list(dom)
            nd[v] = low
            if propagate(v, w, nd):
                yield from rec(depth + 1, nd)
            assign[v] = -1
            if strong:
                del inverse[w]

    yield from rec(0, dom)


def is_homomorphism(m: VertexMap) -> bool:
    _check_same_signature(m.source, m.target)
    img = m.image
    for ts, us in zip(m.source.relations, m.target.relations):
        for t in ts:
            if tuple(img[v] for v in t) not in us:
                return False
    return True


def is_embedding(m: VertexMap) -> bool:
    """Injective strong homomorphism (image induces the source)."""
    if not (m.injective and is_homomorphism(m)):
        return False
    return m.target.induced(m.image) == m.source


def _first(it) -> tuple[int, ...] | None:
    return next(iter(it), None)


def find_homomorphism(a: Structure, b: Structure) -> VertexMap | None:
    img = _first(iter_homomorphisms(a, b))
    return None if img is None else VertexMap(a, b, img)


def find_homomorphism_with_pins(a: Structure, b: Structure, pins: Mapping[int, int]) -> VertexMap | None:
    if len(set(pins)) != len(pins):
        raise ValueError("pins must map distinct source vertices")
    img = _first(iter_homomorphisms(a, b, pins=pins))
    return None if img is None else VertexMap(a, b, img)


def find_embedding(a: Structure, b: Structure) -> VertexMap | None:
    img = _first(iter_homomorphisms(a, b, strong=True))
    return None if img is None else VertexMap(a, b, img)


def find_isomorphism(a: Structure, b: Structure, pins: Mapping[int, int] | None = None) -> VertexMap | None:
    _check_same_signature(a, b)
    if a.n != b.n or [len(r) for r in a.relations] != [len(r) for r in b.relations]:
        return None
    img = _first(iter_homomorphisms(a, b, pins=pins, strong=True))
    return None if img is None else VertexMap(a, b, img)


def hom_exists(a: Structure, b: Structure, **kw) -> bool:
    return _first(iter_homomorphisms(a, b, **kw)) is not None


def core_of(a: Structure) -> Structure:
    """Smallest retract; the lexicographically least minimum vertex subset is used."""
    for k in range(0 if a.n == 0 else 1, a.n + 1):
        for sub in combinations(range(a.n), k):
            if hom_exists(a, a.induced(sub)):
                return a.induced(sub)
    return a


def is_core(a: Structure) -> bool:
    return core_of(a).n == a.n


def is_minimal_family(fam: Sequence[Structure]) -> bool:
    if not all(is_core(f) for f in fam):
        return False
    for i, j in permutations(range(len(fam)), 2):
        if hom_exists(fam[i], fam[j]):
            return False
    return True


def gaifman_adjacency(a: Structure) -> list[int]:
    """Gaifman graph as a list of neighbour bitmasks."""
    adj = [0] * a.n
    for ts in a.relations:
        for t in ts:
            vs = set(t)
            for x in vs:
                for y in vs:
                    if x != y:
                        adj[x] |= 1 << y
    return adj


def gaifman_graph(a: Structure) -> Structure:
    adj = gaifman_adjacency(a)
    edges = [(x, y) for x in range(a.n) for y in range(a.n) if adj[x] >> y & 1]
    return Structure(Signature.graph(), a.n, [edges])


def components_of_mask(adj: Sequence[int], mask: int) -> list[int]:
    """Connected components (as bitmasks) of the graph induced on ``mask``."""
    comps = []
    rest = mask
    while rest:
        low = rest & -rest
        comp = low
        frontier = low
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                nxt |= adj[b.bit_length() - 1]
                f ^= b
            nxt &= mask & ~comp
            comp |= nxt
            frontier = nxt
        comps.append(comp)
        rest &= ~comp
    return comps


def mask_to_list(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def connected_components(a: Structure) -> list[list[int]]:
    adj = gaifman_adjacency(a)
    return [mask_to_list(c) for c in components_of_mask(adj, (1 << a.n) - 1)]


def is_connected(a: Structure) -> bool:
    return len(connected_components(a)) <= 1


# ---------------------------------------------------------------------------
# canonical forms and exhaustive enumeration


def _refine(a: Structure, colors: list) -> list:
    # colour refinement on the incidence structure
    n = a.n
    while True:
        sig = [[colors[v]] for v in range(n)]
        for ri, ts in enumerate(a.relations):
            for t in ts:
                tc = tuple(colors[u] for u in t)
                for p, v in enumerate(t):
                    sig[v].append((ri, p, tc))
        keys = [(s[0], tuple(sorted(s[1:]))) for s in sig]
        ranks = {k: i for i, k in enumerate(sorted(set(keys)))}
        new = [ranks[k] for k in keys]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def canonical_form(a: Structure, roots: Sequence[int] = ()) -> tuple:
    """Complete isomorphism invariant; rooted forms also fix ``roots`` in order."""
    n = a.n
    start = [(1, ())] * n
    for i, r in enumerate(roots):
        start[r] = (0, start[r][1] + (i,))
    ranks = {k: i for i, k in enumerate(sorted(set(start)))}
    colors = _refine(a, [ranks[s] for s in start])
    cells = {}
    for v in range(n):
        cells.setdefault(colors[v], []).append(v)
    ordered = [cells[c] for c in sorted(cells)]
    best = None
    pos = [0] * n
    for choice in product(*(permutations(cell) for cell in ordered)):
        i = 0
        for cell in choice:
            for v in cell:
                pos[v] = i
                i += 1
        key = (
            tuple(tuple(sorted(tuple(pos[v] for v in t) for t in ts)) for ts in a.relations),
            tuple(pos[r] for r in roots),
        )
        if best is None or key < best:
            best = key
    return (n, best)


def iter_structures(
    signature: Signature,
    n: int,
    *,
    symmetric: bool = False,
    connected: bool = False,
    loops: bool = True,
) -> Iterator[Structure]:
    """All structures on exactly ``n`` vertices up to isomorphism.

    ``symmetric`` restricts to symmetric binary relations (graphs),
    ``loops=False`` forbids tuples with a repeated vertex, ``connected``
    keeps only structures with connected Gaifman graph.
    """
    yield from _classes(signature, n, symmetric, connected, loops)


@lru_cache(maxsize=None)
def _classes(signature, n, symmetric, connected, loops) -> tuple[Structure, ...]:
    if symmetric and any(a != 2 for a in signature.arities):
        raise ValueError("symmetric enumeration needs binary relations")
    if n == 0:
        return () if connected else (empty_structure(signature, 0),)
    # connected binary structures always have a vertex whose removal keeps them connected
    grow_connected = connected and all(a <= 2 for a in signature.arities)
    parents = _classes(signature, n - 1, symmetric, grow_connected, loops) if n > 1 else (empty_structure(signature, 0),)
    new = n - 1
    options = []
    for arity in signature.arities:
        if symmetric:
            opts = [(u, new) for u in range(new)]
            if loops:
                opts.append((new, new))
        else:
            opts = [t for t in product(range(n), repeat=arity) if new in t]
            if not loops:
                opts = [t for t in opts if len(set(t)) == arity]
        options.append(opts)
    flat = [(ri, t) for ri, opts in enumerate(options) for t in opts]
    seen = {}
    for parent in parents:
        base = parent.add_vertices(1)
        for bits in range(1 << len(flat)):
            extra = {}
            for k, (ri, t) in enumerate(flat):
                if bits >> k & 1:
                    extra.setdefault(ri, []).append(t)
                    if symmetric:
                        extra[ri].append((t[1], t[0]))
            s = base.with_tuples(extra)
            if connected and not is_connected(s):
                continue
            key = canonical_form(s)
            if key not in seen:
                seen[key] = s
    return tuple(seen[k] for k in sorted(seen))


def iter_structures_upto(signature: Signature, n: int, **kw) -> Iterator[Structure]:
    for k in range(n + 1):
        yield from iter_structures(signature, k, **kw)
