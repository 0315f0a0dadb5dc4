"""Even-odd pairs, even-odd metric spaces and the Katětov-style generic space.

An even-odd pair ``(a, b)`` records the length ``a`` of a shortest even walk
and the length ``b`` of a shortest odd walk; ``OMEGA`` stands for "no walk".
Spaces keep the two slots as float matrices with ``inf`` for ``OMEGA``.
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from itertools import combinations, product
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra, shortest_path

from .relcore import Structure, make_graph

OMEGA = math.inf


class EvenOddError(ValueError):
    pass


def _slot(v, parity: int, name: str):
    if v == OMEGA:
        return OMEGA
    if isinstance(v, float) and v.is_integer():
        v = int(v)
    if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 0 or v % 2 != parity:
        kind = "even" if parity == 0 else "odd"
        raise EvenOddError(f"{name} slot must be an {kind} non-negative integer or ω, got {v!r}")
    return int(v)


@dataclass(frozen=True)
class EvenOddPair:
    """``(even, odd)`` with the componentwise partial order and the walk-length sum."""

    even: int | float
    odd: int | float

    def __post_init__(self):
        object.__setattr__(self, "even", _slot(self.even, 0, "even"))
        object.__setattr__(self, "odd", _slot(self.odd, 1, "odd"))

    def __add__(self, other: EvenOddPair) -> EvenOddPair:
        return pair_add(self, other)

    def __le__(self, other: EvenOddPair) -> bool:
        return pair_leq(self, other)

    def __ge__(self, other: EvenOddPair) -> bool:
        return pair_leq(other, self)

    def __iter__(self):
        yield self.even
        yield self.odd

    def __repr__(self):
        return f"({_fmt(self.even)},{_fmt(self.odd)})"


def _fmt(v) -> str:
    return "w" if v == OMEGA else str(int(v))


def pair_add(p: EvenOddPair, q: EvenOddPair) -> EvenOddPair:
    a, b = p
    c, d = q
    return EvenOddPair(min(a + c, b + d), min(a + d, b + c))


def pair_leq(p: EvenOddPair, q: EvenOddPair) -> bool:
    return p.even <= q.even and p.odd <= q.odd


def pair_min(p: EvenOddPair, q: EvenOddPair) -> EvenOddPair:
    """Elementwise minimum."""
    return EvenOddPair(min(p.even, q.even), min(p.odd, q.odd))


ZERO = EvenOddPair(0, OMEGA)
UNREACHABLE = EvenOddPair(OMEGA, OMEGA)


# ---------------------------------------------------------------------------
# spaces


class EvenOddSpace:
    """Points ``0..n-1`` with a matrix of even-odd pairs.

    Construction only checks that every entry is an even-odd pair; the metric
    axioms are reported by :func:`validate_space`.
    """

    __slots__ = ("even", "odd")

    def __init__(self, even, odd):
        even = np.array(even, dtype=float, copy=True)
        odd = np.array(odd, dtype=float, copy=True)
        if even.ndim != 2 or even.shape[0] != even.shape[1] or even.shape != odd.shape:
            raise EvenOddError("distance slots must be square matrices of one shape")
        for v in np.unique(even):
            _slot(float(v), 0, "even")
        for v in np.unique(odd):
            _slot(float(v), 1, "odd")
        even.setflags(write=False)
        odd.setflags(write=False)
        self.even = even
        self.odd = odd

    @classmethod
    def from_pairs(cls, rows: Sequence[Sequence[EvenOddPair | tuple]]) -> EvenOddSpace:
        n = len(rows)
        even = np.full((n, n), OMEGA)
        odd = np.full((n, n), OMEGA)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise EvenOddError("distance matrix is not square")
            for j, p in enumerate(row):
                p = p if isinstance(p, EvenOddPair) else EvenOddPair(*p)
                even[i, j], odd[i, j] = p.even, p.odd
        return cls(even, odd)

    @property
    def point_count(self) -> int:
        return self.even.shape[0]

    def __len__(self):
        return self.point_count

    def d(self, x: int, y: int) -> EvenOddPair:
        return EvenOddPair(self.even[x, y], self.odd[x, y])

    def pairs(self) -> list[list[EvenOddPair]]:
        n = self.point_count
        return [[self.d(i, j) for j in range(n)] for i in range(n)]

    def induced(self, points: Sequence[int]) -> EvenOddSpace:
        idx = np.asarray(points, dtype=int)
        return EvenOddSpace(self.even[np.ix_(idx, idx)], self.odd[np.ix_(idx, idx)])

    def __eq__(self, other):
        if not isinstance(other, EvenOddSpace):
            return NotImplemented
        return np.array_equal(self.even, other.even) and np.array_equal(self.odd, other.odd)

    def __hash__(self):
        return hash((self.even.tobytes(), self.odd.tobytes()))

    def __repr__(self):
        rows = "; ".join(" ".join(repr(p) for p in row) for row in self.pairs())
        return f"EvenOddSpace(n={self.point_count}; {rows})"


class Violation(NamedTuple):
    axiom: str  # "identity", "symmetry" or "triangle"
    points: tuple[int, ...]


def _sum_slots(e1, o1, e2, o2):
    return np.minimum(e1 + e2, o1 + o2), np.minimum(e1 + o2, o1 + e2)


def validate_space(s: EvenOddSpace) -> list[Violation]:
    """Every pair or triple breaking one of the three axioms.

    Triangles ``(x, y, z)`` are checked for all triples, degenerate ones
    included, as ``d(x,z) <= d(x,y) + d(y,z)``.
    """
    n = s.point_count
    out = []
    eye = np.eye(n, dtype=bool)
    bad = (s.even == 0) != eye
    for x, y in zip(*np.nonzero(bad)):
        out.append(Violation("identity", (int(x), int(y))))
    asym = (s.even != s.even.T) | (s.odd != s.odd.T)
    for x, y in zip(*np.nonzero(np.triu(asym, 1))):
        out.append(Violation("symmetry", (int(x), int(y))))
    # rhs[x, y, z] = d(x,y) + d(y,z)
    e, o = _sum_slots(s.even[:, :, None], s.odd[:, :, None], s.even[None, :, :], s.odd[None, :, :])
    broken = (s.even[:, None, :] > e) | (s.odd[:, None, :] > o)
    for x, y, z in zip(*np.nonzero(broken)):
        out.append(Violation("triangle", (int(x), int(y), int(z))))
    return out


def is_valid_space(s: EvenOddSpace) -> bool:
    return not validate_space(s)


def _require_simple_graph(g: Structure):
    if len(g.signature) != 1 or g.signature.arities[0] != 2 or not g.is_symmetric():
        raise EvenOddError("expected an undirected graph (one symmetric binary relation)")
    if any(a == b for a, b in g.relations[0]):
        raise EvenOddError("graph has a loop")


def graph_to_evenodd(g: Structure) -> EvenOddSpace:
    """Shortest even and odd walk lengths between all pairs of an undirected graph.

    Breadth-first search runs on the parity double cover, vertex ``(v, p)``
    being ``2v + p``.  The self-distance of ``v`` is ``(0, shortest odd
    closed walk through v)``.
    """
    _require_simple_graph(g)
    n = g.n
    if n == 0:
        return EvenOddSpace(np.zeros((0, 0)), np.zeros((0, 0)))
    rows, cols = [], []
    for a, b in g.relations[0]:
        rows += [2 * a, 2 * a + 1]
        cols += [2 * b + 1, 2 * b]
    cover = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 * n, 2 * n))
    dist = shortest_path(cover, directed=True, unweighted=True, indices=np.arange(0, 2 * n, 2))
    return EvenOddSpace(dist[:, 0::2], dist[:, 1::2])


def walk_closure(even, odd) -> EvenOddSpace:
    """Shortest even and odd walks over a partial distance table.

    ``even``/``odd`` are symmetric matrices with ``inf`` where a distance is
    undefined.  Every defined pair contributes its even and odd length as
    parallel edges; the odd slot of a self-distance is a closed step.
    """
    even = np.asarray(even, dtype=float)
    odd = np.asarray(odd, dtype=float)
    n = even.shape[0]
    if n == 0:
        return EvenOddSpace(np.zeros((0, 0)), np.zeros((0, 0)))
    same = even.copy()
    np.fill_diagonal(same, OMEGA)
    # cover vertex (v, p) is 2v + p; same-parity steps use even lengths
    w = np.full((2 * n, 2 * n), OMEGA)
    w[0::2, 0::2] = w[1::2, 1::2] = same
    w[0::2, 1::2] = w[1::2, 0::2] = odd
    dist = dijkstra(csgraph_from_dense(w, null_value=OMEGA), directed=True, indices=np.arange(0, 2 * n, 2))
    return EvenOddSpace(dist[:, 0::2], dist[:, 1::2])


def pair_minplus(e1, o1, e2, o2):
    """``out[x, y] = min_c d1(x, c) + d2(c, y)`` elementwise over the middle index."""
    if e1.shape[1] == 0:
        shape = (e1.shape[0], e2.shape[1])
        return np.full(shape, OMEGA), np.full(shape, OMEGA)
    e, o = _sum_slots(e1[:, :, None], o1[:, :, None], e2[None, :, :], o2[None, :, :])
    return e.min(axis=1), o.min(axis=1)


def amalgam_point_map(nb: int, na: int, a_shared: Sequence[int], b_shared: Sequence[int]) -> list[int]:
    """Where the points of ``b`` land in the amalgam: shared points go to their
    partner in ``a``, the rest follow the points of ``a`` in ascending order."""
    partner = dict(zip(b_shared, a_shared))
    out, nxt = [], na
    for v in range(nb):
        if v in partner:
            out.append(partner[v])
        else:
            out.append(nxt)
            nxt += 1
    return out


def evenodd_amalgam(
    a: EvenOddSpace, b: EvenOddSpace, a_shared: Sequence[int], b_shared: Sequence[int]
) -> EvenOddSpace:
    """Amalgam of ``a`` and ``b`` glued along ``a_shared[k] ~ b_shared[k]``.

    The points of ``a`` keep their numbers; see :func:`amalgam_point_map` for
    ``b``.  Missing distances are the shortest walks through defined ones.
    For valid parts such a walk passes through a shared point, so the new
    distances are computed as a min-plus product over the gluing instead of
    a full :func:`walk_closure` (the two agree on valid inputs).
    """
    a_shared, b_shared = list(a_shared), list(b_shared)
    if len(a_shared) != len(b_shared):
        raise EvenOddError("gluing lists differ in length")
    if len(set(a_shared)) != len(a_shared) or len(set(b_shared)) != len(b_shared):
        raise EvenOddError("gluing points must be distinct")
    if a.induced(a_shared) != b.induced(b_shared):
        raise EvenOddError("gluing is not isometric")
    bmap = amalgam_point_map(b.point_count, a.point_count, a_shared, b_shared)
    na = a.point_count
    n = na + b.point_count - len(b_shared)
    fresh = [v for v in range(b.point_count) if v not in set(b_shared)]
    # with valid parts a shortest walk from a to b crosses once through a shared point
    ce, co = pair_minplus(
        a.even[:, a_shared], a.odd[:, a_shared], b.even[np.ix_(b_shared, fresh)], b.odd[np.ix_(b_shared, fresh)]
    )
    even = np.empty((n, n))
    odd = np.empty((n, n))
    even[:na, :na], odd[:na, :na] = a.even, a.odd
    idx = np.asarray(bmap, dtype=int)
    even[np.ix_(idx, idx)], odd[np.ix_(idx, idx)] = b.even, b.odd
    even[:na, na:], odd[:na, na:] = ce, co
    even[na:, :na], odd[na:, :na] = ce.T, co.T
    return EvenOddSpace(even, odd)


def in_class_Kl(s: EvenOddSpace, l: int) -> bool:
    """No pair (``x = y`` included) has ``a + b <= l``."""
    if l < 3 or l % 2 != 1:
        raise EvenOddError("l must be an odd integer >= 3")
    return not bool(np.any(s.even + s.odd <= l))


def edge_graph_of_space(s: EvenOddSpace) -> Structure:
    """Graph joining distinct points whose odd slot is 1."""
    xs, ys = np.nonzero(s.odd == 1)
    return make_graph(s.point_count, [(int(x), int(y)) for x, y in zip(xs, ys) if x != y])


def random_space(n: int, rng: np.random.Generator, max_entry: int = 10, density: float = 0.5) -> EvenOddSpace:
    """Walk closure of random partial distances with entries at most ``max_entry``.

    The result is always a valid even-odd space; entries can exceed
    ``max_entry`` only through ω.
    """
    evens = list(range(2, max_entry + 1, 2))
    odds = list(range(1, max_entry + 1, 2))
    even = np.full((n, n), OMEGA)
    odd = np.full((n, n), OMEGA)
    for u in range(n):
        even[u, u] = 0
        if odds and rng.random() < density / 2:
            odd[u, u] = rng.choice(odds)
        for v in range(u + 1, n):
            if evens and rng.random() < density:
                even[u, v] = even[v, u] = rng.choice(evens)
            if odds and rng.random() < density:
                odd[u, v] = odd[v, u] = rng.choice(odds)
    return walk_closure(even, odd)


def find_isometric_embedding(a: EvenOddSpace, b: EvenOddSpace) -> tuple[int, ...] | None:
    """Injective map from the points of ``a`` into ``b`` preserving every distance."""
    n, m = a.point_count, b.point_count
    if n > m:
        return None
    diag = (b.even.diagonal()[None, :] == a.even.diagonal()[:, None]) & (
        b.odd.diagonal()[None, :] == a.odd.diagonal()[:, None]
    )
    image: list[int] = []

    def rec(i, allowed):
        if i == n:
            return True
        for w in np.flatnonzero(allowed[i]):
            w = int(w)
            image.append(w)
            nxt = allowed.copy()
            nxt[:, w] = False
            # later points must sit at the prescribed distance from w
            nxt[i + 1 :] &= (b.even[w][None, :] == a.even[i + 1 :, i][:, None]) & (
                b.odd[w][None, :] == a.odd[i + 1 :, i][:, None]
            )
            if nxt[i + 1 :].any(axis=1).all() and rec(i + 1, nxt):
                return True
            image.pop()
        return False

    return tuple(image) if rec(0, diag) else None


def build_kl_prefix(spaces: Iterable[EvenOddSpace], l: int) -> EvenOddSpace:
    """Amalgamate a sequence of ``K_l`` spaces one after the other.

    Each new space is glued on one point to the most recently added point of
    the prefix with the same self-distance (over the empty space when there
    is none), so every argument embeds isometrically into the result.
    """
    u = None
    last = 0
    for s in spaces:
        if not in_class_Kl(s, l):
            raise EvenOddError("a part is not in K_l")
        if u is None:
            u, last = s, s.point_count - 1
            continue
        glue_a, glue_b = [], []
        if s.point_count:
            cands = [p for p in range(u.point_count - 1, -1, -1) if u.d(p, p) == s.d(0, 0)]
            if cands:
                glue_a, glue_b = [last if last in cands else cands[0]], [0]
        na = u.point_count
        u = evenodd_amalgam(u, s, glue_a, glue_b)
        last = u.point_count - 1 if u.point_count > na else last
    if u is None:
        return EvenOddSpace(np.zeros((0, 0)), np.zeros((0, 0)))
    if not in_class_Kl(u, l):
        raise EvenOddError("amalgam left K_l")
    return u


# ---------------------------------------------------------------------------
# Katětov nodes


EMPTY = None  # key of the self-distance in a node's value map

_INTERN: weakref.WeakValueDictionary = weakref.WeakValueDictionary()


class KatetovNode:
    """A one-point extension of the nodes in its domain.

    ``values`` maps every domain node, and ``EMPTY``, to an even-odd pair;
    ``values[EMPTY]`` is the self-distance.  Nodes are interned, so equal
    value maps give the same object.
    """

    __slots__ = ("values", "domain", "level", "_key", "_hash", "__weakref__")

    def __new__(cls, values: Mapping[KatetovNode | None, EvenOddPair]):
        vals = {k: (v if isinstance(v, EvenOddPair) else EvenOddPair(*v)) for k, v in values.items()}
        key = frozenset(vals.items())
        node = _INTERN.get(key)
        if node is not None:
            return node
        if EMPTY not in vals:
            raise EvenOddError("a node needs its self-distance under EMPTY")
        if vals[EMPTY].even != 0:
            raise EvenOddError("self-distance must have even slot 0")
        domain = frozenset(k for k in vals if k is not EMPTY)
        for g in domain:
            if not isinstance(g, KatetovNode):
                raise EvenOddError("domain entries must be nodes")
            if not g.domain <= domain:
                raise EvenOddError("domain is not downward closed")
        node = super().__new__(cls)
        node.values = vals
        node.domain = domain
        node.level = 1 + max((g.level for g in domain), default=-1)
        node._key = key
        node._hash = hash(key)
        _INTERN[key] = node
        return node

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, KatetovNode) and self._key == other._key)

    def __call__(self, g: KatetovNode | None) -> EvenOddPair:
        return self.values[g]

    def __repr__(self):
        return f"KatetovNode(level={self.level}, |D|={len(self.domain)}, self={self.values[EMPTY]!r})"


def katetov_distance(f: KatetovNode, g: KatetovNode) -> EvenOddPair:
    if f == g:
        return f(EMPTY)
    if f in g.domain:
        return g(f)
    if g in f.domain:
        return f(g)
    best = UNREACHABLE
    for h in f.domain & g.domain:
        best = pair_min(best, f(h) + g(h))
    return best


def katetov_space(nodes: Sequence[KatetovNode]) -> EvenOddSpace:
    return EvenOddSpace.from_pairs([[katetov_distance(f, g) for g in nodes] for f in nodes])


def katetov_extend(s: Sequence[KatetovNode], ext: Mapping[KatetovNode | None, EvenOddPair]) -> KatetovNode:
    """New node with domain ``s`` and values ``ext``.

    ``s`` must be downward closed and form an even-odd space under the node
    distance; ``ext`` must give a valid one-point extension of it, checked
    as every axiom of the space on ``s`` plus the new point.
    """
    s = list(s)
    if len(set(s)) != len(s):
        raise EvenOddError("repeated node in the domain")
    dom = set(s)
    for g in s:
        if not g.domain <= dom:
            raise EvenOddError("domain is not downward closed")
    if set(ext) != dom | {EMPTY}:
        raise EvenOddError("extension values must cover the domain and EMPTY")
    ext = {k: (v if isinstance(v, EvenOddPair) else EvenOddPair(*v)) for k, v in ext.items()}
    if ext[EMPTY].even != 0:
        raise EvenOddError("self-distance must have even slot 0")
    base = katetov_space(s)
    bad = validate_space(base)
    if bad:
        raise EvenOddError(f"domain is not an even-odd space: {bad[0]}")
    k = len(s)
    rows = [row + [ext[g]] for g, row in zip(s, base.pairs())]
    rows.append([ext[g] for g in s] + [ext[EMPTY]])
    bad = [v for v in validate_space(EvenOddSpace.from_pairs(rows)) if k in v.points]
    if bad:
        v = bad[0]
        others = [p for p in v.points if p != k] or [k]
        raise EvenOddError(f"extension breaks the {v.axiom} axiom at points {v.points} (new point is {k}); offending pair involves domain node {others[0]}")
    return KatetovNode(ext)


def katetov_embed(space: EvenOddSpace) -> list[KatetovNode]:
    """Embed a valid space point by point; node ``k`` has domain the nodes ``0..k-1``."""
    nodes: list[KatetovNode] = []
    for k in range(space.point_count):
        ext = {nodes[j]: space.d(k, j) for j in range(k)}
        ext[EMPTY] = space.d(k, k)
        nodes.append(katetov_extend(nodes, ext))
    return nodes


def _pair_values(bound: int) -> tuple[list[EvenOddPair], list[EvenOddPair]]:
    evens = list(range(2, bound + 1, 2)) + [OMEGA]
    odds = list(range(1, bound + 1, 2)) + [OMEGA]
    selfs = [EvenOddPair(0, b) for b in odds]
    return selfs, [EvenOddPair(a, b) for a in evens for b in odds]


def _down_closed(nodes: Sequence[KatetovNode], max_size: int) -> Iterator[tuple[KatetovNode, ...]]:
    for k in range(max_size + 1):
        for sub in combinations(nodes, k):
            dom = set(sub)
            if all(g.domain <= dom for g in sub):
                yield sub


def katetov_universe(bound: int, levels: int, max_domain: int = 2, max_nodes: int | None = None) -> list[KatetovNode]:
    """All nodes up to ``levels`` with entries at most ``bound`` or ω and domains of size at most ``max_domain``.

    Built level by level; a level-``k`` node has a node of level ``k-1`` in
    its domain.  Stops early once ``max_nodes`` nodes exist.
    """
    selfs, pairs = _pair_values(bound)
    out = [KatetovNode({EMPTY: p}) for p in selfs]
    frontier = set(out)
    for _ in range(levels):
        new = []
        for sub in _down_closed(out, max_domain):
            if not frontier & set(sub):
                continue
            for sv in selfs:
                for vals in product(pairs, repeat=len(sub)):
                    ext = dict(zip(sub, vals))
                    ext[EMPTY] = sv
                    try:
                        node = katetov_extend(sub, ext)
                    except EvenOddError:
                        continue
                    new.append(node)
                    if max_nodes is not None and len(out) + len(new) >= max_nodes:
                        return out + new
        out += new
        frontier = set(new)
    return out
