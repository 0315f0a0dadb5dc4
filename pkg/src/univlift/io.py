"""Text and JSON formats for structures, lifts, pieces, even-odd spaces and Katětov nodes.

Structure files::

    sig edge/2 sym
    structure C5 { n 5; edge (0 1) (1 2) (2 3) (3 4) (4 0) }

With ``sym`` every binary relation of the signature is symmetrised on input
and written one orientation per pair.  Inside a block, ``ext P1 (0 1)``
adds a tuple to the first lifted relation, ``roots (0 2)`` marks the roots
of a piece and ``rooted P2 (0 1)`` marks a rooted forbidden lift.  ``#``
starts a comment.

Space files are grids of ``even,odd`` cells with ``w`` for ω::

    space C3 3
    0,3 2,1 2,1
    2,1 0,3 2,1
    2,1 2,1 0,3

Every text document has a JSON mirror with the same content; readers accept
either.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decompose import PieceCatalogue
from .evenodd import OMEGA, EvenOddPair, EvenOddSpace, KatetovNode, EMPTY
from .liftclass import Lift, RootedLift
from .relcore import Signature, Structure


class FormatError(ValueError):
    pass


@dataclass
class Block:
    """One ``structure`` block; ``ext`` is keyed by 0-based catalogue index."""

    name: str
    structure: Structure
    ext: dict[int, list[tuple[int, ...]]] = field(default_factory=dict)
    roots: tuple[int, ...] | None = None
    rooted: tuple[int, tuple[int, ...]] | None = None
    comments: list[str] = field(default_factory=list)


@dataclass
class Document:
    signature: Signature
    symmetric: bool
    blocks: list[Block]


# ---------------------------------------------------------------------------
# structure text


_TUPLE = re.compile(r"\(([^()]*)\)")
_BLOCK = re.compile(r"structure\s+(\S+)\s*\{(.*?)\}", re.S)


def _strip_comments(text: str) -> tuple[str, list[str]]:
    lines, comments = [], []
    for line in text.splitlines():
        body, sep, rest = line.partition("#")
        lines.append(body)
        if sep:
            comments.append(rest.strip())
    return "\n".join(lines), comments


def _parse_tuples(text: str, where: str) -> list[tuple[int, ...]]:
    rest = _TUPLE.sub(" ", text).strip()
    if rest:
        raise FormatError(f"{where}: unexpected text {rest!r}")
    try:
        return [tuple(int(v) for v in m.split()) for m in _TUPLE.findall(text)]
    except ValueError:
        raise FormatError(f"{where}: tuple entries must be integers") from None


def _parse_lifted_name(tok: str, where: str) -> int:
    m = re.fullmatch(r"P(\d+)", tok)
    if not m or int(m.group(1)) < 1:
        raise FormatError(f"{where}: lifted relations are named P1, P2, ...")
    return int(m.group(1)) - 1


def parse_signature(line: str) -> tuple[Signature, bool]:
    toks = line.split()
    if not toks or toks[0] != "sig":
        raise FormatError("the first line must be a 'sig' line")
    sym = False
    rels = []
    for tok in toks[1:]:
        if tok == "sym":
            sym = True
            continue
        name, slash, arity = tok.partition("/")
        if not slash or not arity.isdigit():
            raise FormatError(f"bad relation declaration {tok!r} (expected name/arity)")
        rels.append((name, int(arity)))
    try:
        return Signature(tuple(rels)), sym
    except ValueError as e:
        raise FormatError(str(e)) from None


def parse_document(text: str) -> Document:
    if text.lstrip().startswith("{"):
        return document_from_json(json.loads(text))
    body, _ = _strip_comments(text)
    lines = [ln for ln in body.splitlines() if ln.strip()]
    if not lines:
        raise FormatError("empty document")
    sig, sym = parse_signature(lines[0])
    rest = "\n".join(lines[1:])
    blocks = []
    pos = 0
    comment_lines = _block_comments(text)
    for m in _BLOCK.finditer(rest):
        gap = rest[pos : m.start()].strip()
        if gap:
            raise FormatError(f"unexpected text {gap[:40]!r}")
        pos = m.end()
        blocks.append(_parse_block(sig, sym, m.group(1), m.group(2)))
    if rest[pos:].strip():
        raise FormatError(f"unexpected text {rest[pos:].strip()[:40]!r}")
    for b, cs in zip(blocks, comment_lines):
        b.comments = cs
    return Document(sig, sym, blocks)


def _block_comments(text: str) -> list[list[str]]:
    # comments preceding each block, in order
    out, pending = [], []
    for line in text.splitlines():
        s = line.strip()
        if s.startswith("#"):
            pending.append(s[1:].strip())
        elif s.startswith("structure"):
            out.append(pending)
            pending = []
    return out


def _parse_block(sig: Signature, sym: bool, name: str, body: str) -> Block:
    where = f"structure {name}"
    n = None
    rels: list[set] = [set() for _ in sig.relations]
    ext: dict[int, list] = {}
    roots = rooted = None
    for stmt in body.split(";"):
        toks = stmt.split(None, 1)
        if not toks:
            continue
        head = toks[0]
        arg = toks[1] if len(toks) > 1 else ""
        if head == "n":
            if not arg.strip().isdigit():
                raise FormatError(f"{where}: 'n' needs a vertex count")
            n = int(arg)
        elif head == "ext":
            rel, _, ts = arg.partition(" ")
            ext.setdefault(_parse_lifted_name(rel, where), []).extend(_parse_tuples(ts, where))
        elif head == "roots":
            tup = _parse_tuples(arg, where)
            if len(tup) != 1:
                raise FormatError(f"{where}: 'roots' takes one tuple")
            roots = tup[0]
        elif head == "rooted":
            rel, _, ts = arg.partition(" ")
            tup = _parse_tuples(ts, where)
            if len(tup) != 1:
                raise FormatError(f"{where}: 'rooted' takes one tuple")
            rooted = (_parse_lifted_name(rel, where), tup[0])
        elif head in sig.names:
            ri = sig.index(head)
            ts = _parse_tuples(arg, where)
            rels[ri].update(ts)
            if sym and sig.arities[ri] == 2:
                rels[ri].update((b, a) for a, b in ts)
        else:
            raise FormatError(f"{where}: unknown statement {head!r}")
    if n is None:
        raise FormatError(f"{where}: missing 'n'")
    try:
        st = Structure(sig, n, rels)
    except ValueError as e:
        raise FormatError(f"{where}: {e}") from None
    for i, ts in ext.items():
        for t in ts:
            if any(not 0 <= v < n for v in t):
                raise FormatError(f"{where}: ext tuple {t} outside 0..{n - 1}")
    return Block(name, st, ext, roots, rooted)


def _fmt_tuples(ts) -> str:
    return " ".join("(" + " ".join(map(str, t)) + ")" for t in sorted(ts))


def _base_lines(st: Structure, sym: bool) -> list[str]:
    out = []
    for (name, arity), ts in zip(st.signature.relations, st.relations):
        if sym and arity == 2:
            ts = [t for t in ts if t[0] <= t[1]]
        if ts:
            out.append(f"{name} {_fmt_tuples(ts)}")
    return out


def format_block(b: Block, sym: bool) -> str:
    stmts = [f"n {b.structure.n}"] + _base_lines(b.structure, sym)
    for i in sorted(b.ext):
        if b.ext[i]:
            stmts.append(f"ext P{i + 1} {_fmt_tuples(b.ext[i])}")
    if b.roots is not None:
        stmts.append(f"roots {_fmt_tuples([b.roots])}")
    if b.rooted is not None:
        stmts.append(f"rooted P{b.rooted[0] + 1} {_fmt_tuples([b.rooted[1]])}")
    head = "".join(f"# {c}\n" for c in b.comments)
    return f"{head}structure {b.name} {{ " + "; ".join(stmts) + " }"


def format_document(doc: Document) -> str:
    decl = " ".join(f"{name}/{arity}" for name, arity in doc.signature.relations)
    lines = [f"sig {decl}" + (" sym" if doc.symmetric else "")]
    lines += [format_block(b, doc.symmetric) for b in doc.blocks]
    return "\n".join(lines) + "\n"


def _writable_sym(structs: Sequence[Structure]) -> bool:
    return bool(structs) and all(
        all(arity == 2 for arity in s.signature.arities) and s.is_symmetric() for s in structs
    )


def structures_document(
    structs: Sequence[Structure], names: Sequence[str] | None = None, signature: Signature | None = None
) -> Document:
    if signature is None:
        if not structs:
            raise FormatError("a signature is needed for an empty document")
        signature = structs[0].signature
    names = list(names) if names is not None else [f"S{i}" for i in range(len(structs))]
    return Document(signature, _writable_sym(structs), [Block(nm, s) for nm, s in zip(names, structs)])


def read_structures(text: str) -> list[Structure]:
    return [b.structure for b in parse_document(text).blocks]


def write_structures(structs: Sequence[Structure], names: Sequence[str] | None = None) -> str:
    return format_document(structures_document(structs, names))


# ---------------------------------------------------------------------------
# lifts


def lift_block(x: Lift, name: str) -> Block:
    return Block(name, x.shadow, {i: sorted(ts) for i, ts in enumerate(x.extended) if ts})


def block_to_lift(b: Block, cat: PieceCatalogue) -> Lift:
    if b.structure.signature != cat.signature:
        raise FormatError(f"structure {b.name}: signature differs from the family")
    for i, ts in b.ext.items():
        if i >= len(cat):
            raise FormatError(f"structure {b.name}: P{i + 1} is not in the catalogue (it has {len(cat)} pieces)")
        arity = cat.pieces[i].arity
        if any(len(t) != arity for t in ts):
            raise FormatError(f"structure {b.name}: P{i + 1} has arity {arity}")
    return Lift.build(cat, b.structure, b.ext)


def lifts_document(lifts: Sequence[Lift | RootedLift], names: Sequence[str] | None = None) -> Document:
    if not lifts:
        raise FormatError("no lifts to write")
    names = list(names) if names is not None else [f"X{i}" for i in range(len(lifts))]
    blocks = []
    for nm, m in zip(names, lifts):
        if isinstance(m, RootedLift):
            b = lift_block(m.lift, nm)
            b.rooted = (m.root_index, m.roots)
        else:
            b = lift_block(m, nm)
        blocks.append(b)
    shadows = [b.structure for b in blocks]
    return Document(shadows[0].signature, _writable_sym(shadows), blocks)


def read_lifts(text: str, cat: PieceCatalogue) -> list[Lift | RootedLift]:
    out = []
    for b in parse_document(text).blocks:
        x = block_to_lift(b, cat)
        out.append(RootedLift(x, b.rooted[1], b.rooted[0]) if b.rooted else x)
    return out


def write_lifts(lifts: Sequence[Lift | RootedLift], names: Sequence[str] | None = None) -> str:
    return format_document(lifts_document(lifts, names))


# ---------------------------------------------------------------------------
# JSON mirror


def document_to_json(doc: Document) -> dict:
    out = []
    for b in doc.blocks:
        d = {
            "name": b.name,
            "n": b.structure.n,
            "relations": {
                name: [list(t) for t in sorted(ts)] for name, ts in zip(b.structure.signature.names, b.structure.relations)
            },
        }
        if b.ext:
            d["ext"] = {f"P{i + 1}": [list(t) for t in sorted(ts)] for i, ts in sorted(b.ext.items())}
        if b.roots is not None:
            d["roots"] = list(b.roots)
        if b.rooted is not None:
            d["rooted"] = {"relation": f"P{b.rooted[0] + 1}", "roots": list(b.rooted[1])}
        if b.comments:
            d["comments"] = list(b.comments)
        out.append(d)
    return {"signature": [[n, a] for n, a in doc.signature.relations], "symmetric": doc.symmetric, "structures": out}


def document_from_json(data: dict) -> Document:
    try:
        sig = Signature(tuple((str(n), int(a)) for n, a in data["signature"]))
        blocks = []
        for d in data["structures"]:
            st = Structure(sig, int(d["n"]), {k: [tuple(t) for t in v] for k, v in d["relations"].items()})
            ext = {_parse_lifted_name(k, "json"): [tuple(t) for t in v] for k, v in d.get("ext", {}).items()}
            roots = tuple(d["roots"]) if "roots" in d else None
            rooted = None
            if "rooted" in d:
                rooted = (_parse_lifted_name(d["rooted"]["relation"], "json"), tuple(d["rooted"]["roots"]))
            blocks.append(Block(str(d["name"]), st, ext, roots, rooted, list(d.get("comments", []))))
        return Document(sig, bool(data.get("symmetric", False)), blocks)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad JSON structure document: {e}") from None


# ---------------------------------------------------------------------------
# even-odd spaces


def _cell(p: EvenOddPair) -> str:
    return repr(p)[1:-1]


def _parse_cell(tok: str) -> EvenOddPair:
    a, sep, b = tok.partition(",")
    if not sep:
        raise FormatError(f"bad cell {tok!r} (expected even,odd)")
    try:
        vals = [OMEGA if v == "w" else int(v) for v in (a, b)]
        return EvenOddPair(*vals)
    except ValueError as e:
        raise FormatError(f"bad cell {tok!r}: {e}") from None


def format_space(s: EvenOddSpace, name: str = "S") -> str:
    rows = [" ".join(_cell(p) for p in row) for row in s.pairs()]
    return "\n".join([f"space {name} {s.point_count}"] + rows) + "\n"


def format_spaces(spaces: Sequence[EvenOddSpace], names: Sequence[str] | None = None) -> str:
    names = list(names) if names is not None else [f"S{i}" for i in range(len(spaces))]
    return "".join(format_space(s, nm) for s, nm in zip(spaces, names))


def parse_spaces(text: str) -> list[tuple[str, EvenOddSpace]]:
    if text.lstrip().startswith("{"):
        return spaces_from_json(json.loads(text))
    body, _ = _strip_comments(text)
    lines = [ln.split() for ln in body.splitlines() if ln.strip()]
    out = []
    i = 0
    while i < len(lines):
        head = lines[i]
        if head[0] != "space" or len(head) != 3 or not head[2].isdigit():
            raise FormatError(f"expected 'space NAME N', got {' '.join(head)!r}")
        n = int(head[2])
        rows = lines[i + 1 : i + 1 + n]
        if len(rows) != n or any(len(r) != n for r in rows):
            raise FormatError(f"space {head[1]}: expected {n} rows of {n} cells")
        out.append((head[1], EvenOddSpace.from_pairs([[_parse_cell(c) for c in r] for r in rows])))
        i += 1 + n
    return out


def _json_slot(v) -> int | str:
    return "w" if v == OMEGA else int(v)


def spaces_to_json(spaces: Sequence[EvenOddSpace], names: Sequence[str] | None = None) -> dict:
    names = list(names) if names is not None else [f"S{i}" for i in range(len(spaces))]
    return {
        "spaces": [
            {
                "name": nm,
                "n": s.point_count,
                "even": [[_json_slot(v) for v in row] for row in s.even],
                "odd": [[_json_slot(v) for v in row] for row in s.odd],
            }
            for s, nm in zip(spaces, names)
        ]
    }


def spaces_from_json(data: dict) -> list[tuple[str, EvenOddSpace]]:
    try:
        out = []
        for d in data["spaces"]:
            conv = lambda m: np.array([[OMEGA if v == "w" else v for v in row] for row in m], dtype=float)  # noqa: E731
            even = conv(d["even"]).reshape(int(d["n"]), int(d["n"]))
            odd = conv(d["odd"]).reshape(int(d["n"]), int(d["n"]))
            out.append((str(d["name"]), EvenOddSpace(even, odd)))
        return out
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"bad JSON space document: {e}") from None


# ---------------------------------------------------------------------------
# Katětov nodes (output only)


def format_nodes(nodes: Sequence[KatetovNode]) -> str:
    """One line per node: its self-distance, then ``j:a,b`` for each domain node ``j``."""
    index = {g: i for i, g in enumerate(nodes)}
    lines = []
    for i, f in enumerate(nodes):
        missing = [g for g in f.domain if g not in index]
        if missing:
            raise FormatError("node domains must be listed before the node")
        vals = " ".join(f"{index[g]}:{_cell(f(g))}" for g in sorted(f.domain, key=index.__getitem__))
        lines.append(f"node {i} self {_cell(f(EMPTY))}" + (f" | {vals}" if vals else ""))
    return "\n".join(lines) + "\n"


def nodes_to_json(nodes: Sequence[KatetovNode]) -> dict:
    index = {g: i for i, g in enumerate(nodes)}
    return {
        "nodes": [
            {
                "index": i,
                "self": _cell(f(EMPTY)),
                "values": {str(index[g]): _cell(f(g)) for g in sorted(f.domain, key=index.__getitem__)},
            }
            for i, f in enumerate(nodes)
        ]
    }
