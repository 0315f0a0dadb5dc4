"""Command-line front end: ``univlift VERB [options] FILES``.

Exit status is 0 on success, 1 when a domain precondition fails or a check
finds a counterexample, and 2 when an input cannot be parsed.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import io
from .amalgam import AmalgamProblem, extension_property_check, generic_build, lift_amalgam, universality_check
from .decompose import build_catalogue, minimal_cuts, minimal_homomorphic_images, pieces_of
from .duality import csp_membership, dual_candidate, find_duality_counterexample
from .evenodd import (
    edge_graph_of_space,
    evenodd_amalgam,
    graph_to_evenodd,
    katetov_embed,
    validate_space,
)
from .liftclass import Lift, canonical_lift, forbidden_family, member_of_L, universal_witness


class _Out:
    """Collects text and the JSON mirror of one run."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.text: list[str] = []
        self.data: dict = {}

    def emit(self, text: str, data: dict):
        self.text.append(text if text.endswith("\n") else text + "\n")
        self.data.update(data)

    def flush(self, stream):
        if self.as_json:
            stream.write(json.dumps(self.data, indent=1, sort_keys=True) + "\n")
        else:
            stream.write("".join(self.text))


_stdin_cache: list[str] = []


def _read(path: str) -> str:
    if path == "-":
        # several readers may share stdin within one run
        if not _stdin_cache:
            _stdin_cache.append(sys.stdin.read())
        return _stdin_cache[0]
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _doc(path: str) -> io.Document:
    return io.parse_document(_read(path))


def _family(path: str):
    fam = [b.structure for b in _doc(path).blocks]
    if not fam:
        raise ValueError(f"{path}: the family file has no structures")
    return fam


def _lifts(path: str, cat) -> list[Lift]:
    out = []
    for m in io.read_lifts(_read(path), cat):
        if not isinstance(m, Lift):
            raise ValueError(f"{path}: expected plain lifts")
        out.append(m)
    return out


def _ints(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit_doc(out: _Out, doc: io.Document):
    out.emit(io.format_document(doc), io.document_to_json(doc))


def _emit_lifts(out: _Out, lifts, names):
    _emit_doc(out, io.lifts_document(lifts, names))


# ---------------------------------------------------------------------------
# verbs


def cmd_pieces(a, out):
    doc = _doc(a.file)
    blocks = []
    for b in doc.blocks:
        for i, p in enumerate(pieces_of(b.structure)):
            blocks.append(io.Block(f"{b.name}_piece{i}", p.structure, roots=p.roots))
    _emit_doc(out, io.Document(doc.signature, doc.symmetric, blocks))


def cmd_cuts(a, out):
    doc = _doc(a.file)
    lines, data = [], []
    for b in doc.blocks:
        cuts = minimal_cuts(b.structure)
        lines += [f"cut {b.name} ({' '.join(map(str, c))})" for c in cuts]
        data.append({"name": b.name, "cuts": [list(c) for c in cuts]})
    out.emit("\n".join(lines), {"cuts": data})


def cmd_min_images(a, out):
    doc = _doc(a.file)
    blocks = []
    for b in doc.blocks:
        for i, q in enumerate(minimal_homomorphic_images(b.structure, loopless=a.loopless)):
            blocks.append(io.Block(f"{b.name}_image{i}", q))
    _emit_doc(out, io.Document(doc.signature, doc.symmetric, blocks))


def cmd_lift(a, out):
    cat = build_catalogue(_family(a.family))
    doc = _doc(a.file)
    _emit_lifts(out, [canonical_lift(b.structure, cat) for b in doc.blocks], [b.name for b in doc.blocks])


def cmd_witness(a, out):
    cat = build_catalogue(_family(a.family))
    lifts = _lifts(a.file, cat)
    names = [b.name for b in _doc(a.file).blocks]
    ws = [universal_witness(x) for x in lifts]
    _emit_doc(out, io.structures_document(ws, [f"UW_{n}" for n in names], cat.signature))


def cmd_member(a, out):
    fam = _family(a.family)
    cat = build_catalogue(fam)
    names = [b.name for b in _doc(a.file).blocks]
    answers = [member_of_L(x, fam) for x in _lifts(a.file, cat)]
    text = "\n".join("yes" if ok else "no" for ok in answers) if len(answers) == 1 else "\n".join(
        f"{n} {'yes' if ok else 'no'}" for n, ok in zip(names, answers)
    )
    out.emit(text, {"member": [{"name": n, "member": ok} for n, ok in zip(names, answers)]})


def cmd_forbidden(a, out):
    fp = forbidden_family(_family(a.family_file), jobs=a.jobs)
    members = fp.members
    names = [f"F{i}" for i in range(len(members))]
    if not members:
        out.emit(f"# empty forbidden family over {len(fp.catalogue)} lifted relations", {"structures": []})
        return
    _emit_lifts(out, members, names)


def cmd_amalgam(a, out):
    fam = _family(a.family)
    cat = build_catalogue(fam)
    parts = []
    for path in (a.x, a.y, a.z):
        lifts = _lifts(path, cat)
        if len(lifts) != 1:
            raise ValueError(f"{path}: expected exactly one lift")
        parts.append(lifts[0])
    x, y, z = parts
    res = lift_amalgam(AmalgamProblem(x, y, z, a.zx, a.zy), fam)
    _emit_lifts(out, [res], ["amalgam"])


def cmd_generic(a, out):
    u = generic_build(_family(a.family), a.rounds, a.cap, max_vertices=a.max_vertices)
    _emit_lifts(out, [u], [f"prefix_r{a.rounds}_c{a.cap}"])


def _prefix(a):
    fam = _family(a.family)
    cat = build_catalogue(fam)
    lifts = _lifts(a.prefix, cat)
    if len(lifts) != 1:
        raise ValueError("the prefix file must hold exactly one lift")
    return fam, lifts[0]


def cmd_check_extension(a, out):
    fam, u = _prefix(a)
    fails = extension_property_check(u, fam, a.k)
    if not fails:
        out.emit(f"extension property holds for |S| < {a.k}", {"holds": True, "k": a.k, "failures": []})
        return 0
    lines = [f"missing extension over ({' '.join(map(str, s))})" for s, _ in fails]
    out.emit("\n".join(lines), {"holds": False, "k": a.k, "failures": [list(s) for s, _ in fails]})
    return 1


def cmd_check_universal(a, out):
    fam, u = _prefix(a)
    ok = universality_check(u, fam, a.n)
    out.emit(
        f"universal up to n={a.n}" if ok else f"not universal up to n={a.n}",
        {"universal": ok, "n": a.n},
    )
    return 0 if ok else 1


def _label_text(labels) -> str:
    return "{" + ",".join(f"P{i + 1}" for i in sorted(labels)) + "}"


def cmd_dual(a, out):
    dc = dual_candidate(_family(a.family_file))
    b = io.Block("dual", dc.structure, comments=[f"vertex {v}: {_label_text(ls)}" for v, ls in enumerate(dc.vertex_labels)])
    _emit_doc(out, io.Document(dc.structure.signature, io._writable_sym([dc.structure]), [b]))


def cmd_verify_dual(a, out):
    fam = _family(a.family_file)
    ds = [b.structure for b in _doc(a.dual).blocks]
    if len(ds) != 1:
        raise ValueError("the dual file must hold exactly one structure")
    ce = find_duality_counterexample(fam, ds[0], a.max_n, jobs=a.jobs)
    if ce is None:
        out.emit(f"verified up to n={a.max_n}", {"verified": True, "max_n": a.max_n})
        return 0
    doc = io.structures_document([ce], ["counterexample"])
    out.emit("counterexample\n" + io.format_document(doc), {"verified": False, "max_n": a.max_n, **io.document_to_json(doc)})
    return 1


def cmd_csp(a, out):
    doc = _doc(a.instance)
    ts = [b.structure for b in _doc(a.template).blocks]
    if len(ts) != 1:
        raise ValueError("the template file must hold exactly one structure")
    answers = [csp_membership(b.structure, ts[0]) for b in doc.blocks]
    text = "\n".join(f"{b.name} {'yes' if ok else 'no'}" for b, ok in zip(doc.blocks, answers))
    if len(answers) == 1:
        text = "yes" if answers[0] else "no"
    out.emit(text, {"csp": [{"name": b.name, "member": ok} for b, ok in zip(doc.blocks, answers)]})


def _emit_spaces(out, spaces, names):
    out.emit(io.format_spaces(spaces, names), io.spaces_to_json(spaces, names))


def _spaces(path):
    return io.parse_spaces(_read(path))


def cmd_eo_dist(a, out):
    doc = _doc(a.file)
    _emit_spaces(out, [graph_to_evenodd(b.structure) for b in doc.blocks], [b.name for b in doc.blocks])


def cmd_eo_validate(a, out):
    status = 0
    lines, data = [], []
    for name, s in _spaces(a.file):
        bad = validate_space(s)
        if bad:
            status = 1
            lines += [f"{name} {v.axiom} ({' '.join(map(str, v.points))})" for v in bad]
        else:
            lines.append(f"{name} valid")
        data.append({"name": name, "valid": not bad, "violations": [[v.axiom, list(v.points)] for v in bad]})
    out.emit("\n".join(lines), {"spaces": data})
    return status


def _one_space(path):
    sp = _spaces(path)
    if len(sp) != 1:
        raise ValueError(f"{path}: expected exactly one space")
    return sp[0][1]


def cmd_eo_amalgam(a, out):
    res = evenodd_amalgam(_one_space(a.a), _one_space(a.b), a.glue_a, a.glue_b)
    _emit_spaces(out, [res], ["amalgam"])


def cmd_eo_embed(a, out):
    nodes = katetov_embed(_one_space(a.file))
    out.emit(io.format_nodes(nodes), io.nodes_to_json(nodes))


def cmd_eo_edges(a, out):
    sp = _spaces(a.file)
    gs = [edge_graph_of_space(s) for _, s in sp]
    if not gs:
        raise ValueError("no spaces in the input")
    _emit_doc(out, io.structures_document(gs, [n for n, _ in sp]))


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON mirror of the output")
    common.add_argument("--seed", type=int, default=0, help="seed for randomised verbs (default 0)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for forbidden and verify-dual")

    p = argparse.ArgumentParser(prog="univlift", description="Lifts, universal structures, duals and even-odd spaces.")
    sub = p.add_subparsers(dest="verb", required=True, metavar="VERB")

    def verb(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    verb("pieces", cmd_pieces, "pieces of each structure").add_argument("file")
    verb("cuts", cmd_cuts, "minimal cuts of each structure").add_argument("file")
    sp = verb("min-images", cmd_min_images, "minimal homomorphic images")
    sp.add_argument("file")
    sp.add_argument("--loopless", action="store_true", help="drop images with repeated entries in a tuple")
    for name, fn, help_ in (
        ("lift", cmd_lift, "canonical lift of each structure"),
        ("witness", cmd_witness, "universal witness of each lift"),
        ("member", cmd_member, "membership of each lift in the lifted class"),
    ):
        sp = verb(name, fn, help_)
        sp.add_argument("file")
        sp.add_argument("--family", required=True)
    verb("forbidden", cmd_forbidden, "forbidden lifts for a family").add_argument("family_file")
    sp = verb("amalgam", cmd_amalgam, "amalgamate two lifts over a common sublift")
    sp.add_argument("x")
    sp.add_argument("y")
    sp.add_argument("z")
    sp.add_argument("--family", required=True)
    sp.add_argument("--zx", type=_ints, required=True, help="images of z in x, comma separated")
    sp.add_argument("--zy", type=_ints, required=True, help="images of z in y, comma separated")
    sp = verb("generic", cmd_generic, "finite prefix of the generic lift")
    sp.add_argument("--family", required=True)
    sp.add_argument("--rounds", type=int, default=2)
    sp.add_argument("--cap", type=int, default=2)
    sp.add_argument("--max-vertices", type=int, default=None)
    sp = verb("check-extension", cmd_check_extension, "extension property of a prefix")
    sp.add_argument("prefix")
    sp.add_argument("--family", required=True)
    sp.add_argument("--k", type=int, default=1)
    sp = verb("check-universal", cmd_check_universal, "small structures embed into a prefix")
    sp.add_argument("prefix")
    sp.add_argument("--family", required=True)
    sp.add_argument("--n", type=int, default=3)
    verb("dual", cmd_dual, "dual template of a family of trees").add_argument("family_file")
    sp = verb("verify-dual", cmd_verify_dual, "check a dual pair on small structures")
    sp.add_argument("family_file")
    sp.add_argument("dual")
    sp.add_argument("--max-n", type=int, default=4)
    sp = verb("csp", cmd_csp, "homomorphism into a template")
    sp.add_argument("instance")
    sp.add_argument("template")
    verb("eo-dist", cmd_eo_dist, "even-odd distances of a graph").add_argument("file")
    verb("eo-validate", cmd_eo_validate, "check the even-odd axioms").add_argument("file")
    sp = verb("eo-amalgam", cmd_eo_amalgam, "amalgamate two even-odd spaces")
    sp.add_argument("a")
    sp.add_argument("b")
    sp.add_argument("--glue-a", type=_ints, required=True)
    sp.add_argument("--glue-b", type=_ints, required=True)
    verb("eo-embed", cmd_eo_embed, "embed a space into the Katětov space").add_argument("file")
    verb("eo-edges", cmd_eo_edges, "graph of odd-distance-1 pairs").add_argument("file")
    return p


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    out = _Out(args.json)
    _stdin_cache.clear()
    try:
        status = args.fn(args, out) or 0
    except (io.FormatError, json.JSONDecodeError) as e:
        stderr.write(f"univlift: parse error: {e}\n")
        return 2
    except OSError as e:
        stderr.write(f"univlift: cannot read input: {e}\n")
        return 2
    except ValueError as e:
        stderr.write(f"univlift: {type(e).__name__}: {e}\n")
        return 1
    out.flush(stdout)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
