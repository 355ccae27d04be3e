"""JSON documents for digraphs and bitrades, and DOT export."""

from __future__ import annotations

import json

from .digraph import Arc, MultiDigraph
from .latin import LatinBitrade, PartialLatinSquare, validate_bitrade
from .surface import ArcEnd, EmbeddedDigraph


class DocumentError(ValueError):
    pass


def _render(x, depth: int) -> str:
    """Indented JSON that keeps lists of scalars and small objects on one line."""
    pad, inner = "  " * depth, "  " * (depth + 1)
    if isinstance(x, dict):
        if not x:
            return "{}"
        if all(not isinstance(v, (dict, list)) for v in x.values()) and len(x) <= 3:
            return json.dumps(x)
        items = [f"{inner}{json.dumps(str(k))}: {_render(v, depth + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(x, list):
        if all(not isinstance(v, (dict, list)) for v in x):
            return json.dumps(x)
        items = [f"{inner}{_render(v, depth + 1)}" for v in x]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(x)


def dumps(doc: dict) -> str:
    return _render(doc, 0) + "\n"


def loads(text: str) -> dict:
    if not text.strip():
        raise DocumentError("empty document")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    return doc


def read_document(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return loads(fh.read())
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc.strerror}") from None


# --- digraphs -------------------------------------------------------------

def digraph_document(G, metadata: dict | None = None) -> dict:
    """G is a MultiDigraph or an EmbeddedDigraph."""
    E = G if isinstance(G, EmbeddedDigraph) else None
    D = E.digraph if E else G
    doc = {
        "vertices": list(D.vertices),
        "arcs": [{"id": a.id, "tail": a.tail, "head": a.head} for a in D.arcs],
    }
    if E is not None:
        doc["rotation"] = {str(v): [{"arc": e.arc, "dir": e.dir} for e in E.rotation[v]]
                           for v in D.vertices}
    if metadata:
        doc["metadata"] = metadata
    return doc


def _scalar(x, what):
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise DocumentError(f"{what} must be a string or an integer, got {x!r}")
    return x


def parse_digraph_document(doc: dict) -> tuple[MultiDigraph, EmbeddedDigraph | None]:
    try:
        verts = [_scalar(v, "vertex label") for v in doc["vertices"]]
        arcs = [Arc(_scalar(a["id"], "arc id"), a["tail"], a["head"]) for a in doc["arcs"]]
    except (KeyError, TypeError) as exc:
        raise DocumentError(f"digraph document needs vertices and arcs with id/tail/head ({exc})") from None
    if not verts:
        raise DocumentError("digraph has no vertices")
    try:
        D = MultiDigraph(tuple(verts), tuple(arcs))
    except ValueError as exc:
        raise DocumentError(str(exc)) from None
    rot = doc.get("rotation")
    if rot is None:
        return D, None
    by_name = {str(v): v for v in verts}
    if len(by_name) != len(verts):
        raise DocumentError("vertex labels collide as strings")
    try:
        rotation = {}
        for name, ends in rot.items():
            if name not in by_name:
                raise DocumentError(f"rotation for unknown vertex {name!r}")
            rotation[by_name[name]] = tuple(ArcEnd(e["arc"], e["dir"]) for e in ends)
    except (KeyError, TypeError, AttributeError) as exc:
        raise DocumentError(f"rotation entries need arc and dir ({exc})") from None
    try:
        return D, EmbeddedDigraph(D, rotation)
    except ValueError as exc:
        raise DocumentError(f"malformed rotation: {exc}") from None


# --- bitrades -------------------------------------------------------------

def bitrade_document(bt: LatinBitrade, metadata: dict | None = None) -> dict:
    doc = {
        "W": [[str(x) for x in t] for t in bt.W.sorted()],
        "B": [[str(x) for x in t] for t in bt.B.sorted()],
    }
    if metadata:
        doc["metadata"] = metadata
    return doc


def _triples(rows, side):
    out = []
    if not isinstance(rows, list):
        raise DocumentError(f"{side} must be a list of [row, col, sym] triples")
    for t in rows:
        if not isinstance(t, list) or len(t) != 3:
            raise DocumentError(f"{side} entry {t!r} is not a [row, col, sym] triple")
        out.append(tuple(str(_scalar(x, "label")) for x in t))
    return out


def parse_bitrade_document(doc: dict) -> LatinBitrade:
    if "W" not in doc or "B" not in doc:
        raise DocumentError("bitrade document needs W and B")
    W, B = _triples(doc["W"], "W"), _triples(doc["B"], "B")
    check = validate_bitrade(W, B)
    if not check:
        raise DocumentError("invalid bitrade: " + "; ".join(check.problems[:5]))
    return LatinBitrade.of(W, B)


def parse_partial_latin_square(rows) -> PartialLatinSquare:
    return PartialLatinSquare.of(_triples(rows, "square"))


# --- DOT ------------------------------------------------------------------

def _quote(x) -> str:
    return '"' + str(x).replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(G, name: str = "D") -> str:
    """One DOT edge per arc; each vertex's rotation is a comment listing arc
    ids with + for an out end and - for an in end, counterclockwise."""
    E = G if isinstance(G, EmbeddedDigraph) else None
    D = E.digraph if E else G
    if not D.vertices:
        raise DocumentError("cannot export an empty digraph")
    lines = [f"digraph {_quote(name)} {{"]
    for v in D.vertices:
        if E is not None:
            ring = " ".join(f"{e.arc}{'+' if e.dir == 'out' else '-'}" for e in E.rotation[v])
            lines.append(f"  // rotation {v}: {ring}")
        lines.append(f"  {_quote(v)};")
    for a in D.arcs:
        lines.append(f"  {_quote(a.tail)} -> {_quote(a.head)} [id={_quote(a.id)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
