"""JSON documents for graphs, separators, stairwells, folds and interval maps.

Rationals are written as ``"p/q"`` strings.  Output is canonical: sorted keys,
two-space indent, sets in sorted order, so ``dump(load(text)) == text`` for any
canonical file.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

from .crooked import PLIntervalMap
from .cylinder import CylinderPoint, StraightSet
from .fold import FoldSequence, SimpleFold
from .graph_core import ClosedSet, Edge, Graph, GraphPoint
from .separator import PLComplex
from .stairwell import BrokenStairwell, Stairwell

SCHEMA_VERSION = 1
KINDS = ("graph", "straight_set", "separator", "stairwell", "broken_stairwell",
         "fold_sequence", "interval_maps")


class DocumentError(Exception):
    """The input is not a well-formed document."""


class Document:
    __slots__ = ("kind", "payload", "meta")

    def __init__(self, kind: str, payload, meta: dict | None = None):
        if kind not in KINDS:
            raise DocumentError(f"unknown document kind {kind!r}")
        self.kind = kind
        self.payload = payload
        self.meta = dict(meta or {})

    def __repr__(self):
        return f"Document({self.kind!r})"


# -- scalars -------------------------------------------------------------

_RATIONAL = re.compile(r"-?[0-9]+(/[0-9]+)?")


def rat(x: Fraction) -> str:
    return str(Fraction(x))


def parse_rat(s) -> Fraction:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise DocumentError(f"expected a rational string, got {s!r}")
    if isinstance(s, str) and not _RATIONAL.fullmatch(s):
        raise DocumentError(f"bad rational {s!r}; expected p/q")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise DocumentError(f"bad rational {s!r}") from exc


def _need(obj, key, typ=None):
    if not isinstance(obj, dict) or key not in obj:
        raise DocumentError(f"missing field {key!r}")
    val = obj[key]
    if typ is not None and not isinstance(val, typ):
        raise DocumentError(f"field {key!r} has the wrong type")
    return val


# -- encoders ------------------------------------------------------------

def enc_graph(g: Graph) -> dict:
    return {"vertices": list(g.vertices),
            "edges": [[e, ed.tail, ed.head, rat(ed.length)] for e, ed in g.edges.items()]}


def enc_point(p: GraphPoint) -> dict:
    if p.vertex is not None:
        return {"vertex": p.vertex}
    return {"edge": p.edge, "t": rat(p.t)}


def enc_cpoint(p: CylinderPoint) -> dict:
    return {"at": enc_point(p.base), "height": rat(p.height)}


def enc_cpoints(pts) -> list:
    return [enc_cpoint(p) for p in sorted(pts)]


def enc_closed(A: ClosedSet) -> dict:
    return {"intervals": {e: [[rat(a), rat(b)] for a, b in iv] for e, iv in sorted(A.ivals.items())},
            "vertices": sorted(A.verts)}


def enc_pieces(S: StraightSet) -> dict:
    return {e: [[[rat(x), rat(y)] for x, y in poly] for poly in polys]
            for e, polys in sorted(S.pieces.items())}


def enc_fold(f: SimpleFold) -> dict:
    return {"total": enc_graph(f.total),
            "edge_map": {fe: [g, rat(a), rat(b)] for fe, (g, a, b) in sorted(f.edge_map.items())},
            "vertex_map": {v: enc_point(x) for v, x in sorted(f.vertex_map.items())},
            "parts": [enc_closed(P) for P in f.parts]}


def encode(doc: Document) -> dict:
    k, p = doc.kind, doc.payload
    if k == "graph":
        body = {"graph": enc_graph(p)}
    elif k == "straight_set":
        body = {"graph": enc_graph(p.graph), "pieces": enc_pieces(p)}
    elif k == "separator":
        M, radius = p
        body = {"graph": enc_graph(M.graph),
                "segments": [[e, [rat(a[0]), rat(a[1])], [rat(b[0]), rat(b[1])]]
                             for e, a, b in M.segments]}
        if radius is not None:
            body["tube_radius"] = rat(radius)
    elif k in ("stairwell", "broken_stairwell"):
        body = {"graph": enc_graph(p.graph),
                "levels": [enc_pieces(S) for S in p.levels],
                "alphas": [enc_cpoints(a) for a in p.alphas],
                "betas": [enc_cpoints(b) for b in p.betas]}
        if k == "broken_stairwell":
            body.update({"gamma": enc_cpoints(p.gamma), "pit": p.pit,
                         "P1": enc_pieces(p.P1), "P2": enc_pieces(p.P2)})
    elif k == "fold_sequence":
        body = {"base": enc_graph(p.base), "folds": [enc_fold(f) for f in p.folds]}
    else:
        body = {"maps": [[[rat(x), rat(y)] for x, y in m.points] for m in p]}
    return {"schema_version": SCHEMA_VERSION, "kind": k, "payload": body, "meta": doc.meta}


def dumps(doc: Document) -> str:
    return json.dumps(encode(doc), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def save(doc: Document, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


# -- decoders ------------------------------------------------------------

def dec_graph(obj) -> Graph:
    verts = _need(obj, "vertices", list)
    edges = _need(obj, "edges", list)
    items = []
    for row in edges:
        if not isinstance(row, list) or len(row) != 4:
            raise DocumentError("edge rows are [id, tail, head, length]")
        e, tail, head, length = row
        items.append((e, Edge(tail, head, parse_rat(length))))
    return Graph(verts, items)


def dec_point(obj) -> GraphPoint:
    if not isinstance(obj, dict):
        raise DocumentError("a point must be an object")
    if "vertex" in obj:
        return GraphPoint(vertex=obj["vertex"])
    return GraphPoint(edge=_need(obj, "edge", str), t=parse_rat(_need(obj, "t")))


def _canon(g: Graph, p: GraphPoint) -> GraphPoint:
    return g.vertex(p.vertex) if p.vertex is not None else g.point(p.edge, p.t)


def dec_cpoints(g: Graph, rows) -> frozenset:
    if not isinstance(rows, list):
        raise DocumentError("point sets are lists")
    return frozenset(CylinderPoint(_canon(g, dec_point(_need(r, "at"))), parse_rat(_need(r, "height")))
                     for r in rows)


def dec_closed(g: Graph, obj) -> ClosedSet:
    iv = _need(obj, "intervals", dict)
    ivals = {e: [(parse_rat(a), parse_rat(b)) for a, b in rows] for e, rows in iv.items()}
    return ClosedSet(g, ivals, _need(obj, "vertices", list))


def _pt(row) -> tuple:
    if not isinstance(row, list) or len(row) != 2:
        raise DocumentError("coordinates are [x, y] pairs")
    return (parse_rat(row[0]), parse_rat(row[1]))


def dec_pieces(g: Graph, obj) -> StraightSet:
    if not isinstance(obj, dict):
        raise DocumentError("pieces must be an object keyed by edge")
    return StraightSet(g, {e: [tuple(_pt(r) for r in poly) for poly in polys]
                           for e, polys in obj.items()})


def dec_fold(base: Graph, obj) -> SimpleFold:
    total = dec_graph(_need(obj, "total"))
    emap = {fe: (row[0], parse_rat(row[1]), parse_rat(row[2]))
            for fe, row in _need(obj, "edge_map", dict).items()}
    vmap = {v: _canon(base, dec_point(x)) for v, x in _need(obj, "vertex_map", dict).items()}
    parts = tuple(dec_closed(total, P) for P in _need(obj, "parts", list))
    if len(parts) != 3:
        raise DocumentError("a fold has exactly three parts")
    return SimpleFold(base, total, emap, vmap, parts)


def decode(obj) -> Document:
    if not isinstance(obj, dict):
        raise DocumentError("top level must be an object")
    if obj.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError("unsupported schema version")
    kind = _need(obj, "kind", str)
    body = _need(obj, "payload", dict)
    meta = obj.get("meta", {})
    if kind == "graph":
        payload = dec_graph(_need(body, "graph"))
    elif kind == "straight_set":
        g = dec_graph(_need(body, "graph"))
        payload = dec_pieces(g, _need(body, "pieces"))
    elif kind == "separator":
        g = dec_graph(_need(body, "graph"))
        segs = [(row[0], _pt(row[1]), _pt(row[2])) for row in _need(body, "segments", list)]
        radius = parse_rat(body["tube_radius"]) if "tube_radius" in body else None
        payload = (PLComplex(g, segs), radius)
    elif kind in ("stairwell", "broken_stairwell"):
        g = dec_graph(_need(body, "graph"))
        levels = [dec_pieces(g, L) for L in _need(body, "levels", list)]
        alphas = [dec_cpoints(g, a) for a in _need(body, "alphas", list)]
        betas = [dec_cpoints(g, b) for b in _need(body, "betas", list)]
        if kind == "stairwell":
            payload = Stairwell(g, levels, alphas, betas)
        else:
            pit = _need(body, "pit", int)
            payload = BrokenStairwell(g, levels, alphas, betas, dec_cpoints(g, _need(body, "gamma")),
                                      pit, dec_pieces(g, _need(body, "P1")),
                                      dec_pieces(g, _need(body, "P2")))
    elif kind == "fold_sequence":
        base = dec_graph(_need(body, "base"))
        folds = []
        cur = base
        for fobj in _need(body, "folds", list):
            f = dec_fold(cur, fobj)
            folds.append(f)
            cur = f.total
        payload = FoldSequence(base, folds)
    elif kind == "interval_maps":
        payload = [PLIntervalMap(_pt(r) for r in m) for m in _need(body, "maps", list)]
    else:
        raise DocumentError(f"unknown document kind {kind!r}")
    return Document(kind, payload, meta)


def loads(text: str) -> Document:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    try:
        return decode(obj)
    except (KeyError, TypeError, IndexError, AttributeError) as exc:
        raise DocumentError(f"malformed document: {exc}") from exc


def load(path) -> Document:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except UnicodeDecodeError as exc:
        raise DocumentError("file is not UTF-8") from exc
    return loads(text)


def canonical(text: str) -> str:
    """Re-serialize ``text`` without interpreting it."""
    return json.dumps(json.loads(text), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def as_jsonable(x: Any):
    """Fractions to strings, recursively; used for trace output."""
    if isinstance(x, Fraction):
        return rat(x)
    if isinstance(x, dict):
        return {k: as_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [as_jsonable(v) for v in x]
    return x
