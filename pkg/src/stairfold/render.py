"""Deterministic SVG drawings of documents.

The cylinder over a graph is drawn as one unit square per edge, left to right.
Sheets become polylines; linking points are black dots, pit points grey.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

from .documents import Document
from .graph_core import Graph

SIZE = 160
GAP = 40
MARGIN = 30
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
           "#17becf", "#7f7f7f", "#bcbd22")


class RenderError(ValueError):
    pass


def _f(x) -> str:
    return f"{float(x):.3f}"


class _Canvas:
    def __init__(self, width: float, height: float):
        self.w, self.h = width, height
        self.items: list[str] = []

    def line(self, x0, y0, x1, y1, stroke="#000", width=1):
        self.items.append(f'<line x1="{_f(x0)}" y1="{_f(y0)}" x2="{_f(x1)}" y2="{_f(y1)}" '
                          f'stroke="{stroke}" stroke-width="{width}"/>')

    def rect(self, x, y, w, h, stroke="#999", fill="none"):
        self.items.append(f'<rect x="{_f(x)}" y="{_f(y)}" width="{_f(w)}" height="{_f(h)}" '
                          f'stroke="{stroke}" fill="{fill}"/>')

    def polyline(self, pts, stroke, width=2):
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in pts)
        self.items.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{width}"/>')

    def dot(self, x, y, fill, r=3.5):
        self.items.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{r}" fill="{fill}" stroke="#000"/>')

    def text(self, x, y, s, size=12):
        self.items.append(f'<text x="{_f(x)}" y="{_f(y)}" font-family="monospace" '
                          f'font-size="{size}" text-anchor="middle">{escape(s)}</text>')

    def svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
                f'width="{_f(self.w)}" height="{_f(self.h)}" '
                f'viewBox="0 0 {_f(self.w)} {_f(self.h)}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="#fff"/>', *self.items,
                          "</svg>"]) + "\n"


class _Squares:
    """Coordinates for the per-edge squares of a cylinder."""

    def __init__(self, g: Graph, top: float = MARGIN):
        self.g = g
        self.top = top
        self.col = {e: n for n, e in enumerate(g.edge_ids)}

    @property
    def width(self) -> float:
        n = max(1, len(self.g.edge_ids))
        return 2 * MARGIN + n * SIZE + (n - 1) * GAP

    def xy(self, e: str, t, y) -> tuple[float, float]:
        x0 = MARGIN + self.col[e] * (SIZE + GAP)
        return x0 + float(t) * SIZE, self.top + (1 - float(y)) * SIZE

    def frame(self, c: _Canvas):
        for e in self.g.edge_ids:
            ed = self.g.edges[e]
            x, y = self.xy(e, 0, 1)
            c.rect(x, y, SIZE, SIZE)
            c.text(x + SIZE / 2, y + SIZE + 16, f"{e}: {ed.tail} to {ed.head}")

    def cpoint(self, p):
        e, t = self.g.positions(p.base)[0]
        return self.xy(e, t, p.height)


def _sheets(c: _Canvas, sq: _Squares, sheets, colors):
    for S, color in zip(sheets, colors):
        for e, poly in S.points_on_edges():
            pts = [sq.xy(e, x, y) for x, y in poly]
            if len(pts) == 1:
                c.dot(*pts[0], fill=color, r=2)
            else:
                c.polyline(pts, color)


def render_stairwell(s, broken: bool = False) -> str:
    if not s.levels:
        raise RenderError("nothing to draw: no levels")
    sq = _Squares(s.graph)
    c = _Canvas(sq.width, SIZE + 2 * MARGIN + 20)
    sq.frame(c)
    colors = [PALETTE[i % len(PALETTE)] for i in range(len(s.levels))]
    _sheets(c, sq, s.levels, colors)
    black = set().union(*s.betas) if s.betas else set()
    grey: set = set()
    if broken:
        _sheets(c, sq, [s.P1, s.P2], ["#000", "#555"])
        black |= set(s.P1.end_set())
        grey = set(s.gamma)
    for p in sorted(black):
        c.dot(*sq.cpoint(p), fill="#000")
    for p in sorted(grey):
        c.dot(*sq.cpoint(p), fill="#aaa")
    return c.svg()


def render_separator(M) -> str:
    sq = _Squares(M.graph)
    c = _Canvas(sq.width, SIZE + 2 * MARGIN + 20)
    sq.frame(c)
    for e, p, q in M.segments:
        c.line(*sq.xy(e, *p), *sq.xy(e, *q), stroke=PALETTE[0], width=2)
    return c.svg()


def render_straight(S) -> str:
    sq = _Squares(S.graph)
    c = _Canvas(sq.width, SIZE + 2 * MARGIN + 20)
    sq.frame(c)
    _sheets(c, sq, [S], [PALETTE[0]])
    for p in sorted(S.end_set()):
        c.dot(*sq.cpoint(p), fill="#000")
    return c.svg()


def render_graph(g: Graph) -> str:
    sq = _Squares(g)
    c = _Canvas(sq.width, SIZE + 2 * MARGIN + 20)
    sq.frame(c)
    return c.svg()


def render_folds(seq) -> str:
    """Each graph of the sequence as a row of edge bars; fold parts coloured."""
    rows = [(seq.base, None)] + [(f.total, f) for f in seq.folds]
    row_h = 50
    width = max(2 * MARGIN + max(1, len(g.edge_ids)) * (SIZE + GAP) for g, _ in rows)
    c = _Canvas(width, 2 * MARGIN + row_h * len(rows))
    for r, (g, fold) in enumerate(rows):
        y = MARGIN + r * row_h + 20
        for n, e in enumerate(g.edge_ids):
            x0 = MARGIN + n * (SIZE + GAP)
            c.line(x0, y, x0 + SIZE, y, stroke="#999", width=1)
            c.text(x0 + SIZE / 2, y - 8, e, size=10)
            if fold is None:
                continue
            for i, part in enumerate(fold.parts):
                for a, b in part.ivals.get(e, ()):
                    c.line(x0 + float(a) * SIZE, y + 4 * i, x0 + float(b) * SIZE, y + 4 * i,
                           stroke=PALETTE[i], width=3)
    return c.svg()


def render_maps(maps) -> str:
    if not maps:
        raise RenderError("nothing to draw: no maps")
    c = _Canvas(2 * MARGIN + len(maps) * SIZE + (len(maps) - 1) * GAP, SIZE + 2 * MARGIN)
    for n, m in enumerate(maps):
        x0 = MARGIN + n * (SIZE + GAP)
        c.rect(x0, MARGIN, SIZE, SIZE)
        c.polyline([(x0 + float(x) * SIZE, MARGIN + (1 - float(y)) * SIZE) for x, y in m.points],
                   PALETTE[n % len(PALETTE)])
    return c.svg()


def render(doc: Document) -> str:
    k = doc.kind
    if k == "stairwell":
        return render_stairwell(doc.payload)
    if k == "broken_stairwell":
        return render_stairwell(doc.payload, broken=True)
    if k == "separator":
        return render_separator(doc.payload[0])
    if k == "straight_set":
        return render_straight(doc.payload)
    if k == "graph":
        return render_graph(doc.payload)
    if k == "fold_sequence":
        return render_folds(doc.payload)
    if k == "interval_maps":
        return render_maps(doc.payload)
    raise RenderError(f"cannot render kind {k!r}")

