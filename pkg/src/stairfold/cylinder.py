"""Points and straight sets in the cylinder ``G x [0, 1]``.

A straight set is stored as the graph of a piecewise-linear height function
over a regular base.  Each edge carries a list of polylines; a polyline is a
tuple of ``(s, h)`` breakpoints with strictly increasing ``s`` whose first and
last parameters are the ends of one base interval.
"""
from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .graph_core import ONE, ZERO, ClosedSet, Graph, GraphPoint, as_fraction

Polyline = tuple  # ((s0, h0), (s1, h1), ...)


class StraightSetError(ValueError):
    """Raised when raw data does not describe a straight set."""


@dataclass(frozen=True)
class CylinderPoint:
    base: GraphPoint
    height: Fraction

    def __post_init__(self):
        h = as_fraction(self.height)
        object.__setattr__(self, "height", h)
        if not ZERO <= h <= ONE:
            raise ValueError(f"height {h} outside [0, 1]")

    @property
    def key(self):
        return (self.base.key, self.height)

    def __lt__(self, other):
        return self.key < other.key

    def __repr__(self):
        return f"({self.base!r}, {self.height})"


FiniteCylinderSet = frozenset


def poly_eval(poly: Polyline, s: Fraction) -> Fraction:
    """Height of a polyline at parameter ``s`` (which must lie in its span)."""
    if s < poly[0][0] or s > poly[-1][0]:
        raise ValueError("parameter outside polyline span")
    ss = [p[0] for p in poly]
    i = bisect_right(ss, s) - 1
    if i >= len(poly) - 1:
        return poly[-1][1]
    (s0, h0), (s1, h1) = poly[i], poly[i + 1]
    return h0 + (h1 - h0) * (s - s0) / (s1 - s0)


def poly_clip(poly: Polyline, lo: Fraction, hi: Fraction) -> Polyline:
    """The part of a polyline over ``[lo, hi]`` (assumed to meet its span)."""
    lo, hi = max(lo, poly[0][0]), min(hi, poly[-1][0])
    inner = [(s, h) for s, h in poly if lo < s < hi]
    pts = [(lo, poly_eval(poly, lo))] + inner
    if hi > lo:
        pts.append((hi, poly_eval(poly, hi)))
    return tuple(pts)


def poly_simplify(poly: Polyline) -> Polyline:
    """Drop breakpoints where the slope does not change."""
    out = [poly[0]]
    for i in range(1, len(poly) - 1):
        (s0, h0), (s1, h1), (s2, h2) = out[-1], poly[i], poly[i + 1]
        if (h1 - h0) * (s2 - s1) != (h2 - h1) * (s1 - s0):
            out.append(poly[i])
    if len(poly) > 1:
        out.append(poly[-1])
    return tuple(out)


def poly_reparam(poly: Polyline, a: Fraction, b: Fraction) -> Polyline:
    """Pull a polyline on ``[a, b]`` back along ``u -> a + (b - a) u``."""
    return tuple(((s - a) / (b - a), h) for s, h in poly)


def _combine(polys: list[Polyline], allow_overlap: bool, edge: str) -> list[Polyline]:
    polys = sorted(polys)
    out: list[Polyline] = []
    for poly in polys:
        if not out or poly[0][0] > out[-1][-1][0]:
            out.append(poly)
            continue
        prev = out[-1]
        lo, hi = poly[0][0], min(prev[-1][0], poly[-1][0])
        if lo < hi and not allow_overlap:
            raise StraightSetError(f"overlapping pieces on edge {edge!r}")
        checks = {s for s, _ in prev if lo <= s <= hi} | {s for s, _ in poly if lo <= s <= hi}
        checks |= {lo, hi}
        for s in checks:
            if poly_eval(prev, s) != poly_eval(poly, s):
                raise StraightSetError(
                    f"pieces on edge {edge!r} disagree at parameter {s}")
        end = prev[-1][0]
        out[-1] = prev + tuple(pt for pt in poly if pt[0] > end)
    return [poly_simplify(p) for p in out]


class StraightSet:
    """The graph of a PL height function over a regular subset of ``G``."""

    __slots__ = ("graph", "pieces", "base", "_vheights")

    def __init__(self, graph: Graph, pieces: dict, *, allow_overlap: bool = False):
        self.graph = graph
        clean: dict[str, tuple[Polyline, ...]] = {}
        for e, polys in pieces.items():
            if e not in graph.edges:
                raise StraightSetError(f"unknown edge {e!r}")
            fixed = []
            for poly in polys:
                poly = tuple((as_fraction(s), as_fraction(h)) for s, h in poly)
                if len(poly) < 2:
                    raise StraightSetError(
                        f"degenerate piece on edge {e!r}: base is not regular")
                for (s0, _), (s1, _) in zip(poly, poly[1:]):
                    if s1 <= s0:
                        raise StraightSetError(
                            f"breakpoints on edge {e!r} are not strictly increasing")
                if poly[0][0] < 0 or poly[-1][0] > 1:
                    raise StraightSetError(f"piece on edge {e!r} leaves [0, 1]")
                for _, h in poly:
                    if not ZERO <= h <= ONE:
                        raise StraightSetError(f"height {h} on edge {e!r} outside [0, 1]")
                fixed.append(poly)
            if fixed:
                clean[e] = tuple(_combine(fixed, allow_overlap, e))
        self.pieces = {e: clean[e] for e in graph.edge_ids if e in clean}
        self.base = ClosedSet(graph, {e: [(p[0][0], p[-1][0]) for p in ps]
                                      for e, ps in self.pieces.items()})
        vh: dict[str, Fraction] = {}
        for e, ps in self.pieces.items():
            edge = graph.edges[e]
            for p in ps:
                for s, h, v in ((p[0][0], p[0][1], edge.tail), (p[-1][0], p[-1][1], edge.head)):
                    if (s == 0 and v == edge.tail) or (s == 1 and v == edge.head):
                        if vh.setdefault(v, h) != h:
                            raise StraightSetError(f"heights disagree at vertex {v!r}")
        self._vheights = vh
        if self.base.is_empty():
            return
        if not self.base.is_regular():
            raise StraightSetError("base is not regular")

    # -- identity --------------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, StraightSet) and self.graph == other.graph
                and self.pieces == other.pieces)

    def __hash__(self):
        return hash(tuple(self.pieces.items()))

    def __repr__(self):
        return f"StraightSet({self.pieces})"

    def is_empty(self) -> bool:
        return not self.pieces

    # -- queries ---------------------------------------------------------
    def evaluate(self, x: GraphPoint) -> Fraction | None:
        if x.vertex is not None:
            return self._vheights.get(x.vertex)
        for poly in self.pieces.get(x.edge, ()):
            if poly[0][0] <= x.t <= poly[-1][0]:
                return poly_eval(poly, x.t)
        return None

    def height_at(self, edge: str, t) -> Fraction | None:
        return self.evaluate(self.graph.point(edge, t))

    def contains(self, p: CylinderPoint) -> bool:
        return self.evaluate(p.base) == p.height

    def lift(self, x: GraphPoint) -> CylinderPoint:
        h = self.evaluate(x)
        if h is None:
            raise ValueError(f"{x!r} is not in the base")
        return CylinderPoint(x, h)

    def lift_all(self, xs: Iterable[GraphPoint]) -> frozenset[CylinderPoint]:
        return frozenset(self.lift(x) for x in xs)

    def end_set(self) -> frozenset[CylinderPoint]:
        return self.lift_all(self.base.boundary())

    def vertices_heights(self) -> dict[str, Fraction]:
        return dict(self._vheights)

    # -- derived sets ----------------------------------------------------
    def restrict(self, X: ClosedSet) -> "StraightSet":
        """``S`` intersected with ``X x [0, 1]``; the result must be straight."""
        pieces: dict = {}
        inter = self.base.intersection(X)
        for e, ivs in inter.ivals.items():
            for lo, hi in ivs:
                if lo == hi:
                    raise StraightSetError("restriction has an isolated point")
                for poly in self.pieces[e]:
                    if poly[0][0] <= lo and hi <= poly[-1][0]:
                        pieces.setdefault(e, []).append(poly_clip(poly, lo, hi))
                        break
        out = StraightSet(self.graph, pieces)
        if out.base != inter:
            raise StraightSetError("restriction is not a straight set")
        return out

    def on_graph(self, graph: Graph) -> "StraightSet":
        """Keep the pieces over the edges of ``graph`` (a subgraph)."""
        return StraightSet(graph, {e: ps for e, ps in self.pieces.items() if e in graph.edges})

    def transport(self, graph: Graph) -> "StraightSet":
        return StraightSet(graph, self.pieces)

    def shifted(self, dh: Fraction) -> "StraightSet":
        return StraightSet(self.graph, {e: [tuple((s, h + dh) for s, h in p) for p in ps]
                                        for e, ps in self.pieces.items()})

    def points_on_edges(self):
        for e, ps in self.pieces.items():
            for p in ps:
                yield e, p

    @classmethod
    def constant(cls, graph: Graph, base: ClosedSet, height) -> "StraightSet":
        h = as_fraction(height)
        return cls(graph, {e: [((a, h), (b, h)) for a, b in iv] for e, iv in base.ivals.items()})

    @classmethod
    def empty(cls, graph: Graph) -> "StraightSet":
        return cls(graph, {})


def union_straight(parts: Iterable[StraightSet]) -> StraightSet:
    """Union of straight sets that agree wherever their bases overlap."""
    parts = list(parts)
    if not parts:
        raise ValueError("nothing to unite")
    g = parts[0].graph
    pieces: dict = {}
    for S in parts:
        for e, ps in S.pieces.items():
            pieces.setdefault(e, []).extend(ps)
    return StraightSet(g, pieces, allow_overlap=True)


def project(S: StraightSet) -> ClosedSet:
    return S.base


def end_set(S: StraightSet) -> frozenset[CylinderPoint]:
    return S.end_set()


def evaluate(S: StraightSet, x: GraphPoint) -> Fraction | None:
    return S.evaluate(x)


def validate_straight(graph: Graph, pieces: dict) -> tuple[bool, str]:
    """Check raw per-edge polylines; the message names the first failed clause."""
    try:
        StraightSet(graph, pieces)
    except StraightSetError as exc:
        return False, str(exc)
    return True, "ok"


def _pair_intersections(S: StraightSet, T: StraightSet):
    pts: set = set()
    spans: list = []
    for e, ps in S.pieces.items():
        for p in ps:
            for q in T.pieces.get(e, ()):
                lo, hi = max(p[0][0], q[0][0]), min(p[-1][0], q[-1][0])
                if lo > hi:
                    continue
                ss = sorted({lo, hi} | {s for s, _ in p + q if lo < s < hi})
                diffs = [poly_eval(p, s) - poly_eval(q, s) for s in ss]
                for i, s in enumerate(ss):
                    if diffs[i] == 0:
                        pts.add((e, s))
                for i in range(len(ss) - 1):
                    d0, d1 = diffs[i], diffs[i + 1]
                    if d0 == 0 and d1 == 0:
                        spans.append((e, ss[i], ss[i + 1]))
                    elif d0 * d1 < 0:
                        pts.add((e, ss[i] + (ss[i + 1] - ss[i]) * d0 / (d0 - d1)))
    g = S.graph
    out = set()
    for e, s in pts:
        x = g.point(e, s)
        out.add(CylinderPoint(x, S.evaluate(x)))
    return out, spans


def mutual_disjointness(sheets: list[StraightSet], allowed: Iterable[CylinderPoint] = ()):
    """Whether the sheets meet only inside ``allowed``.

    Returns ``(ok, offending)`` where ``offending`` lists intersection points
    outside ``allowed`` and the ends of any segments shared by two sheets.
    """
    allowed = frozenset(allowed)
    bad: set = set()
    for i in range(len(sheets)):
        for j in range(i + 1, len(sheets)):
            pts, spans = _pair_intersections(sheets[i], sheets[j])
            bad |= {p for p in pts if p not in allowed}
            for e, lo, hi in spans:
                for s in (lo, hi):
                    x = sheets[i].graph.point(e, s)
                    bad.add(CylinderPoint(x, sheets[i].evaluate(x)))
    return not bad, sorted(bad)
