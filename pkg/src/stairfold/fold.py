"""Simple folds: construction by gluing three copies, validation, reduction, pullbacks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cylinder import CylinderPoint, StraightSet, StraightSetError, poly_clip, poly_reparam
from .graph_core import (
    ONE,
    ZERO,
    ClosedSet,
    Edge,
    Graph,
    GraphPoint,
    cut_components,
    has_consistent_complement,
    side_of,
)


class FoldError(ValueError):
    """A simple fold cannot be built or an operation's hypothesis fails."""


def point_name(p: GraphPoint) -> str:
    return p.vertex if p.vertex is not None else f"{p.edge}@{p.t}"


@dataclass(frozen=True, eq=False)
class SimpleFold:
    """A projection ``phi: F -> G`` with ``F = F1 u F2 u F3``.

    ``edge_map`` sends every edge of ``F`` linearly onto ``[a, b]`` of a base
    edge ``g`` (with ``a < b``) as ``(g, a, b)``; ``vertex_map`` sends vertices of
    ``F`` to points of ``G``.
    """

    base: Graph
    total: Graph
    edge_map: dict
    vertex_map: dict
    parts: tuple

    def __eq__(self, other):
        return (isinstance(other, SimpleFold) and self.base == other.base
                and self.total == other.total and self.edge_map == other.edge_map
                and self.vertex_map == other.vertex_map and self.parts == other.parts)

    def __hash__(self):
        return hash((self.total, tuple(self.edge_map.items())))

    # -- the projection ----------------------------------------------------
    def phi(self, p: GraphPoint) -> GraphPoint:
        if p.vertex is not None:
            return self.vertex_map[p.vertex]
        g, a, b = self.edge_map[p.edge]
        return self.base.point(g, a + (b - a) * p.t)

    def phi_star(self, p: CylinderPoint) -> CylinderPoint:
        return CylinderPoint(self.phi(p.base), p.height)

    def image(self, X: ClosedSet) -> ClosedSet:
        ivals: dict = {}
        for f, ivs in X.ivals.items():
            g, a, b = self.edge_map[f]
            for c, d in ivs:
                ivals.setdefault(g, []).append((a + (b - a) * c, a + (b - a) * d))
        out = ClosedSet(self.base, ivals)
        return out.union(ClosedSet.from_points(self.base, (self.vertex_map[v] for v in X.verts)))

    def preimage(self, Y: ClosedSet) -> ClosedSet:
        ivals: dict = {}
        for f, (g, a, b) in self.edge_map.items():
            for c, d in Y.ivals.get(g, ()):
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    ivals.setdefault(f, []).append(((lo - a) / (b - a), (hi - a) / (b - a)))
        verts = [v for v, x in self.vertex_map.items() if Y.contains(x)]
        return ClosedSet(self.total, ivals, verts)

    def preimage_point(self, x: GraphPoint) -> frozenset[GraphPoint]:
        out = set()
        for e, t in self.base.positions(x):
            for f, (g, a, b) in self.edge_map.items():
                if g == e and a <= t <= b:
                    out.add(self.total.point(f, (t - a) / (b - a)))
        out.update(GraphPoint(vertex=v) for v, y in self.vertex_map.items() if y == x)
        return frozenset(out)

    def preimage_star(self, pts: Iterable[CylinderPoint]) -> frozenset[CylinderPoint]:
        return frozenset(CylinderPoint(q, p.height) for p in pts for q in self.preimage_point(p.base))

    def images(self) -> tuple[ClosedSet, ClosedSet, ClosedSet]:
        return tuple(self.image(Fi) for Fi in self.parts)

    def restrict_to(self, vertex_set: frozenset[str]) -> "SimpleFold":
        """The fold restricted to the component of ``F`` spanned by ``vertex_set``."""
        edges = [f for f in self.total.edge_ids if self.total.edges[f].tail in vertex_set]
        sub = self.total.subgraph(edges, vertex_set)
        parts = tuple(ClosedSet(sub, {f: iv for f, iv in Fi.ivals.items() if f in sub.edges},
                                [v for v in Fi.verts if v in vertex_set])
                      for Fi in self.parts)
        return SimpleFold(self.base, sub, {f: self.edge_map[f] for f in sub.edge_ids},
                          {v: self.vertex_map[v] for v in sub.vertices}, parts)


def _boundary_set(A: ClosedSet) -> ClosedSet:
    return ClosedSet.from_points(A.graph, A.boundary())


def check_fold_triple(G: Graph, G1: ClosedSet, G2: ClosedSet, G3: ClosedSet) -> tuple[bool, str]:
    for i, Gi in enumerate((G1, G2, G3), 1):
        if Gi.is_empty() or not Gi.is_regular():
            return False, f"(F1): G{i} is empty or not regular"
    if G1.union(G3) != ClosedSet.full(G):
        return False, "(F2): G1 and G3 do not cover G"
    if G2 != G1.intersection(G3):
        return False, "(F2): G2 differs from the intersection of G1 and G3"
    left = G1.closure_of_difference(G2)
    right = G3.closure_of_difference(G2)
    if not left.intersection(right).is_empty():
        return False, "(F3): the closures of G1 - G2 and G3 - G2 meet"
    return True, "ok"


def build_fold(G: Graph, G1: ClosedSet, G2: ClosedSet, G3: ClosedSet) -> SimpleFold:
    """Glue copies of ``G1``, ``G2``, ``G3`` along the boundaries of ``G1`` and ``G3``."""
    ok, why = check_fold_triple(G, G1, G2, G3)
    if not ok:
        raise FoldError(why)
    glue = {1: G1.boundary(), 3: G3.boundary()}

    def vname(i: int, x: GraphPoint) -> str:
        j = 2 if i in glue and x in glue[i] else i
        return f"{j}|{point_name(x)}"

    vertex_map: dict[str, GraphPoint] = {}
    edges: list = []
    edge_map: dict = {}
    for i, Gi in ((1, G1), (2, G2), (3, G3)):
        for v in Gi.verts:
            vertex_map.setdefault(vname(i, GraphPoint(vertex=v)), GraphPoint(vertex=v))
        for g, ivs in Gi.ivals.items():
            for a, b in ivs:
                fid = f"{i}|{g}" if (a, b) == (ZERO, ONE) else f"{i}|{g}[{a},{b}]"
                x, y = G.point(g, a), G.point(g, b)
                tail, head = vname(i, x), vname(i, y)
                vertex_map.setdefault(tail, x)
                vertex_map.setdefault(head, y)
                edges.append((fid, Edge(tail, head, G.edges[g].length * (b - a))))
                edge_map[fid] = (g, a, b)
    order = {v: k for k, v in enumerate(G.vertices)}

    def vkey(name: str):
        i, _, rest = name.partition("|")
        x = vertex_map[name]
        return (int(i), 0 if x.vertex is not None else 1,
                order.get(x.vertex, 0), x.key)

    F = Graph(sorted(vertex_map, key=vkey), edges)
    parts = []
    for i in (1, 2, 3):
        own = [f for f in F.edge_ids if f.startswith(f"{i}|")]
        parts.append(ClosedSet(F, {f: [(ZERO, ONE)] for f in own}))
    fold = SimpleFold(G, F, edge_map, {v: vertex_map[v] for v in F.vertices}, tuple(parts))
    return fold


def validate_fold(f: SimpleFold) -> tuple[bool, str]:
    """Check the five fold axioms and the derived facts; report the first failure."""
    G, F = f.base, f.total
    for fe, (g, a, b) in f.edge_map.items():
        if not ZERO <= a < b <= ONE:
            return False, f"(F4): edge {fe!r} is not mapped monotonically"
        e = F.edges[fe]
        if f.vertex_map[e.tail] != G.point(g, a) or f.vertex_map[e.head] != G.point(g, b):
            return False, f"(F4): projection is discontinuous along edge {fe!r}"
    if f.parts[0].union(f.parts[1]).union(f.parts[2]) != ClosedSet.full(F):
        return False, "F is not the union of its three parts"
    G1, G2, G3 = f.images()
    ok, why = check_fold_triple(G, G1, G2, G3)
    if not ok:
        return False, why
    for i, Fi in enumerate(f.parts, 1):
        ok, why = _injective_on(f, Fi)
        if not ok:
            return False, f"(F4): projection is not injective on F{i}: {why}"
    F1, F2, F3 = f.parts
    if f.image(F1.intersection(F2)) != _boundary_set(G1):
        return False, "(F5): boundary of G1 is not the image of F1 n F2"
    if f.image(F2.intersection(F3)) != _boundary_set(G3):
        return False, "(F5): boundary of G3 is not the image of F2 n F3"
    if not F1.intersection(F3).is_empty():
        return False, "(F5): F1 and F3 meet"
    return _check_basic_facts(f, G1, G2, G3)


def _injective_on(f: SimpleFold, Fi: ClosedSet) -> tuple[bool, str]:
    opens: dict = {}
    nodes: list[GraphPoint] = [GraphPoint(vertex=v) for v in Fi.verts]
    for fe, ivs in Fi.ivals.items():
        g, a, b = f.edge_map[fe]
        for c, d in ivs:
            lo, hi = a + (b - a) * c, a + (b - a) * d
            if lo < hi:
                opens.setdefault(g, []).append((lo, hi))
            for t in (c, d):
                if ZERO < t < ONE:
                    nodes.append(GraphPoint(edge=fe, t=t))
    for g, spans in opens.items():
        spans.sort()
        for (a0, b0), (a1, _) in zip(spans, spans[1:]):
            if a1 < b0:
                return False, f"two pieces overlap on base edge {g!r}"
    images = [f.phi(p) for p in set(nodes)]
    if len(set(images)) != len(images):
        return False, "two nodes share an image"
    for x in images:
        for e, t in f.base.positions(x):
            if any(lo < t < hi for lo, hi in opens.get(e, ())):
                return False, f"node image {x!r} lies inside an edge image"
    return True, "ok"


def _boundary_of_difference(A: ClosedSet, B: ClosedSet) -> ClosedSet:
    # the boundary of A - B for closed A, B
    cl = A.closure_of_difference(B)
    return cl.intersection(A.complement_closure().union(B))


def _check_basic_facts(f: SimpleFold, G1, G2, G3) -> tuple[bool, str]:
    b1, b2, b3 = (_boundary_set(X) for X in (G1, G2, G3))
    if b2 != b1.union(b3) or not b1.intersection(b3).is_empty():
        return False, "derived fold fact: boundary of G2 is not the disjoint union of those of G1 and G3"
    if _boundary_of_difference(G1, G2) != b3 or _boundary_of_difference(G3, G2) != b1:
        return False, "derived fold fact: boundaries of G1 - G2 and G3 - G2 are wrong"
    F1, F2, F3 = f.parts
    for i, Fi in enumerate(f.parts, 1):
        if not Fi.is_regular():
            return False, f"derived fold fact: F{i} is not regular"
    c12, c23 = F1.intersection(F2), F2.intersection(F3)
    if not (c12.is_finite() and c23.is_finite()):
        return False, "derived fold fact: crease sets are not finite"
    d1, d2, d3 = (_boundary_set(X) for X in f.parts)
    if d1 != c12 or d3 != c23 or d2 != d1.union(d3):
        return False, "derived fold fact: crease sets differ from part boundaries"
    F = f.total
    for cut, inner, outer in ((d1, F1, F2.union(F3)), (d3, F3, F1.union(F2))):
        for comp in cut_components(F, cut.points()):
            if comp.meets(inner) and comp.meets(outer):
                return False, "derived fold fact: a crease set fails to separate its part"
    for i, Fi in enumerate(f.parts, 1):
        bd = Fi.boundary()
        for v in F.vertices:
            p = GraphPoint(vertex=v)
            if not Fi.contains(p) or p in bd:
                continue
            got = set()
            for fe, t, s in F.directions(p):
                if Fi.germ((fe, t, s)):
                    g, a, b = f.edge_map[fe]
                    got.add((g, a + (b - a) * t, s))
            if got != set(f.base.directions(f.vertex_map[v])):
                return False, f"derived fold fact: projection is not open at {v!r} in F{i}"
    return True, "ok"


def fold_from_pocket(G: Graph, A: ClosedSet, B1: Iterable[GraphPoint],
                     B2: Iterable[GraphPoint]) -> SimpleFold:
    """The fold with parts ``side_of(A, B1)``, ``A`` and ``side_of(A, B2)``."""
    B1, B2 = frozenset(B1), frozenset(B2)
    if not G.is_connected():
        raise FoldError("the base graph must be connected")
    if A.is_empty() or not A.is_regular():
        raise FoldError("A must be non-empty and regular")
    if B1 & B2 or B1 | B2 != A.boundary():
        raise FoldError("B1 and B2 must split the boundary of A")
    for name, B in (("B1", B1), ("B2", B2)):
        if not has_consistent_complement(A, B):
            raise FoldError(f"A does not have consistent complement relative to {name}")
    return build_fold(G, side_of(A, B1), A, side_of(A, B2))


def connected_reduction(f: SimpleFold) -> SimpleFold:
    """Restrict a fold over a connected base to a component of ``F`` covering ``G``."""
    G = f.base
    if not G.is_connected():
        raise FoldError("the base graph must be connected")
    G1, _, G3 = f.images()
    b1, b3 = G1.boundary(), G3.boundary()
    if not b1 or not b3:
        raise FoldError("G1 or G3 has empty boundary; a single part already covers G")
    for comp in f.total.components():
        red = f.restrict_to(comp)
        img = red.image(ClosedSet.full(red.total))
        if any(img.contains(x) for x in b1) and any(img.contains(x) for x in b3):
            if img != ClosedSet.full(G):
                raise FoldError("component image is not all of G")
            return red
    raise FoldError("no component of F meets both crease images")


def _check_preimage_hypothesis(f: SimpleFold, S: StraightSet) -> None:
    base = S.base
    G2 = f.image(f.parts[1])
    touch = base.boundary() & G2.boundary()
    for x in touch:
        for d in f.base.directions(x):
            if G2.germ(d) and not base.germ(d):
                raise FoldError(
                    f"pullback hypothesis fails at {x!r}: the middle image leaves the base")


def pullback_straight(f: SimpleFold, S: StraightSet) -> StraightSet:
    """The full preimage of ``S`` under the starred projection."""
    _check_preimage_hypothesis(f, S)
    return _raw_pullback(f, S)


def _raw_pullback(f: SimpleFold, S: StraightSet) -> StraightSet:
    pieces: dict = {}
    for fe, (g, a, b) in f.edge_map.items():
        for poly in S.pieces.get(g, ()):
            lo, hi = max(a, poly[0][0]), min(b, poly[-1][0])
            if lo < hi:
                pieces.setdefault(fe, []).append(poly_reparam(poly_clip(poly, lo, hi), a, b))
    out = StraightSet(f.total, pieces)
    if out.base != f.preimage(S.base):
        raise StraightSetError("the preimage is not straight")
    return out


def pullback_straight_restricted(f: SimpleFold, S: StraightSet) -> StraightSet:
    """The preimage of ``S`` intersected with ``(F1 u F2) x [0, 1]``."""
    return pullback_straight(f, S).restrict(f.parts[0].union(f.parts[1]))


def pullback_end_formula(f: SimpleFold, S: StraightSet) -> frozenset[CylinderPoint]:
    """End set of the full preimage, computed from the end set of ``S``."""
    crease = f.parts[1].boundary()
    return frozenset(p for p in f.preimage_star(S.end_set()) if p.base not in crease)


def restricted_end_formula(f: SimpleFold, S: StraightSet) -> frozenset[CylinderPoint]:
    """End set of the restricted preimage, computed from the end set of ``S``."""
    F1, F2, F3 = f.parts
    F12 = F1.union(F2)
    d1, d3 = F1.boundary(), F3.boundary()
    first = {p for p in f.preimage_star(S.end_set())
             if F12.contains(p.base) and p.base not in d1}
    full = pullback_straight(f, S)
    second = {CylinderPoint(x, full.evaluate(x)) for x in d3
              if F12.contains(x) and full.evaluate(x) is not None}
    return frozenset(first | second)


class FoldSequence:
    """Folds ``G = F0 <- F1 <- ... <- Fn``; fold ``i + 1`` lives over fold ``i``'s total graph."""

    __slots__ = ("base", "folds")

    def __init__(self, base: Graph, folds: Iterable[SimpleFold] = ()):
        self.base = base
        self.folds = list(folds)
        g = base
        for k, fold in enumerate(self.folds):
            if fold.base != g:
                raise FoldError(f"fold {k} does not sit over the previous total graph")
            g = fold.total

    def __len__(self):
        return len(self.folds)

    @property
    def top(self) -> Graph:
        return self.folds[-1].total if self.folds else self.base

    def append(self, fold: SimpleFold) -> None:
        if fold.base != self.top:
            raise FoldError("fold does not sit over the current top graph")
        self.folds.append(fold)

    def push_point(self, p: CylinderPoint) -> CylinderPoint:
        for fold in reversed(self.folds):
            p = fold.phi_star(p)
        return p


def push_point(seq: FoldSequence, p: CylinderPoint) -> CylinderPoint:
    return seq.push_point(p)
