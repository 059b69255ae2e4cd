"""Finite graphs with rational edge coordinates and their closed subsets.

Every edge is parameterized by ``t`` in ``[0, 1]`` running from its tail to its
head.  A point is either a vertex or an edge-interior parameter; the
constructor :meth:`Graph.point` normalizes ``t = 0`` and ``t = 1`` to the
corresponding vertex so that equal points always compare equal.

:class:`ClosedSet` stores a finite union of closed intervals and isolated
points.  Regular sets (closed, finitely many components, none degenerate) are
closed sets for which :meth:`ClosedSet.is_regular` holds.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        raise TypeError("floats are not accepted; use exact rationals")
    return Fraction(value)


class UnionFind:
    __slots__ = ("parent",)

    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)

    def groups(self) -> list[list]:
        out: dict = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return list(out.values())


class GraphPoint:
    """A point of a graph: a vertex, or an edge with interior parameter ``t``."""

    __slots__ = ("vertex", "edge", "t", "_key")

    def __init__(self, vertex: str | None = None, edge: str | None = None, t=None):
        if (vertex is None) == (edge is None):
            raise ValueError("a point is either a vertex or an edge position")
        self.vertex = vertex
        self.edge = edge
        self.t = None if t is None else as_fraction(t)
        if vertex is not None:
            self._key = (0, vertex, ZERO)
        else:
            if not ZERO < self.t < ONE:
                raise ValueError("edge points need 0 < t < 1; use Graph.point")
            self._key = (1, edge, self.t)

    @property
    def key(self):
        return self._key

    @property
    def is_vertex(self) -> bool:
        return self.vertex is not None

    def __eq__(self, other):
        return isinstance(other, GraphPoint) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __lt__(self, other):
        return self._key < other._key

    def __repr__(self):
        if self.vertex is not None:
            return f"GraphPoint({self.vertex!r})"
        return f"GraphPoint({self.edge!r}@{self.t})"


@dataclass(frozen=True)
class Edge:
    tail: str
    head: str
    length: Fraction = ONE


# A direction leaving a point: (edge, t, sign).  At a vertex the direction along
# an edge leaving its tail is (e, 0, +1) and leaving its head is (e, 1, -1).
Direction = tuple


class Graph:
    """A finite 1-complex.  Loops and parallel edges are allowed."""

    __slots__ = ("vertices", "edges", "edge_ids", "_incident", "_vset")

    def __init__(self, vertices: Iterable[str], edges):
        self.vertices = tuple(vertices)
        self._vset = frozenset(self.vertices)
        if len(self._vset) != len(self.vertices):
            raise ValueError("duplicate vertex id")
        items = list(edges.items()) if isinstance(edges, dict) else list(edges)
        self.edges: dict[str, Edge] = {}
        for eid, edge in items:
            if not isinstance(edge, Edge):
                edge = Edge(edge[0], edge[1], as_fraction(edge[2]) if len(edge) > 2 else ONE)
            if eid in self.edges:
                raise ValueError(f"duplicate edge id {eid!r}")
            if edge.tail not in self._vset or edge.head not in self._vset:
                raise ValueError(f"edge {eid!r} references an unknown vertex")
            if edge.length <= 0:
                raise ValueError(f"edge {eid!r} must have positive length")
            self.edges[eid] = edge
        self.edge_ids = tuple(self.edges)
        self._incident: dict[str, list[Direction]] = {v: [] for v in self.vertices}
        for eid, edge in self.edges.items():
            self._incident[edge.tail].append((eid, ZERO, 1))
            self._incident[edge.head].append((eid, ONE, -1))

    # -- basic structure -------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, Graph) and self.vertices == other.vertices
                and self.edges == other.edges)

    def __hash__(self):
        return hash((self.vertices, tuple(self.edges.items())))

    def __repr__(self):
        return f"Graph({len(self.vertices)} vertices, {len(self.edges)} edges)"

    def has_vertex(self, v: str) -> bool:
        return v in self._vset

    def degree(self, v: str) -> int:
        return len(self._incident[v])

    def incident(self, v: str) -> list[Direction]:
        return list(self._incident[v])

    def branch_points(self) -> frozenset[GraphPoint]:
        return frozenset(GraphPoint(vertex=v) for v in self.vertices if self.degree(v) >= 3)

    def endpoints(self) -> frozenset[GraphPoint]:
        return frozenset(GraphPoint(vertex=v) for v in self.vertices if self.degree(v) == 1)

    def special_points(self) -> frozenset[GraphPoint]:
        return self.branch_points() | self.endpoints()

    def point(self, edge: str, t) -> GraphPoint:
        t = as_fraction(t)
        if not ZERO <= t <= ONE:
            raise ValueError(f"parameter {t} outside [0, 1]")
        e = self.edges[edge]
        if t == 0:
            return GraphPoint(vertex=e.tail)
        if t == 1:
            return GraphPoint(vertex=e.head)
        return GraphPoint(edge=edge, t=t)

    def vertex(self, v: str) -> GraphPoint:
        if v not in self._vset:
            raise KeyError(v)
        return GraphPoint(vertex=v)

    def positions(self, p: GraphPoint) -> list[tuple[str, Fraction]]:
        """All (edge, t) coordinates naming ``p``."""
        if p.vertex is None:
            return [(p.edge, p.t)]
        return [(e, t) for e, t, _ in self._incident[p.vertex]]

    def directions(self, p: GraphPoint) -> list[Direction]:
        if p.vertex is None:
            return [(p.edge, p.t, -1), (p.edge, p.t, 1)]
        return list(self._incident[p.vertex])

    def direction_target(self, d: Direction) -> GraphPoint:
        """The point at the far end of the edge piece a direction runs along."""
        e, t, sign = d
        return self.point(e, ONE if sign > 0 else ZERO)

    def components(self) -> list[frozenset[str]]:
        """Vertex sets of the connected components."""
        uf = UnionFind()
        for v in self.vertices:
            uf.add(v)
        for e in self.edges.values():
            uf.union(e.tail, e.head)
        return sorted((frozenset(g) for g in uf.groups()), key=lambda s: min(s))

    def is_connected(self) -> bool:
        return len(self.components()) <= 1

    def subgraph(self, edge_ids: Iterable[str], extra_vertices: Iterable[str] = ()) -> "Graph":
        keep = set(edge_ids)
        verts = set(extra_vertices)
        for eid in keep:
            verts.add(self.edges[eid].tail)
            verts.add(self.edges[eid].head)
        return Graph([v for v in self.vertices if v in verts],
                     [(eid, self.edges[eid]) for eid in self.edge_ids if eid in keep])


Interval = tuple  # (a, b) with a <= b


def _merge(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    out: list[list[Fraction]] = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class OpenComponent:
    """A component of the complement of a closed set.

    ``pieces`` are open edge intervals ``(edge, lo, hi)``; ``vertices`` are the
    vertices lying in the component; ``boundary`` is its topological boundary.
    """

    pieces: tuple
    vertices: frozenset
    boundary: frozenset

    def meets(self, A: "ClosedSet") -> bool:
        for e, lo, hi in self.pieces:
            for a, b in A.ivals.get(e, ()):
                if a < hi and b > lo:
                    return True
        return any(v in A.verts for v in self.vertices)

    def closure(self, graph: Graph) -> "ClosedSet":
        ivals: dict = {}
        for e, lo, hi in self.pieces:
            ivals.setdefault(e, []).append((lo, hi))
        return ClosedSet(graph, ivals, self.vertices)


class ClosedSet:
    """A closed subset of a graph: finitely many closed intervals and points."""

    __slots__ = ("graph", "ivals", "verts")

    def __init__(self, graph: Graph, ivals=None, verts: Iterable[str] = ()):
        self.graph = graph
        clean: dict[str, tuple[Interval, ...]] = {}
        vs = set(verts)
        for v in vs:
            if not graph.has_vertex(v):
                raise ValueError(f"unknown vertex {v!r}")
        for e, lst in (ivals or {}).items():
            if e not in graph.edges:
                raise ValueError(f"unknown edge {e!r}")
            fixed = []
            for a, b in lst:
                a, b = as_fraction(a), as_fraction(b)
                if a > b:
                    raise ValueError(f"reversed interval [{a}, {b}] on edge {e!r}")
                if a < 0 or b > 1:
                    raise ValueError(f"interval [{a}, {b}] leaves [0, 1] on edge {e!r}")
                fixed.append((a, b))
            merged = []
            edge = graph.edges[e]
            for a, b in _merge(fixed):
                if a == 0:
                    vs.add(edge.tail)
                if b == 1:
                    vs.add(edge.head)
                if a == b and a in (ZERO, ONE):
                    continue
                merged.append((a, b))
            if merged:
                clean[e] = tuple(merged)
        self.ivals = {e: clean[e] for e in graph.edge_ids if e in clean}
        self.verts = frozenset(vs)

    # -- constructors ----------------------------------------------------
    @classmethod
    def empty(cls, graph: Graph) -> "ClosedSet":
        return cls(graph)

    @classmethod
    def full(cls, graph: Graph) -> "ClosedSet":
        return cls(graph, {e: [(ZERO, ONE)] for e in graph.edge_ids}, graph.vertices)

    @classmethod
    def from_points(cls, graph: Graph, points: Iterable[GraphPoint]) -> "ClosedSet":
        ivals: dict = {}
        verts = []
        for p in points:
            if p.vertex is not None:
                verts.append(p.vertex)
            else:
                ivals.setdefault(p.edge, []).append((p.t, p.t))
        return cls(graph, ivals, verts)

    # -- comparisons -----------------------------------------------------
    def __eq__(self, other):
        return (isinstance(other, ClosedSet) and self.graph == other.graph
                and self.ivals == other.ivals and self.verts == other.verts)

    def __hash__(self):
        return hash((tuple(self.ivals.items()), self.verts))

    def __repr__(self):
        parts = [f"{e}:{[(str(a), str(b)) for a, b in iv]}" for e, iv in self.ivals.items()]
        return f"ClosedSet({', '.join(parts)}; verts={sorted(self.verts)})"

    def is_empty(self) -> bool:
        return not self.ivals and not self.verts

    def contains(self, p: GraphPoint) -> bool:
        if p.vertex is not None:
            return p.vertex in self.verts
        return any(a <= p.t <= b for a, b in self.ivals.get(p.edge, ()))

    def __contains__(self, p: GraphPoint) -> bool:
        return self.contains(p)

    def issubset(self, other: "ClosedSet") -> bool:
        return self.intersection(other) == self

    def is_finite(self) -> bool:
        return all(a == b for iv in self.ivals.values() for a, b in iv)

    def points(self) -> frozenset[GraphPoint]:
        """The points of a finite closed set."""
        if not self.is_finite():
            raise ValueError("set is not finite")
        pts = {GraphPoint(vertex=v) for v in self.verts}
        for e, iv in self.ivals.items():
            pts.update(GraphPoint(edge=e, t=a) for a, _ in iv)
        return frozenset(pts)

    def total_length(self) -> Fraction:
        return sum((b - a for iv in self.ivals.values() for a, b in iv), ZERO)

    # -- set algebra -----------------------------------------------------
    def union(self, other: "ClosedSet") -> "ClosedSet":
        ivals = {e: list(iv) for e, iv in self.ivals.items()}
        for e, iv in other.ivals.items():
            ivals.setdefault(e, []).extend(iv)
        return ClosedSet(self.graph, ivals, self.verts | other.verts)

    __or__ = union

    def intersection(self, other: "ClosedSet") -> "ClosedSet":
        ivals: dict = {}
        for e, iv in self.ivals.items():
            for a, b in iv:
                for c, d in other.ivals.get(e, ()):
                    lo, hi = max(a, c), min(b, d)
                    if lo <= hi:
                        ivals.setdefault(e, []).append((lo, hi))
        return ClosedSet(self.graph, ivals, self.verts & other.verts)

    __and__ = intersection

    def _gaps(self, e: str) -> list[Interval]:
        """Open gaps of ``(0, 1)`` not covered by the intervals on edge ``e``."""
        gaps = []
        cur = ZERO
        for a, b in self.ivals.get(e, ()):
            if a > cur:
                gaps.append((cur, a))
            cur = max(cur, b)
        if cur < 1:
            gaps.append((cur, ONE))
        return gaps

    def complement_closure(self) -> "ClosedSet":
        """The closure of ``G minus self``."""
        g = self.graph
        ivals = {e: self._gaps(e) for e in g.edge_ids}
        verts = [v for v in g.vertices if v not in self.verts]
        return ClosedSet(g, ivals, verts)

    def closure_of_difference(self, other: "ClosedSet") -> "ClosedSet":
        """The closure of ``self minus other``."""
        g = self.graph
        ivals: dict = {}
        for e, iv in self.ivals.items():
            cuts = other.ivals.get(e, ())
            for a, b in iv:
                # walk the pieces of [a, b] left over after removing the cuts
                lo, untouched = a, True
                for c, d in cuts:
                    if d < a or c > b:
                        continue
                    if c > lo:
                        ivals.setdefault(e, []).append((lo, c))
                    lo, untouched = max(lo, d), False
                if lo < b or (untouched and lo == b):
                    ivals.setdefault(e, []).append((lo, b))
        verts = {v for v in self.verts if v not in other.verts}
        return ClosedSet(g, ivals, verts)

    def boundary(self) -> frozenset[GraphPoint]:
        """Topological boundary; finite for every closed set stored here."""
        return self.intersection(self.complement_closure()).points()

    # -- local structure -------------------------------------------------
    def germ(self, d: Direction) -> bool:
        """True when the set contains a short segment leaving along ``d``."""
        e, t, sign = d
        for a, b in self.ivals.get(e, ()):
            if sign > 0 and a <= t < b:
                return True
            if sign < 0 and a < t <= b:
                return True
        return False

    def local_radius(self, p: GraphPoint) -> Fraction:
        """A radius below which the set looks like a cone over its germs at ``p``."""
        r = ONE
        for e, t, sign in self.graph.directions(p):
            for a, b in self.ivals.get(e, ()):
                for x in (a, b):
                    if (x - t) * sign > 0:
                        r = min(r, abs(x - t))
            r = min(r, ONE - t if sign > 0 else t)
        return r

    def agrees_near(self, other: "ClosedSet", points: Iterable[GraphPoint]) -> Fraction | None:
        """Radius of a neighborhood of ``points`` on which the two sets coincide.

        Returns ``None`` when no such neighborhood exists.
        """
        r = ONE
        for p in points:
            if self.contains(p) != other.contains(p):
                return None
            for d in self.graph.directions(p):
                if self.germ(d) != other.germ(d):
                    return None
            r = min(r, self.local_radius(p), other.local_radius(p))
        return r

    def interior_contains(self, p: GraphPoint) -> bool:
        return self.contains(p) and all(self.germ(d) for d in self.graph.directions(p))

    # -- components ------------------------------------------------------
    def components(self) -> list["ClosedSet"]:
        g = self.graph
        uf = UnionFind()
        for v in self.verts:
            uf.add(("v", v))
        for e, iv in self.ivals.items():
            edge = g.edges[e]
            for a, b in iv:
                node = ("i", e, a, b)
                uf.add(node)
                if a == 0:
                    uf.union(node, ("v", edge.tail))
                if b == 1:
                    uf.union(node, ("v", edge.head))
        out = []
        for grp in uf.groups():
            ivals: dict = {}
            verts = []
            for node in grp:
                if node[0] == "v":
                    verts.append(node[1])
                else:
                    ivals.setdefault(node[1], []).append((node[2], node[3]))
            out.append(ClosedSet(g, ivals, verts))
        out.sort(key=_component_key)
        return out

    def is_regular(self) -> bool:
        return all(c.total_length() > 0 for c in self.components())

    def complement_components(self) -> list[OpenComponent]:
        """Components of ``G minus self`` with their boundaries."""
        g = self.graph
        uf = UnionFind()
        bnd: dict = {}
        for v in g.vertices:
            if v not in self.verts:
                uf.add(("v", v))
        for e in g.edge_ids:
            edge = g.edges[e]
            for lo, hi in self._gaps(e):
                node = ("p", e, lo, hi)
                uf.add(node)
                ends = []
                for x, v, at_end in ((lo, edge.tail, lo == 0), (hi, edge.head, hi == 1)):
                    if at_end:
                        if v in self.verts:
                            ends.append(GraphPoint(vertex=v))
                        else:
                            uf.union(node, ("v", v))
                    else:
                        ends.append(GraphPoint(edge=e, t=x))
                bnd[node] = ends
        out = []
        for grp in uf.groups():
            pieces = sorted((n[1], n[2], n[3]) for n in grp if n[0] == "p")
            verts = frozenset(n[1] for n in grp if n[0] == "v")
            boundary = frozenset(p for n in grp if n[0] == "p" for p in bnd[n])
            out.append(OpenComponent(tuple(pieces), verts, boundary))
        out.sort(key=lambda c: (c.pieces, sorted(c.vertices)))
        return out


def _component_key(c: ClosedSet):
    for e, iv in c.ivals.items():
        return (0, c.graph.edge_ids.index(e), iv[0])
    return (1, min(c.verts) if c.verts else "", ())


RegularSet = ClosedSet
FinitePointSet = frozenset


def regular_set(graph: Graph, ivals) -> ClosedSet:
    """Build a closed set and insist that it is regular."""
    A = ClosedSet(graph, ivals)
    if not A.is_regular():
        raise ValueError("set is not regular: it has a degenerate component")
    return A


def is_regular(graph: Graph, candidate) -> bool:
    """Decide regularity of a closed set or a raw per-edge interval collection."""
    if isinstance(candidate, ClosedSet):
        return candidate.is_regular()
    return ClosedSet(graph, candidate).is_regular()


def boundary(A: ClosedSet) -> frozenset[GraphPoint]:
    return A.boundary()


def components(A: ClosedSet) -> list[ClosedSet]:
    return A.components()


def complement_components(A: ClosedSet) -> list[OpenComponent]:
    return A.complement_components()


def has_consistent_complement(A: ClosedSet, B: Iterable[GraphPoint]) -> bool:
    B = frozenset(B)
    if not B <= A.boundary():
        raise ValueError("B must be contained in the boundary of A")
    for comp in A.complement_components():
        if not (comp.boundary <= B or not (comp.boundary & B)):
            return False
    return True


def cut_components(graph: Graph, B: Iterable[GraphPoint]) -> list[OpenComponent]:
    """Components of ``G minus B`` for a finite set ``B``."""
    return ClosedSet.from_points(graph, B).complement_components()


def side_of(A: ClosedSet, B: Iterable[GraphPoint]) -> ClosedSet:
    """Closure of the union of the components of ``G minus B`` that meet ``A``."""
    g = A.graph
    out = ClosedSet.empty(g)
    if A.is_empty():
        return out
    for comp in cut_components(g, B):
        if comp.meets(A):
            out = out.union(comp.closure(g))
    return out


def is_generic(graph: Graph, family: Iterable[Iterable[GraphPoint]]) -> bool:
    special = graph.special_points()
    seen: set = set()
    for pts in family:
        pts = set(pts)
        if pts & special or pts & seen:
            return False
        seen |= pts
    return True


def iter_edge_points(A: ClosedSet) -> Iterator[tuple[str, Fraction, Fraction]]:
    for e, iv in A.ivals.items():
        for a, b in iv:
            yield e, a, b
