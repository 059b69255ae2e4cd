"""PL separators in ``G x (0, 1)``: face labeling, irreducible cores, branch surgery.

A complex is a list of straight segments, each living in the square of one
edge with coordinates ``(t, y)``.  Points with ``t = 0`` or ``t = 1`` sit on the
fiber over the corresponding vertex and are shared by every incident edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable

from .cylinder import CylinderPoint
from .graph_core import ONE, ZERO, Graph, GraphPoint, UnionFind, as_fraction

Pt = tuple  # (t, y)

MIN_TUBE_RADIUS = Fraction(1, 2 ** 20)
MAX_HALVINGS = 64


class ComplexError(ValueError):
    """The segment data does not describe a valid complex."""


class NotSeparatorError(ValueError):
    """The complex does not separate the bottom from the top."""


class SurgeryError(RuntimeError):
    """A local modification could not be carried out."""


class TubeTooThin(ValueError):
    """The requested tube leaves no room for a construction step."""

    def __init__(self, message: str, required: Fraction | None = None):
        super().__init__(message)
        self.required = required


# -- planar helpers ------------------------------------------------------

def _orient(a: Pt, b: Pt, c: Pt) -> Fraction:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def seg_intersection(a: Pt, b: Pt, c: Pt, d: Pt):
    """Intersect closed segments ``ab`` and ``cd`` (endpoints sorted).

    Returns ``None``, ``("pt", P)`` or ``("overlap", P, Q)``.
    """
    if max(a[0], b[0]) < min(c[0], d[0]) or max(c[0], d[0]) < min(a[0], b[0]):
        return None
    if max(a[1], b[1]) < min(c[1], d[1]) or max(c[1], d[1]) < min(a[1], b[1]):
        return None
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    if d1 == 0 and d2 == 0:
        lo, hi = max(a, c), min(b, d)
        if lo < hi:
            return ("overlap", lo, hi)
        if lo == hi:
            return ("pt", lo)
        return None
    if (d1 > 0 and d2 > 0) or (d1 < 0 and d2 < 0) or (d3 > 0 and d4 > 0) or (d3 < 0 and d4 < 0):
        return None
    if d1 == 0:
        return ("pt", a)
    if d2 == 0:
        return ("pt", b)
    if d3 == 0:
        return ("pt", c)
    if d4 == 0:
        return ("pt", d)
    s = d1 / (d1 - d2)
    return ("pt", (a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])))


def value_at(p: Pt, q: Pt, t: Fraction) -> Fraction:
    if p[0] == q[0]:
        raise ValueError("vertical segment has no single value")
    return p[1] + (q[1] - p[1]) * (t - p[0]) / (q[0] - p[0])


def _seg_hits_box(p: Pt, q: Pt, x0, x1, y0, y1) -> bool:
    """Whether the closed segment ``pq`` meets the closed box (Liang-Barsky)."""
    lo, hi = ZERO, ONE
    dx, dy = q[0] - p[0], q[1] - p[1]
    for num_d, lo_b, hi_b, start in ((dx, x0, x1, p[0]), (dy, y0, y1, p[1])):
        if num_d == 0:
            if start < lo_b or start > hi_b:
                return False
            continue
        a, b = (lo_b - start) / num_d, (hi_b - start) / num_d
        if a > b:
            a, b = b, a
        lo, hi = max(lo, a), min(hi, b)
        if lo > hi:
            return False
    return True


# -- complexes -----------------------------------------------------------

Segment = tuple  # (edge, p, q) with p < q lexicographically


def make_segment(edge: str, p, q) -> Segment:
    p = (as_fraction(p[0]), as_fraction(p[1]))
    q = (as_fraction(q[0]), as_fraction(q[1]))
    if p == q:
        raise ComplexError(f"zero-length segment on edge {edge!r}")
    return (edge, min(p, q), max(p, q))


class PLComplex:
    """A finite union of segments in the edge squares of ``G x (0, 1)``."""

    __slots__ = ("graph", "segments", "_nodes", "_by_edge")

    def __init__(self, graph: Graph, segments: Iterable, *, check: bool = True):
        self.graph = graph
        segs = {make_segment(e, p, q) for e, p, q in segments}
        order = {e: i for i, e in enumerate(graph.edge_ids)}
        for e, _, _ in segs:
            if e not in order:
                raise ComplexError(f"unknown edge {e!r}")
        self.segments = tuple(sorted(segs, key=lambda s: (order[s[0]], s[1], s[2])))
        self._nodes = None
        self._by_edge: dict = {}
        for i, s in enumerate(self.segments):
            self._by_edge.setdefault(s[0], []).append(i)
        if check:
            self.validate()

    def __eq__(self, other):
        return isinstance(other, PLComplex) and self.graph == other.graph and \
            self.segments == other.segments

    def __hash__(self):
        return hash(self.segments)

    def __len__(self):
        return len(self.segments)

    def __repr__(self):
        return f"PLComplex({len(self.segments)} segments)"

    def on_edge(self, e: str) -> list[int]:
        return self._by_edge.get(e, [])

    def node_key(self, e: str, p: Pt):
        edge = self.graph.edges[e]
        if p[0] == 0:
            return ("v", edge.tail, p[1])
        if p[0] == 1:
            return ("v", edge.head, p[1])
        return ("e", e, p[0], p[1])

    def node_point(self, key) -> CylinderPoint:
        if key[0] == "v":
            return CylinderPoint(GraphPoint(vertex=key[1]), key[2])
        return CylinderPoint(GraphPoint(edge=key[1], t=key[2]), key[3])

    def nodes(self) -> dict:
        """Node key -> list of ``(segment index, end)`` with end 0 for ``p``, 1 for ``q``."""
        if self._nodes is None:
            out: dict = {}
            for i, (e, p, q) in enumerate(self.segments):
                out.setdefault(self.node_key(e, p), []).append((i, 0))
                out.setdefault(self.node_key(e, q), []).append((i, 1))
            self._nodes = out
        return self._nodes

    def has_vertical(self) -> bool:
        return any(p[0] == q[0] for _, p, q in self.segments)

    def validate(self) -> None:
        for e, p, q in self.segments:
            for t, y in (p, q):
                if not (ZERO <= t <= ONE):
                    raise ComplexError(f"parameter {t} outside [0, 1] on edge {e!r}")
                if not (ZERO < y < ONE):
                    raise ComplexError(f"height {y} outside (0, 1) on edge {e!r}")
            if p[0] == q[0] and p[0] in (ZERO, ONE):
                raise ComplexError(f"vertical segment inside a vertex fiber on edge {e!r}")
        for e in self.graph.edge_ids:
            idx = sorted(self.on_edge(e), key=lambda i: self.segments[i][1][0])
            for n, i in enumerate(idx):
                _, a, b = self.segments[i]
                for j in idx[n + 1:]:
                    _, c, d = self.segments[j]
                    if c[0] > b[0]:
                        break
                    hit = seg_intersection(a, b, c, d)
                    if hit is None:
                        continue
                    if hit[0] == "overlap":
                        raise ComplexError(f"overlapping segments on edge {e!r}")
                    P = hit[1]
                    if P not in (a, b) or P not in (c, d):
                        raise ComplexError(
                            f"segments on edge {e!r} meet away from shared endpoints at {P}")

    def normalized(self) -> "PLComplex":
        """Split at crossings, merge overlaps, and tilt vertical segments."""
        pieces = []
        for e in self.graph.edge_ids:
            idx = self.on_edge(e)
            cuts = {i: {self.segments[i][1], self.segments[i][2]} for i in idx}
            for n, i in enumerate(idx):
                _, a, b = self.segments[i]
                for j in idx[n + 1:]:
                    _, c, d = self.segments[j]
                    hit = seg_intersection(a, b, c, d)
                    if hit is None:
                        continue
                    for P in hit[1:]:
                        cuts[i].add(P)
                        cuts[j].add(P)
            for i in idx:
                pts = sorted(cuts[i])
                pieces.extend((e, u, v) for u, v in zip(pts, pts[1:]))
        M = PLComplex(self.graph, pieces, check=False)
        for e, p, q in M.segments:
            if p[0] == q[0] and p[0] in (ZERO, ONE):
                raise ComplexError(f"vertical segment inside a vertex fiber on edge {e!r}")
        M.validate()
        if not M.has_vertical():
            return M
        return _shear(M)

    def fiber_points(self, x: GraphPoint) -> list[Fraction]:
        """Sorted heights of the complex over ``x``."""
        ys = set()
        for e, t in self.graph.positions(x):
            for _, p, q in (self.segments[i] for i in self.on_edge(e)):
                if p[0] == q[0] == t:
                    raise ComplexError("fiber meets a vertical segment")
                if p[0] <= t <= q[0]:
                    ys.add(value_at(p, q, t))
        return sorted(ys)

    def fiber_count(self, x: GraphPoint) -> int:
        return len(self.fiber_points(x))

    def without(self, drop: Iterable[int]) -> "PLComplex":
        drop = set(drop)
        return PLComplex(self.graph, [s for i, s in enumerate(self.segments) if i not in drop],
                         check=False)


def _shear(M: PLComplex) -> PLComplex:
    """Tilt vertical segments by moving interior nodes right in proportion to height."""
    eta = Fraction(1, 2)
    for e, p, q in M.segments:
        for t in (p[0], q[0]):
            if ZERO < t < ONE:
                eta = min(eta, t / 2, (ONE - t) / 2)
    for _ in range(MAX_HALVINGS):
        segs = []
        for e, p, q in M.segments:
            segs.append((e, _shift(p, eta), _shift(q, eta)))
        try:
            out = PLComplex(M.graph, segs)
        except ComplexError:
            eta /= 2
            continue
        if not out.has_vertical():
            return out
        eta /= 2
    raise ComplexError("could not tilt vertical segments")


def _shift(p: Pt, eta: Fraction) -> Pt:
    if p[0] in (ZERO, ONE):
        return p
    return (p[0] + eta * p[1], p[1])


# -- faces ---------------------------------------------------------------

BOTTOM = ("bottom",)
TOP = ("top",)


class FaceLabeling:
    """Faces of the complement of a complex, glued across fibers.

    Nodes of the face graph are slab cells ``("c", e, j, i)`` and fiber gaps
    ``("f", e, x, g)`` / ``("vf", v, g)``.
    """

    def __init__(self, M: PLComplex):
        self.M = M
        self.uf = UnionFind()
        self.uf.add(BOTTOM)
        self.uf.add(TOP)
        self._xs: dict = {}
        self._span: dict = {}
        self._fibers: dict = {}
        g = M.graph
        for e in g.edge_ids:
            self._build_edge(e)
        for v in g.vertices:
            self._build_vertex(v)
        self.bottom = self.uf.find(BOTTOM)
        self.top = self.uf.find(TOP)
        self.separates = self.bottom != self.top

    # construction
    def _build_edge(self, e: str):
        M = self.M
        segs = [M.segments[i] for i in M.on_edge(e)]
        idx = M.on_edge(e)
        xs = sorted({ZERO, ONE} | {p[0] for _, p, _ in segs} | {q[0] for _, _, q in segs})
        self._xs[e] = xs
        for j in range(len(xs) - 1):
            x0, x1 = xs[j], xs[j + 1]
            mid = (x0 + x1) / 2
            span = [i for i in idx if M.segments[i][1][0] <= x0 and M.segments[i][2][0] >= x1]
            span.sort(key=lambda i: value_at(M.segments[i][1], M.segments[i][2], mid))
            self._span[(e, j)] = span
            for c in range(len(span) + 1):
                self.uf.add(("c", e, j, c))
            self.uf.union(("c", e, j, 0), BOTTOM)
            self.uf.union(("c", e, j, len(span)), TOP)
        for j in range(1, len(xs) - 1):
            x = xs[j]
            gaps = self._gaps(self._blockers(e, x))
            self._fibers[(e, x)] = gaps
            for gi, (lo, hi) in enumerate(gaps):
                node = ("f", e, x, gi)
                self.uf.add(node)
                ym = (lo + hi) / 2
                self.uf.union(node, self._cell(e, j - 1, x, ym))
                self.uf.union(node, self._cell(e, j, x, ym))
            self.uf.union(("f", e, x, 0), BOTTOM)
            self.uf.union(("f", e, x, len(gaps) - 1), TOP)

    def _build_vertex(self, v: str):
        g = self.M.graph
        block = []
        ends = []
        for e, t, _ in g.incident(v):
            block.extend(self._blockers(e, t))
            ends.append((e, t))
        gaps = self._gaps(block)
        self._fibers[("v", v)] = gaps
        for gi, (lo, hi) in enumerate(gaps):
            node = ("vf", v, gi)
            self.uf.add(node)
            ym = (lo + hi) / 2
            for e, t in ends:
                j = 0 if t == 0 else len(self._xs[e]) - 2
                self.uf.union(node, self._cell(e, j, t, ym))
        self.uf.union(("vf", v, 0), BOTTOM)
        self.uf.union(("vf", v, len(gaps) - 1), TOP)

    def _blockers(self, e: str, x: Fraction) -> list:
        M = self.M
        out = []
        for i in M.on_edge(e):
            _, p, q = M.segments[i]
            if p[0] == q[0] == x:
                out.append((p[1], q[1]) if p[1] < q[1] else (q[1], p[1]))
            elif p[0] <= x <= q[0] and p[0] != q[0]:
                y = value_at(p, q, x)
                out.append((y, y))
        return out

    @staticmethod
    def _gaps(block: list) -> list:
        gaps = []
        cur = ZERO
        for lo, hi in sorted(block):
            if lo > cur:
                gaps.append((cur, lo))
            cur = max(cur, hi)
        gaps.append((cur, ONE))
        return gaps

    def _cell(self, e: str, j: int, x: Fraction, y: Fraction):
        M = self.M
        below = 0
        for i in self._span[(e, j)]:
            _, p, q = M.segments[i]
            if value_at(p, q, x) < y:
                below += 1
        return ("c", e, j, below)

    # queries
    def face(self, node):
        return self.uf.find(node)

    def label_of_face(self, root) -> str:
        if root == self.bottom and root == self.top:
            return "conflict"
        if root == self.bottom:
            return "R0"
        if root == self.top:
            return "R1"
        return "unreached"

    def locate(self, e: str, t: Fraction, y: Fraction):
        """Face root containing the point ``(t, y)`` of the square of ``e``."""
        g = self.M.graph
        edge = g.edges[e]
        if t == 0 or t == 1:
            v = edge.tail if t == 0 else edge.head
            gaps = self._fibers[("v", v)]
            return self.face(("vf", v, self._gap_index(gaps, y)))
        xs = self._xs[e]
        if (e, t) in self._fibers:
            return self.face(("f", e, t, self._gap_index(self._fibers[(e, t)], y)))
        j = max(k for k in range(len(xs) - 1) if xs[k] < t)
        M = self.M
        below = 0
        for i in self._span[(e, j)]:
            _, p, q = M.segments[i]
            h = value_at(p, q, t)
            if h == y:
                raise ValueError("point lies on the complex")
            if h < y:
                below += 1
        return self.face(("c", e, j, below))

    def label_at(self, e: str, t: Fraction, y: Fraction) -> str:
        return self.label_of_face(self.locate(e, t, y))

    @staticmethod
    def _gap_index(gaps, y):
        for gi, (lo, hi) in enumerate(gaps):
            if lo < y < hi or (gi == 0 and y == 0) or (gi == len(gaps) - 1 and y == 1):
                return gi
        raise ValueError("point lies on the complex")

    def segment_sides(self, i: int) -> tuple:
        """Face roots on the two sides of segment ``i``."""
        M = self.M
        e, p, q = M.segments[i]
        xs = self._xs[e]
        if p[0] == q[0]:
            j = xs.index(p[0])
            ym = (p[1] + q[1]) / 2
            return (self.face(self._cell(e, j - 1, p[0], ym)), self.face(self._cell(e, j, p[0], ym)))
        j = xs.index(p[0])
        c = self._span[(e, j)].index(i)
        return (self.face(("c", e, j, c)), self.face(("c", e, j, c + 1)))


def label_faces(M: PLComplex) -> FaceLabeling:
    return FaceLabeling(M)


def separates(M: PLComplex) -> bool:
    return FaceLabeling(M).separates


def irreducible_core(M: PLComplex) -> PLComplex:
    """The boundary of the bottom face of the complement of the top face's boundary."""
    lab = FaceLabeling(M)
    if not lab.separates:
        raise NotSeparatorError("complex does not separate bottom from top")
    keep = [i for i in range(len(M.segments))
            if sum(side == lab.top for side in lab.segment_sides(i)) == 1]
    M1 = PLComplex(M.graph, [M.segments[i] for i in keep], check=False)
    lab1 = FaceLabeling(M1)
    keep2 = [i for i in range(len(M1.segments))
             if sum(side == lab1.bottom for side in lab1.segment_sides(i)) == 1]
    return PLComplex(M.graph, [M1.segments[i] for i in keep2], check=False)


# -- local structure -----------------------------------------------------

def _rays(M: PLComplex, key) -> list:
    """Incident segment ends at a node as ``(segment index, direction vector)``."""
    out = []
    for i, end in M.nodes()[key]:
        _, p, q = M.segments[i]
        a, b = (p, q) if end == 0 else (q, p)
        out.append((i, (b[0] - a[0], b[1] - a[1])))
    return out


def classify_node(M: PLComplex, key) -> str:
    """One of ``regular``, ``tip``, ``branch`` or ``unsupported``."""
    inc = M.nodes()[key]
    if key[0] == "e":
        left = right = 0
        for i, end in inc:
            if end == 0:
                right += 1
            else:
                left += 1
        if (left, right) == (1, 1):
            return "regular"
        if (left, right) in ((2, 0), (0, 2)):
            return "tip"
        return "branch"
    v = key[1]
    counts: dict = {}
    for i, end in inc:
        e, p, q = M.segments[i]
        t = p[0] if end == 0 else q[0]
        counts[(e, t)] = counts.get((e, t), 0) + 1
    ends = [(e, t) for e, t, _ in M.graph.incident(v)]
    if all(counts.get(x, 0) == 1 for x in ends) and len(inc) == len(ends):
        return "regular"
    if len(inc) == 2 and len(counts) == 1:
        return "tip"
    return "unsupported"


def turning_points(M: PLComplex) -> frozenset[CylinderPoint]:
    return frozenset(M.node_point(k) for k in M.nodes() if classify_node(M, k) == "tip")


def _angle_cmp(u, v) -> int:
    def half(w):
        return 0 if (w[1] > 0 or (w[1] == 0 and w[0] > 0)) else 1
    hu, hv = half(u), half(v)
    if hu != hv:
        return hu - hv
    cr = u[0] * v[1] - u[1] * v[0]
    return -1 if cr > 0 else (1 if cr < 0 else 0)


def _sector_direction(u, v):
    cr = u[0] * v[1] - u[1] * v[0]
    nu = abs(u[0]) + abs(u[1])
    nv = abs(v[0]) + abs(v[1])
    s = (u[0] / nu + v[0] / nv, u[1] / nu + v[1] / nv)
    if cr > 0:
        return s
    if cr < 0:
        return (-s[0], -s[1])
    return (-u[1], u[0])


def _inf_norm(d):
    return max(abs(d[0]), abs(d[1]))


@dataclass(frozen=True)
class Tube:
    """Points within vertical distance ``radius`` of ``center``, inside ``0 < y < 1``."""

    center: PLComplex
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "radius", as_fraction(self.radius))

    def check_radius(self) -> None:
        if self.radius <= 0 or self.radius < MIN_TUBE_RADIUS:
            raise TubeTooThin(f"tube radius {self.radius} is below the working floor",
                              MIN_TUBE_RADIUS)

    def contains_point(self, e: str, t: Fraction, y: Fraction) -> bool:
        if not ZERO < y < ONE:
            return False
        C = self.center
        for x_e, x_t in C.graph.positions(C.graph.point(e, t)):
            for i in C.on_edge(x_e):
                _, p, q = C.segments[i]
                if p[0] <= x_t <= q[0] and p[0] != q[0]:
                    if abs(value_at(p, q, x_t) - y) < self.radius:
                        return True
        return False

    def contains(self, M: PLComplex) -> bool:
        C = self.center
        for e, p, q in M.segments:
            if not (self.contains_point(e, p[0], p[1]) and self.contains_point(e, q[0], q[1])):
                return False
            if p[0] == q[0]:
                continue
            cuts = sorted({p[0], q[0]} | {s[k][0] for i in C.on_edge(e) for s in [C.segments[i]]
                                           for k in (1, 2) if p[0] < s[k][0] < q[0]})
            for x0, x1 in zip(cuts, cuts[1:]):
                y0, y1 = value_at(p, q, x0), value_at(p, q, x1)
                ok = False
                for i in C.on_edge(e):
                    _, c, d = C.segments[i]
                    if c[0] <= x0 and d[0] >= x1 and c[0] != d[0]:
                        if abs(value_at(c, d, x0) - y0) < self.radius and \
                                abs(value_at(c, d, x1) - y1) < self.radius:
                            ok = True
                            break
                if not ok:
                    return False
        return True


def _max_slope(dirs) -> Fraction:
    return max((abs(d[1] / d[0]) for d in dirs if d[0] != 0), default=ONE)


def _surgery_candidate(M: PLComplex, key, rho: Fraction, pairing: str, lab: FaceLabeling):
    e, tp, yp = key[1], key[2], key[3]
    rays = _rays(M, key)
    rays.sort(key=cmp_to_key(lambda a, b: _angle_cmp(a[1], b[1])))
    n = len(rays)
    sectors = []
    for k in range(n):
        u, v = rays[k][1], rays[(k + 1) % n][1]
        d = _sector_direction(u, v)
        nd = _inf_norm(d)
        sample = (tp + rho / 4 * d[0] / nd, yp + rho / 4 * d[1] / nd)
        sectors.append((k, (k + 1) % n, d, lab.label_at(e, sample[0], sample[1])))
    labels = [s[3] for s in sectors]
    if any(lbl not in ("R0", "R1") for lbl in labels):
        raise SurgeryError(f"sector near {key} is not adjacent to a labeled face")
    if any(labels[k] == labels[(k + 1) % n] for k in range(n)):
        raise SurgeryError(f"faces around {key} do not alternate")
    cut = {}
    new = []
    for k, (i, d) in enumerate(rays):
        sign = 1 if d[0] > 0 else -1
        qx = tp + sign * rho
        qy = yp + d[1] / d[0] * (qx - tp)
        cut[k] = (qx, qy)
        _, p, q = M.segments[i]
        far = q if d[0] > 0 else p
        new.append((e, (qx, qy), far))
    for k0, k1, d, lbl in sectors:
        if lbl != pairing:
            continue
        nd = _inf_norm(d)
        c = (tp + rho / 2 * d[0] / nd, yp + rho / 2 * d[1] / nd)
        new.append((e, cut[k0], c))
        new.append((e, cut[k1], c))
    drop = {i for i, _ in rays}
    segs = [s for j, s in enumerate(M.segments) if j not in drop] + new
    return PLComplex(M.graph, segs)


def _surgery_radius(M: PLComplex, key, tube: Tube | None) -> Fraction:
    e, tp, yp = key[1], key[2], key[3]
    rays = _rays(M, key)
    dirs = [d for _, d in rays]
    sigma = max(_max_slope(dirs), ONE)
    rho = min([abs(d[0]) for d in dirs] + [tp, ONE - tp]) / 2
    own = {i for i, _ in rays}
    for _ in range(MAX_HALVINGS):
        h = sigma * rho
        ok = ZERO < yp - h and yp + h < ONE
        if ok and tube is not None:
            ok = (2 * sigma + 1) * rho <= tube.radius / 4
        if ok:
            for j, (e2, p, q) in enumerate(M.segments):
                if e2 == e and j not in own and _seg_hits_box(p, q, tp - rho, tp + rho, yp - h, yp + h):
                    ok = False
                    break
        if ok:
            return rho
        rho /= 2
    raise TubeTooThin(f"no room to remove the branch point at {key}",
                      None if tube is None else tube.radius * 2)


def remove_branch_points(M: PLComplex, tube: Tube | None = None,
                         prefer: str = "R0") -> PLComplex:
    """Replace every branch point by wedges, keeping separation and the tube."""
    if M.has_vertical():
        M = M.normalized()
    order = (prefer, "R1" if prefer == "R0" else "R0")
    while True:
        branch = sorted(k for k in M.nodes() if classify_node(M, k) != "regular"
                        and classify_node(M, k) != "tip")
        if not branch:
            return M
        key = branch[0]
        if key[0] == "v" or classify_node(M, key) == "unsupported":
            raise SurgeryError(f"branch point {key} lies over a vertex of the graph")
        if len(M.nodes()[key]) % 2:
            raise SurgeryError(f"odd number of arcs at {key}")
        lab = FaceLabeling(M)
        rho = _surgery_radius(M, key, tube)
        done = None
        for pairing in order:
            try:
                cand = _surgery_candidate(M, key, rho, pairing, lab)
            except ComplexError:
                continue
            if not separates(cand):
                continue
            if tube is not None and not tube.contains(cand):
                continue
            done = cand
            break
        if done is None:
            raise SurgeryError(f"neither wedge pairing at {key} keeps separation")
        M = done


def _tip_arms(M: PLComplex, key):
    """Tip location ``(edge, t, y)``, side of its arms (+1 or -1), and arm segment indices."""
    inc = M.nodes()[key]
    arms = [i for i, _ in inc]
    e = M.segments[arms[0]][0]
    i, end = inc[0]
    _, p, q = M.segments[i]
    here = p if end == 0 else q
    side = 1 if end == 0 else -1
    return e, here[0], here[1], side, arms


def nudge_generic(M: PLComplex, forbidden: Iterable[GraphPoint] = (), tube: Tube | None = None,
                  ) -> PLComplex:
    """Move turning points so their projections are distinct and avoid ``forbidden``."""
    forbidden = set(forbidden)
    g = M.graph
    while True:
        tips = sorted(k for k in M.nodes() if classify_node(M, k) == "tip")
        seen: set = set()
        target = None
        for k in tips:
            e, t, y, side, arms = _tip_arms(M, k)
            x = g.point(e, t)
            if x in forbidden or x in seen:
                target = k
                break
            seen.add(x)
        if target is None:
            return M
        taken = {g.point(*_tip_arms(M, k)[:2]) for k in tips if k != target}
        M = _nudge_one(M, target, forbidden | taken, tube)


def _nudge_one(M: PLComplex, key, avoid: set, tube: Tube | None) -> PLComplex:
    g = M.graph
    e, tp, yp, side, arms = _tip_arms(M, key)
    others = {s[k][0] for s in (M.segments[i] for i in M.on_edge(e)) for k in (1, 2)}
    others |= {ZERO, ONE}
    ahead = [x for x in others if (x - tp) * side > 0]
    gap = min(abs(x - tp) for x in ahead)
    segs = [M.segments[i] for i in arms]
    dirs = [(q[0] - p[0], q[1] - p[1]) for _, p, q in segs]
    sigma = max(_max_slope(dirs), ONE)
    delta = gap / 4
    for _ in range(MAX_HALVINGS):
        tn = tp + side * delta
        ok = g.point(e, tn) not in avoid
        if ok and tube is not None:
            ok = 4 * delta * sigma <= tube.radius / 4
        if ok:
            tc = tp + 2 * side * delta
            cuts = []
            for _, p, q in segs:
                far = q if side > 0 else p
                cuts.append(((tc, value_at(p, q, tc)), far))
            ym = (value_at(segs[0][1], segs[0][2], tn) + value_at(segs[1][1], segs[1][2], tn)) / 2
            tipnew = (tn, ym)
            new = []
            for c, far in cuts:
                new.append((e, c, far))
                new.append((e, c, tipnew))
            rest = [s for j, s in enumerate(M.segments) if j not in set(arms)]
            try:
                cand = PLComplex(g, rest + new)
            except ComplexError:
                ok = False
            else:
                if tube is None or tube.contains(cand):
                    return cand
        delta /= 2
    raise TubeTooThin(f"no room to move the turning point at {key}",
                      None if tube is None else tube.radius * 2)
