"""Stairwell and broken stairwell structures, their checks, and construction from separators."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .cylinder import CylinderPoint, StraightSet, poly_clip, poly_eval, poly_simplify
from .graph_core import (
    ONE,
    ZERO,
    ClosedSet,
    Graph,
    GraphPoint,
    has_consistent_complement,
    is_generic,
)
from .separator import (
    FaceLabeling,
    NotSeparatorError,
    PLComplex,
    Tube,
    TubeTooThin,
    irreducible_core,
    nudge_generic,
    remove_branch_points,
    turning_points,
    value_at,
)

def proj(points: Iterable[CylinderPoint]) -> frozenset[GraphPoint]:
    return frozenset(p.base for p in points)


@dataclass(frozen=True, eq=False)
class Stairwell:
    graph: Graph
    levels: tuple
    alphas: tuple
    betas: tuple

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "alphas", tuple(frozenset(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(frozenset(b) for b in self.betas))

    @property
    def height(self) -> int:
        return len(self.levels)

    def __eq__(self, other):
        return (isinstance(other, Stairwell) and self.graph == other.graph
                and self.levels == other.levels and self.alphas == other.alphas
                and self.betas == other.betas)

    def __hash__(self):
        return hash(self.levels)

    def sheets(self) -> list[StraightSet]:
        return list(self.levels)


@dataclass(frozen=True, eq=False)
class BrokenStairwell:
    graph: Graph
    levels: tuple
    alphas: tuple
    betas: tuple
    gamma: frozenset
    pit: int
    P1: StraightSet
    P2: StraightSet

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "alphas", tuple(frozenset(a) for a in self.alphas))
        object.__setattr__(self, "betas", tuple(frozenset(b) for b in self.betas))
        object.__setattr__(self, "gamma", frozenset(self.gamma))

    @property
    def height(self) -> int:
        return len(self.levels)

    def __eq__(self, other):
        return (isinstance(other, BrokenStairwell) and self.graph == other.graph
                and self.levels == other.levels and self.alphas == other.alphas
                and self.betas == other.betas and self.gamma == other.gamma
                and self.pit == other.pit and self.P1 == other.P1 and self.P2 == other.P2)

    def __hash__(self):
        return hash((self.levels, self.pit))

    def sheets(self) -> list[StraightSet]:
        return list(self.levels) + [self.P1, self.P2]


# -- verification --------------------------------------------------------

def _chain_checks(G: Graph, levels, alphas, betas, extra_ends: dict) -> tuple[bool, str]:
    k = len(levels)
    if k == 0:
        return False, "(S1): no levels"
    if len(alphas) != k or len(betas) != k:
        return False, "(S2): need one alpha and one beta set per level"
    for i, S in enumerate(levels, 1):
        if S.graph != G:
            return False, f"(S1): level {i} lives over a different graph"
        if S.is_empty():
            return False, f"(S1): level {i} is empty"
    if alphas[0]:
        return False, "(S2): alpha_1 must be empty"
    if betas[-1]:
        return False, f"(S2): beta_{k} must be empty"
    for i in range(k):
        a, b = alphas[i], betas[i]
        extra = extra_ends.get(i + 1, frozenset())
        if a & b or a & extra or b & extra:
            return False, f"(S2): end pieces of level {i + 1} are not disjoint"
        if levels[i].end_set() != a | b | extra:
            return False, f"(S2): end set of level {i + 1} is not the union of its pieces"
        if i < k - 1 and betas[i] != alphas[i + 1]:
            return False, f"(S2): beta_{i + 1} differs from alpha_{i + 2}"
    for i in range(k - 1):
        if levels[i].base.agrees_near(levels[i + 1].base, proj(betas[i])) is None:
            return False, f"(S3): levels {i + 1} and {i + 2} differ near beta_{i + 1}"
    for i in range(k):
        base = levels[i].base
        for name, pts in (("alpha", alphas[i]), ("beta", betas[i])):
            if not has_consistent_complement(base, proj(pts)):
                return False, (f"(S4): level {i + 1} lacks consistent complement"
                               f" relative to {name}_{i + 1}")
    return True, "ok"


def validate_stairwell(G: Graph, s: Stairwell) -> tuple[bool, str]:
    """Check the five stairwell axioms; the message names the first failure."""
    ok, why = _chain_checks(G, s.levels, s.alphas, s.betas, {})
    if not ok:
        return ok, why
    if not is_generic(G, [proj(a) for a in s.alphas[1:]]):
        return False, "(S5): projected end sets are not generic"
    return True, "ok"


def validate_broken(G: Graph, b: BrokenStairwell) -> tuple[bool, str]:
    """Check the six broken stairwell axioms."""
    k, i0 = b.height, b.pit
    if not 1 <= i0 <= k:
        return False, "(S2'): pit level out of range"
    if b.P1.is_empty() or b.P2.is_empty():
        return False, "(S1'): P1 and P2 must be non-empty"
    if b.P1.graph != G or b.P2.graph != G:
        return False, "(S1'): pit sheets live over a different graph"
    ok, why = _chain_checks(G, b.levels, b.alphas, b.betas, {i0: b.gamma})
    if not ok:
        return False, why.replace("(S1)", "(S1')").replace("(S2)", "(S2')") \
            .replace("(S3)", "(S3')").replace("(S4)", "(S4')")
    e1, e2 = b.P1.end_set(), b.P2.end_set()
    if e1 & b.gamma:
        return False, "(S2'): E(P1) meets gamma"
    if e2 != e1 | b.gamma:
        return False, "(S2'): E(P2) is not E(P1) together with gamma"
    S0 = b.levels[i0 - 1]
    if b.P1.base.agrees_near(b.P2.base, proj(e1)) is None:
        return False, "(S3'): P1 and P2 differ near E(P1)"
    if b.P2.base.agrees_near(S0.base, proj(b.gamma)) is None:
        return False, "(S3'): P2 and the pit level differ near gamma"
    if not has_consistent_complement(S0.base, proj(b.gamma)):
        return False, "(S4'): pit level lacks consistent complement relative to gamma"
    if not has_consistent_complement(b.P2.base, proj(e1)):
        return False, "(S4'): P2 lacks consistent complement relative to E(P1)"
    if not has_consistent_complement(b.P2.base, proj(b.gamma)):
        return False, "(S4'): P2 lacks consistent complement relative to gamma"
    family = [proj(a) for a in b.alphas[1:]] + [proj(e1), proj(b.gamma)]
    if not is_generic(G, family):
        return False, "(S5'): projected end sets are not generic"
    pit_alpha = proj(b.alphas[i0 - 1])
    cover = b.P1.base.union(b.P2.base)
    if any(cover.contains(x) for x in pit_alpha):
        return False, "(S6'): alpha at the pit level lies over P1 or P2"
    return True, "ok"


def parity_count(s: Stairwell, x: GraphPoint) -> int:
    return sum(1 for S in s.levels if S.base.contains(x))


# -- separation ----------------------------------------------------------

def sheets_complex(G: Graph, sheets: Iterable[StraightSet]) -> PLComplex:
    segs = []
    for S in sheets:
        for e, poly in S.points_on_edges():
            segs.extend((e, p, q) for p, q in zip(poly, poly[1:]))
    return PLComplex(G, segs, check=False).normalized()


def _above_count(sheets, e: str, t: Fraction, y: Fraction, G: Graph) -> int:
    x = G.point(e, t)
    n = 0
    for S in sheets:
        h = S.evaluate(x)
        if h is not None and h > y:
            n += 1
    return n


class SeparationMismatch(RuntimeError):
    """The flood fill and the parity labeling disagree."""


def separation_verdicts(G: Graph, s) -> tuple[bool, bool]:
    """Separation decided twice: by flood fill, and by the parity of sheets overhead.

    The parity verdict is false when the parity is not constant on some face.
    """
    sheets = list(s.levels)
    lab = FaceLabeling(sheets_complex(G, sheets))
    parity: dict = {}
    consistent = True
    for node, t, y, e in _face_samples(lab):
        root = lab.face(node)
        par = _above_count(sheets, e, t, y, G) % 2
        if parity.setdefault(root, par) != par:
            consistent = False
    by_parity = consistent and parity.get(lab.bottom) != parity.get(lab.top)
    return lab.separates, by_parity


def separates_check(G: Graph, s) -> bool:
    """Separation by flood fill, cross-checked against the counting labeling.

    Only odd heights are accepted: with an even number of sheets the two
    outer faces share a parity, so the counting labeling cannot tell them apart.
    """
    if s.height % 2 == 0:
        raise ValueError(f"separation check needs odd height, got {s.height}")
    flood, by_parity = separation_verdicts(G, s)
    if flood != by_parity and validate_stairwell(G, s)[0]:
        raise SeparationMismatch("flood fill and parity labeling disagree")
    return flood


def _face_samples(lab: FaceLabeling):
    """A sample point ``(node, t, y, edge)`` for every cell and fiber gap."""
    M = lab.M
    for (e, j), span in lab._span.items():
        xs = lab._xs[e]
        mid = (xs[j] + xs[j + 1]) / 2
        vals = [value_at(M.segments[i][1], M.segments[i][2], mid) for i in span]
        bounds = [ZERO] + vals + [ONE]
        for c in range(len(span) + 1):
            yield ("c", e, j, c), mid, (bounds[c] + bounds[c + 1]) / 2, e
    for key, gaps in lab._fibers.items():
        for gi, (lo, hi) in enumerate(gaps):
            y = (lo + hi) / 2
            if key[0] == "v":
                inc = M.graph.incident(key[1])
                if not inc:
                    continue
                e, t, _ = inc[0]
                yield ("vf", key[1], gi), t, y, e
            else:
                e, x = key
                yield ("f", e, x, gi), x, y, e


# -- reduction and sections ----------------------------------------------

def to_broken(s: Stairwell) -> BrokenStairwell:
    """Relabel a stairwell of height ``k >= 3`` as a broken one of height ``k - 2``."""
    k = s.height
    if k < 3:
        raise ValueError("height must be at least 3")
    levels = s.levels[2:]
    alphas = (frozenset(),) + s.alphas[3:]
    betas = s.betas[2:]
    return BrokenStairwell(s.graph, levels, alphas, betas, s.alphas[2], 1,
                           s.levels[0], s.levels[1])


def section_of_height_one(s: Stairwell) -> StraightSet:
    if s.height != 1:
        raise ValueError("a section needs height 1")
    S = s.levels[0]
    if S.base != ClosedSet.full(s.graph):
        raise ValueError("the single level does not cover the graph")
    return S


# -- construction from a separator ---------------------------------------

def _z_prime(M: PLComplex) -> dict:
    """Per-edge sorted parameters of the partition points."""
    G = M.graph
    tips: dict = {}
    for p in turning_points(M):
        tips.setdefault(p.base.edge, []).append(p.base.t)
    out = {}
    for e in G.edge_ids:
        ts = sorted(tips.get(e, []))
        edge = G.edges[e]
        if not ts and edge.tail == edge.head:
            mids = [Fraction(1, 3), Fraction(2, 3)]
        else:
            bounds = [ZERO] + ts + [ONE]
            mids = [(x + y) / 2 for x, y in zip(bounds, bounds[1:])]
        out[e] = [ZERO] + mids + [ONE]
    return out


def _arc_components(M: PLComplex, e: str, a: Fraction, b: Fraction) -> list[list]:
    """Components of the complex over ``[a, b]`` of edge ``e`` as point paths."""
    pieces = []
    for i in M.on_edge(e):
        _, p, q = M.segments[i]
        if p[0] >= b or q[0] <= a:
            continue
        poly = poly_clip((p, q), a, b)
        pieces.append((poly[0], poly[-1]))
    adj: dict = {}
    for n, (p, q) in enumerate(pieces):
        adj.setdefault(p, []).append(n)
        adj.setdefault(q, []).append(n)
    used: set = set()
    comps = []
    starts = sorted(pt for pt, lst in adj.items() if len(lst) == 1)
    for s in starts:
        if adj[s][0] in used:
            continue
        path = [s]
        cur = s
        while True:
            nxt = [n for n in adj[cur] if n not in used]
            if not nxt:
                break
            n = nxt[0]
            used.add(n)
            p, q = pieces[n]
            cur = q if p == cur else p
            path.append(cur)
        comps.append(path)
    if len(used) != len(pieces):
        raise NotSeparatorError("closed loop inside a partition arc")
    for path in comps:
        for pt in (path[0], path[-1]):
            if pt[0] not in (a, b):
                raise NotSeparatorError("loose end inside a partition arc")
    return comps


def _as_function(path: list) -> tuple:
    pts = sorted(path)
    for (s0, _), (s1, _) in zip(pts, pts[1:]):
        if s1 == s0:
            raise NotSeparatorError("path is not a graph over the arc")
    return poly_simplify(tuple(pts))


def _mirror(poly, a, b):
    return tuple(sorted((a + b - s, h) for s, h in poly))


def _zigzag_delta(c, others, u, v, radius):
    pts = {u, v} | {s for s, _ in c if u < s < v}
    for o in others:
        pts |= {s for s, _ in o if u < s < v}
    gap = ONE
    lo_m = ONE
    hi_m = ONE
    for s in pts:
        h = poly_eval(c, s)
        lo_m = min(lo_m, h)
        hi_m = min(hi_m, ONE - h)
        for o in others:
            if o[0][0] <= s <= o[-1][0]:
                gap = min(gap, abs(poly_eval(o, s) - h))
    return min(gap / 4, radius / 8, lo_m / 4, hi_m / 4)


def _arc_levels(M: PLComplex, e: str, a: Fraction, b: Fraction, radius: Fraction, scale: Fraction):
    """Level pieces and linking points over the arc ``[a, b]`` of edge ``e``."""
    comps = _arc_components(M, e, a, b)
    wedges = [c for c in comps if c[0][0] == c[-1][0]]
    if len(wedges) > 1:
        raise NotSeparatorError("more than one turning point over a partition arc")
    mirrored = bool(wedges) and wedges[0][0][0] == b
    if mirrored:
        comps = [[(a + b - s, h) for s, h in c] for c in comps]
    levels: dict = {}
    links: dict = {}
    mono = [_as_function(c) for c in comps if c[0][0] != c[-1][0]]
    mono.sort(key=lambda c: c[0][1])
    if not wedges:
        for i, c in enumerate(mono, 1):
            levels.setdefault(i, []).append(c)
    else:
        w = next(c for c in comps if c[0][0] == c[-1][0])
        tip_n = max(range(len(w)), key=lambda n: w[n][0])
        tip = w[tip_n]
        arm1, arm2 = _as_function(w[:tip_n + 1]), _as_function(w[tip_n:])
        lower, upper = sorted((arm1, arm2), key=lambda c: c[0][1])
        ya = sorted([c[0][1] for c in mono] + [lower[0][1], upper[0][1]])
        j = len(ya)
        m = ya.index(lower[0][1]) + 1
        by_start = {c[0][1]: c for c in mono}
        for i in range(1, m):
            levels.setdefault(i, []).append(by_start[ya[i - 1]])
        levels.setdefault(m, []).append(lower)
        levels.setdefault(m + 1, []).append(upper)
        links.setdefault(m, set()).add(tip)
        z = j - m - 1
        if z > 0:
            span = (b - tip[0]) / (2 * z + 1)
            for q, i in enumerate(range(m + 2, j + 1)):
                u = tip[0] + (2 * q + 1) * span
                v = u + span
                c = by_start[ya[i - 1]]
                others = [o for o in mono if o is not c]
                delta = _zigzag_delta(c, others, u, v, radius) * scale
                inner = sorted({u, v} | {s for s, _ in c if u < s < v})

                def lift(f):
                    return [(s, poly_eval(c, s) + f((s - u) / (v - u))) for s in inner]
                c1 = poly_clip(c, a, u)[:-1] + tuple(lift(lambda r: 2 * delta * r))
                c2 = tuple(lift(lambda r: -delta + 3 * delta * r))
                c3 = tuple(lift(lambda r: -delta + delta * r)) + poly_clip(c, v, b)[1:]
                levels.setdefault(i, []).append(poly_simplify(c1))
                levels.setdefault(i - 1, []).append(poly_simplify(c2))
                levels.setdefault(i - 2, []).append(poly_simplify(c3))
                links.setdefault(i - 2, set()).add((u, poly_eval(c, u) - delta))
                links.setdefault(i - 1, set()).add((v, poly_eval(c, v) + 2 * delta))
    if mirrored:
        levels = {i: [_mirror(p, a, b) for p in ps] for i, ps in levels.items()}
        links = {i: {(a + b - s, h) for s, h in pts} for i, pts in links.items()}
    return levels, links


def from_separator(M: PLComplex, tube: Tube) -> Stairwell:
    """Build an odd-height stairwell inside ``tube`` from a separating complex."""
    G = M.graph
    if not G.is_connected():
        raise ValueError("the graph must be connected")
    tube.check_radius()
    if not FaceLabeling(M).separates:
        raise NotSeparatorError("complex does not separate bottom from top")
    core = irreducible_core(M)
    if core.has_vertical():
        core = core.normalized()
    simple = remove_branch_points(core, tube)
    generic = nudge_generic(simple, [G.vertex(v) for v in G.vertices], tube)
    zs = _z_prime(generic)
    k = 0
    for e, ts in zs.items():
        for t in ts:
            k = max(k, generic.fiber_count(G.point(e, t)))
    scale = ONE
    for _ in range(24):
        pieces: dict = {}
        links: dict = {}
        for e, ts in zs.items():
            for a, b in zip(ts, ts[1:]):
                lv, lk = _arc_levels(generic, e, a, b, tube.radius, scale)
                for i, ps in lv.items():
                    pieces.setdefault(i, {}).setdefault(e, []).extend(ps)
                for i, pts in lk.items():
                    links.setdefault(i, set()).update(
                        CylinderPoint(G.point(e, s), h) for s, h in pts)
        levels = [StraightSet(G, pieces.get(i, {})) for i in range(1, k + 1)]
        if tube.contains(PLComplex(G, [(e, p, q) for S in levels
                                       for e, poly in S.points_on_edges()
                                       for p, q in zip(poly, poly[1:])], check=False)):
            break
        scale /= 2
    else:
        raise TubeTooThin("zig-zags do not fit inside the tube", tube.radius * 2)
    betas = [frozenset(links.get(i, ())) for i in range(1, k)] + [frozenset()]
    alphas = [frozenset()] + betas[:-1]
    s = Stairwell(G, levels, alphas, betas)
    ok, why = validate_stairwell(G, s)
    if not ok:
        raise RuntimeError(f"constructed stairwell fails validation: {why}")
    if k % 2 == 0 or not separates_check(G, s):
        raise RuntimeError("constructed stairwell does not separate")
    return s
