"""Pulling broken stairwells back through simple folds until a single sheet remains."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .cylinder import CylinderPoint, StraightSet, union_straight
from .fold import FoldError, FoldSequence, SimpleFold, build_fold, pullback_straight
from .graph_core import ClosedSet, Graph, GraphPoint, side_of
from .separator import Tube
from .stairwell import (
    BrokenStairwell,
    Stairwell,
    proj,
    section_of_height_one,
    to_broken,
    validate_broken,
    validate_stairwell,
)

BROKEN = "broken"
STAIRWELL = "stairwell"
NO_GAMMA = "no_gamma"
NO_P1_ENDS = "no_p1_ends"


class UnfoldError(RuntimeError):
    """An unfold produced a structure that fails its own axioms."""


@dataclass(frozen=True)
class UnfoldResult:
    """Tagged outcome of one unfold.

    ``kind`` is ``"broken"`` (pit moved up one level), ``"stairwell"`` (the pit
    was at the top), ``"no_gamma"`` (the levels alone already form a stairwell)
    or ``"no_p1_ends"`` (``P1`` alone is a height-one stairwell).  The last two
    carry no fold.
    """

    kind: str
    outcome: object
    fold: SimpleFold | None = None


def fold_parts(G: Graph, b: BrokenStairwell) -> tuple[ClosedSet, ClosedSet, ClosedSet]:
    """The three images used to fold: the base of P1, the base of P2, and the pit side."""
    S0 = b.levels[b.pit - 1]
    return b.P1.base, b.P2.base, side_of(S0.base, proj(b.gamma))


def _in_graph(points: Iterable[CylinderPoint], g: Graph) -> frozenset:
    out = set()
    for p in points:
        x = p.base
        if (x.vertex is not None and g.has_vertex(x.vertex)) or (x.edge is not None and x.edge in g.edges):
            out.add(p)
    return frozenset(out)


def _choose_component(f: SimpleFold) -> frozenset[str]:
    """Vertices of the component of ``F`` over the first middle component touching both creases."""
    G1, G2, G3 = f.images()
    b1, b3 = G1.boundary(), G3.boundary()
    for K in G2.components():
        if any(K.contains(x) for x in b1) and any(K.contains(x) for x in b3):
            lifted = f.preimage(K).intersection(f.parts[1])
            for comp in f.total.components():
                if any(lifted.contains(GraphPoint(vertex=v)) for v in comp) or any(
                        e in lifted.ivals for e in f.total.edge_ids if f.total.edges[e].tail in comp):
                    return comp
    raise FoldError("no middle component meets both crease images")


def unfold_once(G: Graph, b: BrokenStairwell) -> UnfoldResult:
    """Move the pit of ``b`` up one level by pulling back through a simple fold."""
    ok, why = validate_broken(G, b)
    if not ok:
        raise ValueError(f"input is not a broken stairwell: {why}")
    k, i0 = b.height, b.pit
    if not b.gamma:
        return UnfoldResult(NO_GAMMA, Stairwell(G, b.levels, b.alphas, b.betas))
    if not b.P1.end_set():
        return UnfoldResult(NO_P1_ENDS, Stairwell(G, [b.P1], [frozenset()], [frozenset()]))

    f = build_fold(G, *fold_parts(G, b))
    F1, F2, F3 = f.parts
    F12 = F1.union(F2)
    pre = f.preimage_star

    levels = []
    alphas = []
    betas = []
    for i in range(1, k + 1):
        S = b.levels[i - 1]
        if i == i0:
            parts = [pullback_straight(f, b.P1).restrict(F1),
                     pullback_straight(f, b.P2).restrict(F2),
                     pullback_straight(f, S).restrict(F3)]
            levels.append(union_straight(parts))
            alphas.append(pre(b.alphas[i - 1]))
            betas.append(frozenset(p for p in pre(b.betas[i - 1]) if F3.contains(p.base)))
        elif i == i0 + 1:
            levels.append(pullback_straight(f, S))
            alphas.append(frozenset(p for p in pre(b.alphas[i - 1]) if F3.contains(p.base)))
            betas.append(pre(b.betas[i - 1]))
        else:
            levels.append(pullback_straight(f, S))
            alphas.append(pre(b.alphas[i - 1]))
            betas.append(pre(b.betas[i - 1]))
    P1 = pullback_straight(f, b.P2).restrict(F12)
    P2 = pullback_straight(f, b.levels[i0 - 1]).restrict(F12)
    gamma = frozenset()
    if i0 < k:
        gamma = frozenset(p for p in pre(b.alphas[i0]) if F12.contains(p.base))

    comp = _choose_component(f)
    red = f.restrict_to(comp)
    if red.image(ClosedSet.full(red.total)) != ClosedSet.full(G):
        raise UnfoldError("chosen component does not cover the base graph")
    F = red.total
    levels = [S.on_graph(F) for S in levels]
    alphas = [_in_graph(a, F) for a in alphas]
    betas = [_in_graph(x, F) for x in betas]
    if i0 == k:
        out = Stairwell(F, levels, alphas, betas)
        ok, why = validate_stairwell(F, out)
        kind = STAIRWELL
    else:
        out = BrokenStairwell(F, levels, alphas, betas, _in_graph(gamma, F), i0 + 1,
                              P1.on_graph(F), P2.on_graph(F))
        ok, why = validate_broken(F, out)
        kind = BROKEN
    if not ok:
        raise UnfoldError(f"unfolded structure fails validation: {why}")
    return UnfoldResult(kind, out, red)


def fold_bound(k0: int) -> int:
    """Sum of ``k0 - 1, k0 - 3, ...`` down to the last positive term."""
    return sum(range(k0 - 1, 0, -2))


@dataclass
class PipelineReport:
    fold_sequence: FoldSequence
    final: Stairwell
    initial_height: int
    trace: list = field(default_factory=list)

    @property
    def fold_count(self) -> int:
        return len(self.fold_sequence)

    def section(self) -> StraightSet:
        return section_of_height_one(self.final)


def _trace_row(step: int, event: str, g: Graph, height: int, pit) -> dict:
    return {"step": step, "event": event, "height": height, "pit": pit,
            "vertices": len(g.vertices), "edges": len(g.edges)}


def reduce_to_height_one(G: Graph, s: Stairwell) -> PipelineReport:
    """Fold ``s`` down to a single full sheet, recording every step."""
    ok, why = validate_stairwell(G, s)
    if not ok:
        raise ValueError(f"input is not a stairwell: {why}")
    if s.height % 2 == 0:
        raise ValueError("height must be odd")
    if not G.is_connected():
        raise ValueError("the graph must be connected")
    seq = FoldSequence(G)
    k0 = s.height
    trace = [_trace_row(0, "start", G, k0, None)]
    cur, g = s, G
    step = 0
    while cur.height > 1:
        b = to_broken(cur)
        step += 1
        trace.append(_trace_row(step, "break", g, b.height, b.pit))
        while True:
            res = unfold_once(g, b)
            step += 1
            if res.fold is not None:
                seq.append(res.fold)
                g = res.fold.total
            if res.kind == BROKEN:
                b = res.outcome
                trace.append(_trace_row(step, "unfold", g, b.height, b.pit))
                continue
            cur = res.outcome
            trace.append(_trace_row(step, res.kind if res.kind != STAIRWELL else "unfold",
                                    g, cur.height, None))
            break
    final = cur
    ok, why = validate_stairwell(g, final)
    if not ok:
        raise UnfoldError(f"final structure fails validation: {why}")
    section_of_height_one(final)
    rep = PipelineReport(seq, final, k0, trace)
    if rep.fold_count > fold_bound(k0):
        raise UnfoldError(f"{rep.fold_count} folds exceed the bound {fold_bound(k0)}")
    return rep


@dataclass(frozen=True)
class SectionMap:
    """The top sheet pushed down through every fold: a map from the top graph into the base cylinder."""

    folds: FoldSequence
    sheet: StraightSet

    def __call__(self, p: GraphPoint) -> CylinderPoint:
        h = self.sheet.evaluate(p)
        if h is None:
            raise ValueError(f"{p!r} is not in the top graph")
        return self.folds.push_point(CylinderPoint(p, h))

    def projection(self, p: GraphPoint) -> GraphPoint:
        for fold in reversed(self.folds.folds):
            p = fold.phi(p)
        return p

    def sample_points(self, n: int) -> list[GraphPoint]:
        """``n`` points spread evenly over the edges of the top graph."""
        g = self.folds.top
        eids = g.edge_ids
        if not eids:
            return [GraphPoint(vertex=v) for v in g.vertices][:n]
        per = max(1, -(-n // len(eids)))
        out = []
        for e in eids:
            out.extend(g.point(e, Fraction(j, per + 1)) for j in range(1, per + 1))
        return out[:n]


def _in_tube(tube: Tube, x: CylinderPoint) -> bool:
    g = tube.center.graph
    for e, t in g.positions(x.base):
        if tube.contains_point(e, t, x.height):
            return True
    return False


def realize_section(rep: PipelineReport, tube: Tube, samples: int = 1000) -> SectionMap:
    """Compose the final section with the folds and check it stays inside ``tube``."""
    m = SectionMap(rep.fold_sequence, rep.section())
    for p in m.sample_points(samples):
        img = m(p)
        if img.base != m.projection(p):
            raise UnfoldError("first coordinate differs from the composed projection")
        if not _in_tube(tube, img):
            raise UnfoldError(f"image of {p!r} leaves the tube")
    return m
