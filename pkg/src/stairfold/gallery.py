"""Small hand-built instances: graphs, separators, stairwells and folds.

The shipped corpus files are generated from these builders, so tests can use
either the objects or the files.
"""
from __future__ import annotations

from fractions import Fraction as F

from .crooked import PLIntervalMap, refine_times
from .cylinder import CylinderPoint, StraightSet
from .fold import FoldSequence, build_fold
from .graph_core import ClosedSet, Graph
from .separator import PLComplex
from .stairwell import BrokenStairwell, Stairwell, to_broken


def arc() -> Graph:
    return Graph(["a", "b"], {"e": ("a", "b", 1)})


def triod() -> Graph:
    return Graph(["c", "x0", "x1", "x2"],
                 {"e0": ("c", "x0", 1), "e1": ("c", "x1", 1), "e2": ("c", "x2", 1)})


def h_graph() -> Graph:
    return Graph(["a", "b", "u", "v", "c", "d"],
                 {"au": ("a", "u", 1), "bu": ("b", "u", 1), "uv": ("u", "v", 1),
                  "vc": ("v", "c", 1), "vd": ("v", "d", 1)})


def _seg(p, q) -> tuple:
    return tuple(sorted([(F(p[0]), F(p[1])), (F(q[0]), F(q[1]))]))


SNAKE_TURNS = {
    1: [],
    3: [F(1, 2), F(1, 4)],
    5: [F(1, 2), F(1, 4), F(3, 4), F(3, 8)],
    7: [F(1, 2), F(1, 4), F(3, 4), F(3, 8), F(5, 8), F(7, 16)],
}


def snake_path(xs: list, g: Graph | None = None, edge: str = "e") -> Stairwell:
    """Stairwell on an arc whose level ``i`` runs from ``xs[i-1]`` to ``xs[i]``.

    Heights rise strictly along the path, so levels meet only at the turns.
    ``xs`` must start at 0, end at 1 and alternate direction at every turn.
    """
    g = g or arc()
    k = len(xs) - 1
    hs = [F(i + 1, k + 2) for i in range(k + 1)]
    levels = [StraightSet(g, {edge: [_seg((xs[i], hs[i]), (xs[i + 1], hs[i + 1]))]})
              for i in range(k)]
    links = [frozenset([CylinderPoint(g.point(edge, xs[i]), hs[i])]) for i in range(1, k)]
    return Stairwell(g, levels, [frozenset()] + links, links + [frozenset()])


def snake(k: int) -> Stairwell:
    return snake_path([F(0)] + SNAKE_TURNS[k] + [F(1)])


def unfold_example() -> BrokenStairwell:
    """Height 3 with the pit at level 1 (the relabelled height-5 snake)."""
    return to_broken(snake(5))


def broken_pit_two() -> BrokenStairwell:
    """Height 3 over an arc with a pit at level 2."""
    g = arc()
    path = [(1, "1/10"), ("1/5", "1/5"), ("2/5", "3/10"), ("3/10", "2/5"), ("7/10", "1/2"),
            ("3/5", "3/5"), ("4/5", "7/10"), (0, "4/5")]
    path = [(F(x), F(h)) for x, h in path]

    def sheet(*idx):
        return StraightSet(g, {"e": [_seg(path[i], path[i + 1]) for i in idx]})

    def pt(i):
        return CylinderPoint(g.point("e", path[i][0]), path[i][1])

    S1, S2, S3 = sheet(0), sheet(1, 5), sheet(6)
    P2, P1 = sheet(2, 4), sheet(3)
    a2, a3 = frozenset([pt(1)]), frozenset([pt(6)])
    gamma = frozenset([pt(2), pt(5)])
    return BrokenStairwell(g, [S1, S2, S3], [frozenset(), a2, a3], [a2, a3, frozenset()],
                           gamma, 2, P1, P2)


def triod_separator() -> PLComplex:
    """A separator over the triod with a branch point where three arcs meet."""
    g = triod()
    q, p = (F(3, 4), F(3, 8)), (F(1, 2), F(5, 8))
    z = F(0)
    segs = [
        ("e0", (z, F(1, 4)), q), ("e0", (z, F(1, 2)), p), ("e0", (z, F(3, 4)), p),
        ("e0", p, q), ("e0", p, (F(1), F(3, 4))),
        ("e1", (z, F(1, 4)), (F(1), F(1, 4))), ("e1", (z, F(1, 2)), p),
        ("e1", (z, F(3, 4)), p),
        ("e2", (z, F(1, 4)), (F(1, 2), F(3, 8))), ("e2", (z, F(1, 2)), (F(1, 2), F(3, 8))),
        ("e2", (z, F(3, 4)), (F(1), F(3, 4))),
    ]
    return PLComplex(g, segs)


def flat_separator(g: Graph, height=F(1, 2)) -> PLComplex:
    h = F(height)
    return PLComplex(g, [(e, (F(0), h), (F(1), h)) for e in g.edge_ids])


def zigzag_separator() -> PLComplex:
    """A doubly folded curve over an arc: five sheets above the middle stretch."""
    g = arc()
    path = [(0, "1/10"), ("4/5", "1/5"), ("1/5", "3/10"), ("7/10", "2/5"), ("3/10", "1/2"),
            (1, "3/5")]
    path = [(F(x), F(y)) for x, y in path]
    return PLComplex(g, [("e",) + _seg(path[i], path[i + 1]) for i in range(len(path) - 1)])


def h_straight_set() -> StraightSet:
    """A straight set on the H graph with two components and five end points."""
    g = h_graph()
    h = F(1, 2)
    pieces = {
        "au": [((F(1, 4), F(1, 4)), (F(1), h))],
        "bu": [((F(1, 2), F(3, 4)), (F(1), h))],
        "uv": [((F(0), h), (F(2, 5), F(3, 5))), ((F(3, 5), F(1, 5)), (F(1), F(1, 3)))],
        "vc": [((F(0), F(1, 3)), (F(1), F(2, 3)))],
        "vd": [((F(0), F(1, 3)), (F(3, 10), F(1, 3)))],
    }
    return StraightSet(g, pieces)


def arc_fold():
    g = arc()
    G1 = ClosedSet(g, {"e": [(F(0), F(2, 3))]})
    G3 = ClosedSet(g, {"e": [(F(1, 3), F(1))]})
    G2 = ClosedSet(g, {"e": [(F(1, 3), F(2, 3))]})
    return build_fold(g, G1, G2, G3)


def triod_fold():
    g = triod()
    G1 = ClosedSet(g, {"e0": [(F(0), F(3, 4))], "e1": [(F(0), F(3, 4))], "e2": [(F(0), F(1))]})
    G3 = ClosedSet(g, {"e0": [(F(1, 2), F(1))], "e1": [(F(1, 2), F(1))]})
    G2 = ClosedSet(g, {"e0": [(F(1, 2), F(3, 4))], "e1": [(F(1, 2), F(3, 4))]})
    return build_fold(g, G1, G2, G3)


def fold_sequence(fold) -> FoldSequence:
    return FoldSequence(fold.base, [fold])


def interval_maps() -> list[PLIntervalMap]:
    ident = PLIntervalMap.identity()
    return [ident, PLIntervalMap.tent(), refine_times(ident, 3)]
