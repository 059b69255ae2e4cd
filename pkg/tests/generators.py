"""Random instances for the property and acceptance tests.

Everything is driven by an explicit ``random.Random`` so failures reproduce
from the seed alone.  Coordinates live on dyadic grids so that brute-force
oracles can sample exactly at every breakpoint.
"""
from __future__ import annotations

import random
from fractions import Fraction as F

from stairfold.crooked import PLIntervalMap
from stairfold.cylinder import CylinderPoint, StraightSet
from stairfold.graph_core import ClosedSet, Graph, UnionFind
from stairfold.separator import PLComplex
from stairfold.stairwell import Stairwell

GRID = 16


def arc() -> Graph:
    return Graph(["a", "b"], {"e": ("a", "b", 1)})


def circle() -> Graph:
    return Graph(["a", "b"], {"e": ("a", "b", 1), "f": ("b", "a", 1)})


def triod() -> Graph:
    return Graph(["c", "x0", "x1", "x2"],
                 {"e0": ("c", "x0", 1), "e1": ("c", "x1", 1), "e2": ("c", "x2", 1)})


GRAPHS = {"arc": arc, "circle": circle, "triod": triod}


def any_graph(rng: random.Random) -> Graph:
    return GRAPHS[rng.choice(sorted(GRAPHS))]()


def grid_intervals(rng: random.Random, n: int = GRID, max_pieces: int = 2) -> list:
    """Disjoint closed intervals with endpoints on the ``1/n`` grid; may be empty."""
    cuts = sorted(rng.sample(range(n + 1), 2 * rng.randint(0, max_pieces)))
    return [(F(cuts[i], n), F(cuts[i + 1], n)) for i in range(0, len(cuts), 2)]


def random_regular(rng: random.Random, g: Graph, nonempty: bool = True) -> ClosedSet:
    while True:
        A = ClosedSet(g, {e: grid_intervals(rng) for e in g.edge_ids})
        if A.is_regular() and (A.total_length() > 0 or not nonempty):
            return A


def _linked_groups(A: ClosedSet) -> list[list]:
    """Complement components of ``A`` grouped when their closures share a point."""
    comps = A.complement_components()
    uf = UnionFind()
    owner: dict = {}
    for i, c in enumerate(comps):
        uf.add(i)
        for p in c.boundary:
            if p in owner:
                uf.union(i, owner[p])
            owner.setdefault(p, i)
    return [[comps[i] for i in grp] for grp in uf.groups()]


def random_fold_triple(rng: random.Random, g: Graph):
    """A triple ``(G1, G2, G3)`` meeting the fold axioms, built around a random ``G2``."""
    A = random_regular(rng, g)
    G1, G3 = A, A
    for grp in _linked_groups(A):
        extra = ClosedSet.empty(g)
        for c in grp:
            extra = extra.union(c.closure(g))
        if rng.random() < 0.5:
            G1 = G1.union(extra)
        else:
            G3 = G3.union(extra)
    return G1, A, G3


def consistent_pair(rng: random.Random, g: Graph):
    """A regular ``A`` and ``B`` inside its boundary with consistent complement."""
    A = random_regular(rng, g)
    B: set = set()
    for grp in _linked_groups(A):
        if rng.random() < 0.6:
            for c in grp:
                B |= c.boundary
    return A, frozenset(B)


def perturb_away(rng: random.Random, A: ClosedSet, B, moves: int = 3, n: int = 64) -> ClosedSet:
    """Change ``A`` only at positive distance from ``B``, keeping consistent complement.

    Moves: fill a complementary component whose boundary avoids ``B``, punch a
    hole in the interior of ``A``, or drop an island into such a component.
    """
    g = A.graph
    B = frozenset(B)
    for _ in range(moves):
        free = [c for c in A.complement_components() if not (c.boundary & B)]
        move = rng.choice(["fill", "hole", "island"])
        if move == "fill" and free:
            A = A.union(rng.choice(free).closure(g))
        elif move == "hole":
            spans = [(e, a, b) for e, iv in A.ivals.items() for a, b in iv if b - a >= F(4, n)]
            if spans:
                e, a, b = rng.choice(spans)
                u = rng.randint(int(a * n) + 1, int(b * n) - 2)
                v = rng.randint(u + 1, int(b * n) - 1)
                A = A.closure_of_difference(ClosedSet(g, {e: [(F(u, n), F(v, n))]}))
        elif move == "island" and free:
            spans = [(e, lo, hi) for c in free for e, lo, hi in c.pieces if hi - lo >= F(4, n)]
            if spans:
                e, lo, hi = rng.choice(spans)
                u = rng.randint(int(lo * n) + 1, int(hi * n) - 2)
                v = rng.randint(u + 1, int(hi * n) - 1)
                A = A.union(ClosedSet(g, {e: [(F(u, n), F(v, n))]}))
    return A


def broken_triple(rng: random.Random, axiom: str):
    """A triple over a fresh graph that violates exactly the named axiom first."""
    if axiom == "F1":
        g = any_graph(rng)
        triple = list(random_fold_triple(rng, g))
        which = rng.randrange(3)
        outside = [(e, F(2 * j + 1, 2 * GRID)) for e in g.edge_ids for j in range(GRID)
                   if not triple[which].contains(g.point(e, F(2 * j + 1, 2 * GRID)))]
        if which == 1 or not outside:
            triple[1] = ClosedSet.empty(g)
        else:
            e, x = rng.choice(outside)
            triple[which] = triple[which].union(ClosedSet(g, {e: [(x, x)]}))
        return (g, *triple)
    if axiom == "F2":
        while True:
            g = any_graph(rng)
            G1, G2, G3 = random_fold_triple(rng, g)
            if rng.random() < 0.5:
                # shrink G2 inside G1 n G3 so that it is no longer the intersection
                e = rng.choice(list(G2.ivals))
                a, b = G2.ivals[e][0]
                mid = (a + b) / 2
                smaller = G2.closure_of_difference(ClosedSet(g, {e: [(a, mid)]}))
                if smaller.is_regular() and not smaller.is_empty():
                    return g, G1, smaller, G3
            else:
                # drop part of G1 - G2 so the cover fails
                extra = G1.closure_of_difference(G2)
                if extra.total_length() == 0:
                    continue
                e = rng.choice(list(extra.ivals))
                a, b = extra.ivals[e][0]
                cut = ClosedSet(g, {e: [(a, b)]})
                G1b = G1.closure_of_difference(cut).union(G2)
                if G1b.is_regular() and G1b.union(G3) != ClosedSet.full(g):
                    return g, G1b, G2, G3
    # F3: three germs at the branch point, one in each of G1 - G2, G2, G3 - G2
    g = triod()
    a, b, c = rng.sample(g.edge_ids, 3)
    s = F(rng.randint(1, GRID - 1), GRID)
    G2 = ClosedSet(g, {a: [(0, s)]})
    G1 = ClosedSet(g, {a: [(0, s)], b: [(0, 1)]})
    G3 = ClosedSet(g, {a: [(0, 1)], c: [(0, 1)]})
    return g, G1, G2, G3


# -- straight sets ---------------------------------------------------------

def random_height_field(rng: random.Random, g: Graph, n: int = GRID):
    """A continuous PL height function on ``g``: per-vertex values and a bend per edge."""
    vh = {v: F(rng.randint(1, n - 1), n) for v in g.vertices}
    mid = {e: F(rng.randint(1, n - 1), n) for e in g.edge_ids}

    def poly(e: str) -> tuple:
        ed = g.edges[e]
        return ((F(0), vh[ed.tail]), (F(1, 2), mid[e]), (F(1), vh[ed.head]))

    return poly


def straight_over(g: Graph, base: ClosedSet, field) -> StraightSet:
    from stairfold.cylinder import poly_clip
    pieces = {e: [poly_clip(field(e), a, b) for a, b in iv] for e, iv in base.ivals.items()}
    return StraightSet(g, pieces)


# -- stairwells ------------------------------------------------------------

def alternating_turns(rng: random.Random, k: int, n: int = 64) -> list:
    """``0 = x0, x1, ..., xk = 1`` alternating direction with distinct interior turns."""
    while True:
        xs = [0]
        used = {0, n}
        ok = True
        for i in range(1, k):
            cur = xs[-1]
            if i % 2 == 1:
                choices = [x for x in range(cur + 1, n) if x not in used]
            else:
                choices = [x for x in range(1, cur) if x not in used]
            if not choices:
                ok = False
                break
            x = rng.choice(choices)
            xs.append(x)
            used.add(x)
        if ok and xs[-1] < n:
            return [F(x, n) for x in xs] + [F(1)]


def triod_snake(xs: list, at_top: bool) -> Stairwell:
    """A snake along ``e0`` of the triod; ``e1`` and ``e2`` hang off its first or last level.

    With ``at_top`` the snake runs from ``x0`` back to the centre so that the
    other two legs join the top level.
    """
    g = triod()
    k = len(xs) - 1
    hs = [F(i + 1, k + 2) for i in range(k + 1)]
    ts = [1 - x for x in xs] if at_top else list(xs)
    legs_level, h_c = (k - 1, hs[k]) if at_top else (0, hs[0])
    pieces = []
    for i in range(k):
        p, q = (ts[i], hs[i]), (ts[i + 1], hs[i + 1])
        pieces.append({"e0": [tuple(sorted([p, q]))]})
    for e in ("e1", "e2"):
        pieces[legs_level][e] = [((F(0), h_c), (F(1), h_c))]
    levels = [StraightSet(g, pc) for pc in pieces]
    links = [frozenset([CylinderPoint(g.point("e0", ts[i]), hs[i])]) for i in range(1, k)]
    return Stairwell(g, levels, [frozenset()] + links, links + [frozenset()])


# -- separators ------------------------------------------------------------

def random_path_separator(rng: random.Random, g: Graph | None = None, edge: str = "e",
                          turns: int | None = None, n: int = 32) -> PLComplex:
    """A curve across the arc square with rising heights and back-and-forth turns."""
    g = g or arc()
    m = turns if turns is not None else rng.randint(0, 4)
    ys = sorted(rng.sample(range(1, n), m + 2))
    xs = [0]
    for _ in range(m):
        xs.append(rng.choice([x for x in range(1, n) if x != xs[-1]]))
    xs.append(n)
    pts = [(F(x, n), F(y, n)) for x, y in zip(xs, ys)]
    segs = [(edge,) + tuple(sorted([p, q])) for p, q in zip(pts, pts[1:])]
    return PLComplex(g, segs)


def random_triod_separator(rng: random.Random, n: int = 32) -> PLComplex:
    """A wiggly curve over ``e0`` joined at the centre to flat-ish legs on ``e1``, ``e2``."""
    g = triod()
    path = random_path_separator(rng, g, "e0", rng.randint(0, 3), n)
    h_c = min((p for _, p, _ in path.segments if p[0] == 0), key=lambda p: p[1])[1]
    segs = list(path.segments)
    for e in ("e1", "e2"):
        bend = (F(rng.randint(4, n - 4), n), F(rng.randint(2, n - 2), n))
        end = (F(1), F(rng.randint(2, n - 2), n))
        segs += [(e, (F(0), h_c), bend), (e, bend, end)]
    return PLComplex(g, segs)


def with_spurs(rng: random.Random, M: PLComplex, count: int, n: int = 32) -> PLComplex:
    """Attach dangling segments that do not cross anything; the separator is unchanged."""
    from stairfold.separator import ComplexError
    for _ in range(count):
        for _attempt in range(20):
            e, p, q = rng.choice(M.segments)
            start = rng.choice([p, q])
            x = F(rng.randint(1, n - 1), n)
            if x == start[0]:
                continue
            end = (x, F(rng.randint(1, n - 1), n))
            try:
                M = PLComplex(M.graph, list(M.segments) + [(e,) + tuple(sorted([start, end]))])
                break
            except ComplexError:
                continue
    return M


def random_separator(rng: random.Random) -> PLComplex:
    if rng.random() < 0.6:
        M = random_path_separator(rng, turns=rng.randint(0, 6))
    else:
        M = random_triod_separator(rng)
    return with_spurs(rng, M, rng.choice([0, 0, 1, 2]))


# -- interval maps ---------------------------------------------------------

def random_interval_map(rng: random.Random, pieces: int = 32, levels: int = 16) -> PLIntervalMap:
    """An onto walk with steps of ``0, +-1, +-2, +-4`` sixteenths over equal x-steps.

    Every preimage of a sixteenth is then a multiple of ``1/256``.
    """
    steps = [0, 1, -1, 2, -2, 4, -4]
    while True:
        ys = [rng.choice([0, levels])]
        for _ in range(pieces):
            options = [s for s in steps if 0 <= ys[-1] + s <= levels]
            ys.append(ys[-1] + rng.choice(options))
        if min(ys) == 0 and max(ys) == levels:
            return PLIntervalMap((F(i, pieces), F(y, levels)) for i, y in enumerate(ys))
