"""Piecewise-linear interval maps and an exact test for delta-crookedness."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .graph_core import ONE, ZERO, as_fraction


class IntervalMapError(ValueError):
    pass


class PLIntervalMap:
    """A continuous map of ``[0, 1]`` to itself, linear between breakpoints."""

    __slots__ = ("points",)

    def __init__(self, breakpoints: Iterable):
        pts = tuple((as_fraction(x), as_fraction(y)) for x, y in breakpoints)
        if len(pts) < 2 or pts[0][0] != ZERO or pts[-1][0] != ONE:
            raise IntervalMapError("breakpoints must run from x = 0 to x = 1")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if x1 <= x0:
                raise IntervalMapError("breakpoint x values must strictly increase")
        if any(not ZERO <= y <= ONE for _, y in pts):
            raise IntervalMapError("values must lie in [0, 1]")
        self.points = _drop_collinear(pts)

    @classmethod
    def identity(cls) -> "PLIntervalMap":
        return cls([(0, 0), (1, 1)])

    @classmethod
    def tent(cls) -> "PLIntervalMap":
        return cls([(0, 0), (Fraction(1, 2), 1), (1, 0)])

    def __eq__(self, other):
        return isinstance(other, PLIntervalMap) and self.points == other.points

    def __hash__(self):
        return hash(self.points)

    def __repr__(self):
        inner = ", ".join(f"({x}, {y})" for x, y in self.points)
        return f"PLIntervalMap([{inner}])"

    def __call__(self, x) -> Fraction:
        x = as_fraction(x)
        if not ZERO <= x <= ONE:
            raise IntervalMapError(f"{x} is outside [0, 1]")
        pts = self.points
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if x0 <= x <= x1:
                return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        raise AssertionError("unreachable")

    def is_onto(self) -> bool:
        ys = [y for _, y in self.points]
        return min(ys) == ZERO and max(ys) == ONE

    def laps(self) -> list[tuple]:
        """Maximal monotone pieces as ``((x0, y0), (x1, y1))``; flat pieces count as laps."""
        out: list = []
        sign = None
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            s = (y1 > y0) - (y1 < y0)
            if out and s == sign:
                out[-1] = (out[-1][0], (x1, y1))
            else:
                out.append(((x0, y0), (x1, y1)))
                sign = s
        return out

    def critical_values(self) -> list[Fraction]:
        return sorted({y for _, y in self.points})

    def first_hit(self, y: Fraction, after: Fraction) -> Fraction | None:
        """Least ``x > after`` with ``g(x) = y``; assumes ``g(after) != y``."""
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if x1 <= after:
                continue
            if y0 == y1:
                if y0 == y:
                    return max(x0, after)
                continue
            if min(y0, y1) <= y <= max(y0, y1):
                x = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
                if x > after:
                    return x
        return None

    def level_components(self, y: Fraction) -> list[tuple[Fraction, Fraction]]:
        """Connected components of the preimage of ``y`` as closed intervals."""
        hits: list = []
        for (x0, y0), (x1, y1) in zip(self.points, self.points[1:]):
            if y0 == y1 == y:
                hits.append((x0, x1))
            elif min(y0, y1) <= y <= max(y0, y1) and y0 != y1:
                x = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
                hits.append((x, x))
        hits.sort()
        out: list = []
        for a, b in hits:
            if out and a <= out[-1][1]:
                out[-1] = (out[-1][0], max(out[-1][1], b))
            else:
                out.append((a, b))
        return out


def _drop_collinear(pts: tuple) -> tuple:
    out = [pts[0]]
    for p in pts[1:]:
        if len(out) >= 2:
            (x0, y0), (x1, y1) = out[-2], out[-1]
            if (y1 - y0) * (p[0] - x1) == (p[1] - y1) * (x1 - x0):
                out[-1] = p
                continue
        out.append(p)
    return tuple(out)


def compose(f: PLIntervalMap, g: PLIntervalMap) -> PLIntervalMap:
    """The map ``x -> f(g(x))``."""
    xs = {x for x, _ in g.points}
    for y in {y for y, _ in f.points}:
        for a, b in g.level_components(y):
            xs.update((a, b))
    return PLIntervalMap((x, f(g(x))) for x in sorted(xs))


def compose_all(maps: Sequence[PLIntervalMap]) -> PLIntervalMap:
    """``maps[0] o maps[1] o ... o maps[-1]``."""
    out = maps[-1]
    for m in reversed(maps[:-1]):
        out = compose(m, out)
    return out


# -- crookedness ---------------------------------------------------------

@dataclass(frozen=True)
class CrookednessCertificate:
    delta: Fraction
    net: tuple
    verified: bool
    witness: tuple | None = None
    tried: tuple = field(default=(), compare=False)


def is_delta_net(net: Iterable[Fraction], delta: Fraction) -> bool:
    pts = sorted(set(net))
    if not pts or any(not ZERO <= p <= ONE for p in pts):
        return False
    if pts[0] > delta or pts[-1] < ONE - delta:
        return False
    return all(b - a <= 2 * delta for a, b in zip(pts, pts[1:]))


def uniform_net(step: Fraction) -> tuple:
    n = math.ceil(ONE / step)
    return tuple(sorted({min(j * step, ONE) for j in range(n + 1)}))


def rounded_critical_net(g: PLIntervalMap, delta: Fraction) -> tuple:
    grid = uniform_net(delta)
    out = set()
    for y in g.critical_values():
        out.add(min(grid, key=lambda v: (abs(v - y), v)))
    return tuple(sorted(out))


def quadruple_holds(g: PLIntervalMap, y1, y2, y3, y4) -> bool:
    """Whether every ``x1 < x4`` hitting ``y1``, ``y4`` brackets hits of ``y3`` then ``y2``."""
    for _, r in g.level_components(y1):
        x4 = g.first_hit(y4, r)
        if x4 is None:
            continue
        x2 = g.first_hit(y3, r)
        x3 = g.first_hit(y2, x2)
        if x3 is None or x3 >= x4:
            return False
    return True


def net_violation(g: PLIntervalMap, net: Sequence[Fraction]):
    """The first monotone quadruple of ``net`` that fails, or ``None``."""
    pts = sorted(set(net))
    for quad in itertools.combinations(pts, 4):
        for ys in (quad, quad[::-1]):
            if not quadruple_holds(g, *ys):
                return ys
    return None


def check_net(g: PLIntervalMap, net: Sequence[Fraction], delta) -> bool:
    delta = as_fraction(delta)
    return is_delta_net(net, delta) and net_violation(g, net) is None


def candidate_nets(g: PLIntervalMap, delta: Fraction) -> list[tuple]:
    nets = [uniform_net(delta), uniform_net(delta / 2), rounded_critical_net(g, delta)]
    out = []
    for n in nets:
        if n not in out:
            out.append(n)
    return out


def is_delta_crooked(g: PLIntervalMap, delta) -> CrookednessCertificate:
    """Search the candidate nets for one that witnesses delta-crookedness."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not g.is_onto():
        raise IntervalMapError("map is not onto [0, 1]")
    tried = []
    first_fail = None
    for net in candidate_nets(g, delta):
        if not is_delta_net(net, delta):
            continue
        tried.append(net)
        bad = net_violation(g, net)
        if bad is None:
            return CrookednessCertificate(delta, net, True, None, tuple(tried))
        if first_fail is None:
            first_fail = (net, bad)
    net, bad = first_fail
    return CrookednessCertificate(delta, net, False, bad, tuple(tried))


def crooked_refine(g: PLIntervalMap) -> PLIntervalMap:
    """Replace every monotone lap by three laps: forward two thirds, back one third, forward."""
    out = [g.points[0]]
    for (x0, y0), (x1, y1) in g.laps():
        if y0 == y1:
            out.append((x1, y1))
            continue
        dx, dy = (x1 - x0) / 3, y1 - y0
        out.append((x0 + dx, y0 + dy * 2 / 3))
        out.append((x0 + 2 * dx, y0 + dy / 3))
        out.append((x1, y1))
    return PLIntervalMap(out)


def refine_times(g: PLIntervalMap, n: int) -> PLIntervalMap:
    for _ in range(n):
        g = crooked_refine(g)
    return g


@dataclass
class ChainReport:
    """Crookedness of every tail composition ``g_k o ... o g_n`` at ``delta = 1/n``."""

    matrix: dict

    @property
    def all_verified(self) -> bool:
        return all(self.matrix.values())

    def rows(self) -> list[tuple[int, int, bool]]:
        return [(n, k, v) for (n, k), v in sorted(self.matrix.items())]


def chain_check(maps: Sequence[PLIntervalMap]) -> ChainReport:
    if not all(m.is_onto() for m in maps):
        raise IntervalMapError("every map must be onto")
    matrix = {}
    for n in range(1, len(maps) + 1):
        for k in range(1, n + 1):
            comp = compose_all(maps[k - 1:n])
            matrix[(n, k)] = is_delta_crooked(comp, Fraction(1, n)).verified
    return ChainReport(matrix)
