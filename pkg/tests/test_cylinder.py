import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from generators import GRAPHS, arc, random_height_field, random_regular, straight_over
from stairfold.cylinder import (
    CylinderPoint,
    StraightSet,
    StraightSetError,
    end_set,
    evaluate,
    mutual_disjointness,
    project,
    union_straight,
    validate_straight,
)
from stairfold.gallery import h_straight_set, snake
from stairfold.graph_core import ClosedSet

half = F(1, 2)


def flat(g, ivals, h=half):
    return StraightSet.constant(g, ClosedSet(g, ivals), h)


def test_projection_of_full_sheet():
    g = arc()
    assert project(flat(g, {"e": [(0, 1)]})) == ClosedSet.full(g)


def test_projection_of_split_base():
    g = arc()
    base = ClosedSet(g, {"e": [(0, F(1, 4)), (half, 1)]})
    assert project(StraightSet.constant(g, base, half)) == base


def test_h_graph_sheet():
    S = h_straight_set()
    assert len(S.base.components()) == 2
    assert len(end_set(S)) == 5


def test_end_set_of_full_base_is_empty():
    assert end_set(flat(arc(), {"e": [(0, 1)]})) == frozenset()


def test_end_set_of_middle_piece():
    g = arc()
    S = StraightSet(g, {"e": [((F(1, 4), F(1, 8)), (F(3, 4), F(7, 8)))]})
    assert end_set(S) == {CylinderPoint(g.point("e", F(1, 4)), F(1, 8)),
                          CylinderPoint(g.point("e", F(3, 4)), F(7, 8))}


def test_evaluate():
    g = arc()
    S = flat(g, {"e": [(0, half)]})
    assert evaluate(S, g.point("e", F(1, 4))) == half
    assert evaluate(S, g.point("e", F(3, 4))) is None
    ramp = StraightSet(g, {"e": [((0, 0), (1, 1))]})
    assert evaluate(ramp, g.point("e", F(1, 3))) == F(1, 3)


def test_validation_diagnostics():
    g = arc()
    assert validate_straight(g, {"e": [((0, half), (1, half))]}) == (True, "ok")
    ok, why = validate_straight(g, {"e": [((0, half), (1, F(3, 2)))]})
    assert not ok and "outside [0, 1]" in why
    ok, why = validate_straight(g, {"e": [((half, half),)]})
    assert not ok and "regular" in why


def test_vertex_heights_must_agree():
    g = GRAPHS["triod"]()
    with pytest.raises(StraightSetError):
        StraightSet(g, {"e0": [((0, F(1, 4)), (1, F(1, 4)))], "e1": [((0, half), (1, half))]})


def test_disjoint_constant_sheets():
    g = arc()
    ok, bad = mutual_disjointness([flat(g, {"e": [(0, 1)]}, F(1, 4)),
                                   flat(g, {"e": [(0, 1)]}, F(3, 4))])
    assert ok and bad == []


def test_crossing_sheets_report_the_crossing():
    g = arc()
    up = StraightSet(g, {"e": [((0, F(1, 4)), (1, F(3, 4)))]})
    down = StraightSet(g, {"e": [((0, F(3, 4)), (1, F(1, 4)))]})
    ok, bad = mutual_disjointness([up, down])
    assert not ok
    assert bad == [CylinderPoint(g.point("e", half), half)]


def test_snake_levels_meet_only_at_links():
    s = snake(5)
    links = set().union(*s.betas)
    ok, bad = mutual_disjointness(list(s.levels), links)
    assert ok, bad
    for i in range(4):
        ok, bad = mutual_disjointness([s.levels[i], s.levels[i + 1]])
        assert set(bad) == set(s.betas[i])


def test_union_of_agreeing_pieces():
    g = arc()
    left = flat(g, {"e": [(0, half)]})
    right = flat(g, {"e": [(half, 1)]})
    assert union_straight([left, right]) == flat(g, {"e": [(0, 1)]})


def test_restrict_and_shift():
    g = arc()
    S = StraightSet(g, {"e": [((0, 0), (1, 1))]})
    R = S.restrict(ClosedSet(g, {"e": [(F(1, 4), half)]}))
    assert R.base == ClosedSet(g, {"e": [(F(1, 4), half)]})
    assert R.height_at("e", F(3, 8)) == F(3, 8)
    with pytest.raises(StraightSetError):
        S.restrict(ClosedSet(g, {"e": [(half, half)]}))
    assert flat(g, {"e": [(0, 1)]}, F(1, 4)).shifted(F(1, 4)) == flat(g, {"e": [(0, 1)]})


@given(st.integers(0, 2 ** 32), st.sampled_from(sorted(GRAPHS)))
def test_end_set_lies_over_base_boundary(seed, kind):
    rng = random.Random(seed)
    g = GRAPHS[kind]()
    base = random_regular(rng, g)
    S = straight_over(g, base, random_height_field(rng, g))
    assert S.base == base
    ends = S.end_set()
    assert {p.base for p in ends} == base.boundary()
    for p in ends:
        assert S.contains(p)
