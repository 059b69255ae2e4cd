import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from generators import arc, random_separator, triod, with_spurs
from stairfold.gallery import flat_separator, triod_separator, zigzag_separator
from stairfold.separator import (
    ComplexError,
    NotSeparatorError,
    PLComplex,
    Tube,
    TubeTooThin,
    classify_node,
    irreducible_core,
    label_faces,
    nudge_generic,
    remove_branch_points,
    separates,
    turning_points,
)

half = F(1, 2)


def minimal(M: PLComplex) -> bool:
    """Deleting any one segment destroys separation."""
    return all(not separates(M.without([i])) for i in range(len(M)))


class TestComplex:
    def test_segment_order_is_normalized(self):
        g = arc()
        M = PLComplex(g, [("e", (1, half), (0, half))])
        assert M.segments == (("e", (F(0), half), (F(1), half)),)

    def test_crossing_rejected(self):
        g = arc()
        with pytest.raises(ComplexError, match="meet away"):
            PLComplex(g, [("e", (0, F(1, 4)), (1, F(3, 4))), ("e", (0, F(3, 4)), (1, F(1, 4)))])

    def test_normalized_splits_crossing(self):
        g = arc()
        M = PLComplex(g, [("e", (0, F(1, 4)), (1, F(3, 4))), ("e", (0, F(3, 4)), (1, F(1, 4)))],
                      check=False).normalized()
        assert len(M) == 4
        assert classify_node(M, ("e", "e", half, half)) == "branch"

    def test_height_must_stay_open(self):
        with pytest.raises(ComplexError, match="outside"):
            PLComplex(arc(), [("e", (0, 0), (1, half))])

    def test_fiber_points(self):
        M = zigzag_separator()
        assert M.fiber_count(arc().point("e", half)) == 5
        assert M.fiber_count(arc().point("e", F(1, 10))) == 1


class TestSeparation:
    def test_flat_sheet(self):
        assert separates(flat_separator(triod()))

    def test_half_sheet_leaks(self):
        g = arc()
        assert not separates(PLComplex(g, [("e", (0, half), (half, half))]))

    def test_triod_example(self):
        assert separates(triod_separator())

    def test_missing_leg_leaks(self):
        g = triod()
        M = PLComplex(g, [(e, (0, half), (1, half)) for e in ("e0", "e1")])
        assert not separates(M)

    def test_labels(self):
        lab = label_faces(flat_separator(arc()))
        assert lab.label_at("e", half, F(1, 4)) == "R0"
        assert lab.label_at("e", half, F(3, 4)) == "R1"


class TestCore:
    def test_drops_floating_arc(self):
        g = arc()
        sheet = ("e", (F(0), half), (F(1), half))
        floater = ("e", (F(1, 4), F(3, 4)), (F(3, 4), F(3, 4)))
        core = irreducible_core(PLComplex(g, [sheet, floater]))
        assert core.segments == (sheet,)

    def test_two_parallel_sheets_keep_one(self):
        g = arc()
        M = PLComplex(g, [("e", (0, F(1, 4)), (1, F(1, 4))), ("e", (0, F(3, 4)), (1, F(3, 4)))])
        core = irreducible_core(M)
        assert len(core) == 1
        assert separates(core) and minimal(core)

    def test_non_separator_refused(self):
        with pytest.raises(NotSeparatorError):
            irreducible_core(PLComplex(arc(), [("e", (0, half), (half, half))]))

    def test_spurs_removed(self):
        M = flat_separator(arc())
        spurred = with_spurs(random.Random(7), M, 2)
        assert len(spurred) > len(M)
        assert irreducible_core(spurred) == M

    @given(st.integers(0, 2 ** 32))
    def test_core_is_minimal_and_idempotent(self, seed):
        M = random_separator(random.Random(seed))
        core = irreducible_core(M)
        assert separates(core)
        assert set(core.segments) <= set(M.segments)
        assert irreducible_core(core) == core
        assert minimal(core)


class TestLocalStructure:
    def test_triod_branch_point(self):
        M = triod_separator()
        kinds = {k: classify_node(M, k) for k in M.nodes()}
        assert kinds[("e", "e0", half, F(5, 8))] == "branch"
        assert ("e", "e0", F(3, 4), F(3, 8)) in kinds
        assert kinds[("e", "e0", F(3, 4), F(3, 8))] == "tip"

    def test_zigzag_turns(self):
        M = zigzag_separator()
        xs = sorted(p.base.t for p in turning_points(M))
        assert xs == [F(1, 5), F(3, 10), F(7, 10), F(4, 5)]

    def test_flat_has_no_turns(self):
        assert turning_points(flat_separator(triod())) == frozenset()

    def test_branch_removal_keeps_separation_and_tube(self):
        M = triod_separator()
        tube = Tube(M, F(1, 16))
        out = remove_branch_points(M, tube)
        assert separates(out)
        assert tube.contains(out)
        assert all(classify_node(out, k) in ("regular", "tip") for k in out.nodes())


class TestNudge:
    def test_shared_projection_split(self):
        g = arc()
        # two tips over t = 1/2 and a third over the forbidden point 1/4
        M = PLComplex(g, [("e", (0, F(1, 8)), (half, F(1, 4))),
                          ("e", (half, F(1, 4)), (F(1, 4), F(3, 8))),
                          ("e", (F(1, 4), F(3, 8)), (half, F(1, 2))),
                          ("e", (half, F(1, 2)), (0, F(5, 8)))])
        out = nudge_generic(M, forbidden={g.point("e", F(1, 4))})
        xs = [p.base for p in turning_points(out)]
        assert len(xs) == len(set(xs)) == 3
        assert g.point("e", F(1, 4)) not in xs

    def test_generic_input_unchanged(self):
        M = zigzag_separator()
        assert nudge_generic(M) == M

    def test_tube_respected(self):
        M = zigzag_separator()
        tube = Tube(M, F(1, 32))
        x = sorted(turning_points(M), key=lambda p: p.base.t)[0].base
        out = nudge_generic(M, forbidden={x}, tube=tube)
        assert tube.contains(out)
        assert x not in {p.base for p in turning_points(out)}


class TestTube:
    def test_contains_centre(self):
        M = zigzag_separator()
        assert Tube(M, F(1, 64)).contains(M)

    def test_shifted_copy(self):
        g = arc()
        M = flat_separator(g)
        assert Tube(M, F(1, 8)).contains(flat_separator(g, half + F(1, 16)))
        assert not Tube(M, F(1, 8)).contains(flat_separator(g, half + F(1, 8)))

    def test_radius_floor(self):
        with pytest.raises(TubeTooThin):
            Tube(flat_separator(arc()), F(1, 2 ** 30)).check_radius()
