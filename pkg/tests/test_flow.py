"""Vertical flow: trace semantics, exact decomposition, saddle alignment."""

from fractions import Fraction as F

import pytest

from flattree import (
    FlowError,
    HalfTree,
    Mark,
    VerticalCylinder,
    area,
    build,
    cylinder_proportion,
    enumerate_halftrees,
    random_metric,
    standard_position,
    trace_vertical,
    transverse_standard_position,
    vertical_decomposition,
)


def torus(twist=0, marks=()):
    return build(HalfTree({0: [0]}, []), {0: F(1)}, {0: F(1)}, {0: F(twist)}, marks)


def one_vertex_unit(n, twist=0):
    t = HalfTree({0: list(range(n))}, [])
    return build(t, {p: F(1) for p in range(n)}, {0: F(1)}, {0: F(twist)})


@pytest.fixture
def path3_surface():
    t = HalfTree({0: [0], 1: [1, 2], 2: [3]}, [(0, 1), (2, 3)])
    return build(
        t,
        {0: F(2), 1: F(2), 2: F(3, 2), 3: F(3, 2)},
        {0: F(1), 1: F(1, 2), 2: F(2)},
        {0: F(1, 3), 1: F(0), 2: F(1)},
    )


class TestTrace:
    def test_unit_torus_closes_after_one_crossing(self):
        tr = trace_vertical(torus(), (0, F(1, 2)))
        assert tr.closed
        assert tr.crossings == ((0, F(1, 2)),)
        assert tr.length == 1
        assert tr.hit is None

    def test_twisted_orbit_visits_before_closing(self):
        tr = trace_vertical(torus(F(1, 3)), (0, F(1, 5)))
        assert tr.closed
        assert tr.length == 3
        assert len(tr.crossings) == 3

    def test_terminates_on_zero(self):
        s = one_vertex_unit(3, twist=F(1, 2))
        tr = trace_vertical(s, (0, F(1, 2)))
        assert not tr.closed
        assert tr.hit == ("zero", (0, "t", F(1)))
        assert tr.length == 1

    def test_terminates_on_mark(self):
        s = torus(F(1, 4), marks=[Mark(0, F(1, 2))])
        tr = trace_vertical(s, (0, F(1, 4)))
        assert not tr.closed
        assert tr.hit == ("mark", (0, F(1, 2)))

    def test_singular_start_rejected(self):
        with pytest.raises(FlowError, match="singular corner"):
            trace_vertical(one_vertex_unit(3), (0, F(1)))

    def test_marked_start_rejected(self):
        s = torus(marks=[Mark(0, F(1, 2))])
        with pytest.raises(FlowError, match="marked point"):
            trace_vertical(s, (0, F(1, 2)))

    def test_unknown_cylinder_rejected(self):
        with pytest.raises(FlowError, match="no cylinder"):
            trace_vertical(torus(), (9, F(1, 2)))

    def test_offset_normalized_into_circle(self):
        tr = trace_vertical(torus(), (0, F(7, 2)))
        assert tr.start == (0, F(1, 2))


class TestDecomposition:
    def test_unit_torus_single_cylinder(self):
        assert vertical_decomposition(torus()) == (
            VerticalCylinder(F(1), F(1), ((0, F(0)),)),
        )

    def test_twisted_torus_spirals(self):
        (vc,) = vertical_decomposition(torus(F(1, 2)))
        assert vc == VerticalCylinder(F(1, 2), F(2), ((0, F(0)), (0, F(1, 2))))

    def test_three_saddle_cylinder_splits(self):
        dec = vertical_decomposition(one_vertex_unit(3))
        assert sorted((c.width, c.core) for c in dec) == [(1, 1), (1, 2)]

    def test_area_identity_over_fixture_sweep(self):
        for n in range(1, 7):
            for t in enumerate_halftrees(n):
                for seed in (0, 1):
                    s = random_metric(t, seed)
                    dec = vertical_decomposition(s)
                    assert sum(c.area for c in dec) == area(s)

    def test_marks_act_as_barriers(self):
        plain = torus()
        marked = torus(marks=[Mark(0, F(1, 2))])
        assert len(vertical_decomposition(plain)) == 1
        widths = sorted(c.width for c in vertical_decomposition(marked))
        assert widths == [F(1, 2), F(1, 2)]
        assert sum(c.area for c in vertical_decomposition(marked)) == area(marked)

    def test_trace_agrees_with_decomposition(self, path3_surface):
        for seed in range(3):
            s = random_metric(path3_surface.skeleton, seed)
            for vc in vertical_decomposition(s):
                v, x = vc.crossings[0]
                tr = trace_vertical(s, (v, x + vc.width / 2))
                assert tr.closed
                assert tr.length == vc.core
                assert sorted(tr.crossings) == sorted(
                    (u, y + vc.width / 2) for u, y in vc.crossings
                )

    def test_representation_invariance_under_rotation(self, path3_surface):
        s = path3_surface
        rot = HalfTree({0: [0], 1: [2, 1], 2: [3]}, [(0, 1), (2, 3)])
        shifted = (s.twists[1] + 2 * s.lengths[1]) % s.circumference(1)
        r = build(rot, s.lengths, s.heights, {0: s.twists[0], 1: shifted, 2: s.twists[2]})
        shapes = lambda surf: sorted((c.width, c.core) for c in vertical_decomposition(surf))
        assert shapes(s) == shapes(r)


class TestStandardPosition:
    def test_witness_shape(self, path3_surface):
        std = standard_position(path3_surface, 0)
        assert std.cylinders == (0, 1)
        assert std.vertical.width == path3_surface.lengths[0]
        assert std.vertical.core == path3_surface.heights[0] + path3_surface.heights[1]
        assert {v for v, _ in std.vertical.crossings} == {0, 1}

    def test_deltas_are_reapplied_as_zero(self, path3_surface):
        std = standard_position(path3_surface, 0)
        again = standard_position(std.surface, 0)
        assert again.deltas == {0: F(0), 1: F(0)}
        assert again.surface == std.surface

    def test_only_named_cylinders_change(self, path3_surface):
        std = standard_position(path3_surface, 0)
        assert std.surface.twists[2] == path3_surface.twists[2]
        assert std.surface.lengths == path3_surface.lengths
        assert std.surface.heights == path3_surface.heights

    def test_every_edge_of_every_fixture(self):
        for n in range(2, 7):
            for t in enumerate_halftrees(n):
                s = random_metric(t, seed=2)
                for p, q in t.edges():
                    std = standard_position(s, p)
                    assert std.vertical.width == s.lengths[p]
                    assert std.vertical.core == s.heights[t.vertex_of(p)] + s.heights[t.vertex_of(q)]

    def test_half_edge_rejected(self):
        with pytest.raises(FlowError, match="self-glued"):
            standard_position(one_vertex_unit(3), 0)

    def test_marked_saddle_rejected(self, path3_surface):
        from flattree import involution_orbit, with_marks

        marked = with_marks(path3_surface, involution_orbit(path3_surface, Mark(0, F(1, 2))))
        with pytest.raises(FlowError, match="marked points on saddle"):
            standard_position(marked, 0)

    def test_unknown_saddle_rejected(self, path3_surface):
        with pytest.raises(FlowError, match="no saddle"):
            standard_position(path3_surface, 42)


class TestTransverse:
    def test_first_cylinder_fixed(self, path3_surface):
        tv = transverse_standard_position(path3_surface, 0)
        assert tv.deltas[0] == 0
        assert tv.surface.twists[0] == path3_surface.twists[0]

    def test_direction_absorbs_first_delta(self, path3_surface):
        std = standard_position(path3_surface, 0)
        tv = transverse_standard_position(path3_surface, 0)
        assert tv.sigma == std.deltas[0] / path3_surface.heights[0]
        assert tv.direction == (tv.sigma, F(1))

    def test_sheared_witness_shape(self, path3_surface):
        tv = transverse_standard_position(path3_surface, 0)
        assert tv.vertical.width == path3_surface.lengths[0]
        assert tv.vertical.core == path3_surface.heights[0] + path3_surface.heights[1]

    def test_already_vertical_means_zero_sigma(self, path3_surface):
        std = standard_position(path3_surface, 0)
        tv = transverse_standard_position(std.surface, 0)
        assert tv.sigma == 0
        assert tv.sheared == std.surface


class TestProportion:
    def test_full_decomposition_covers_everything(self):
        for n in range(1, 6):
            for t in enumerate_halftrees(n):
                s = random_metric(t, seed=4)
                dec = vertical_decomposition(s)
                for v in t.vertices:
                    assert cylinder_proportion(s, dec, v) == 1

    def test_witness_proportions(self, path3_surface):
        std = standard_position(path3_surface, 0)
        ell = path3_surface.lengths[0]
        assert cylinder_proportion(std.surface, [std.vertical], 0) == ell / F(2)
        assert cylinder_proportion(std.surface, [std.vertical], 1) == ell / F(7, 2)
        assert cylinder_proportion(std.surface, [std.vertical], 2) == 0

    def test_empty_set(self, path3_surface):
        assert cylinder_proportion(path3_surface, [], 0) == 0

    def test_foreign_cylinder_rejected(self, path3_surface):
        std = standard_position(path3_surface, 0)
        with pytest.raises(FlowError, match="not from the current decomposition"):
            cylinder_proportion(path3_surface, [std.vertical], 0)

    def test_unknown_horizontal_cylinder(self, path3_surface):
        with pytest.raises(FlowError, match="no cylinder"):
            cylinder_proportion(path3_surface, [], 17)
