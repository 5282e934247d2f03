"""Degeneration procedures: saddle shrinking and cylinder deletion."""

from fractions import Fraction

import pytest

from flattree import (
    CollapseError,
    DisjointSurface,
    GluedSurface,
    HalfTree,
    Mark,
    Seam,
    area,
    build,
    canonical_form,
    certify_hyperelliptic,
    enumerate_halftrees,
    horizontal_collapse,
    lower,
    random_metric,
    singleton_partitions,
    singularity_profile,
    involution_orbit,
    vertical_collapse,
    with_marks,
)

F = Fraction


@pytest.fixture
def path3():
    """Plain three-cylinder chain, two zeros of order one."""
    t = HalfTree({0: [0], 1: [1, 2], 2: [3]}, [(0, 1), (2, 3)])
    lengths = {0: F(2), 1: F(2), 2: F(1), 3: F(1)}
    heights = {0: F(1), 1: F(1, 2), 2: F(3)}
    twists = {0: F(0), 1: F(0), 2: F(0)}
    return build(t, lengths, heights, twists)


@pytest.fixture
def horned_path3():
    """Chain whose leaves carry a self-glued saddle each."""
    t = HalfTree({0: [0, 1], 1: [2, 3], 2: [4, 5]}, [(1, 2), (3, 4)])
    lengths = {0: F(1), 1: F(2), 2: F(2), 3: F(3), 4: F(3), 5: F(1, 2)}
    heights = {0: F(1), 1: F(2), 2: F(1)}
    twists = {0: F(0), 1: F(1), 2: F(0)}
    return build(t, lengths, heights, twists)


def full_edge_class_containing(s, port):
    """Singleton partition of the edges, then merge nothing: locate the class index."""
    sp = singleton_partitions(s.skeleton)[1]
    key = s.skeleton.edge_object_of(port)[0]
    return sp, [F(1) if key in g else F(0) for g in sp.classes]


class TestCertifyHyperelliptic:
    def test_any_built_surface_passes(self, path3):
        assert certify_hyperelliptic(path3).ok

    def test_glued_representation_passes(self, path3):
        assert certify_hyperelliptic(lower(path3)).ok

    def test_disjoint_union_concatenates(self, path3, horned_path3):
        d = DisjointSurface((path3, horned_path3), ())
        res = certify_hyperelliptic(d)
        assert res.ok
        assert len(res.components) == 2

    def test_cycle_diagram_fails(self):
        seams = {
            0: Seam(0, (0, F(0)), (1, F(0)), F(1)),
            1: Seam(1, (0, F(1)), (1, F(1)), F(1)),
            2: Seam(2, (1, F(0)), (0, F(0)), F(1)),
            3: Seam(3, (1, F(1)), (0, F(1)), F(1)),
        }
        gs = GluedSurface({0: (F(2), F(1), F(0)), 1: (F(2), F(1), F(0))}, seams, ())
        res = certify_hyperelliptic(gs)
        assert not res.ok

    def test_rejects_other_types(self):
        with pytest.raises(TypeError):
            certify_hyperelliptic(42)


class TestVerticalCollapse:
    def test_all_zero_is_identity(self, path3):
        sp = singleton_partitions(path3.skeleton)[1]
        res = vertical_collapse(path3, sp, [F(0)] * len(sp.classes))
        assert len(res.surfaces.components) == 1
        assert res.surfaces.components[0] == path3
        assert res.collapsed_area == 0

    def test_half_proportion_rescales_one_class(self, path3):
        sp, props = full_edge_class_containing(path3, 0)
        props = [F(1, 2) if p == 1 else F(0) for p in props]
        res = vertical_collapse(path3, sp, props)
        (out,) = res.surfaces.components
        assert canonical_form(out.skeleton).encoding == canonical_form(path3.skeleton).encoding
        assert out.lengths[0] == F(1) and out.lengths[1] == F(1)
        assert out.lengths[2] == path3.lengths[2]
        assert out.heights == path3.heights

    def test_full_collapse_splits_into_subtrees(self, horned_path3):
        sp, props = full_edge_class_containing(horned_path3, 1)
        res = vertical_collapse(horned_path3, sp, props)
        comps = res.surfaces.components
        assert len(comps) == 2
        assert [sorted(c.skeleton.vertices) for c in comps] == [[0], [1, 2]]
        assert comps[0].skeleton.half_edge_ports() == (0,)
        assert set(comps[1].skeleton.all_ports) == {3, 4, 5}
        assert res.certification.ok
        assert not res.dropped_cylinders

    def test_bare_leaf_drops_to_a_point(self, path3):
        sp, props = full_edge_class_containing(path3, 0)
        res = vertical_collapse(path3, sp, props)
        assert res.dropped_cylinders == (0,)
        assert any("collapsed to a point" in n for n in res.notices)
        assert [sorted(c.skeleton.vertices) for c in res.surfaces.components] == [[1, 2]]

    def test_area_accounting_is_exact(self, horned_path3):
        sp, props = full_edge_class_containing(horned_path3, 1)
        res = vertical_collapse(horned_path3, sp, props)
        assert res.area_before == area(horned_path3)
        assert res.area_before == res.area_after + res.collapsed_area
        # the vanished edge had length 2 and borders cylinders 0 and 1
        lost = F(2) * horned_path3.heights[0] + F(2) * horned_path3.heights[1]
        assert res.collapsed_area == lost

    def test_half_edge_class_cannot_vanish(self, horned_path3):
        sp, props = full_edge_class_containing(horned_path3, 0)
        with pytest.raises(CollapseError, match="self-glued"):
            vertical_collapse(horned_path3, sp, props)

    def test_nothing_surviving_is_an_error(self):
        t = HalfTree({0: [0], 1: [1]}, [(0, 1)])
        s = build(t, {0: F(1), 1: F(1)}, {0: F(1), 1: F(1)}, {0: F(0), 1: F(0)})
        sp = singleton_partitions(t)[1]
        with pytest.raises(CollapseError, match="nothing survives"):
            vertical_collapse(s, sp, [F(1)])

    def test_proportion_out_of_range(self, path3):
        sp = singleton_partitions(path3.skeleton)[1]
        with pytest.raises(CollapseError, match="outside"):
            vertical_collapse(path3, sp, [F(2), F(0)])

    def test_marks_scale_with_their_saddle(self, path3):
        s = with_marks(path3, involution_orbit(path3, Mark(0, F(1, 2))))
        sp, props = full_edge_class_containing(s, 0)
        props = [p / 2 for p in props]
        res = vertical_collapse(s, sp, props)
        (out,) = res.surfaces.components
        assert Mark(0, F(1, 4)) in out.marks
        assert Mark(1, F(3, 4)) in out.marks

    def test_marks_on_deleted_saddle_dropped_with_notice(self, path3):
        s = with_marks(path3, involution_orbit(path3, Mark(0, F(1, 2))))
        sp, props = full_edge_class_containing(s, 0)
        res = vertical_collapse(s, sp, props)
        assert all(not c.marks for c in res.surfaces.components)
        assert sum("dropped" in n and "mark" in n for n in res.notices) == 2

    @pytest.mark.parametrize("n", range(2, 6))
    def test_components_match_predicted_subtrees(self, n):
        for t in enumerate_halftrees(n):
            edges = t.edges()
            if not edges:
                continue
            s = random_metric(t, seed=n)
            sp = singleton_partitions(t)[1]
            target = t.edge_object_of(edges[0][0])[0]
            props = [F(1) if g[0] == target else F(0) for g in sp.classes]
            try:
                res = vertical_collapse(s, sp, props)
            except CollapseError as exc:
                assert "nothing survives" in str(exc)
                continue
            assert res.certification.ok
            # predicted components: flood fill over the surviving edges
            kept = [e for e in edges if t.edge_object_of(e[0])[0] != target]
            reach = {v: {v} for v in t.vertices}
            for p, q in kept:
                a, b = t.vertex_of(p), t.vertex_of(q)
                merged = reach[a] | reach[b]
                for v in merged:
                    reach[v] = merged
            predicted = {frozenset(g) for g in reach.values()}
            survivors = {
                frozenset(c.skeleton.vertices) for c in res.surfaces.components
            }
            for group in survivors:
                assert group in predicted


class TestHorizontalCollapse:
    def test_middle_deletion_joins_the_outer_cylinders(self, path3):
        res = horizontal_collapse(path3, {1})
        assert len(res.surfaces.components) == 1
        (out,) = res.surfaces.components
        assert sorted(out.skeleton.vertices) == [0, 2]
        assert singularity_profile(out).orders == (2,)
        assert res.certification.ok

    def test_area_drops_by_the_deleted_cylinder(self, path3):
        res = horizontal_collapse(path3, {1})
        middle = path3.circumference(1) * path3.heights[1]
        assert res.deleted_area == middle
        assert res.area_before == res.area_after + middle

    def test_junction_kinds(self, path3):
        res = horizontal_collapse(path3, {1})
        kinds = {x: kind for _, x, kind in res.junctions}
        assert kinds == {F(0): "both", F(1): "top", F(2): "bottom"}

    def test_forest_report_shape(self, path3):
        res = horizontal_collapse(path3, {1})
        (report,) = res.forests
        assert report.is_forest
        assert len(report.edges) == 1
        assert len(report.half_edge_strips) == 1

    def test_twist_can_split_the_surface(self, path3):
        shifted = build(
            path3.skeleton,
            path3.lengths,
            path3.heights,
            {0: F(0), 1: F(1), 2: F(0)},
        )
        res = horizontal_collapse(shifted, {1})
        assert len(res.surfaces.components) == 2
        for out in res.surfaces.components:
            assert singularity_profile(out).orders == (0,)
        assert res.certification.ok

    def test_leaf_deletion(self, path3):
        res = horizontal_collapse(path3, {0})
        assert len(res.surfaces.components) == 1
        (out,) = res.surfaces.components
        assert singularity_profile(out).orders == (2,)
        assert not out.marks

    def test_adjacent_pair_rejected(self, path3):
        with pytest.raises(CollapseError, match="self-adjacent"):
            horizontal_collapse(path3, {0, 1})

    def test_self_glued_member_rejected(self, horned_path3):
        with pytest.raises(CollapseError, match="glued to itself"):
            horizontal_collapse(horned_path3, {0})

    def test_complement_must_be_nonempty(self, path3):
        with pytest.raises(CollapseError, match="every cylinder"):
            horizontal_collapse(path3, {0, 1, 2})

    def test_empty_set_rejected(self, path3):
        with pytest.raises(CollapseError, match="nothing to delete"):
            horizontal_collapse(path3, set())

    def test_unknown_cylinder_rejected(self, path3):
        with pytest.raises(CollapseError, match="no cylinder 7"):
            horizontal_collapse(path3, {7})

    def test_missing_vertical_saddle_asks_for_a_shear(self, path3):
        sheared = build(
            path3.skeleton,
            path3.lengths,
            path3.heights,
            {0: F(0), 1: F(1, 7), 2: F(0)},
        )
        with pytest.raises(CollapseError, match="shear first"):
            horizontal_collapse(sheared, {1})

    def test_marks_ride_through_the_regluing(self, path3):
        s = with_marks(path3, involution_orbit(path3, Mark(0, F(1, 4))))
        res = horizontal_collapse(s, {1})
        (out,) = res.surfaces.components
        assert len(out.marks) == 2
        assert res.certification.ok

    def test_vertically_aligned_marks_merge(self, path3):
        # with twist zero, a mark and its involution partner share a vertical
        # line through the middle cylinder; after deletion they are one point
        s = with_marks(path3, involution_orbit(path3, Mark(0, F(1, 2))))
        res = horizontal_collapse(s, {1})
        (out,) = res.surfaces.components
        assert len(out.marks) == 1
        half_edge = out.skeleton.half_edge_ports()[0]
        assert out.marks[0].port == half_edge
        assert res.certification.ok

    def test_mark_on_junction_merges_with_the_zero(self, path3):
        s = with_marks(path3, involution_orbit(path3, Mark(0, F(1))))
        res = horizontal_collapse(s, {1})
        (out,) = res.surfaces.components
        assert not out.marks
        assert sum("merged into a junction" in n for n in res.notices) == 2

    def test_gluing_records_cover_the_deleted_circles(self, path3):
        res = horizontal_collapse(path3, {1})
        assert sum(g.length for g in res.gluings) == path3.circumference(1)
        assert all(g.deleted == 1 for g in res.gluings)

    @pytest.mark.parametrize("n", range(2, 6))
    def test_single_deletions_always_certify(self, n):
        for t in enumerate_halftrees(n):
            if len(t.vertices) < 2:
                continue
            for c in t.vertices:
                if any(t.partner(p) is None for p in t.ports(c)):
                    continue
                s = random_metric(t, seed=n)
                # align the first bottom corner with a boundary corner above
                p0 = t.ports(c)[0]
                L = s.circumference(c)
                aligned = (L - s.port_start(p0) - s.lengths[p0]) % L
                s = build(
                    t,
                    s.lengths,
                    s.heights,
                    {**s.twists, c: aligned},
                    s.marks,
                )
                res = horizontal_collapse(s, {c})
                assert res.certification.ok
                assert all(f.is_forest for f in res.forests)
                assert res.area_before == res.area_after + res.deleted_area


class TestReports:
    def test_vertical_report_is_json_ready(self, horned_path3):
        import json

        from flattree import vertical_collapse_report

        sp, props = full_edge_class_containing(horned_path3, 1)
        res = vertical_collapse(horned_path3, sp, props)
        doc = vertical_collapse_report(res)
        assert json.dumps(doc)
        assert doc["certified"] is True
        assert doc["area"]["before"] == "33/2"

    def test_horizontal_report_is_json_ready(self, path3):
        import json

        from flattree import horizontal_collapse_report

        res = horizontal_collapse(path3, {1})
        doc = horizontal_collapse_report(res)
        assert json.dumps(doc)
        assert doc["deleted_cylinders"] == [1]
        assert len(doc["gluings"]) == 3
        assert doc["certified"] is True
