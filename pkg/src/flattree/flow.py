"""Vertical flow: trajectories, cylinder decompositions, saddle alignment.

All flow here goes straight up.  Inside a cylinder the vertical coordinate is
untouched; crossing the top boundary applies the twist, so the first-return
map on the union of bottom circles is a piecewise translation.  Rational data
make every orbit periodic, which is what lets the decomposition be exact.

A trajectory stops when it meets a zero or a marked point; decoration marks
therefore act as vertical barriers and may subdivide what would otherwise be
a single vertical cylinder.  Widths and areas are unaffected.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .surface import HyperellipticSurface, build


class FlowError(ValueError):
    """A flow precondition failed: singular start, foreign cylinder, bad saddle."""


@dataclass(frozen=True)
class Trajectory:
    """Record of one upward vertical trajectory.

    ``crossings`` lists (cylinder, bottom offset) each time a core circle is
    entered; ``length`` sums the heights of the cylinders fully crossed.  A
    closed trajectory returned to its start; otherwise ``hit`` names the zero
    corner (cylinder, "t", top position) or the mark (seam, offset) that
    stopped it.
    """

    start: tuple[int, Fraction]
    closed: bool
    crossings: tuple[tuple[int, Fraction], ...]
    length: Fraction
    hit: tuple | None = None


@dataclass(frozen=True)
class VerticalCylinder:
    width: Fraction
    core: Fraction
    crossings: tuple[tuple[int, Fraction], ...]

    @property
    def area(self) -> Fraction:
        return self.width * self.core

    def crossing_count(self, vertex: int) -> int:
        return sum(1 for v, _ in self.crossings if v == vertex)


class _Geometry:
    """Indexed circle layouts of one surface, shared by the walkers."""

    def __init__(self, s: HyperellipticSurface):
        self.s = s
        t = s.skeleton
        self.L = {v: s.circumference(v) for v in t.vertices}
        self.bottom_starts: dict[int, list[Fraction]] = {}
        self.bottom_ports: dict[int, list[int]] = {}
        self.top_starts: dict[int, list[Fraction]] = {}
        self.top_ports: dict[int, list[int]] = {}
        for v in t.vertices:
            starts, ports = [], []
            a = Fraction(0)
            for p in t.ports(v):
                starts.append(a)
                ports.append(p)
                a += s.lengths[p]
            self.bottom_starts[v], self.bottom_ports[v] = starts, ports
        tops: dict[int, list[tuple[Fraction, int]]] = {v: [] for v in t.vertices}
        for p in t.all_ports:
            (_, _), (w, ts) = s.seam_sides(p)
            tops[w].append((ts, p))
        for v, entries in tops.items():
            entries.sort()
            self.top_starts[v] = [e[0] for e in entries]
            self.top_ports[v] = [e[1] for e in entries]
        self.mark_offsets: dict[int, set[Fraction]] = {}
        self.bottom_mark_positions: dict[int, set[Fraction]] = {v: set() for v in t.vertices}
        for m in s.marks:
            self.mark_offsets.setdefault(m.port, set()).add(m.offset)
            v = t.vertex_of(m.port)
            self.bottom_mark_positions[v].add(s.port_start(m.port) + m.offset)

    def step_up(self, v: int, x: Fraction):
        """Cross cylinder ``v`` upward from bottom position ``x``.

        Returns ("cross", vertex, position), ("zero", corner) or
        ("mark", seam, offset).
        """
        y = (x + self.s.twists[v]) % self.L[v]
        starts = self.top_starts[v]
        idx = bisect_right(starts, y) - 1
        ts = starts[idx]
        if y == ts:
            return ("zero", (v, "t", y))
        p = self.top_ports[v]
        seam = p[idx]
        offset = y - ts
        if offset in self.mark_offsets.get(seam, ()):
            return ("mark", (seam, offset))
        above_vertex = self.s.skeleton.vertex_of(seam)
        return ("cross", above_vertex, self.s.port_start(seam) + offset)

    def step_down(self, v: int, x: Fraction) -> tuple[int, Fraction] | None:
        """Pull a non-corner bottom position down through the cylinder below."""
        starts = self.bottom_starts[v]
        idx = bisect_right(starts, x) - 1
        if x == starts[idx]:
            return None
        seam = self.bottom_ports[v][idx]
        (_, _), (w, ts) = self.s.seam_sides(seam)
        y = ts + (x - starts[idx])
        return (w, (y - self.s.twists[w]) % self.L[w])

    def step_limit(self) -> int:
        """Safe iteration bound: number of representable circle positions."""
        den = 1
        vals = list(self.s.twists.values()) + list(self.s.lengths.values())
        vals += [m.offset for m in self.s.marks]
        for val in vals:
            den = math.lcm(den, val.denominator)
        total = sum(int(self.L[v] * den) for v in self.L)
        return 2 * total + 4


def trace_vertical(s: HyperellipticSurface, start: tuple[int, Fraction]) -> Trajectory:
    """Follow the upward vertical from a core-circle point until it closes or dies.

    ``start`` is (cylinder, bottom-circle offset).  The offset must avoid
    saddle endpoints and marked points: trajectories out of distinguished
    points are prongs, not flow lines.
    """
    geo = _Geometry(s)
    v, x = start
    if v not in geo.L:
        raise FlowError(f"no cylinder {v}")
    x = Fraction(x) % geo.L[v]
    if x in geo.bottom_starts[v]:
        raise FlowError(f"start ({v}, {x}) lies on a singular corner")
    if x in geo.bottom_mark_positions[v]:
        raise FlowError(f"start ({v}, {x}) lies on a marked point")
    crossings: list[tuple[int, Fraction]] = [(v, x)]
    length = Fraction(0)
    limit = geo.step_limit()
    cur_v, cur_x = v, x
    for _ in range(limit):
        outcome = geo.step_up(cur_v, cur_x)
        length += s.heights[cur_v]
        if outcome[0] != "cross":
            return Trajectory((v, x), False, tuple(crossings), length, outcome)
        _, cur_v, cur_x = outcome
        if (cur_v, cur_x) == (v, x):
            return Trajectory((v, x), True, tuple(crossings), length)
        crossings.append((cur_v, cur_x))
    raise RuntimeError("vertical trace exceeded the rational step bound")


def _split_points(geo: _Geometry) -> dict[int, list[Fraction]]:
    """Positions where verticals split, closed under the return map both ways."""
    s = geo.s
    split: dict[int, set[Fraction]] = {}
    for v in geo.L:
        seed = set(geo.bottom_starts[v])
        seed |= {(c - s.twists[v]) % geo.L[v] for c in geo.top_starts[v]}
        seed |= geo.bottom_mark_positions[v]
        for p, offsets in geo.mark_offsets.items():
            (_, _), (w, ts) = s.seam_sides(p)
            if w == v:
                seed |= {(ts + u - s.twists[v]) % geo.L[v] for u in offsets}
        split[v] = seed
    work = [(v, x) for v in split for x in split[v]]
    while work:
        v, x = work.pop()
        outcome = geo.step_up(v, x)
        if outcome[0] == "cross":
            _, u, x2 = outcome
            if x2 not in split[u]:
                split[u].add(x2)
                work.append((u, x2))
        down = geo.step_down(v, x)
        if down is not None:
            w, x0 = down
            if x0 not in split[w]:
                split[w].add(x0)
                work.append((w, x0))
    return {v: sorted(pts) for v, pts in split.items()}


def vertical_decomposition(s: HyperellipticSurface) -> tuple[VerticalCylinder, ...]:
    """Decompose the vertical direction into maximal cylinders, exactly.

    Maximal open intervals between split points are permuted by the return
    map; each orbit is one vertical cylinder whose core length is the summed
    height of the cylinders it crosses.  Widths times cores add up to the
    surface area with no tolerance.
    """
    geo = _Geometry(s)
    split = _split_points(geo)
    intervals: list[tuple[int, Fraction, Fraction]] = []
    index: dict[tuple[int, Fraction], int] = {}
    for v, pts in split.items():
        L = geo.L[v]
        for i, x in enumerate(pts):
            nxt = pts[i + 1] if i + 1 < len(pts) else pts[0] + L
            index[(v, x)] = len(intervals)
            intervals.append((v, x, nxt - x))
    succ: list[int] = []
    for v, x, width in intervals:
        y = (x + s.twists[v]) % geo.L[v]
        starts = geo.top_starts[v]
        idx = bisect_right(starts, y) - 1
        seam = geo.top_ports[v][idx]
        u = s.skeleton.vertex_of(seam)
        x2 = s.port_start(seam) + (y - starts[idx])
        succ.append(index[(u, x2)])
    assert len(set(succ)) == len(succ), "interval map failed to be a bijection"
    seen = [False] * len(intervals)
    cylinders: list[VerticalCylinder] = []
    for i in range(len(intervals)):
        if seen[i]:
            continue
        cycle = []
        j = i
        while not seen[j]:
            seen[j] = True
            cycle.append(j)
            j = succ[j]
        widths = {intervals[k][2] for k in cycle}
        assert len(widths) == 1, "interval orbit changed width"
        crossings = [(intervals[k][0], intervals[k][1]) for k in cycle]
        pivot = crossings.index(min(crossings))
        crossings = crossings[pivot:] + crossings[:pivot]
        core = sum((s.heights[v] for v, _ in crossings), Fraction(0))
        cylinders.append(VerticalCylinder(widths.pop(), core, tuple(crossings)))
    return tuple(sorted(cylinders, key=lambda c: c.crossings))


def cylinder_proportion(
    s: HyperellipticSurface, vertical_set: Iterable[VerticalCylinder], cylinder: int
) -> Fraction:
    """Exact share of horizontal cylinder ``cylinder`` covered by ``vertical_set``.

    Each crossing of width w through C occupies area w * height(C), so the
    proportion is the crossing-weighted width over C's circumference.
    """
    if cylinder not in set(s.skeleton.vertices):
        raise FlowError(f"no cylinder {cylinder}")
    current = set(vertical_decomposition(s))
    chosen = set(vertical_set)
    foreign = chosen - current
    if foreign:
        raise FlowError(
            f"{len(foreign)} vertical cylinder(s) not from the current decomposition"
        )
    L = s.circumference(cylinder)
    covered = sum(
        (vc.width * vc.crossing_count(cylinder) for vc in chosen), Fraction(0)
    )
    return covered / L


# -- saddle alignment ---------------------------------------------------------


@dataclass(frozen=True)
class StandardPosition:
    """Twist deltas aligning the two copies of a shared saddle vertically.

    After adding ``deltas`` to the twists of the two adjacent cylinders, the
    vertical cylinder ``vertical`` has width equal to the saddle length, core
    equal to the two heights' sum, and crosses nothing else.
    """

    saddle: tuple[int, int]
    cylinders: tuple[int, int]
    deltas: dict[int, Fraction]
    surface: HyperellipticSurface
    vertical: VerticalCylinder


@dataclass(frozen=True)
class TransverseStandardPosition:
    """Same alignment, but the first cylinder keeps its twist.

    Only the second cylinder is sheared; the saddle copies align along the
    direction (sigma, 1) instead of the vertical.  ``sheared`` is the image
    of ``surface`` under the global shear taking that direction vertical,
    and hosts the witness cylinder.
    """

    saddle: tuple[int, int]
    cylinders: tuple[int, int]
    sigma: Fraction
    direction: tuple[Fraction, Fraction]
    deltas: dict[int, Fraction]
    surface: HyperellipticSurface
    sheared: HyperellipticSurface
    vertical: VerticalCylinder


def _saddle_alignment_data(s: HyperellipticSurface, saddle: int):
    t = s.skeleton
    if saddle not in set(t.all_ports):
        raise FlowError(f"no saddle {saddle}")
    q = t.partner(saddle)
    if q is None:
        raise FlowError(
            f"saddle {saddle} is self-glued; alignment needs two distinct cylinders"
        )
    if any(m.port in (saddle, q) for m in s.marks):
        raise FlowError(f"marked points on saddle {saddle} would split the witness")
    C, D = t.vertex_of(saddle), t.vertex_of(q)
    ell = s.lengths[saddle]
    targets = {}
    for vertex, port in ((C, saddle), (D, q)):
        L = s.circumference(vertex)
        targets[vertex] = (-2 * s.port_start(port) - ell) % L
    return q, C, D, ell, targets


def _locate_witness(
    surface: HyperellipticSurface, C: int, D: int, a_p: Fraction, ell: Fraction
) -> VerticalCylinder:
    for vc in vertical_decomposition(surface):
        if (C, a_p) in vc.crossings and vc.width == ell:
            assert {v for v, _ in vc.crossings} == {C, D}
            assert vc.core == surface.heights[C] + surface.heights[D]
            return vc
    raise AssertionError("aligned saddle produced no vertical witness")


def standard_position(s: HyperellipticSurface, saddle: int) -> StandardPosition:
    """Shear both adjacent cylinders so the shared saddle sits over itself."""
    q, C, D, ell, targets = _saddle_alignment_data(s, saddle)
    deltas = {v: (targets[v] - s.twists[v]) % s.circumference(v) for v in (C, D)}
    twists = dict(s.twists)
    for v in (C, D):
        twists[v] = (twists[v] + deltas[v]) % s.circumference(v)
    aligned = build(s.skeleton, s.lengths, s.heights, twists, s.marks)
    witness = _locate_witness(aligned, C, D, s.port_start(saddle), ell)
    return StandardPosition((saddle, q), (C, D), deltas, aligned, witness)


def transverse_standard_position(
    s: HyperellipticSurface, saddle: int
) -> TransverseStandardPosition:
    """Align the shared saddle while leaving the first cylinder untouched.

    The alignment direction absorbs what the first cylinder's twist delta
    would have been: sigma = delta_C / height(C); the second cylinder then
    needs only the remainder.
    """
    q, C, D, ell, targets = _saddle_alignment_data(s, saddle)
    sigma = ((targets[C] - s.twists[C]) % s.circumference(C)) / s.heights[C]
    delta_D = (targets[D] - s.twists[D] - sigma * s.heights[D]) % s.circumference(D)
    deltas = {C: Fraction(0), D: delta_D}
    twists = dict(s.twists)
    twists[D] = (twists[D] + delta_D) % s.circumference(D)
    twisted = build(s.skeleton, s.lengths, s.heights, twists, s.marks)
    sheared_twists = {
        v: (twisted.twists[v] + sigma * s.heights[v]) % s.circumference(v)
        for v in s.skeleton.vertices
    }
    sheared = build(s.skeleton, s.lengths, s.heights, sheared_twists, s.marks)
    witness = _locate_witness(sheared, C, D, s.port_start(saddle), ell)
    return TransverseStandardPosition(
        (saddle, q), (C, D), sigma, (sigma, Fraction(1)), deltas, twisted, sheared, witness
    )
