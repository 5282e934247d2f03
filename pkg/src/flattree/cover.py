"""Combinatorial translation coverings between half-tree surfaces.

A covering is specified cylinder by cylinder: each covering cylinder wraps
its image an integer number of times, boundary saddles lift isometrically in
the same cyclic order, and twists lift to representatives of the same class
modulo the base circumference.  ``pullback`` materializes a covering surface
from such a blueprint; ``quotient`` goes the other way, collapsing a verified
candidate partition onto its common base; ``certify_cover`` rechecks a
claimed quotient from scratch.

The graph-level sanity check used throughout is the half-edge-aware Euler
count chi = V - E - H/2 together with vertex ramification equal to the wrap
numbers; branch behaviour at the singularities is read off the corner-class
projection, whose local degrees must be integers summing to the covering
degree over every base class.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .deform import (
    CandidateReport,
    CylinderPartition,
    SaddlePartition,
    check_candidate,
)
from .halftree import HalfTree, SkeletonError, stratum_of, validate
from .surface import (
    HyperellipticSurface,
    MetricError,
    area,
    build,
    fraction_from_string,
    fraction_to_string,
    singularity_profile,
    surface_from_json,
    surface_to_json,
)


class CoverError(ValueError):
    """A covering blueprint or quotient construction is inconsistent."""


# -- blueprints ---------------------------------------------------------------


@dataclass(frozen=True)
class FiberCylinder:
    """One covering cylinder: which base cylinder it wraps, and how often.

    ``ports`` lists the covering ports in cyclic order; position ``m`` lifts
    the base port at position ``m mod deg`` of the wrapped cylinder, so order
    compatibility is structural rather than checked after the fact.
    """

    cylinder: int
    base: int
    wrap: int
    twist: Fraction
    ports: tuple[int, ...]


@dataclass(frozen=True)
class CoverBlueprint:
    base: HyperellipticSurface
    fibers: tuple[FiberCylinder, ...]
    pairs: tuple[tuple[int, int], ...]


def _blueprint_lifts(b: CoverBlueprint) -> dict[int, int]:
    """Validate a blueprint; return the derived fiber-port -> base-port map."""
    base = b.base
    t = base.skeleton
    if base.marks:
        raise CoverError("decorated bases are not supported")
    seen_cyl: set[int] = set()
    lifts: dict[int, int] = {}
    degree_at: dict[int, int] = {v: 0 for v in t.vertices}
    for f in b.fibers:
        if f.cylinder in seen_cyl:
            raise CoverError(f"fiber cylinder {f.cylinder} listed twice")
        seen_cyl.add(f.cylinder)
        if f.base not in degree_at:
            raise CoverError(f"fiber cylinder {f.cylinder} wraps unknown cylinder {f.base}")
        if not isinstance(f.wrap, int) or f.wrap < 1:
            raise CoverError(f"wrap multiplicity {f.wrap!r} must be a positive integer")
        degree_at[f.base] += f.wrap
        base_ports = t.ports(f.base)
        if len(f.ports) != f.wrap * len(base_ports):
            raise CoverError(
                f"fiber cylinder {f.cylinder} has {len(f.ports)} ports; "
                f"wrapping {f.wrap} times needs {f.wrap * len(base_ports)}"
            )
        for m, fp in enumerate(f.ports):
            if fp in lifts:
                raise CoverError(f"fiber port {fp} listed twice")
            lifts[fp] = base_ports[m % len(base_ports)]
        L = base.circumference(f.base)
        if (Fraction(f.twist) - base.twists[f.base]) % L != 0:
            raise CoverError(
                f"twist lift {f.twist} of cylinder {f.cylinder} is not congruent "
                f"to the base twist modulo {L}"
            )
    degrees = set(degree_at.values())
    if len(degrees) != 1:
        raise CoverError(f"wrap multiplicities sum to different degrees: {degree_at}")
    paired: set[int] = set()
    for fp, fq in b.pairs:
        for x in (fp, fq):
            if x not in lifts:
                raise CoverError(f"pair uses unknown fiber port {x}")
            if x in paired:
                raise CoverError(f"fiber port {x} paired twice")
            paired.add(x)
        p, q = lifts[fp], lifts[fq]
        partner = t.partner(p)
        if partner is None:
            if p != q:
                raise CoverError(
                    f"fiber pair ({fp}, {fq}) joins lifts of unrelated saddles {p} and {q}"
                )
        elif q != partner:
            raise CoverError(
                f"fiber pair ({fp}, {fq}) does not lift the base pair ({p}, {partner})"
            )
    for fp, p in lifts.items():
        if fp not in paired and t.partner(p) is not None:
            raise CoverError(
                f"fiber port {fp} lifts one side of the base pair at {p} but is unpaired"
            )
    return lifts


def pullback(b: CoverBlueprint) -> HyperellipticSurface:
    """Materialize the covering surface a blueprint describes.

    Saddle lengths and cylinder heights lift unchanged, circumferences
    multiply by the wrap numbers, and the assembled skeleton must come out a
    connected half-tree.  Before returning, the covering relation itself is
    checked: integral branching concentrated over the singularities, and
    commutation with both rotation involutions.
    """
    lifts = _blueprint_lifts(b)
    skeleton = HalfTree(
        {f.cylinder: f.ports for f in b.fibers},
        b.pairs,
    )
    diag = validate(skeleton)
    if not diag.ok:
        raise CoverError(f"lifted skeleton is not a half-tree: {diag.first}")
    surface = build(
        skeleton,
        {fp: b.base.lengths[p] for fp, p in lifts.items()},
        {f.cylinder: b.base.heights[f.base] for f in b.fibers},
        {f.cylinder: Fraction(f.twist) for f in b.fibers},
    )
    cyl_map = {f.cylinder: f.base for f in b.fibers}
    offsets = {f.cylinder: Fraction(0) for f in b.fibers}
    wraps = {f.cylinder: f.wrap for f in b.fibers}
    degree = sum(f.wrap for f in b.fibers if f.base == b.base.skeleton.vertices[0])
    problems = _branch_failures(surface, b.base, cyl_map, offsets, degree)
    problems += _equivariance_failures(surface, b.base, cyl_map, offsets)
    if problems:
        raise CoverError(f"pullback is not a translation covering: {problems[0]}")
    residual = _chi_residual(skeleton, b.base.skeleton, wraps, degree)
    if residual != 0:
        raise CoverError(f"pullback has Riemann-Hurwitz residual {residual}")
    return surface


def fiber_partitions(b: CoverBlueprint) -> tuple[CylinderPartition, SaddlePartition]:
    """Partitions of the pullback by base cylinder and base saddle."""
    lifts = _blueprint_lifts(b)
    t = b.base.skeleton
    by_vertex: dict[int, list[int]] = {}
    for f in b.fibers:
        by_vertex.setdefault(f.base, []).append(f.cylinder)
    skeleton = HalfTree({f.cylinder: f.ports for f in b.fibers}, b.pairs)
    by_saddle: dict[int, list[int]] = {}
    for obj in skeleton.edge_objects():
        base_key = t.edge_object_of(lifts[obj[0]])[0]
        by_saddle.setdefault(base_key, []).append(obj[0])
    return (
        CylinderPartition.of(by_vertex.values()),
        SaddlePartition.of(by_saddle.values()),
    )


# -- shared covering checks ---------------------------------------------------


def _chi_residual(
    src: HalfTree, base: HalfTree, wraps: Mapping[int, int], degree: int
) -> Fraction:
    """Riemann-Hurwitz residual with half-edges counted as half an edge."""

    def chi(t: HalfTree) -> Fraction:
        return (
            Fraction(len(t.vertices))
            - len(t.edges())
            - Fraction(len(t.half_edge_ports()), 2)
        )

    excess = sum(wraps[v] - 1 for v in src.vertices)
    return chi(src) - (degree * chi(base) - excess)


def _project_corner(
    corner: tuple[int, str, Fraction],
    cyl_map: Mapping[int, int],
    offsets: Mapping[int, Fraction],
    base: HyperellipticSurface,
) -> tuple[int, str, Fraction]:
    v, side, x = corner
    w = cyl_map[v]
    L = base.circumference(w)
    if side == "b":
        return (w, "b", (x - offsets[v]) % L)
    return (w, "t", (x + offsets[v]) % L)


def _branch_failures(
    source: HyperellipticSurface,
    base: HyperellipticSurface,
    cyl_map: Mapping[int, int],
    offsets: Mapping[int, Fraction],
    degree: int,
) -> list[str]:
    """Check the corner-class projection: integer local degrees, full fibers.

    Every singularity class upstairs must project into a single class
    downstairs with cone-angle ratio a positive integer, and those ratios sum
    to the covering degree over each base class.  This is the combinatorial
    meaning of branching only over the zeros.
    """
    failures: list[str] = []
    src_profile = singularity_profile(source)
    base_profile = singularity_profile(base)
    where: dict[tuple[int, str, Fraction], int] = {}
    for j, g in enumerate(base_profile.corner_classes):
        for c in g:
            where[c] = j
    totals = {j: 0 for j in range(len(base_profile.corner_classes))}
    for i, g in enumerate(src_profile.corner_classes):
        images = {_project_corner(c, cyl_map, offsets, base) for c in g}
        hit = {where.get(c) for c in images}
        if None in hit or len(hit) != 1:
            failures.append(f"corner class {i} does not project into one base class")
            continue
        (j,) = hit
        up = src_profile.corner_orders[i] + 1
        down = base_profile.corner_orders[j] + 1
        if up % down:
            failures.append(
                f"corner class {i} has cone ratio {up}/{down}, not an integer"
            )
            continue
        totals[j] += up // down
    for j, total in totals.items():
        if total != degree:
            failures.append(
                f"base corner class {j} is covered {total} times, expected {degree}"
            )
    return failures


def _equivariance_failures(
    source: HyperellipticSurface,
    base: HyperellipticSurface,
    cyl_map: Mapping[int, int],
    offsets: Mapping[int, Fraction],
) -> list[str]:
    """Check the projection commutes with the two rotation involutions.

    Fixed points map to fixed points: cylinder-core fixed points land on
    cylinder-core fixed points, half-edge midpoints on half-edge midpoints,
    and involution-fixed corner classes into involution-fixed classes.
    """
    failures: list[str] = []
    for v in source.skeleton.vertices:
        w = cyl_map[v]
        L = base.circumference(w)
        base_half = {(-base.twists[w] / 2) % L, ((-base.twists[w] / 2) + L / 2) % L}
        x0 = (-source.twists[v] / 2) % source.circumference(v)
        for x in (x0, (x0 + source.circumference(v) / 2) % source.circumference(v)):
            if (x - offsets[v]) % L not in base_half:
                failures.append(
                    f"core fixed point of cylinder {v} projects off the base fixed circle"
                )
    for p in source.skeleton.half_edge_ports():
        v = source.skeleton.vertex_of(p)
        w = cyl_map[v]
        L = base.circumference(w)
        pos = (source.port_start(p) + source.lengths[p] / 2 - offsets[v]) % L
        ok = any(
            (base.port_start(q) + base.lengths[q] / 2) % L == pos
            for q in base.skeleton.ports(w)
            if base.skeleton.partner(q) is None
        )
        if not ok:
            failures.append(f"midpoint of self-glued saddle {p} projects off a base midpoint")

    def fixed_classes(s: HyperellipticSurface) -> set[int]:
        profile = singularity_profile(s)
        index = {c: i for i, g in enumerate(profile.corner_classes) for c in g}
        out = set()
        for i, g in enumerate(profile.corner_classes):
            image = {
                (v, "t" if side == "b" else "b", (-x) % s.circumference(v))
                for v, side, x in g
            }
            if {index[c] for c in image} == {i}:
                out.add(i)
        return out

    src_profile = singularity_profile(source)
    base_profile = singularity_profile(base)
    where = {c: j for j, g in enumerate(base_profile.corner_classes) for c in g}
    fixed_src = fixed_classes(source)
    fixed_base = fixed_classes(base)
    for i in fixed_src:
        rep = src_profile.corner_classes[i][0]
        j = where.get(_project_corner(rep, cyl_map, offsets, base))
        if j is None or j not in fixed_base:
            failures.append(f"fixed corner class {i} projects to a non-fixed class")
    return failures


# -- quotients ----------------------------------------------------------------


@dataclass(frozen=True)
class QuotientResult:
    """A verified common base under a candidate partition pair."""

    base: HyperellipticSurface
    degree: int
    cylinder_map: dict[int, int]
    saddle_map: dict[int, int]
    offsets: dict[int, Fraction]
    wraps: dict[int, int]
    candidate: CandidateReport
    residual: Fraction
    area_ratio: Fraction
    source_half_edges: bool
    base_stratum: str
    rel: int
    dichotomy_consistent: bool


def quotient(
    s: HyperellipticSurface, cp: CylinderPartition, sp: SaddlePartition
) -> QuotientResult:
    """Collapse a verified candidate partition onto its base surface.

    One base cylinder per cylinder class, with the class's one-period
    boundary pattern as its port order; one base saddle per saddle class,
    a full edge when the class joins two distinct cylinder classes and a
    self-glued saddle when it joins a class to itself.  Twists must project
    consistently: every member determines the base twist through its pattern
    rotation, and disagreement is an obstruction, not something to average.
    """
    if s.marks:
        raise CoverError("decorated surfaces are not supported")
    report = check_candidate(s, cp, sp)
    if not report.ok:
        raise CoverError(
            "candidate partitions fail verification: " + "; ".join(report.failures)
        )
    t = s.skeleton
    cyl_idx = {v: i for i, group in enumerate(cp.classes) for v in group}
    saddle_idx = {e: i for i, group in enumerate(sp.classes) for e in group}
    port_class = {p: saddle_idx[t.edge_object_of(p)[0]] for p in t.all_ports}

    endpoints: dict[int, frozenset[int]] = {}
    for sigma, group in enumerate(sp.classes):
        ends = {
            frozenset(cyl_idx[t.vertex_of(p)] for p in t.edge_object_of(e))
            for e in group
        }
        if len(ends) != 1:
            raise CoverError(
                f"saddle class {group} joins more than one pair of cylinder classes"
            )
        endpoints[sigma] = ends.pop()

    # rotation offsets aligning each member onto the class pattern
    offsets: dict[int, Fraction] = {}
    base_twists: dict[int, Fraction] = {}
    for a, group in enumerate(cp.classes):
        pattern = report.base_pattern[a]
        L_base = report.base_circumference[a]
        twists_seen: dict[Fraction, int] = {}
        for v in group:
            full = tuple((port_class[p], s.lengths[p]) for p in t.ports(v))
            target = pattern * report.wraps[v]
            for r in range(len(full)):
                if full[r:] + full[:r] == target:
                    break
            else:
                raise CoverError(f"cylinder {v} boundary does not wrap its class pattern")
            phi = s.port_start(t.ports(v)[r])
            offsets[v] = phi
            twists_seen.setdefault((s.twists[v] + 2 * phi) % L_base, v)
        if len(twists_seen) != 1:
            raise CoverError(
                f"twist obstruction: cylinder class {cp.classes[a]} projects to "
                f"distinct base twists {sorted(twists_seen)}"
            )
        base_twists[a] = next(iter(twists_seen))

    # assemble the base skeleton from the patterns
    next_port = 0
    base_ports: dict[int, list[int]] = {}
    occurrence: dict[int, list[tuple[int, int]]] = {sigma: [] for sigma in endpoints}
    base_lengths: dict[int, Fraction] = {}
    for a in range(len(cp.classes)):
        ports = []
        for sigma, length in report.base_pattern[a]:
            if a not in endpoints[sigma]:
                raise CoverError(
                    f"pattern of class {cp.classes[a]} names saddle class {sigma} "
                    "which never touches it"
                )
            occurrence[sigma].append((a, next_port))
            base_lengths[next_port] = length
            ports.append(next_port)
            next_port += 1
        base_ports[a] = ports

    base_pairs: list[tuple[int, int]] = []
    for sigma, ends in endpoints.items():
        occ = occurrence[sigma]
        if len(ends) == 2:
            if len(occ) != 2 or {a for a, _ in occ} != set(ends):
                raise CoverError(
                    f"saddle class {sp.classes[sigma]} occurs {len(occ)} times in the "
                    "class patterns; expected once on each side"
                )
            base_pairs.append((occ[0][1], occ[1][1]))
        else:
            if len(occ) != 1:
                raise CoverError(
                    f"self-adjacent saddle class {sp.classes[sigma]} occurs {len(occ)} "
                    "times in the class patterns; expected once"
                )

    base_skeleton = HalfTree(base_ports, base_pairs)
    diag = validate(base_skeleton)
    if not diag.ok:
        raise CoverError(f"quotient diagram is not a half-tree: {diag.first}")

    degrees = {
        a: sum(report.wraps[v] for v in group) for a, group in enumerate(cp.classes)
    }
    if len(set(degrees.values())) != 1:
        raise CoverError(f"covering degree differs between classes: {degrees}")
    degree = next(iter(degrees.values()))

    try:
        base = build(
            base_skeleton,
            base_lengths,
            {a: s.heights[group[0]] for a, group in enumerate(cp.classes)},
            base_twists,
        )
    except (SkeletonError, MetricError) as exc:
        raise CoverError(f"base surface cannot be assembled: {exc}") from exc

    cylinder_map = dict(cyl_idx)
    saddle_map = {
        e: min(
            base_skeleton.edge_object_of(occurrence[saddle_idx[e]][0][1])
        )
        for group in sp.classes
        for e in group
    }
    residual = _chi_residual(t, base_skeleton, report.wraps, degree)
    problems = _branch_failures(s, base, cylinder_map, offsets, degree)
    problems += _equivariance_failures(s, base, cylinder_map, offsets)
    if residual != 0:
        problems.insert(0, f"Riemann-Hurwitz residual {residual}")
    if problems:
        raise CoverError(f"quotient failed verification: {problems[0]}")

    base_profile = singularity_profile(base)
    source_half_edges = bool(t.half_edge_ports())
    rel = len(base_profile.orders) - 1
    stratum = stratum_of(base_skeleton)
    dichotomy = source_half_edges == (rel == 0)
    return QuotientResult(
        base=base,
        degree=degree,
        cylinder_map=cylinder_map,
        saddle_map=saddle_map,
        offsets=offsets,
        wraps=dict(report.wraps),
        candidate=report,
        residual=residual,
        area_ratio=area(s) / area(base),
        source_half_edges=source_half_edges,
        base_stratum=stratum.label,
        rel=rel,
        dichotomy_consistent=dichotomy,
    )


# -- certification ------------------------------------------------------------


@dataclass(frozen=True)
class CoverVerdict:
    ok: bool
    checks: dict[str, bool]
    failures: tuple[str, ...]


def certify_cover(source: HyperellipticSurface, result: QuotientResult) -> CoverVerdict:
    """Recheck a claimed covering from scratch.

    Trusts only the maps in ``result`` (cylinder and saddle assignments,
    offsets, wraps, degree), not its verdict fields: local isometry on every
    cylinder, degree constancy over base cylinders and saddles, the
    Riemann-Hurwitz count, involution equivariance on the fixed-point data,
    and exact area multiplicativity.
    """
    t = source.skeleton
    base = result.base
    bt = base.skeleton
    checks = {
        "local_isometry": True,
        "degree_constant": True,
        "riemann_hurwitz": True,
        "involution_equivariance": True,
        "area_multiplicative": True,
    }
    failures: list[str] = []

    def fail(which: str, msg: str) -> None:
        checks[which] = False
        failures.append(msg)

    for v in t.vertices:
        w = result.cylinder_map.get(v)
        if w not in set(bt.vertices):
            fail("local_isometry", f"cylinder {v} maps to unknown base cylinder {w}")
            continue
        if source.heights[v] != base.heights[w]:
            fail("local_isometry", f"cylinder {v} changes height under the projection")
        L = base.circumference(w)
        wrap = result.wraps.get(v, 0)
        if source.circumference(v) != wrap * L:
            fail(
                "local_isometry",
                f"cylinder {v} has circumference {source.circumference(v)}, "
                f"not {wrap} x {L}",
            )
            continue
        ports = t.ports(v)
        base_ports = bt.ports(w)
        if len(ports) != wrap * len(base_ports):
            fail("local_isometry", f"cylinder {v} port count does not match its wrap")
            continue
        phi = result.offsets.get(v)
        starts = [source.port_start(p) for p in ports]
        if phi not in starts:
            fail("local_isometry", f"offset of cylinder {v} is not a saddle start")
            continue
        r = starts.index(phi)
        for k, p in enumerate(ports[r:] + ports[:r]):
            q = base_ports[k % len(base_ports)]
            if source.lengths[p] != base.lengths[q]:
                fail("local_isometry", f"saddle {p} changes length over base saddle {q}")
            if result.saddle_map.get(t.edge_object_of(p)[0]) != min(bt.edge_object_of(q)):
                fail("local_isometry", f"saddle {p} does not map onto base saddle {q}")

    fiber_sum = {w: 0 for w in bt.vertices}
    for v in t.vertices:
        w = result.cylinder_map.get(v)
        if w in fiber_sum:
            fiber_sum[w] += result.wraps.get(v, 0)
    for w, total in fiber_sum.items():
        if total != result.degree:
            fail("degree_constant", f"wraps over base cylinder {w} sum to {total}")
    lift_count = {min(obj): 0 for obj in bt.edge_objects()}
    for obj in t.edge_objects():
        key = result.saddle_map.get(obj[0])
        if key not in lift_count:
            fail("degree_constant", f"saddle {obj[0]} maps to unknown base saddle {key}")
            continue
        lift_count[key] += len(obj)
    for key, total in lift_count.items():
        expected = result.degree * len(bt.edge_object_of(key))
        if total != expected:
            fail(
                "degree_constant",
                f"base saddle {key} has {total} lifted sides, expected {expected}",
            )

    residual = _chi_residual(t, bt, result.wraps, result.degree)
    if residual != 0:
        fail("riemann_hurwitz", f"residual {residual} != 0")

    for msg in _equivariance_failures(source, base, result.cylinder_map, result.offsets):
        fail("involution_equivariance", msg)
    for msg in _branch_failures(
        source, base, result.cylinder_map, result.offsets, result.degree
    ):
        fail("involution_equivariance", msg)

    if area(source) != result.degree * area(base):
        fail(
            "area_multiplicative",
            f"area {area(source)} != degree {result.degree} x {area(base)}",
        )

    return CoverVerdict(ok=not failures, checks=checks, failures=tuple(failures))


# -- fixture library ----------------------------------------------------------


def builtin_blueprints() -> dict[str, CoverBlueprint]:
    """Five stock coverings exercising the constructions end to end.

    identity: degree 1 over a three-saddle one-cylinder surface.
    triple-wrap: one cylinder winding three times over the same base.
    ramified-star: degree 2 over a three-cylinder chain, middle cylinder
        ramified, outer cylinders split; the cover is a five-cylinder star.
    torus-double: degree 2 over a marked torus, branched at its two marked
        points; the cover is a three-cylinder chain of genus 2.
    split-selfglued: degree 2 over the one-cylinder surface with one saddle
        lifted to a connecting edge and the rest kept self-glued.
    """
    F = Fraction
    one_cyl = build(
        HalfTree({0: [0, 1, 2]}, []),
        {0: F(1), 1: F(2), 2: F(3)},
        {0: F(1)},
        {0: F(0)},
    )
    chain = build(
        HalfTree({0: [0], 1: [1, 2], 2: [3]}, [(0, 1), (2, 3)]),
        {0: F(2), 1: F(2), 2: F(1), 3: F(1)},
        {0: F(1), 1: F(2), 2: F(1)},
        {0: F(0), 1: F(0), 2: F(0)},
    )
    torus2 = build(
        HalfTree({0: [0], 1: [1]}, [(0, 1)]),
        {0: F(3, 2), 1: F(3, 2)},
        {0: F(1, 2), 1: F(1)},
        {0: F(0), 1: F(0)},
    )
    return {
        "identity": CoverBlueprint(
            base=one_cyl,
            fibers=(FiberCylinder(10, 0, 1, F(0), (20, 21, 22)),),
            pairs=(),
        ),
        "triple-wrap": CoverBlueprint(
            base=one_cyl,
            fibers=(
                FiberCylinder(10, 0, 3, F(0), (20, 21, 22, 23, 24, 25, 26, 27, 28)),
            ),
            pairs=(),
        ),
        "ramified-star": CoverBlueprint(
            base=chain,
            fibers=(
                FiberCylinder(10, 0, 1, F(0), (30,)),
                FiberCylinder(11, 0, 1, F(0), (31,)),
                FiberCylinder(12, 1, 2, F(3), (40, 41, 42, 43)),
                FiberCylinder(13, 2, 1, F(0), (50,)),
                FiberCylinder(14, 2, 1, F(0), (51,)),
            ),
            pairs=((30, 40), (31, 42), (41, 50), (43, 51)),
        ),
        "torus-double": CoverBlueprint(
            base=torus2,
            fibers=(
                FiberCylinder(10, 0, 1, F(0), (30,)),
                FiberCylinder(11, 0, 1, F(0), (31,)),
                FiberCylinder(12, 1, 2, F(0), (40, 41)),
            ),
            pairs=((30, 40), (31, 41)),
        ),
        "split-selfglued": CoverBlueprint(
            base=one_cyl,
            fibers=(
                FiberCylinder(10, 0, 1, F(0), (30, 31, 32)),
                FiberCylinder(11, 0, 1, F(0), (40, 41, 42)),
            ),
            pairs=((30, 40),),
        ),
    }


# -- serialization ------------------------------------------------------------


def blueprint_to_json(b: CoverBlueprint) -> dict:
    lifts = _blueprint_lifts(b)
    return {
        "base": surface_to_json(b.base),
        "fibers": [
            {
                "cylinder": f.cylinder,
                "base": f.base,
                "wrap": f.wrap,
                "twist": fraction_to_string(Fraction(f.twist)),
                "ports": list(f.ports),
            }
            for f in b.fibers
        ],
        "lifts": {str(fp): p for fp, p in sorted(lifts.items())},
        "pairs": [list(pq) for pq in b.pairs],
    }


def blueprint_from_json(data: object) -> CoverBlueprint:
    if not isinstance(data, dict):
        raise CoverError("blueprint JSON must be an object")
    try:
        base = surface_from_json(data["base"])
        fibers = tuple(
            FiberCylinder(
                cylinder=int(f["cylinder"]),
                base=int(f["base"]),
                wrap=int(f["wrap"]),
                twist=fraction_from_string(f["twist"]),
                ports=tuple(int(x) for x in f["ports"]),
            )
            for f in data["fibers"]
        )
        pairs = tuple((int(p), int(q)) for p, q in data["pairs"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CoverError(f"malformed blueprint JSON: {exc}") from exc
    b = CoverBlueprint(base=base, fibers=fibers, pairs=pairs)
    _blueprint_lifts(b)
    return b


def quotient_to_json(r: QuotientResult) -> dict:
    return {
        "base": surface_to_json(r.base),
        "degree": r.degree,
        "cylinder_map": {str(v): a for v, a in sorted(r.cylinder_map.items())},
        "saddle_map": {str(e): k for e, k in sorted(r.saddle_map.items())},
        "offsets": {
            str(v): fraction_to_string(x) for v, x in sorted(r.offsets.items())
        },
        "wraps": {str(v): w for v, w in sorted(r.wraps.items())},
        "verification": {
            "candidate_checks": dict(r.candidate.checks),
            "riemann_hurwitz_residual": fraction_to_string(r.residual),
            "area_ratio": fraction_to_string(r.area_ratio),
            "source_half_edges": r.source_half_edges,
            "base_stratum": r.base_stratum,
            "rel": r.rel,
            "dichotomy_consistent": r.dichotomy_consistent,
        },
    }
