"""Exhaustive desk-scale checks of three combinatorial facts.

Each verifier sweeps its full search space up to configurable bounds and
returns a :class:`LemmaReport`.  The point is falsification pressure, not
proof: a report with ``holds=False`` carries the first counterexample found,
and the default bounds are sized to finish in seconds of pure Python.

The three facts, stated over plain integers:

* interval systems: if each label ``i`` on a circle of ``n`` labels is given a
  cyclic interval ``I_i`` running from ``k_i`` up to ``k_{i-1}``, consecutive
  intervals meeting in exactly one point, then any graph on the labels with
  neighborhoods ``C_i`` contained in ``I_i`` is a forest;
* circular balls: if every two consecutive same-color balls on a circle have
  the same multiset of colors strictly between them (per color), the coloring
  is periodic with period equal to the number of colors;
* colored trees: a proper coloring of a tree in which same-colored vertices
  see the same set of neighbor colors puts equal colors at even distance.

It suffices to test edge-maximal graphs in the first fact: the forest
property is closed under taking subgraphs.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass
from typing import Iterator


@dataclass(frozen=True)
class LemmaReport:
    """Outcome of one exhaustive sweep."""

    lemma: str
    bounds: dict[str, int]
    cases_checked: int
    holds: bool
    counterexample: dict | None
    details: dict[str, int]
    elapsed_seconds: float

    def summary(self) -> str:
        verdict = "holds" if self.holds else "FAILS"
        return (
            f"{self.lemma}: {verdict} over {self.cases_checked} cases "
            f"(bounds {self.bounds}, {self.elapsed_seconds:.2f}s)"
        )

    def to_json(self) -> dict:
        # elapsed time deliberately excluded: CLI output must be reproducible
        return {
            "lemma": self.lemma,
            "bounds": dict(self.bounds),
            "cases_checked": self.cases_checked,
            "holds": self.holds,
            "counterexample": self.counterexample,
            "details": dict(self.details),
        }


# -- interval systems ------------------------------------------------------


def _interval_systems(n: int) -> Iterator[tuple[int, ...]]:
    """All anchor vectors ``k`` of a single-cylinder interval system.

    Interval ``I_i`` runs cyclically from ``k[i]`` to ``k[i-1]``.  Three
    requirements, the first two per cyclic index ``i`` with
    ``len_i = (k[i-1] - k[i]) % n``:

    * consecutive intervals meet in exactly one point, equivalently
      ``len_i + len_{i+1} <= n - 1``;
    * the intervals chain end-to-end (interval ``i+1`` ends where interval
      ``i`` starts), so the anchors wind the circle at most once:
      ``sum(len_i) <= n``.  Dropping this admits anchor vectors like
      ``(0, 0, 2, 2, 4, 4)`` at ``n = 6`` that wind twice and carry a
      triangle; no boundary-saddle geometry produces them, since the flow
      image of the boundary tiles the opposite circle exactly once.

    For ``n <= 2`` both requirements are dropped, matching the statement
    being tested (a graph on two vertices is always a forest).
    """
    if n <= 2:
        yield from itertools_product_range(n)
        return
    k = [0] * n

    def extend(j: int, winding: int) -> Iterator[tuple[int, ...]]:
        if j == n:
            len0 = (k[n - 1] - k[0]) % n
            len1 = (k[0] - k[1]) % n
            lenlast = (k[n - 2] - k[n - 1]) % n
            if lenlast + len0 <= n - 1 and len0 + len1 <= n - 1 and winding + len0 <= n:
                yield tuple(k)
            return
        for val in range(n):
            k[j] = val
            cur = 0
            if j >= 1:
                cur = (k[j - 1] - k[j]) % n
                if winding + cur > n:
                    continue
            if j >= 2:
                prev = (k[j - 2] - k[j - 1]) % n
                if prev + cur > n - 1:
                    continue
            yield from extend(j + 1, winding + cur)

    yield from extend(0, 0)


def itertools_product_range(n: int) -> Iterator[tuple[int, ...]]:
    import itertools

    yield from itertools.product(range(n), repeat=n)


def _max_graph_is_forest(n: int, k: tuple[int, ...]) -> tuple[bool, tuple[int, int] | None]:
    """Check the edge-maximal admissible graph for the anchor vector ``k``."""
    lens = [(k[i - 1] - k[i]) % n for i in range(n)]

    def inside(x: int, i: int) -> bool:
        return (x - k[i]) % n <= lens[i]

    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(n):
        for j in range(i + 1, n):
            if inside(j, i) and inside(i, j):
                a, b = find(i), find(j)
                if a == b:
                    return False, (i, j)
                parent[a] = b
    return True, None


def verify_interval_lemma(max_n: int = 8) -> LemmaReport:
    """Sweep every interval system with up to ``max_n`` labels.

    Only the maximal graph of each system is tested; subgraphs of forests are
    forests, so this covers every admissible graph.
    """
    t0 = time.perf_counter()
    cases = 0
    systems_by_n: dict[str, int] = {}
    counterexample = None
    for n in range(1, max_n + 1):
        count = 0
        for k in _interval_systems(n):
            count += 1
            ok, bad_edge = _max_graph_is_forest(n, k)
            if not ok and counterexample is None:
                counterexample = {"n": n, "anchors": list(k), "cycle_edge": list(bad_edge)}
        cases += count
        systems_by_n[str(n)] = count
    return LemmaReport(
        lemma="interval-forest",
        bounds={"max_n": max_n},
        cases_checked=cases,
        holds=counterexample is None,
        counterexample=counterexample,
        details=systems_by_n,
        elapsed_seconds=time.perf_counter() - t0,
    )


# -- circular balls --------------------------------------------------------


def _restricted_growth_strings(n: int, max_classes: int) -> Iterator[tuple[int, ...]]:
    """Surjective colorings up to renaming colors: first occurrences increase."""
    coloring = [0] * n

    def extend(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if i == n:
            yield tuple(coloring)
            return
        top = min(used + 1, max_classes)
        for c in range(top):
            coloring[i] = c
            yield from extend(i + 1, max(used, c + 1))

    yield from extend(0, 0)


def _gaps_agree(colors: tuple[int, ...], m: int) -> bool:
    """Per color: multisets of colors strictly between consecutive occurrences agree."""
    n = len(colors)
    doubled = colors + colors
    for c in range(m):
        occ = [i for i, x in enumerate(colors) if x == c]
        if len(occ) < 2:
            continue
        gaps = []
        for a in range(len(occ)):
            start = occ[a]
            end = occ[(a + 1) % len(occ)]
            if end <= start:
                end += n
            gaps.append(frozenset(Counter(doubled[start + 1 : end]).items()))
        if len(set(gaps)) > 1:
            return False
    return True


def verify_balls_lemma(max_n: int = 10, max_m: int = 4) -> LemmaReport:
    """Sweep circular colorings with up to ``max_n`` balls and ``max_m`` colors.

    Colorings are enumerated up to renaming colors (restricted growth), which
    both the gap hypothesis and the periodicity conclusion are invariant
    under.  Rotations are not quotiented; the sweep just covers them all.
    """
    t0 = time.perf_counter()
    cases = 0
    hypothesis_held = 0
    counterexample = None
    for n in range(1, max_n + 1):
        for colors in _restricted_growth_strings(n, max_m):
            cases += 1
            m = max(colors) + 1
            if not _gaps_agree(colors, m):
                continue
            hypothesis_held += 1
            periodic = n % m == 0 and all(colors[i] == colors[(i + m) % n] for i in range(n))
            if not periodic and counterexample is None:
                counterexample = {"n": n, "colors": list(colors), "period": m}
    return LemmaReport(
        lemma="circular-balls-periodicity",
        bounds={"max_n": max_n, "max_m": max_m},
        cases_checked=cases,
        holds=counterexample is None,
        counterexample=counterexample,
        details={"hypothesis_held": hypothesis_held},
        elapsed_seconds=time.perf_counter() - t0,
    )


# -- colored trees ---------------------------------------------------------


def _all_trees(n: int) -> Iterator[dict[int, list[int]]]:
    """Unlabeled trees on ``n`` vertices as adjacency dicts."""
    if n == 1:
        yield {0: []}
        return
    import networkx as nx

    for g in nx.nonisomorphic_trees(n):
        yield {v: sorted(g.neighbors(v)) for v in sorted(g.nodes)}


def neighbor_sets_homogeneous(adj: dict[int, list[int]], coloring: dict[int, int]) -> bool:
    """True when every color class sees a single set of neighbor colors."""
    seen: dict[int, frozenset[int]] = {}
    for v, c in coloring.items():
        s = frozenset(coloring[w] for w in adj[v])
        if c in seen and seen[c] != s:
            return False
        seen.setdefault(c, s)
    return True


def _tree_distances(adj: dict[int, list[int]]) -> dict[tuple[int, int], int]:
    dist: dict[tuple[int, int], int] = {}
    for s in adj:
        dist[(s, s)] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for v in frontier:
                for w in adj[v]:
                    if (s, w) not in dist:
                        dist[(s, w)] = dist[(s, v)] + 1
                        nxt.append(w)
            frontier = nxt
    return dist


def verify_colored_tree_lemma(max_vertices: int = 8, max_colors: int = 4) -> LemmaReport:
    """Sweep proper colorings of all trees with up to ``max_vertices`` vertices.

    For colorings in which every color class sees one fixed set of neighbor
    colors, same-colored vertices must sit at even distance.
    """
    t0 = time.perf_counter()
    cases = 0
    hypothesis_held = 0
    trees_seen = 0
    counterexample = None
    for n in range(1, max_vertices + 1):
        for adj in _all_trees(n):
            trees_seen += 1
            dist = _tree_distances(adj)
            order = sorted(adj)
            # BFS order guarantees each non-root has a previously colored neighbor
            bfs = [order[0]]
            seen = {order[0]}
            for v in bfs:
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        bfs.append(w)
            coloring: dict[int, int] = {}

            def sweep(idx: int, used: int) -> None:
                nonlocal cases, hypothesis_held, counterexample
                if idx == len(bfs):
                    cases += 1
                    if not neighbor_sets_homogeneous(adj, coloring):
                        return
                    hypothesis_held += 1
                    for v in adj:
                        for w in adj:
                            if v < w and coloring[v] == coloring[w] and dist[(v, w)] % 2 == 1:
                                if counterexample is None:
                                    counterexample = {
                                        "n": n,
                                        "adjacency": {str(a): bs for a, bs in adj.items()},
                                        "coloring": {str(a): coloring[a] for a in sorted(adj)},
                                        "odd_pair": [v, w],
                                    }
                                return
                    return
                v = bfs[idx]
                top = min(used + 1, max_colors)
                for c in range(top):
                    if any(coloring.get(w) == c for w in adj[v]):
                        continue
                    coloring[v] = c
                    sweep(idx + 1, max(used, c + 1))
                    del coloring[v]

            sweep(0, 0)
    return LemmaReport(
        lemma="colored-tree-even-distance",
        bounds={"max_vertices": max_vertices, "max_colors": max_colors},
        cases_checked=cases,
        holds=counterexample is None,
        counterexample=counterexample,
        details={"trees": trees_seen, "hypothesis_held": hypothesis_held},
        elapsed_seconds=time.perf_counter() - t0,
    )
