"""Deciding, constructing and counting paintings of 3-graphs by palettes."""

from __future__ import annotations

from collections import defaultdict
from typing import Callable, Iterable, Iterator

from .core import BudgetExceeded, Edge, Painting, Pair, Palette, ThreeGraph, shadow

DEFAULT_BUDGET = 10**7


class PaintingSearch:
    """Backtracking search over vertex orderings and pair colorings.

    Vertices are appended to the ordering one at a time (every remaining
    vertex is a branch).  When an edge has all three vertices placed, its
    three pairs must carry a pattern read in order ``(xy, xz, yz)``; pairs
    are colored the first time an edge containing them is completed.  A
    branch dies as soon as some completed edge has no consistent pattern, or
    a half-placed edge has a colored first pair that no pattern starts with.

    Vertices outside the shadow are never branched on; they are appended to
    the ordering of every reported painting in increasing order.

    ``nodes`` counts color assignments and vertex placements.
    """

    def __init__(self, palette: Palette, graph: ThreeGraph, budget: int = DEFAULT_BUDGET):
        self.palette = palette
        self.graph = graph
        self.budget = budget
        self.nodes = 0
        self.covered = graph.covered_vertices()
        self.isolated = tuple(v for v in range(1, graph.vertex_count + 1) if v not in set(self.covered))
        self.pairs = shadow(graph)
        self._edges_at: dict[int, list[Edge]] = defaultdict(list)
        for e in graph.edges:
            for v in e:
                self._edges_at[v].append(e)
        # patterns indexed by which coordinates are already fixed
        self._lookup: dict[tuple, list] = defaultdict(list)
        for p in palette.patterns:
            for mask in range(8):
                key = (mask,) + tuple(p[i] for i in range(3) if mask >> i & 1)
                self._lookup[key].append(p)
        self._first = {p[0] for p in palette.patterns}

    # -- public drivers -------------------------------------------------

    def find(self) -> Painting | None:
        for painting, _ in self._run():
            return painting
        return None

    def iter_paintings(self, prune: Callable[[dict], bool] | None = None) -> Iterator[tuple[Painting, dict]]:
        """Every (ordering, coloring) painting, with the multiset of patterns it uses.

        ``prune(used)`` may cut a branch given the current pattern-usage counts.
        """
        yield from self._run(prune)

    def colorings(self) -> set[tuple[int, ...]]:
        """Distinct colorings of the shadow (in sorted pair order) that admit some ordering."""
        found = set()
        for painting, _ in self._run():
            found.add(tuple(painting.pair_coloring[p] for p in self.pairs))
        return found

    # -- search ---------------------------------------------------------

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"painting search exceeded {self.budget} nodes", self.nodes, self.budget)

    def _run(self, prune=None):
        if self.graph.e and not self.palette.patterns:
            return
        pos: dict[int, int] = {}
        order: list[int] = []
        color: dict[Pair, int] = {}
        used: dict = defaultdict(int)
        remaining = set(self.covered)

        def completed_with(v):
            return [e for e in self._edges_at[v] if all(u in pos for u in e)]

        def half_ok(v):
            for e in self._edges_at[v]:
                placed = [u for u in e if u in pos]
                if len(placed) == 2:
                    x, y = sorted(placed, key=pos.__getitem__)
                    col = color.get((min(x, y), max(x, y)))
                    if col is not None and col not in self._first:
                        return False
            return True

        def assign(edges, i):
            if i == len(edges):
                yield
                return
            x, y, z = sorted(edges[i], key=pos.__getitem__)
            keys = [(min(x, y), max(x, y)), (min(x, z), max(x, z)), (min(y, z), max(y, z))]
            mask = 0
            known = []
            for j, k in enumerate(keys):
                if k in color:
                    mask |= 1 << j
                    known.append(color[k])
            for p in self._lookup.get((mask, *known), ()):
                self._tick()
                fresh = [k for j, k in enumerate(keys) if not mask >> j & 1]
                for j, k in enumerate(keys):
                    if not mask >> j & 1:
                        color[k] = p[j]
                used[p] += 1
                if prune is None or not prune(used):
                    yield from assign(edges, i + 1)
                used[p] -= 1
                if not used[p]:
                    del used[p]
                for k in fresh:
                    del color[k]

        def step():
            if not remaining:
                yield Painting(tuple(order) + self.isolated, dict(color)), dict(used)
                return
            # branch on every remaining vertex; try the most constrained first
            cands = sorted(remaining, key=lambda v: (-sum(all(u in pos or u == v for u in e) for e in self._edges_at[v]), v))
            for v in cands:
                self._tick()
                pos[v] = len(order)
                order.append(v)
                remaining.discard(v)
                for _ in assign(completed_with(v), 0):
                    touched = {u for e in self._edges_at[v] for u in e}
                    if all(half_ok(u) for u in touched if u not in pos):
                        yield from step()
                remaining.add(v)
                order.pop()
                del pos[v]

        yield from step()


def find_painting(palette: Palette, graph: ThreeGraph, budget: int = DEFAULT_BUDGET) -> Painting | None:
    """A painting of ``graph`` by ``palette``, or ``None`` if none exists.

    Raises :class:`BudgetExceeded` if the search space was not exhausted.
    """
    return PaintingSearch(palette, graph, budget).find()


def paints(palette: Palette, graph: ThreeGraph, budget: int = DEFAULT_BUDGET) -> bool:
    return find_painting(palette, graph, budget) is not None


def is_deficient(palette: Palette, graph: ThreeGraph, budget: int = DEFAULT_BUDGET) -> bool:
    return not paints(palette, graph, budget)


def is_family_deficient(palette: Palette, family: Iterable[ThreeGraph], budget: int = DEFAULT_BUDGET) -> bool:
    return all(is_deficient(palette, f, budget) for f in family)


def count_paintings(palette: Palette, graph: ThreeGraph, budget: int = DEFAULT_BUDGET) -> int:
    """Number of maps from the shadow of ``graph`` to colors that extend to a painting.

    Different orderings giving the same coloring are counted once.
    """
    return len(PaintingSearch(palette, graph, budget).colorings())


def shadow_linear(graph: ThreeGraph) -> tuple[ThreeGraph, tuple[Pair, ...]]:
    """The 3-graph on the shadow pairs with an edge ``{uv, uw, vw}`` per edge ``uvw``.

    Returns the graph and the pair labelling its vertices (vertex ``i`` is
    ``pairs[i-1]``).
    """
    pairs = shadow(graph)
    index = {p: i + 1 for i, p in enumerate(pairs)}
    out = ThreeGraph(len(pairs), ((index[(x, y)], index[(x, z)], index[(y, z)]) for x, y, z in graph.edges))
    if not is_linear(out):
        raise AssertionError("shadow construction produced a non-linear 3-graph")
    return out, pairs


def is_linear(graph: ThreeGraph) -> bool:
    seen: set[Pair] = set()
    for x, y, z in graph.edges:
        for p in ((x, y), (x, z), (y, z)):
            if p in seen:
                return False
            seen.add(p)
    return True
