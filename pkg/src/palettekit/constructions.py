"""Random hypergraphs built from palettes, density audits, and reduced 3-graphs.

Pair colors in :func:`palette_construction` come from a counter-based
generator: the color of the pair with lexicographic index ``r`` is drawn from
``splitmix64(splitmix64(seed) ^ r)``, so a coloring depends only on
``(seed, n, weights)`` and not on iteration order or thread count.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import BudgetExceeded, Painting, Palette, ThreeGraph, as_weights, shadow

DEFAULT_BUDGET = 10**7
EXHAUSTIVE_AUDIT = 18

def splitmix64(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = z + np.uint64(0x9E3779B97F4A7C15)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def pair_uniforms(seed: int, count: int) -> np.ndarray:
    """``count`` reproducible uniforms in [0, 1), one per pair index."""
    key = splitmix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF))
    bits = splitmix64(key ^ np.arange(count, dtype=np.uint64))
    return (bits >> np.uint64(11)).astype(np.float64) * 2.0**-53


@dataclass(frozen=True)
class PaletteGraph:
    graph: ThreeGraph
    colors: np.ndarray  # (n, n) symmetric, 0 on the diagonal

    def coloring(self) -> dict[tuple[int, int], int]:
        n = self.graph.vertex_count
        return {(a, b): int(self.colors[a - 1, b - 1]) for a in range(1, n + 1) for b in range(a + 1, n + 1)}

    def painting(self) -> Painting:
        """The natural order with the sampled pair colors (restricted to the shadow)."""
        return Painting(
            tuple(range(1, self.graph.vertex_count + 1)),
            {(a, b): int(self.colors[a - 1, b - 1]) for a, b in shadow(self.graph)},
        )


def palette_construction(palette: Palette, x, n: int, seed: int) -> PaletteGraph:
    """Color each pair ``ab`` independently with color ``i`` with probability ``x_i``; keep ``abc`` (``a<b<c``) when ``(ab, ac, bc)`` is a pattern."""
    if n < 3:
        raise ValueError("need n >= 3")
    w = as_weights(x, palette.color_count)
    a, b = np.triu_indices(n, k=1)
    u = pair_uniforms(seed, len(a))
    cum = np.cumsum(w)
    cum[-1] = 1.0
    cols = np.minimum(np.searchsorted(cum, u, side="right"), palette.color_count - 1) + 1
    colors = np.zeros((n, n), dtype=np.int64)
    colors[a, b] = cols
    colors[b, a] = cols
    triples = np.array(list(itertools.combinations(range(n), 3)), dtype=np.intp).reshape(-1, 3)
    cube = palette.cube()
    keep = cube[
        colors[triples[:, 0], triples[:, 1]] - 1,
        colors[triples[:, 0], triples[:, 2]] - 1,
        colors[triples[:, 1], triples[:, 2]] - 1,
    ]
    edges = triples[keep] + 1
    return PaletteGraph(ThreeGraph(n, map(tuple, edges.tolist())), colors)


@dataclass(frozen=True)
class DensityAudit:
    """Smallest value of ``e(X) - d C(|X|,3) + eta n^3`` seen; negative means a verified violation."""

    dense: bool
    worst_slack: float
    worst_subset: tuple[int, ...]
    mode: str
    checked: int

    def to_json(self) -> dict:
        return {
            "dense": self.dense,
            "worst_slack": self.worst_slack,
            "worst_subset": list(self.worst_subset),
            "mode": self.mode,
            "checked": self.checked,
            "evidence": "exact" if self.mode == "exhaustive" else "sampled (no violation found is not a proof)",
        }


def _edge_count(edges: np.ndarray, members: np.ndarray) -> int:
    if len(edges) == 0:
        return 0
    return int(np.count_nonzero(members[edges[:, 0]] & members[edges[:, 1]] & members[edges[:, 2]]))


def d_eta_density_audit(
    graph: ThreeGraph,
    d: float,
    eta: float,
    mode: str = "auto",
    samples: int = 10_000,
    seed: int = 0,
) -> DensityAudit:
    """Look for a vertex set ``X`` with ``e(X) < d C(|X|,3) - eta n^3``.

    Exhaustive over all subsets up to 18 vertices.  Otherwise random subsets
    of sizes ``ceil(n/10) k`` for ``k = 1..10`` plus a greedy descent that
    peels off the highest-degree vertex.
    """
    n = graph.vertex_count
    edges = np.asfortranarray(np.array(graph.edges, dtype=np.intp).reshape(-1, 3) - 1)
    if mode == "auto":
        mode = "exhaustive" if n <= EXHAUSTIVE_AUDIT else "sampled"
    if mode == "exhaustive":
        if n > EXHAUSTIVE_AUDIT + 4:
            raise ValueError(f"exhaustive audit is limited to {EXHAUSTIVE_AUDIT + 4} vertices")
        counts = np.zeros(1 << n, dtype=np.int64)
        for e in edges:
            counts[(1 << int(e[0])) | (1 << int(e[1])) | (1 << int(e[2]))] += 1
        # subset sums: e(X) for every bitmask X
        for bit in range(n):
            view = counts.reshape(-1, 2, 1 << bit)
            view[:, 1, :] += view[:, 0, :]
        sizes = _popcounts(n)
        binom = sizes * (sizes - 1) * (sizes - 2) / 6.0
        slack = counts - d * binom + eta * n**3
        i = int(np.argmin(slack))
        subset = tuple(v + 1 for v in range(n) if i >> v & 1)
        return DensityAudit(bool(slack[i] >= 0), float(slack[i]), subset, "exhaustive", 1 << n)
    if mode != "sampled":
        raise ValueError("mode must be 'auto', 'exhaustive' or 'sampled'")
    rng = np.random.default_rng(seed)
    step = math.ceil(n / 10)
    grid = sorted({min(n, step * k) for k in range(1, 11)})
    best = (math.inf, ())
    per = max(1, samples // len(grid))
    checked = 0
    members = np.zeros(n, dtype=bool)
    for size in grid:
        for _ in range(per):
            chosen = rng.choice(n, size=size, replace=False)
            members[:] = False
            members[chosen] = True
            s = _edge_count(edges, members) - d * math.comb(size, 3) + eta * n**3
            checked += 1
            if s < best[0]:
                best = (s, tuple(sorted(int(v) + 1 for v in chosen)))
    # greedy descent from the whole vertex set
    alive = np.ones(n, dtype=bool)
    live = np.ones(len(edges), dtype=bool)
    deg = np.bincount(edges.ravel(), minlength=n).astype(np.int64) if len(edges) else np.zeros(n, dtype=np.int64)
    count = len(edges)
    for size in range(n, 0, -1):
        s = count - d * math.comb(size, 3) + eta * n**3
        checked += 1
        if s < best[0]:
            best = (s, tuple(int(v) + 1 for v in np.flatnonzero(alive)))
        v = int(np.argmax(np.where(alive, deg, -1)))
        alive[v] = False
        if len(edges):
            gone = live & (edges == v).any(axis=1)
            for e in edges[gone]:
                deg[e] -= 1
            live &= ~gone
            count -= int(gone.sum())
    slack, subset = best
    if slack < 0:
        members[:] = False
        members[np.array(subset) - 1] = True
        exact = _edge_count(edges, members) - d * math.comb(len(subset), 3) + eta * n**3
        if exact >= 0:
            raise AssertionError("sampled violation did not survive recounting")
    return DensityAudit(bool(slack >= 0), float(slack), subset, "sampled", checked)


def _popcounts(n: int) -> np.ndarray:
    out = np.zeros(1 << n, dtype=np.int64)
    for bit in range(n):
        out.reshape(-1, 2, 1 << bit)[:, 1, :] += 1
    return out


# -- reduced 3-graphs --------------------------------------------------------

IndexPair = tuple[int, int]
IndexTriple = tuple[int, int, int]


@dataclass(frozen=True)
class Reduced3Graph:
    """Index set ``1..t``, a vertex set per index pair and a 3-partite constituent per index triple.

    The constituent of ``i < j < k`` has edges ``(x, y, z)`` with ``x`` in
    the set of ``ij``, ``y`` in that of ``ik`` and ``z`` in that of ``jk``.
    """

    t: int
    pair_sets: Mapping[IndexPair, tuple[int, ...]]
    constituents: Mapping[IndexTriple, frozenset]

    def __post_init__(self):
        pairs = {tuple(sorted(k)): tuple(sorted(v)) for k, v in self.pair_sets.items()}
        if set(pairs) != set(itertools.combinations(range(1, self.t + 1), 2)):
            raise ValueError("need a vertex set for every index pair")
        seen = [v for vs in pairs.values() for v in vs]
        if len(seen) != len(set(seen)):
            raise ValueError("pair vertex sets must be disjoint")
        cons = {}
        for (i, j, k) in itertools.combinations(range(1, self.t + 1), 3):
            edges = frozenset(tuple(e) for e in self.constituents.get((i, j, k), ()))
            a, b, c = set(pairs[(i, j)]), set(pairs[(i, k)]), set(pairs[(j, k)])
            for x, y, z in edges:
                if x not in a or y not in b or z not in c:
                    raise ValueError(f"constituent {(i, j, k)} has edge {(x, y, z)} outside its parts")
            cons[(i, j, k)] = edges
        extra = set(self.constituents) - set(cons)
        if extra:
            raise ValueError(f"constituents for non-increasing triples {sorted(extra)}")
        object.__setattr__(self, "pair_sets", pairs)
        object.__setattr__(self, "constituents", cons)

    def part(self, i: int, j: int) -> tuple[int, ...]:
        return self.pair_sets[(min(i, j), max(i, j))]

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "pair_sets": {f"{i},{j}": list(v) for (i, j), v in sorted(self.pair_sets.items())},
            "constituents": {
                f"{i},{j},{k}": sorted(list(e) for e in edges) for (i, j, k), edges in sorted(self.constituents.items())
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> Reduced3Graph:
        def key(s):
            return tuple(int(v) for v in str(s).split(","))

        return cls(
            int(data["t"]),
            {key(k): tuple(v) for k, v in data["pair_sets"].items()},
            {key(k): frozenset(tuple(e) for e in v) for k, v in data["constituents"].items()},
        )


def is_uniformly_dense_reduced(reduced: Reduced3Graph, d: float) -> bool:
    """Every constituent has at least ``d`` times the product of its three part sizes edges."""
    for key, vs in reduced.pair_sets.items():
        if not vs:
            raise ValueError(f"pair set {key} is empty")
    for (i, j, k), edges in reduced.constituents.items():
        volume = len(reduced.part(i, j)) * len(reduced.part(i, k)) * len(reduced.part(j, k))
        if len(edges) < d * volume:
            return False
    return True


def reduced_from_palette(palette: Palette, t: int) -> tuple[Reduced3Graph, dict[IndexPair, tuple[int, ...]]]:
    """Copy one palette into every constituent.

    Each index pair gets ``s = c(palette)`` fresh vertices; the ``a``-th of
    them stands for color ``a``.  Returns the reduced 3-graph and this
    identification.
    """
    s = palette.color_count
    ident: dict[IndexPair, tuple[int, ...]] = {}
    nxt = 1
    for ij in itertools.combinations(range(1, t + 1), 2):
        ident[ij] = tuple(range(nxt, nxt + s))
        nxt += s
    cons = {}
    for i, j, k in itertools.combinations(range(1, t + 1), 3):
        a, b, c = ident[(i, j)], ident[(i, k)], ident[(j, k)]
        cons[(i, j, k)] = frozenset((a[x - 1], b[y - 1], c[z - 1]) for x, y, z in palette.patterns)
    return Reduced3Graph(t, ident, cons), ident


class SliceDisagreement(ValueError):
    """Two index triples induce different palettes under the identification."""


def palette_from_slice(
    reduced: Reduced3Graph, indices: Sequence[int], ident: Mapping[IndexPair, Sequence[int]]
) -> Palette:
    """Read the constituents on ``indices`` as one palette on ``s`` colors.

    ``ident[(i, j)]`` lists the vertices standing for colors ``1..s``.  Every
    triple of ``indices`` must give the same pattern set.
    """
    idx = sorted(set(indices))
    if len(idx) < 3:
        raise ValueError("need at least three indices")
    sizes = {len(ident[(i, j)]) for i, j in itertools.combinations(idx, 2)}
    if len(sizes) != 1:
        raise ValueError("identifications must all have the same size")
    s = sizes.pop()
    common = None
    for i, j, k in itertools.combinations(idx, 3):
        maps = [{v: c + 1 for c, v in enumerate(ident[p])} for p in ((i, j), (i, k), (j, k))]
        pats = frozenset(
            (maps[0][x], maps[1][y], maps[2][z])
            for x, y, z in reduced.constituents[(i, j, k)]
            if x in maps[0] and y in maps[1] and z in maps[2]
        )
        if common is None:
            common = pats
        elif pats != common:
            raise SliceDisagreement(f"triple {(i, j, k)} disagrees with {tuple(idx[:3])}")
    return Palette(s, common)


@dataclass(frozen=True)
class ReducedMap:
    labels: dict[int, int]  # vertex -> index
    pair_map: dict[tuple[int, int], int]  # shadow pair -> vertex of the reduced 3-graph

    def to_json(self) -> dict:
        return {
            "labels": {str(v): i for v, i in sorted(self.labels.items())},
            "pair_map": {f"{u},{v}": x for (u, v), x in sorted(self.pair_map.items())},
        }


def is_reduced_map(graph: ThreeGraph, reduced: Reduced3Graph, rmap: ReducedMap) -> bool:
    lam, phi = rmap.labels, rmap.pair_map
    for v in graph.covered_vertices():
        if not 1 <= lam.get(v, 0) <= reduced.t:
            return False
    for u, v in shadow(graph):
        if lam[u] == lam[v] or phi.get((u, v)) not in reduced.part(lam[u], lam[v]):
            return False
    for e in graph.edges:
        u, v, w = sorted(e, key=lam.__getitem__)
        img = (phi[tuple(sorted((u, v)))], phi[tuple(sorted((u, w)))], phi[tuple(sorted((v, w)))])
        if img not in reduced.constituents[(lam[u], lam[v], lam[w])]:
            return False
    return True


def reduced_map_exists(graph: ThreeGraph, reduced: Reduced3Graph, budget: int = DEFAULT_BUDGET) -> ReducedMap | None:
    """Search for a reduced map of ``graph`` into ``reduced``.

    Vertices get indices one at a time, most-constrained first; when an edge
    has all three indices, its pairs are mapped to an edge of the matching
    constituent consistent with pairs already mapped.  Raises
    :class:`BudgetExceeded` rather than answering when the budget runs out.
    """
    covered = graph.covered_vertices()
    pairs = shadow(graph)
    nbrs: dict[int, set[int]] = defaultdict(set)
    at: dict[int, list] = defaultdict(list)
    for e in graph.edges:
        for v in e:
            at[v].append(e)
        for u, v in itertools.combinations(e, 2):
            nbrs[u].add(v)
            nbrs[v].add(u)
    # constituent edges indexed by (triple, mask, known values)
    index: dict[tuple, list] = defaultdict(list)
    for key, edges in reduced.constituents.items():
        for e in edges:
            for mask in range(8):
                index[(key, mask) + tuple(e[i] for i in range(3) if mask >> i & 1)].append(e)
    order = sorted(covered, key=lambda v: (-len(at[v]), v))
    lam: dict[int, int] = {}
    phi: dict[tuple[int, int], int] = {}
    nodes = 0

    def tick():
        nonlocal nodes
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(f"reduced-map search exceeded {budget} nodes", nodes, budget)

    def assign(edges, i):
        if i == len(edges):
            yield
            return
        u, v, w = sorted(edges[i], key=lam.__getitem__)
        keys = [tuple(sorted(p)) for p in ((u, v), (u, w), (v, w))]
        mask, known = 0, []
        for b, k in enumerate(keys):
            if k in phi:
                mask |= 1 << b
                known.append(phi[k])
        for img in index.get(((lam[u], lam[v], lam[w]), mask) + tuple(known), ()):
            tick()
            fresh = [k for b, k in enumerate(keys) if not mask >> b & 1]
            for b, k in enumerate(keys):
                if not mask >> b & 1:
                    phi[k] = img[b]
            yield from assign(edges, i + 1)
            for k in fresh:
                del phi[k]

    def rec(pos):
        if pos == len(order):
            yield
            return
        v = order[pos]
        taken = {lam[u] for u in nbrs[v] if u in lam}
        for i in range(1, reduced.t + 1):
            if i in taken:
                continue
            tick()
            lam[v] = i
            done = [e for e in at[v] if all(x in lam for x in e)]
            for _ in assign(done, 0):
                yield from rec(pos + 1)
            del lam[v]

    if graph.e and reduced.t < 3:
        return None
    for _ in rec(0):
        labels = dict(lam)
        for v in range(1, graph.vertex_count + 1):
            labels.setdefault(v, 1)
        return ReducedMap(labels, {p: phi[p] for p in pairs})
    return None


def lift_painting(painting: Painting, graph: ThreeGraph, reduced: Reduced3Graph, ident: Mapping[IndexPair, Sequence[int]]) -> ReducedMap:
    """Turn a painting into a reduced map: index = position in the order, pair image = the vertex standing for its color.

    Needs at least as many indices as covered vertices.
    """
    covered = graph.covered_vertices()
    if len(covered) > reduced.t:
        raise ValueError("not enough indices to separate every covered vertex")
    rank = {v: r + 1 for r, v in enumerate(u for u in painting.ordering if u in set(covered))}
    phi = {}
    for u, v in shadow(graph):
        i, j = sorted((rank[u], rank[v]))
        phi[(u, v)] = ident[(i, j)][painting.color(u, v) - 1]
    labels = {v: rank.get(v, 1) for v in range(1, graph.vertex_count + 1)}
    return ReducedMap(labels, phi)


def painting_from_reduced_map(graph: ThreeGraph, rmap: ReducedMap, ident: Mapping[IndexPair, Sequence[int]]) -> Painting:
    """Order vertices by index and color each pair by its position in the identified set."""
    lam = rmap.labels
    order = tuple(sorted(range(1, graph.vertex_count + 1), key=lambda v: (lam[v], v)))
    coloring = {}
    for (u, v), x in rmap.pair_map.items():
        i, j = sorted((lam[u], lam[v]))
        coloring[(u, v)] = list(ident[(i, j)]).index(x) + 1
    return Painting(order, coloring)
