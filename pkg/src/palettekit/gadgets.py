"""Ordered gadgets used to force orderings and colors in Ramsey-type constructions.

Two constructions live here.

* ``build_G_sigma``: three k-edges pairwise meeting in one vertex, arranged
  so that no total order makes all three edges realize the permutation
  ``sigma``.  ``verify_gsigma_claim`` checks this over every order.
* ``build_triangle_system``: one labeled triangle per pattern of a palette.
  Substituting labeled copies into a linear host and keeping the triangles
  whose labels form a pattern yields a 3-graph the palette paints.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import BudgetExceeded, Painting, Palette, ThreeGraph, shadow

VERIFY_BUDGET = 10**8


@dataclass(frozen=True)
class OrderedGraph:
    """A uniform hypergraph on ``1..vertex_count`` with the natural order.

    ``edges`` are sorted tuples, all of the same size.  For graphs (size 2)
    ``labels`` may color every edge.
    """

    vertex_count: int
    edges: tuple[tuple[int, ...], ...]
    labels: Mapping[tuple[int, int], int] | None = field(default=None, compare=False)

    def __post_init__(self):
        edges = tuple(sorted({tuple(sorted(int(v) for v in e)) for e in self.edges}))
        if len({len(e) for e in edges}) > 1:
            raise ValueError("edges must all have the same size")
        for e in edges:
            if len(set(e)) != len(e) or any(not 1 <= v <= self.vertex_count for v in e):
                raise ValueError(f"bad edge {e}")
        object.__setattr__(self, "edges", edges)
        if self.labels is not None:
            labels = {tuple(sorted(k)): int(v) for k, v in self.labels.items()}
            if set(labels) != set(edges):
                raise ValueError("labels must cover exactly the edges")
            object.__setattr__(self, "labels", labels)

    @property
    def uniformity(self) -> int:
        return len(self.edges[0]) if self.edges else 0

    def label_classes(self) -> dict[int, list[tuple[int, int]]]:
        out: dict[int, list] = {}
        for e in self.edges:
            out.setdefault(self.labels[e], []).append(e)
        return out

    def is_linear(self) -> bool:
        return all(len(set(e) & set(f)) <= 1 for e, f in itertools.combinations(self.edges, 2))

    def to_json(self) -> dict:
        out = {"vertex_count": self.vertex_count, "edges": [list(e) for e in self.edges]}
        if self.labels is not None:
            out["labels"] = [self.labels[e] for e in self.edges]
        return out


def _check_perm(sigma: Sequence[int]) -> tuple[int, ...]:
    sigma = tuple(int(s) for s in sigma)
    if sorted(sigma) != list(range(1, len(sigma) + 1)):
        raise ValueError(f"{sigma} is not a permutation of 1..{len(sigma)}")
    return sigma


def compatible_permutation(edge: Sequence[int], order: Sequence[int]) -> tuple[int, ...]:
    """The permutation realized by ``edge`` (read increasingly) under the total order ``order``.

    ``order`` lists the vertices from first to last.  Entry ``i`` of the
    result is the rank, under ``order``, of the ``i``-th smallest vertex.
    """
    pos = {v: i for i, v in enumerate(order)}
    xs = sorted(edge)
    ranked = sorted(xs, key=pos.__getitem__)
    return tuple(ranked.index(x) + 1 for x in xs)


def sigma_compatible(edge: Sequence[int], sigma: Sequence[int], order: Sequence[int]) -> bool:
    """Whether ``x_i`` precedes ``x_j`` in ``order`` exactly when ``sigma(i) < sigma(j)``."""
    sigma = _check_perm(sigma)
    if len(edge) != len(sigma):
        raise ValueError("edge and permutation have different sizes")
    return compatible_permutation(edge, order) == sigma


def abcd(sigma: Sequence[int]) -> tuple[int, int, int, int]:
    """Lexicographically least ``(a, b, c, d)`` with ``a < b``, ``c < d``, ``sigma(a) < sigma(b)`` and ``sigma(c) > sigma(d)``."""
    sigma = _check_perm(sigma)
    k = len(sigma)
    ident = tuple(range(1, k + 1))
    if sigma in (ident, ident[::-1]):
        raise ValueError("the identity and the reversal have no such indices")
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    a, b = next((a, b) for a, b in pairs if sigma[a - 1] < sigma[b - 1])
    c, d = next((c, d) for c, d in pairs if sigma[c - 1] > sigma[d - 1])
    return a, b, c, d


def build_G_sigma(sigma: Sequence[int], indices: Sequence[int] | None = None) -> OrderedGraph:
    """Three k-edges ``e1, e2, e3`` pairwise sharing one vertex, with

    ``x_a = z_c``, ``x_b = y_a`` and ``y_b = z_d`` where ``x, y, z`` list the
    vertices of ``e1, e2, e3`` in increasing order.  Labels come from a
    topological sort of the three edge chains that places a shared vertex
    as soon as it is available, and otherwise prefers the earliest edge.
    """
    sigma = _check_perm(sigma)
    k = len(sigma)
    if k < 3:
        raise ValueError("need k >= 3")
    a, b, c, d = abcd(sigma) if indices is None else tuple(indices)
    if not (a < b and c < d and sigma[a - 1] < sigma[b - 1] and sigma[c - 1] > sigma[d - 1]):
        raise ValueError(f"indices {(a, b, c, d)} do not fit {sigma}")
    # symbolic vertices: ("s", 1..3) shared, (edge, slot) private
    slots = {
        0: {a: ("s", 1), b: ("s", 2)},
        1: {a: ("s", 2), b: ("s", 3)},
        2: {c: ("s", 1), d: ("s", 3)},
    }
    chains = [[slots[e].get(i, (e, i)) for i in range(1, k + 1)] for e in range(3)]
    succ: dict = {}
    indeg: dict = {}
    rank: dict = {}
    for e, chain in enumerate(chains):
        for i, v in enumerate(chain):
            indeg.setdefault(v, 0)
            rank[v] = min(rank.get(v, (e, i)), (e, i))
        for u, v in zip(chain, chain[1:]):
            succ.setdefault(u, []).append(v)
            indeg[v] += 1

    def key(v):
        return (v[0] != "s",) + rank[v]

    heap = [(key(v), v) for v, dgr in indeg.items() if dgr == 0]
    heapq.heapify(heap)
    label = {}
    while heap:
        _, v = heapq.heappop(heap)
        label[v] = len(label) + 1
        for w in succ.get(v, []):
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(heap, (key(w), w))
    if len(label) != 3 * k - 3:
        raise AssertionError("layout failed")
    edges = [tuple(label[v] for v in chain) for chain in chains]
    graph = OrderedGraph(3 * k - 3, edges)
    x, y, z = edges
    if not (x[a - 1] == z[c - 1] and x[b - 1] == y[a - 1] and y[b - 1] == z[d - 1]):
        raise AssertionError("layout violates the identities")
    if not graph.is_linear() or any(list(e) != sorted(e) for e in edges):
        raise AssertionError("layout is not a linear ordered k-graph")
    return graph


def gsigma_edges(graph: OrderedGraph, sigma: Sequence[int], indices: Sequence[int] | None = None):
    """Edges of ``build_G_sigma`` in construction order (``e1, e2, e3``)."""
    a, b, c, d = abcd(sigma) if indices is None else tuple(indices)
    edges = list(graph.edges)
    # e1 holds the vertex shared with e3 at slot a and the one shared with e2 at slot b
    for x, y, z in itertools.permutations(edges):
        if x[a - 1] == z[c - 1] and x[b - 1] == y[a - 1] and y[b - 1] == z[d - 1]:
            return x, y, z
    raise ValueError("graph does not match the permutation")


@dataclass(frozen=True)
class GsigmaCertificate:
    sigma: tuple[int, ...]
    orders_checked: int
    holds: bool
    counterexample: tuple[int, ...] | None = None

    def to_json(self) -> dict:
        return {
            "sigma": list(self.sigma),
            "orders_checked": self.orders_checked,
            "holds": self.holds,
            "counterexample": None if self.counterexample is None else list(self.counterexample),
        }


def verify_gsigma_claim(
    sigma: Sequence[int], indices: Sequence[int] | None = None, budget: int = VERIFY_BUDGET, chunk: int = 200_000
) -> GsigmaCertificate:
    """Check, over every total order of the vertices, that some edge of ``G_sigma`` does not realize ``sigma``."""
    sigma = _check_perm(sigma)
    graph = build_G_sigma(sigma, indices)
    n = graph.vertex_count
    total = math.factorial(n)
    if total > budget:
        raise BudgetExceeded(f"{total} orders exceed the budget of {budget}", 0, budget)
    target = np.array(sigma) - 1
    edges = [np.array(e) - 1 for e in graph.edges]
    perms = itertools.permutations(range(n))
    checked = 0
    while True:
        block = np.array(list(itertools.islice(perms, chunk)), dtype=np.int8)
        if block.size == 0:
            break
        pos = np.argsort(block, axis=1)
        all_ok = np.ones(len(block), dtype=bool)
        for e in edges:
            ranks = np.argsort(np.argsort(pos[:, e], axis=1), axis=1)
            all_ok &= (ranks == target).all(axis=1)
        checked += len(block)
        if all_ok.any():
            bad = tuple(int(v) + 1 for v in block[int(np.argmax(all_ok))])
            return GsigmaCertificate(sigma, checked, False, bad)
    return GsigmaCertificate(sigma, checked, True)


def gsigma_union(k: int) -> tuple[OrderedGraph, list[tuple[int, ...]]]:
    """Vertex-disjoint union of ``G_sigma`` over all non-monotone ``sigma`` in ``S_k``, in lexicographic order."""
    ident = tuple(range(1, k + 1))
    sigmas = [s for s in itertools.permutations(ident) if s not in (ident, ident[::-1])]
    return disjoint_union(build_G_sigma(s) for s in sigmas), sigmas


def disjoint_union(graphs: Iterable[OrderedGraph]) -> OrderedGraph:
    """Place the graphs one after another in the order."""
    edges, labels, shift, labeled = [], {}, 0, True
    for g in graphs:
        for e in g.edges:
            moved = tuple(v + shift for v in e)
            edges.append(moved)
            if g.labels is None:
                labeled = False
            else:
                labels[moved] = g.labels[e]
        shift += g.vertex_count
    return OrderedGraph(shift, edges, labels if labeled and edges else None)


def build_triangle_system(q: Palette) -> OrderedGraph:
    """One triangle on ``3j-2, 3j-1, 3j`` per pattern ``q_j = (a, b, c)``, labeled ``a, b, c`` on its three pairs.

    Patterns are taken in sorted order.
    """
    if q.e == 0:
        raise ValueError("palette has no patterns")
    labels = {}
    for j, (a, b, c) in enumerate(q.patterns, start=1):
        x, y, z = 3 * j - 2, 3 * j - 1, 3 * j
        labels[(x, y)], labels[(x, z)], labels[(y, z)] = a, b, c
    return OrderedGraph(3 * q.e, list(labels), labels)


def substitute_copies(host: OrderedGraph, pattern: OrderedGraph) -> OrderedGraph:
    """Replace every edge of a linear host by a labeled copy of ``pattern``.

    Vertex ``i`` of the pattern goes to the ``i``-th smallest vertex of the
    host edge, so the copies keep their order.
    """
    if pattern.labels is None:
        raise ValueError("pattern graph must be labeled")
    if host.edges and host.uniformity != pattern.vertex_count:
        raise ValueError("host edges must have as many vertices as the pattern graph")
    labels: dict[tuple[int, int], int] = {}
    for e in host.edges:
        for (u, v), lab in pattern.labels.items():
            pair = (e[u - 1], e[v - 1])
            if pair in labels:
                raise ValueError("host is not linear: two copies share a pair")
            labels[pair] = lab
    return OrderedGraph(host.vertex_count, list(labels), labels)


def hypergraph_from_colored_graph(graph: OrderedGraph, q: Palette) -> ThreeGraph:
    """Triangles ``x < y < z`` whose labels ``(xy, xz, yz)`` form a pattern of ``q``."""
    if graph.labels is None:
        raise ValueError("graph must be labeled")
    if graph.edges and graph.uniformity != 2:
        raise ValueError("expected a graph")
    adj: dict[int, set[int]] = {}
    for x, y in graph.edges:
        adj.setdefault(x, set()).add(y)
    lab = graph.labels
    pats = q.pattern_set
    out = []
    for x, y in graph.edges:
        for z in sorted(adj.get(x, set()) & adj.get(y, set())):
            if (lab[(x, y)], lab[(x, z)], lab[(y, z)]) in pats:
                out.append((x, y, z))
    return ThreeGraph(graph.vertex_count, out)


def natural_painting(graph: OrderedGraph, hyper: ThreeGraph, default: int = 1) -> Painting:
    """The painting given by the natural order and the labels (``default`` off the graph)."""
    lab = graph.labels or {}
    coloring = {p: lab.get(p, default) for p in shadow(hyper)}
    return Painting(tuple(range(1, hyper.vertex_count + 1)), coloring)
