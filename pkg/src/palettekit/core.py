"""Value types for palettes and 3-graphs, basic palette algebra and the text formats.

Colors and vertices are 1-based contiguous integers.  All types are frozen
and hashable; operations return new values.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

Pattern = tuple[int, int, int]
Edge = tuple[int, int, int]
Pair = tuple[int, int]

#: largest color count accepted by :func:`canonical_form`
CANONICAL_MAX_COLORS = 8


class DegenerateInputError(ValueError):
    """Raised when an operation is undefined for the given input (e.g. zero colors)."""


class BudgetExceeded(RuntimeError):
    """A search hit its node budget before reaching a definitive answer.

    This is deliberately not a subclass of ``ValueError``: running out of
    budget means "unknown", never "no".
    """

    def __init__(self, message: str, nodes: int = 0, budget: int = 0):
        super().__init__(message)
        self.nodes = nodes
        self.budget = budget


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Palette:
    """A color count together with a set of ordered color triples (patterns).

    Patterns are normalized to a lexicographically sorted tuple without
    duplicates, so equal palettes compare and hash equal.
    """

    color_count: int
    patterns: tuple[Pattern, ...] = ()

    def __post_init__(self):
        c = int(self.color_count)
        if c < 0:
            raise ValueError(f"color_count must be non-negative, got {c}")
        pats = set()
        for p in self.patterns:
            p = tuple(int(v) for v in p)
            if len(p) != 3:
                raise ValueError(f"pattern {p} does not have three entries")
            if not all(1 <= v <= c for v in p):
                raise ValueError(f"pattern {p} uses a color outside [1..{c}]")
            pats.add(p)
        object.__setattr__(self, "color_count", c)
        object.__setattr__(self, "patterns", tuple(sorted(pats)))

    @classmethod
    def full(cls, color_count: int) -> Palette:
        colors = range(1, color_count + 1)
        return cls(color_count, itertools.product(colors, repeat=3))

    @property
    def e(self) -> int:
        return len(self.patterns)

    @property
    def c(self) -> int:
        return self.color_count

    @cached_property
    def pattern_set(self) -> frozenset[Pattern]:
        return frozenset(self.patterns)

    @cached_property
    def index_array(self) -> np.ndarray:
        """Patterns as a zero-based ``(e, 3)`` integer array."""
        return np.array(self.patterns, dtype=np.intp).reshape(-1, 3) - 1

    def cube(self) -> np.ndarray:
        """Boolean ``(c, c, c)`` indicator of the pattern set (read-only, cached)."""
        return self._cube

    @cached_property
    def _cube(self) -> np.ndarray:
        out = np.zeros((self.color_count,) * 3, dtype=bool)
        if self.patterns:
            idx = self.index_array
            out[idx[:, 0], idx[:, 1], idx[:, 2]] = True
        out.flags.writeable = False
        return out

    def __contains__(self, pattern) -> bool:
        return tuple(pattern) in self.pattern_set

    def __len__(self) -> int:
        return len(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def is_nondegenerate(self) -> bool:
        return all(len(set(p)) == 3 for p in self.patterns)

    def used_colors(self) -> frozenset[int]:
        return frozenset(v for p in self.patterns for v in p)

    def with_patterns(self, patterns: Iterable[Pattern]) -> Palette:
        return Palette(self.color_count, patterns)

    def relabel(self, perm: Sequence[int]) -> Palette:
        """Apply the color map ``i -> perm[i-1]`` (a permutation of ``1..c``)."""
        return Palette(self.color_count, ((perm[a - 1], perm[b - 1], perm[c - 1]) for a, b, c in self.patterns))


@dataclass(frozen=True)
class ThreeGraph:
    vertex_count: int
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        n = int(self.vertex_count)
        if n < 0:
            raise ValueError(f"vertex_count must be non-negative, got {n}")
        es = set()
        for e in self.edges:
            e = tuple(sorted(int(v) for v in e))
            if len(e) != 3 or len(set(e)) != 3:
                raise ValueError(f"edge {e} must have three distinct vertices")
            if not all(1 <= v <= n for v in e):
                raise ValueError(f"edge {e} uses a vertex outside [1..{n}]")
            es.add(e)
        object.__setattr__(self, "vertex_count", n)
        object.__setattr__(self, "edges", tuple(sorted(es)))

    @classmethod
    def complete(cls, n: int) -> ThreeGraph:
        return cls(n, itertools.combinations(range(1, n + 1), 3))

    @property
    def e(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self.edges)

    def covered_vertices(self) -> tuple[int, ...]:
        return tuple(sorted({v for e in self.edges for v in e}))

    def induced(self, vertices: Iterable[int]) -> ThreeGraph:
        """Sub-3-graph induced on ``vertices``, relabelled to ``1..k`` in increasing order."""
        vs = sorted(set(vertices))
        index = {v: i + 1 for i, v in enumerate(vs)}
        return ThreeGraph(len(vs), (tuple(index[v] for v in e) for e in self.edges if all(v in index for v in e)))

    def relabel(self, perm: Sequence[int]) -> ThreeGraph:
        return ThreeGraph(self.vertex_count, (tuple(perm[v - 1] for v in e) for e in self.edges))


@dataclass(frozen=True)
class WeightVector:
    """A point of the standard simplex, one weight per color."""

    weights: tuple[float, ...]

    def __post_init__(self):
        w = tuple(float(v) for v in self.weights)
        if any(not (0.0 <= v <= 1.0) for v in w):
            raise ValueError("weights must lie in [0, 1]")
        if w and abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {sum(w)!r}, not 1")
        if not w:
            raise ValueError("a weighting needs at least one color")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, c: int) -> WeightVector:
        return cls((1.0 / c,) * c)

    @classmethod
    def vertex(cls, c: int, m: int) -> WeightVector:
        return cls(tuple(1.0 if i == m else 0.0 for i in range(1, c + 1)))

    def __len__(self) -> int:
        return len(self.weights)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype or float)


def as_weights(x, c: int) -> np.ndarray:
    """Validate ``x`` as a weighting of a ``c``-color palette and return it as an array."""
    arr = np.asarray(x, dtype=float).ravel()
    if arr.shape[0] != c:
        raise ValueError(f"weighting has {arr.shape[0]} entries, palette has {c} colors")
    if np.any(arr < -1e-12) or np.any(arr > 1 + 1e-12) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError("weighting is not a point of the simplex")
    return arr


@dataclass(frozen=True)
class Painting:
    """A vertex ordering (listed first to last) plus a coloring of the shadow pairs."""

    ordering: tuple[int, ...]
    pair_coloring: Mapping[Pair, int] = field(default_factory=dict)

    def position(self) -> dict[int, int]:
        return {v: i for i, v in enumerate(self.ordering)}

    def color(self, u: int, v: int) -> int:
        return self.pair_coloring[(u, v) if u < v else (v, u)]

    def violations(self, palette: Palette, graph: ThreeGraph) -> list[Edge]:
        """Edges whose ordered pair colors are not a pattern (empty list means valid)."""
        if sorted(self.ordering) != list(range(1, graph.vertex_count + 1)):
            raise ValueError("ordering is not a permutation of the vertex set")
        pos = self.position()
        bad = []
        for e in graph.edges:
            x, y, z = sorted(e, key=pos.__getitem__)
            try:
                triple = (self.color(x, y), self.color(x, z), self.color(y, z))
            except KeyError:
                bad.append(e)
                continue
            if triple not in palette.pattern_set:
                bad.append(e)
        return bad

    def is_valid(self, palette: Palette, graph: ThreeGraph) -> bool:
        if any(not 1 <= col <= palette.color_count for col in self.pair_coloring.values()):
            return False
        if set(shadow(graph)) - set(self.pair_coloring):
            return False
        return not self.violations(palette, graph)

    def to_json(self) -> dict:
        return {
            "ordering": list(self.ordering),
            "coloring": [[u, v, c] for (u, v), c in sorted(self.pair_coloring.items())],
        }


@dataclass(frozen=True)
class Equipartition:
    """Labelled parts ``V_1..V_t`` plus an exceptional set ``V_0`` covering ``1..universe``."""

    parts: tuple[tuple[int, ...], ...]
    exceptional: tuple[int, ...] = ()
    universe: int = 0

    def __post_init__(self):
        parts = tuple(tuple(sorted(int(v) for v in p)) for p in self.parts)
        exc = tuple(sorted(int(v) for v in self.exceptional))
        seen = [v for p in parts for v in p] + list(exc)
        if len(seen) != len(set(seen)):
            raise ValueError("parts are not pairwise disjoint")
        if sorted(seen) != list(range(1, self.universe + 1)):
            raise ValueError(f"parts do not cover [1..{self.universe}]")
        sizes = [len(p) for p in parts]
        if sizes and max(sizes) - min(sizes) > 1:
            raise ValueError(f"part sizes {sorted(set(sizes))} differ by more than one")
        object.__setattr__(self, "parts", parts)
        object.__setattr__(self, "exceptional", exc)

    @classmethod
    def balanced(cls, n: int, t: int) -> Equipartition:
        """Split ``1..n`` into ``t`` contiguous blocks whose sizes differ by at most one."""
        if t < 1:
            raise ValueError("need at least one part")
        bounds = np.linspace(0, n, t + 1).round().astype(int)
        return cls(tuple(tuple(range(bounds[i] + 1, bounds[i + 1] + 1)) for i in range(t)), (), n)

    @property
    def t(self) -> int:
        return len(self.parts)

    def sizes(self) -> list[int]:
        return [len(p) for p in self.parts]

    def cells(self) -> list[tuple[int, ...]]:
        """Parts followed by the exceptional colors as singletons."""
        return list(self.parts) + [(v,) for v in self.exceptional]

    def to_json(self) -> dict:
        return {"parts": [list(p) for p in self.parts], "exceptional": list(self.exceptional), "universe": self.universe}


# ---------------------------------------------------------------------------
# palette algebra


def density(palette: Palette) -> Fraction:
    """Exact pattern density ``e(P) / c(P)^3``."""
    if palette.color_count == 0:
        raise DegenerateInputError("density of a palette with no colors is undefined")
    return Fraction(palette.e, palette.color_count**3)


def reverse(palette: Palette) -> Palette:
    return Palette(palette.color_count, ((c, b, a) for a, b, c in palette.patterns))


def induced(palette: Palette, colors: Iterable[int]) -> Palette:
    """Induced subpalette on ``colors``, relabelled to ``1..|U|`` preserving order."""
    us = sorted(set(int(u) for u in colors))
    for u in us:
        if not 1 <= u <= palette.color_count:
            raise ValueError(f"color {u} is outside [1..{palette.color_count}]")
    index = {u: i + 1 for i, u in enumerate(us)}
    return Palette(
        len(us),
        ((index[a], index[b], index[c]) for a, b, c in palette.patterns if a in index and b in index and c in index),
    )


def classes_from_sizes(sizes: Sequence[int]) -> tuple[int, ...]:
    """Class map of a blow-up with contiguous classes: color ``x`` maps to its origin."""
    out: list[int] = []
    for origin, s in enumerate(sizes, start=1):
        if s < 0:
            raise ValueError("class sizes must be non-negative")
        out.extend([origin] * int(s))
    return tuple(out)


def blow_up(palette: Palette, sizes: Sequence[int]) -> tuple[Palette, tuple[int, ...]]:
    """Blow each color ``i`` up into ``sizes[i-1]`` copies.

    Returns the blown-up palette and its class map, where ``class_map[x-1]``
    is the color of ``palette`` that color ``x`` descends from.  Classes are
    contiguous blocks in color order.
    """
    if len(sizes) != palette.color_count:
        raise ValueError(f"need {palette.color_count} class sizes, got {len(sizes)}")
    class_map = classes_from_sizes(sizes)
    return blow_up_by_classes(palette, class_map), class_map


def blow_up_by_classes(palette: Palette, class_map: Sequence[int]) -> Palette:
    """The blow-up of ``palette`` whose partition structure is given by ``class_map``."""
    members: dict[int, list[int]] = {}
    for x, origin in enumerate(class_map, start=1):
        if not 1 <= origin <= palette.color_count:
            raise ValueError(f"class label {origin} is not a color of the palette")
        members.setdefault(origin, []).append(x)
    pats = []
    for a, b, c in palette.patterns:
        pats.extend(itertools.product(members.get(a, ()), members.get(b, ()), members.get(c, ())))
    return Palette(len(class_map), pats)


def contract(palette: Palette, class_map: Sequence[int], target_colors: int) -> Palette:
    """Image of ``palette`` under the color map ``class_map`` (onto ``target_colors`` colors)."""
    if len(class_map) != palette.color_count:
        raise ValueError("class map must assign every color")
    return Palette(target_colors, ((class_map[a - 1], class_map[b - 1], class_map[c - 1]) for a, b, c in palette.patterns))


def _encode(patterns: np.ndarray, c: int) -> np.ndarray:
    return (patterns[..., 0] * c + patterns[..., 1]) * c + patterns[..., 2]


def canonical_form(palette: Palette) -> Palette:
    """Lexicographically least relabelling of ``palette`` over all color permutations.

    Two palettes with the same color count are isomorphic exactly when their
    canonical forms are equal.  Only palettes with at most
    :data:`CANONICAL_MAX_COLORS` colors are accepted.
    """
    c = palette.color_count
    if c > CANONICAL_MAX_COLORS:
        raise ValueError(f"canonical_form supports at most {CANONICAL_MAX_COLORS} colors, got {c}")
    if palette.e == 0 or c <= 1:
        return palette
    idx = palette.index_array
    best: np.ndarray | None = None
    perms = np.array(list(itertools.permutations(range(c))), dtype=np.int64)
    chunk = max(1, 2_000_000 // max(palette.e, 1))
    for start in range(0, len(perms), chunk):
        block = perms[start : start + chunk]
        mapped = block[:, idx]  # (k, e, 3)
        codes = np.sort(_encode(mapped, c), axis=1)
        order = np.lexsort(codes.T[::-1])
        cand = codes[order[0]]
        if best is None or tuple(cand) < tuple(best):
            best = cand
    assert best is not None
    a, rem = np.divmod(best, c * c)
    b, z = np.divmod(rem, c)
    return Palette(c, zip((a + 1).tolist(), (b + 1).tolist(), (z + 1).tolist()))


def shadow(graph: ThreeGraph) -> tuple[Pair, ...]:
    """Sorted pairs of vertices covered by some edge."""
    pairs = set()
    for x, y, z in graph.edges:
        pairs.update(((x, y), (x, z), (y, z)))
    return tuple(sorted(pairs))


# ---------------------------------------------------------------------------
# text formats


def _tokens(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        yield lineno, col, line.split()


def _header(rows, keyword: str):
    try:
        lineno, col, toks = next(rows)
    except StopIteration:
        raise ParseError(f"empty input, expected '{keyword} <count>'", 1) from None
    if len(toks) != 2 or toks[0] != keyword:
        raise ParseError(f"expected '{keyword} <count>'", lineno, col)
    try:
        count = int(toks[1])
    except ValueError:
        raise ParseError(f"count {toks[1]!r} is not an integer", lineno, col + len(toks[0]) + 1) from None
    if count < 0:
        raise ParseError("count must be non-negative", lineno, col)
    return count


def _triples(rows, limit: int, what: str):
    for lineno, col, toks in rows:
        if len(toks) != 3:
            raise ParseError(f"expected three integers per {what}", lineno, col)
        vals = []
        for t in toks:
            try:
                vals.append(int(t))
            except ValueError:
                raise ParseError(f"{t!r} is not an integer", lineno, col) from None
        for v in vals:
            if not 1 <= v <= limit:
                raise ParseError(f"{v} is outside [1..{limit}]", lineno, col)
        yield lineno, col, tuple(vals)


def parse_palette(text: str) -> Palette:
    rows = _tokens(text)
    c = _header(rows, "palette")
    return Palette(c, [t for _, _, t in _triples(rows, c, "pattern")])


def format_palette(palette: Palette) -> str:
    lines = [f"palette {palette.color_count}"]
    lines += [f"{a} {b} {c}" for a, b, c in palette.patterns]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> ThreeGraph:
    rows = _tokens(text)
    n = _header(rows, "graph3")
    edges = []
    for lineno, col, t in _triples(rows, n, "edge"):
        if len(set(t)) != 3:
            raise ParseError(f"edge {t} repeats a vertex", lineno, col)
        edges.append(t)
    return ThreeGraph(n, edges)


def format_graph(graph: ThreeGraph) -> str:
    lines = [f"graph3 {graph.vertex_count}"]
    lines += [f"{a} {b} {c}" for a, b, c in graph.edges]
    return "\n".join(lines) + "\n"
