"""Largest palettes avoiding a family of 3-graphs, and blow-up fitting.

A palette paints ``F`` exactly when it contains the set of patterns used by
some painting of ``F`` by the full palette.  So the deficient palettes are
the pattern sets containing none of the minimal such "witness" sets, and the
largest one is the complement of a minimum hitting set of the witnesses.
The hitting set is solved as a 0/1 program with HiGHS.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .core import (
    CANONICAL_MAX_COLORS,
    BudgetExceeded,
    Palette,
    ThreeGraph,
    blow_up,
    blow_up_by_classes,
    canonical_form,
    format_graph,
)
from .painting import DEFAULT_BUDGET, PaintingSearch, paints

EXHAUSTIVE_MAX_COLORS = 4
MAX_LISTED = 200
FIT_LIMIT = 10**7


@dataclass
class ExtremalReport:
    n: int
    family: list[ThreeGraph]
    ex_value: int | None
    extremal_palettes: list[Palette]
    nodes_searched: int
    optimal: bool = True
    complete_listing: bool = True
    mode: str = "exhaustive"
    nondegenerate: bool = False
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "family": [format_graph(f) for f in self.family],
            "ex_value": self.ex_value,
            "extremal_palettes": [[list(p) for p in q.patterns] for q in self.extremal_palettes],
            "nodes_searched": self.nodes_searched,
            "optimal": self.optimal,
            "complete_listing": self.complete_listing,
            "mode": self.mode,
            "nondegenerate": self.nondegenerate,
            "notes": self.notes,
        }


def universe(n: int, nondegenerate: bool = False) -> Palette:
    full = Palette.full(n)
    if nondegenerate:
        return full.with_patterns(p for p in full.patterns if len(set(p)) == 3)
    return full


def witness_masks(space: Palette, family: Iterable[ThreeGraph], budget: int = DEFAULT_BUDGET) -> tuple[list[int], int]:
    """Minimal pattern sets (bitmasks over ``space.patterns``) whose presence lets a palette paint a member.

    Branches whose used patterns already contain a known witness are cut.
    Returns the witnesses and the number of search nodes spent.
    """
    index = {p: i for i, p in enumerate(space.patterns)}
    found: list[int] = []
    nodes = 0

    def mask(used) -> int:
        m = 0
        for p in used:
            m |= 1 << index[p]
        return m

    def covered(m: int) -> bool:
        return any(w & m == w for w in found)

    for graph in family:
        search = PaintingSearch(space, graph, budget - nodes)
        try:
            for _, used in search.iter_paintings(prune=lambda used: covered(mask(used))):
                m = mask(used)
                if not covered(m):
                    found = [w for w in found if w & m != m] + [m]
        finally:
            nodes += search.nodes
    return sorted(found, key=lambda w: (bin(w).count("1"), w)), nodes


def _solve(size: int, rows: np.ndarray, cuts: list[np.ndarray], target: int | None):
    """Minimum hitting set of ``rows``; with ``target`` set, any hitting set of that size avoiding ``cuts``."""
    mats, lo, hi = [rows], [np.ones(len(rows))], [np.full(len(rows), np.inf)]
    if target is not None:
        mats.append(np.ones((1, size)))
        lo.append(np.array([target]))
        hi.append(np.array([target]))
        for cut in cuts:
            mats.append(cut[None, :])
            lo.append(np.array([-np.inf]))
            hi.append(np.array([target - 1]))
    res = milp(
        c=np.ones(size),
        constraints=LinearConstraint(np.vstack(mats), np.concatenate(lo), np.concatenate(hi)),
        integrality=np.ones(size),
        bounds=Bounds(0, 1),
    )
    if res.status != 0 or res.x is None:
        return None, 0
    return np.round(res.x).astype(int), int(getattr(res, "mip_node_count", 0) or 0)


def _orbit_cuts(space: Palette, chosen: np.ndarray, n: int) -> list[np.ndarray]:
    index = {p: i for i, p in enumerate(space.patterns)}
    picked = [space.patterns[i] for i in np.flatnonzero(chosen)]
    cuts = set()
    for perm in itertools.permutations(range(1, n + 1)):
        row = np.zeros(len(space.patterns), dtype=int)
        for a, b, c in picked:
            row[index[(perm[a - 1], perm[b - 1], perm[c - 1])]] = 1
        cuts.add(row.tobytes())
    return [np.frombuffer(b, dtype=int) for b in sorted(cuts)]


def ex_pal(
    n: int,
    family: Sequence[ThreeGraph],
    budget: int = DEFAULT_BUDGET,
    nondegenerate: bool = False,
    heuristic: bool = False,
    seed: int = 0,
    max_listed: int = MAX_LISTED,
) -> ExtremalReport:
    """Largest number of patterns of a palette on ``n`` colors painting no member of ``family``.

    Exhaustive mode (``n <= 4``) is exact and lists every extremal palette up
    to isomorphism, at most ``max_listed`` of them.  If the family contains a
    3-graph without edges no palette is deficient and ``ex_value`` is ``None``.
    Heuristic mode returns a lower bound from randomized greedy growth.
    """
    family = list(family)
    space = universe(n, nondegenerate)
    if heuristic or n > EXHAUSTIVE_MAX_COLORS:
        return _greedy(n, family, space, budget, seed, nondegenerate, "heuristic")
    try:
        witnesses, nodes = witness_masks(space, family, budget)
    except BudgetExceeded as exc:
        report = _greedy(n, family, space, budget, seed, nondegenerate, "exhaustive")
        report.notes.append(f"witness enumeration stopped: {exc}")
        return report
    size = len(space.patterns)
    report = ExtremalReport(n, family, None, [], nodes, nondegenerate=nondegenerate)
    if 0 in witnesses:
        report.notes.append("a member has no edges, so every palette paints it")
        return report
    if not witnesses:
        report.ex_value = size
        report.extremal_palettes = [canonical_form(space)]
        return report
    rows = np.zeros((len(witnesses), size))
    for r, w in enumerate(witnesses):
        rows[r] = [(w >> i) & 1 for i in range(size)]
    hit, spent = _solve(size, rows, [], None)
    report.nodes_searched += spent
    target = int(hit.sum())
    report.ex_value = size - target
    cuts: list[np.ndarray] = []
    forms = set()
    while hit is not None:
        if len(forms) >= max_listed:
            report.complete_listing = False
            break
        kept = space.with_patterns(p for i, p in enumerate(space.patterns) if not hit[i])
        forms.add(canonical_form(kept) if n <= CANONICAL_MAX_COLORS else kept)
        cuts += _orbit_cuts(space, hit, n)
        hit, spent = _solve(size, rows, cuts, target)
        report.nodes_searched += spent
    report.extremal_palettes = sorted(forms, key=lambda q: q.patterns)
    return report


def _greedy(n, family, space, budget, seed, nondegenerate, mode, restarts: int = 8) -> ExtremalReport:
    rng = np.random.default_rng(seed)
    best: Palette | None = None
    for _ in range(restarts):
        chosen: list = []
        for i in rng.permutation(len(space.patterns)):
            trial = space.with_patterns(chosen + [space.patterns[i]])
            if not any(paints(trial, f, budget) for f in family):
                chosen.append(space.patterns[i])
        cand = space.with_patterns(chosen)
        if best is None or cand.e > best.e:
            best = cand
    if any(paints(best, f, budget) for f in family):
        return ExtremalReport(n, family, None, [], 0, optimal=False, mode=mode, nondegenerate=nondegenerate)
    form = canonical_form(best) if n <= CANONICAL_MAX_COLORS else best
    return ExtremalReport(
        n, family, best.e, [form], 0, optimal=False, complete_listing=False, mode=mode, nondegenerate=nondegenerate
    )


def g_nondegenerate(n: int, family: Sequence[ThreeGraph], budget: int = DEFAULT_BUDGET) -> int | None:
    """Largest deficient palette using only patterns with three distinct colors."""
    if n < 3:
        return 0 if all(f.e for f in family) else None
    return ex_pal(n, family, budget, nondegenerate=True, max_listed=1).ex_value


def edit_distance(p: Palette, q: Palette) -> int:
    if p.color_count != q.color_count:
        raise ValueError("edit distance needs palettes on the same colors")
    return len(p.pattern_set ^ q.pattern_set)


def missing_bad(q: Palette, p: Palette, sizes: Sequence[int]) -> tuple[frozenset, frozenset, int]:
    """Patterns of the blow-up missing from ``q``, patterns of ``q`` outside it, and the max color degree of the latter."""
    if len(sizes) != p.color_count or sum(sizes) != q.color_count:
        raise ValueError("sizes must give one class per color of p and cover the colors of q")
    s, _ = blow_up(p, sizes)
    return _split(q, s)


def missing_bad_by_classes(q: Palette, p: Palette, class_map: Sequence[int]) -> tuple[frozenset, frozenset, int]:
    if len(class_map) != q.color_count:
        raise ValueError("class map must cover the colors of q")
    return _split(q, blow_up_by_classes(p, class_map))


def _split(q: Palette, s: Palette):
    a = s.pattern_set - q.pattern_set
    b = q.pattern_set - s.pattern_set
    deg = [0] * (q.color_count + 1)
    for pat in b:
        for v in set(pat):
            deg[v] += 1
    return frozenset(a), frozenset(b), max(deg)


@dataclass(frozen=True)
class BlowupFit:
    class_map: tuple[int, ...]
    bad: int
    exhaustive: bool


def _bad_counts(q: Palette, cube: np.ndarray, maps: np.ndarray) -> np.ndarray:
    if q.e == 0:
        return np.zeros(len(maps), dtype=int)
    idx = q.index_array
    hit = cube[maps[:, idx[:, 0]] - 1, maps[:, idx[:, 1]] - 1, maps[:, idx[:, 2]] - 1]
    return q.e - hit.sum(axis=1)


def best_blowup_fit(q: Palette, p: Palette, mode: str = "exhaustive", seed: int = 0, starts: int = 10) -> BlowupFit:
    """Assignment of the colors of ``q`` to colors of ``p`` minimizing patterns of ``q`` outside the blow-up.

    Exhaustive mode returns the lexicographically least optimal map.  Local
    mode moves one color at a time to another class while that helps, from
    ``starts`` random assignments.
    """
    t, n = p.color_count, q.color_count
    if t == 0:
        raise ValueError("target palette has no colors")
    cube = p.cube().astype(bool)
    if mode == "exhaustive":
        if t**n > FIT_LIMIT:
            raise ValueError(f"{t}^{n} assignments exceed the limit {FIT_LIMIT}")
        best = None
        for chunk in _chunks(itertools.product(range(1, t + 1), repeat=n), 100_000):
            maps = np.array(chunk, dtype=int).reshape(len(chunk), n)
            bad = _bad_counts(q, cube, maps)
            i = int(np.argmin(bad))
            if best is None or bad[i] < best[1]:
                best = (tuple(int(v) for v in maps[i]), int(bad[i]))
        return BlowupFit(best[0], best[1], True)
    if mode != "local":
        raise ValueError("mode must be 'exhaustive' or 'local'")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(starts):
        cur = rng.integers(1, t + 1, size=n)
        score = int(_bad_counts(q, cube, cur[None, :])[0])
        improved = True
        while improved:
            improved = False
            moves = np.repeat(cur[None, :], n * t, axis=0)
            for v in range(n):
                moves[v * t : (v + 1) * t, v] = np.arange(1, t + 1)
            scores = _bad_counts(q, cube, moves)
            i = int(np.argmin(scores))
            if scores[i] < score:
                cur, score, improved = moves[i].copy(), int(scores[i]), True
        key = (score, tuple(int(v) for v in cur))
        if best is None or key < best:
            best = key
    return BlowupFit(best[1], best[0], False)


def _chunks(it, size):
    buf = []
    for item in it:
        buf.append(item)
        if len(buf) == size:
            yield buf
            buf = []
    if buf:
        yield buf


def small_graphs(max_vertices: int) -> list[ThreeGraph]:
    """All 3-graphs on exactly ``max_vertices`` vertices, one per isomorphism class."""
    triples = list(itertools.combinations(range(1, max_vertices + 1), 3))
    perms = list(itertools.permutations(range(1, max_vertices + 1)))
    seen, out = set(), []
    for r in range(len(triples) + 1):
        for edges in itertools.combinations(triples, r):
            key = min(tuple(sorted(tuple(sorted(perm[v - 1] for v in e)) for e in edges)) for perm in perms)
            if key not in seen:
                seen.add(key)
                out.append(ThreeGraph(max_vertices, key))
    return out
