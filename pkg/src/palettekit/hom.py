"""Palette homomorphisms, embeddings, isomorphism and color domination.

A homomorphism from ``source`` to ``target`` is a map on colors sending
every pattern of ``source`` to a pattern of ``target``.  Maps are returned as
tuples: ``psi[i-1]`` is the image of color ``i``.
"""

from __future__ import annotations

import itertools
from typing import Iterator

from .core import BudgetExceeded, Palette, canonical_form

DEFAULT_BUDGET = 10**7


def iter_homomorphisms(
    source: Palette, target: Palette, injective: bool = False, budget: int = DEFAULT_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Enumerate homomorphisms ``source -> target`` in a fixed deterministic order.

    Colors of ``source`` are assigned in descending pattern-degree order; after
    each assignment every pattern with exactly one unassigned color prunes that
    color's candidate set (forward checking).
    """
    n, t = source.color_count, target.color_count
    if n == 0:
        yield ()
        return
    if t == 0 or (injective and n > t):
        return
    tset = target.pattern_set
    degree = [0] * (n + 1)
    touching: list[list] = [[] for _ in range(n + 1)]
    for p in source.patterns:
        for v in set(p):
            degree[v] += 1
            touching[v].append(p)
    order = sorted(range(1, n + 1), key=lambda v: (-degree[v], v))
    domains: dict[int, set[int]] = {v: set(range(1, t + 1)) for v in order}
    # a color used in position j of some pattern must land on a color used in position j
    for p in source.patterns:
        for j, v in enumerate(p):
            domains[v] &= {q[j] for q in target.patterns}
    psi: dict[int, int] = {}
    nodes = 0

    def consistent(v: int) -> bool:
        for p in touching[v]:
            if all(u in psi for u in p) and tuple(psi[u] for u in p) not in tset:
                return False
        return True

    def forward(v: int):
        """Shrink domains of colors that became the last free color of a pattern."""
        removed: list[tuple[int, int]] = []
        for p in touching[v]:
            free = {u for u in p if u not in psi}
            if len(free) != 1:
                continue
            (w,) = free
            for cand in list(domains[w]):
                img = tuple(psi[u] if u in psi else cand for u in p)
                if img not in tset:
                    domains[w].discard(cand)
                    removed.append((w, cand))
        return removed

    def rec(i: int):
        nonlocal nodes
        if i == n:
            yield tuple(psi[v] for v in range(1, n + 1))
            return
        v = order[i]
        for img in sorted(domains[v]):
            if injective and img in psi.values():
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"homomorphism search exceeded {budget} nodes", nodes, budget)
            psi[v] = img
            if consistent(v):
                removed = forward(v)
                if all(domains[w] for w in order[i + 1 :]):
                    yield from rec(i + 1)
                for w, cand in removed:
                    domains[w].add(cand)
            del psi[v]

    if all(domains.values()):
        yield from rec(0)


def find_homomorphism(source: Palette, target: Palette, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    for psi in iter_homomorphisms(source, target, budget=budget):
        return psi
    return None


def is_homomorphism(source: Palette, target: Palette, psi) -> bool:
    if len(psi) != source.color_count or any(not 1 <= v <= target.color_count for v in psi):
        return False
    return all((psi[a - 1], psi[b - 1], psi[c - 1]) in target.pattern_set for a, b, c in source.patterns)


def blowup_containment(source: Palette, target: Palette, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether ``source`` is contained in some blow-up of ``target``."""
    return find_homomorphism(source, target, budget) is not None


def find_embedding(source: Palette, target: Palette, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    for psi in iter_homomorphisms(source, target, injective=True, budget=budget):
        return psi
    return None


def embedding_exists(source: Palette, target: Palette, budget: int = DEFAULT_BUDGET) -> bool:
    return find_embedding(source, target, budget) is not None


def is_isomorphic(p: Palette, q: Palette) -> bool:
    if p.color_count != q.color_count or p.e != q.e:
        return False
    return canonical_form(p) == canonical_form(q)


def find_isomorphism(p: Palette, q: Palette, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    """An explicit color bijection mapping ``p`` onto ``q``, by search."""
    if p.color_count != q.color_count or p.e != q.e:
        return None
    # an injective homomorphism between equal-size palettes is onto, hence an isomorphism
    return find_embedding(p, q, budget)


def automorphisms(p: Palette) -> list[tuple[int, ...]]:
    return list(iter_homomorphisms(p, p, injective=True))


def blowup_class_map(q: Palette, p: Palette, budget: int = DEFAULT_BUDGET) -> tuple[int, ...] | None:
    """A partition structure exhibiting ``q`` as a blow-up of ``p``, if one exists.

    Class ``i`` of the structure is the set of colors mapped to ``i``.  A
    homomorphism ``q -> p`` is a blow-up structure exactly when it also
    reaches every pattern of the corresponding blow-up, which is checked by
    counting.
    """
    for psi in iter_homomorphisms(q, p, budget=budget):
        sizes = [0] * (p.color_count + 1)
        for v in psi:
            sizes[v] += 1
        if sum(sizes[a] * sizes[b] * sizes[c] for a, b, c in p.patterns) == q.e:
            return psi
    return None


def is_blowup_of(q: Palette, p: Palette, budget: int = DEFAULT_BUDGET) -> bool:
    return blowup_class_map(q, p, budget) is not None


def dominates(palette: Palette, a: int, b: int) -> bool:
    """Whether color ``b`` dominates color ``a``.

    Every way of replacing a nonempty subset of the occurrences of ``a`` in a
    pattern by ``b`` must again give a pattern.
    """
    c = palette.color_count
    if a == b:
        raise ValueError("domination compares two distinct colors")
    if not (1 <= a <= c and 1 <= b <= c):
        raise ValueError(f"colors must lie in [1..{c}]")
    pats = palette.pattern_set
    for p in palette.patterns:
        spots = [i for i, v in enumerate(p) if v == a]
        for r in range(1, len(spots) + 1):
            for sub in itertools.combinations(spots, r):
                q = tuple(b if i in sub else v for i, v in enumerate(p))
                if q not in pats:
                    return False
    return True


def dominated_pairs(palette: Palette) -> list[tuple[int, int]]:
    """All ``(a, b)`` with ``b`` dominating ``a``."""
    cs = range(1, palette.color_count + 1)
    return [(a, b) for a in cs for b in cs if a != b and dominates(palette, a, b)]
