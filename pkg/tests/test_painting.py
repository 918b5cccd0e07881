import numpy as np
import pytest

from palettekit.core import BudgetExceeded, Palette, ThreeGraph
from palettekit.painting import (
    PaintingSearch,
    count_paintings,
    find_painting,
    is_deficient,
    is_family_deficient,
    is_linear,
    paints,
    shadow_linear,
)
from oracles import brute_count_single_edge, brute_paints, random_graph, random_palette

EDGE = ThreeGraph(3, [(1, 2, 3)])
K4 = ThreeGraph.complete(4)
K4_MINUS = ThreeGraph(4, [(1, 2, 3), (1, 2, 4), (1, 3, 4)])


def test_any_nonempty_palette_paints_an_edge():
    for pat in [(1, 1, 1), (2, 1, 2), (3, 2, 1)]:
        assert paints(Palette(3, [pat]), EDGE)


def test_empty_palette_paints_nothing_with_edges():
    assert not paints(Palette(3), EDGE)
    assert paints(Palette(3), ThreeGraph(4))


def test_two_edges_painted_by_rainbow_pattern():
    p = Palette(3, [(1, 2, 3)])
    f = ThreeGraph(4, [(1, 2, 3), (1, 2, 4)])
    assert brute_paints(p, f)
    painting = find_painting(p, f)
    assert painting is not None and painting.is_valid(p, f)


def test_rainbow_pattern_misses_k4_minus():
    p = Palette(3, [(1, 2, 3)])
    assert not brute_paints(p, K4_MINUS)
    assert not paints(p, K4_MINUS)
    assert is_deficient(p, K4_MINUS)


def test_found_paintings_are_valid():
    rng = np.random.default_rng(3)
    for _ in range(150):
        p = random_palette(rng, int(rng.integers(1, 4)))
        f = random_graph(rng, int(rng.integers(3, 6)))
        painting = find_painting(p, f)
        if painting is not None:
            assert painting.is_valid(p, f)
            assert sorted(painting.ordering) == list(range(1, f.vertex_count + 1))


def test_iter_paintings_all_valid():
    p = Palette(2, [(1, 2, 1), (2, 2, 2)])
    f = ThreeGraph(4, [(1, 2, 3), (2, 3, 4)])
    found = list(PaintingSearch(p, f).iter_paintings())
    assert found
    for painting, used in found:
        assert painting.is_valid(p, f)
        assert sum(used.values()) == f.e
        assert set(k for k, v in used.items() if v) <= p.pattern_set


def test_count_paintings_trivial():
    assert count_paintings(Palette(2, [(1, 1, 1)]), ThreeGraph(3)) == 1
    assert count_paintings(Palette(2), EDGE) == 0


def test_count_single_edge_matches_brute_force():
    rng = np.random.default_rng(5)
    for _ in range(60):
        p = random_palette(rng, int(rng.integers(1, 4)))
        assert count_paintings(p, EDGE) == brute_count_single_edge(p)


def test_budget_exhaustion_raises():
    with pytest.raises(BudgetExceeded):
        paints(Palette(3, [(1, 2, 3)]), K4_MINUS, budget=3)


def test_family_deficiency():
    p = Palette(3, [(1, 2, 3)])
    assert is_family_deficient(p, [K4_MINUS, K4])
    assert not is_family_deficient(p, [K4_MINUS, EDGE])
    assert is_family_deficient(p, [])


def test_shadow_linear():
    g, pairs = shadow_linear(ThreeGraph(3, [(1, 2, 3)]))
    assert g == ThreeGraph(3, [(1, 2, 3)]) and len(pairs) == 3
    assert shadow_linear(ThreeGraph(5))[0] == ThreeGraph(0)
    h, _ = shadow_linear(K4)
    assert h.vertex_count == 6 and h.e == 4 and is_linear(h)
    for e, f in [(a, b) for a in h.edges for b in h.edges if a < b]:
        assert len(set(e) & set(f)) == 1
