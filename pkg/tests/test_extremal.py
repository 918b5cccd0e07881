import itertools

import numpy as np
import pytest

from palettekit.core import Palette, ThreeGraph, blow_up
from palettekit.extremal import (
    best_blowup_fit,
    edit_distance,
    ex_pal,
    g_nondegenerate,
    missing_bad,
    missing_bad_by_classes,
    small_graphs,
    universe,
)
from palettekit.hom import is_isomorphic
from palettekit.painting import paints
from oracles import brute_paints, random_palette

EDGE = ThreeGraph(3, [(1, 2, 3)])
K4 = ThreeGraph.complete(4)
K4_MINUS = ThreeGraph(4, [(1, 2, 3), (1, 2, 4), (1, 3, 4)])
CELLS2 = list(itertools.product((1, 2), repeat=3))


def brute_ex_pal_2(graph):
    best, winners = -1, []
    for bits in range(256):
        p = Palette(2, [cell for i, cell in enumerate(CELLS2) if bits >> i & 1])
        if brute_paints(p, graph):
            continue
        if p.e > best:
            best, winners = p.e, [p]
        elif p.e == best:
            winners.append(p)
    return best, winners


@pytest.mark.parametrize("n", [1, 2, 3])
def test_single_edge_and_empty_family(n):
    assert ex_pal(n, [EDGE]).ex_value == 0
    assert ex_pal(n, []).ex_value == n**3


def test_small_graph_counts():
    assert [len(small_graphs(v)) for v in range(5)] == [1, 1, 1, 2, 5]


@pytest.mark.parametrize("graph, value", [(K4, 4), (K4_MINUS, 2)])
def test_two_color_values_match_brute_force(graph, value):
    best, winners = brute_ex_pal_2(graph)
    rep = ex_pal(2, [graph])
    assert rep.ex_value == best == value
    assert rep.optimal and rep.complete_listing
    # every listed optimum is one of the brute-force winners and every winner is listed up to isomorphism
    assert all(any(is_isomorphic(q, w) for w in winners) for q in rep.extremal_palettes)
    assert all(any(is_isomorphic(w, q) for q in rep.extremal_palettes) for w in winners)
    for q in rep.extremal_palettes:
        assert not paints(q, graph)


def test_edgeless_member_has_no_value():
    rep = ex_pal(2, [ThreeGraph(3), K4])
    assert rep.ex_value is None and rep.notes


def test_heuristic_gives_deficient_lower_bound():
    rep = ex_pal(3, [K4_MINUS], heuristic=True, seed=1)
    assert rep.mode == "heuristic" and not rep.optimal
    assert rep.ex_value <= ex_pal(3, [K4_MINUS]).ex_value
    assert not paints(rep.extremal_palettes[0], K4_MINUS)


def test_universe_sizes():
    assert universe(3).e == 27
    assert universe(3, nondegenerate=True).e == 6


def test_nondegenerate_value():
    assert g_nondegenerate(4, []) == 24
    assert g_nondegenerate(2, [K4]) == 0
    assert g_nondegenerate(1, [EDGE]) == 0


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("graph", [K4, K4_MINUS])
def test_nondegenerate_sandwich(n, graph):
    g = g_nondegenerate(n, [graph])
    ex = ex_pal(n, [graph]).ex_value
    assert g <= ex <= g + 3 * n * n


def test_edit_distance():
    p = Palette(2, [(1, 1, 2)])
    assert edit_distance(p, p) == 0
    assert edit_distance(Palette(3), Palette.full(3)) == 27
    with pytest.raises(ValueError):
        edit_distance(Palette(2), Palette(3))


def test_missing_and_bad_patterns():
    p = Palette(2, [(1, 2, 2)])
    s, cmap = blow_up(p, [1, 2])
    assert missing_bad(s, p, [1, 2]) == (frozenset(), frozenset(), 0)
    fewer = Palette(3, s.patterns[1:])
    a, b, _ = missing_bad(fewer, p, [1, 2])
    assert len(a) == 1 and not b
    extra = Palette(3, s.patterns + ((3, 3, 3),))
    a, b, deg = missing_bad_by_classes(extra, p, cmap)
    assert not a and b == {(3, 3, 3)} and deg == 1


def test_exact_blow_up_fits_perfectly():
    p = Palette(2, [(1, 2, 1)])
    s, cmap = blow_up(p, [2, 2])
    assert best_blowup_fit(s, p).bad == 0
    extra = Palette(4, s.patterns + ((4, 4, 4),))
    assert best_blowup_fit(extra, p).bad <= 1


def test_local_fit_matches_exhaustive():
    rng = np.random.default_rng(8)
    p = Palette(2, [(1, 2, 2), (2, 1, 1)])
    for _ in range(10):
        q = random_palette(rng, 6, density=0.3)
        exact = best_blowup_fit(q, p)
        local = best_blowup_fit(q, p, mode="local", seed=int(rng.integers(1 << 30)), starts=20)
        assert exact.exhaustive and not local.exhaustive
        assert local.bad == exact.bad
