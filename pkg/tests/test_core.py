import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from palettekit.core import (
    DegenerateInputError,
    Equipartition,
    Palette,
    ParseError,
    ThreeGraph,
    WeightVector,
    as_weights,
    blow_up,
    canonical_form,
    contract,
    density,
    format_graph,
    format_palette,
    induced,
    parse_graph,
    parse_palette,
    reverse,
    shadow,
)
from oracles import brute_blowup_edges, random_palette

patterns = st.tuples(*[st.integers(1, 3)] * 3)
palettes3 = st.builds(lambda ps: Palette(3, ps), st.lists(patterns, max_size=12))


def test_palette_normalizes_patterns():
    p = Palette(3, [(2, 1, 3), (1, 2, 3), (2, 1, 3)])
    assert p.patterns == ((1, 2, 3), (2, 1, 3))
    assert p == Palette(3, [(1, 2, 3), (2, 1, 3)])
    assert hash(p) == hash(Palette(3, [(1, 2, 3), (2, 1, 3)]))


def test_palette_rejects_out_of_range():
    with pytest.raises(ValueError):
        Palette(2, [(1, 2, 3)])
    with pytest.raises(ValueError):
        Palette(2, [(1, 2)])


def test_threegraph_rejects_repeated_vertex():
    with pytest.raises(ValueError):
        ThreeGraph(3, [(1, 1, 2)])


def test_cube_is_readonly_indicator():
    p = Palette(2, [(1, 2, 1)])
    cube = p.cube()
    assert cube[0, 1, 0] and cube.sum() == 1
    with pytest.raises(ValueError):
        cube[0, 0, 0] = True


def test_density_values():
    assert density(Palette(3)) == 0
    assert density(Palette.full(2)) == 1
    assert density(Palette(2, [(1, 2, 1)])) == Fraction(1, 8)
    with pytest.raises(DegenerateInputError):
        density(Palette(0))


def test_reverse_fixture():
    p = Palette(3, [(1, 2, 3), (1, 3, 2)])
    assert reverse(p) == Palette(3, [(3, 2, 1), (2, 3, 1)])


@given(palettes3)
def test_reverse_is_involution(p):
    assert reverse(reverse(p)) == p
    assert reverse(p).e == p.e


def test_induced_trivial_cases():
    p = Palette(3, [(1, 2, 3), (3, 3, 1)])
    assert induced(p, [1, 2, 3]) == p
    assert induced(p, []) == Palette(0)
    assert induced(p, [1, 3]) == Palette(2, [(2, 2, 1)])


def test_blow_up_all_ones_is_isomorphic():
    p = Palette(3, [(1, 2, 3), (2, 2, 1)])
    q, cmap = blow_up(p, [1, 1, 1])
    assert q == p and cmap == (1, 2, 3)


def test_blow_up_edge_count_matches_enumeration():
    rng = np.random.default_rng(11)
    for _ in range(40):
        c = int(rng.integers(1, 4))
        p = random_palette(rng, c)
        sizes = [int(s) for s in rng.integers(0, 4, size=c)]
        q, _ = blow_up(p, sizes)
        expected = sum(sizes[a - 1] * sizes[b - 1] * sizes[z - 1] for a, b, z in p.patterns)
        assert q.e == expected == brute_blowup_edges(p, sizes)


def test_contract_undoes_blow_up():
    p = Palette(2, [(1, 2, 2), (2, 1, 1)])
    q, cmap = blow_up(p, [2, 3])
    assert contract(q, cmap, 2) == p


def test_canonical_classes_of_single_patterns():
    forms = {canonical_form(Palette(2, [pat])) for pat in itertools.product((1, 2), repeat=3)}
    assert len(forms) == 4


@settings(max_examples=60)
@given(palettes3, st.permutations([1, 2, 3]))
def test_canonical_form_is_invariant(p, perm):
    canon = canonical_form(p)
    assert canonical_form(canon) == canon
    assert canonical_form(p.relabel(perm)) == canon


def test_shadow():
    assert shadow(ThreeGraph.complete(4)) == tuple(itertools.combinations(range(1, 5), 2))
    assert shadow(ThreeGraph(5)) == ()
    assert shadow(ThreeGraph(3, [(1, 2, 3)])) == ((1, 2), (1, 3), (2, 3))


def test_weights():
    assert WeightVector.uniform(4).weights == (0.25,) * 4
    with pytest.raises(ValueError):
        WeightVector((0.5, 0.6))
    with pytest.raises(ValueError):
        as_weights([0.5, 0.5], 3)
    assert np.allclose(as_weights(WeightVector.vertex(3, 2), 3), [0, 1, 0])


def test_equipartition():
    part = Equipartition.balanced(10, 3)
    assert sorted(part.sizes()) == [3, 3, 4]
    assert part.t == 3
    with pytest.raises(ValueError):
        Equipartition(((1, 2, 3), (4,)), (), 4)
    with pytest.raises(ValueError):
        Equipartition(((1, 2),), (), 3)
    cells = Equipartition(((1, 2), (3, 4)), (5,), 5).cells()
    assert cells[-1] == (5,)


def test_text_round_trip():
    p = Palette(3, [(1, 2, 3), (3, 1, 1)])
    g = ThreeGraph(4, [(1, 2, 3), (2, 3, 4)])
    assert parse_palette(format_palette(p)) == p
    assert parse_graph(format_graph(g)) == g
    assert parse_palette("# comment\npalette 2\n1 1 2  # tail\n") == Palette(2, [(1, 1, 2)])


@pytest.mark.parametrize(
    "text, line",
    [("palette x\n", 1), ("palette 2\n1 2\n", 2), ("palette 2\n1 2 5\n", 2), ("", 1), ("graph3 2\n1 2 3\n", 1)],
)
def test_parse_errors_report_location(text, line):
    with pytest.raises(ParseError) as info:
        parse_palette(text)
    assert info.value.line == line


def test_graph_parse_rejects_repeated_vertex():
    with pytest.raises(ParseError) as info:
        parse_graph("graph3 4\n1 2 3\n2 2 4\n")
    assert info.value.line == 3
