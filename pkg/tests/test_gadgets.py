import itertools

import pytest

from palettekit.core import Palette, ThreeGraph
from palettekit.gadgets import (
    OrderedGraph,
    abcd,
    build_G_sigma,
    build_triangle_system,
    compatible_permutation,
    disjoint_union,
    gsigma_edges,
    gsigma_union,
    hypergraph_from_colored_graph,
    natural_painting,
    sigma_compatible,
    substitute_copies,
    verify_gsigma_claim,
)
from palettekit.painting import paints

FOUR_PATTERNS = Palette(3, [(1, 2, 1), (1, 3, 3), (2, 2, 1), (3, 1, 2)])
S3_MIXED = [s for s in itertools.permutations((1, 2, 3)) if s not in ((1, 2, 3), (3, 2, 1))]


def test_reversal_is_not_compatible_with_natural_order():
    for k in (2, 3, 5):
        rev = tuple(range(k, 0, -1))
        assert not sigma_compatible(tuple(range(1, k + 1)), rev, range(1, k + 1))
        assert sigma_compatible(tuple(range(1, k + 1)), rev, range(k, 0, -1))


def test_compatible_permutation():
    assert compatible_permutation((2, 5, 7), [7, 2, 5]) == (2, 3, 1)
    assert sigma_compatible((2, 5, 7), (2, 3, 1), [7, 1, 2, 5])


def test_abcd():
    assert abcd((3, 1, 4, 2)) == (1, 3, 1, 2)
    assert abcd((1, 3, 2)) == (1, 2, 2, 3)
    with pytest.raises(ValueError):
        abcd((1, 2, 3))
    with pytest.raises(ValueError):
        abcd((3, 2, 1))


def test_identity_is_rejected():
    with pytest.raises(ValueError):
        build_G_sigma((1, 2, 3, 4))
    # under the natural order every edge realizes the identity, so no gadget can rule it out
    g = build_G_sigma((2, 1, 3))
    natural = range(1, g.vertex_count + 1)
    assert all(sigma_compatible(e, (1, 2, 3), natural) for e in g.edges)


def test_gsigma_reference_layout():
    g = build_G_sigma((3, 1, 4, 2), (2, 3, 1, 2))
    assert g.vertex_count == 9
    e1, e2, e3 = gsigma_edges(g, (3, 1, 4, 2), (2, 3, 1, 2))
    assert (e1, e2, e3) == ((1, 2, 4, 6), (3, 4, 5, 7), (2, 5, 8, 9))


@pytest.mark.parametrize("sigma", S3_MIXED + [(3, 1, 4, 2), (2, 4, 1, 3)])
def test_gsigma_structure(sigma):
    g = build_G_sigma(sigma)
    k = len(sigma)
    assert g.uniformity == k and g.vertex_count == 3 * k - 3 and len(g.edges) == 3
    shared = [set(e) & set(f) for e, f in itertools.combinations(g.edges, 2)]
    assert all(len(s) == 1 for s in shared)
    assert len(set().union(*shared)) == 3


@pytest.mark.parametrize("sigma", S3_MIXED)
def test_gsigma_claim_in_s3(sigma):
    cert = verify_gsigma_claim(sigma)
    assert cert.holds and cert.orders_checked == 720


def test_gsigma_claim_for_3142():
    for indices in [None, (2, 3, 1, 2)]:
        cert = verify_gsigma_claim((3, 1, 4, 2), indices)
        assert cert.holds and cert.orders_checked == 362880


def test_gsigma_union():
    g, sigmas = gsigma_union(3)
    assert sigmas == S3_MIXED
    assert g.vertex_count == 4 * 6 and len(g.edges) == 12


def test_triangle_system_label_classes():
    t = build_triangle_system(FOUR_PATTERNS)
    assert t.vertex_count == 12
    assert t.label_classes()[1] == [(1, 2), (2, 3), (4, 5), (8, 9), (10, 12)]


def test_single_pattern_triangle():
    t = build_triangle_system(Palette(3, [(3, 1, 2)]))
    assert t.labels == {(1, 2): 3, (1, 3): 1, (2, 3): 2}


def test_triangle_system_gives_a_matching():
    t = build_triangle_system(FOUR_PATTERNS)
    h = hypergraph_from_colored_graph(t, FOUR_PATTERNS)
    assert h.edges == tuple((3 * j - 2, 3 * j - 1, 3 * j) for j in range(1, 5))
    painting = natural_painting(t, h)
    assert painting.is_valid(FOUR_PATTERNS, h)


def test_empty_palette_gives_edgeless():
    g = OrderedGraph(3, [(1, 2), (1, 3), (2, 3)], {(1, 2): 1, (1, 3): 1, (2, 3): 1})
    assert hypergraph_from_colored_graph(g, Palette(1)).e == 0
    with pytest.raises(ValueError):
        build_triangle_system(Palette(2))


def test_substitution_into_linear_host():
    host = OrderedGraph(7, [(1, 2, 3), (3, 4, 5), (1, 6, 7)])
    q = Palette(2, [(1, 2, 1)])
    g = substitute_copies(host, build_triangle_system(q))
    h = hypergraph_from_colored_graph(g, q)
    assert h == ThreeGraph(7, host.edges)
    assert natural_painting(g, h).is_valid(q, h)
    assert paints(q, h)
    with pytest.raises(ValueError):
        substitute_copies(OrderedGraph(4, [(1, 2, 3), (1, 2, 4)]), build_triangle_system(q))


def test_disjoint_union_shifts_labels():
    t = build_triangle_system(Palette(2, [(1, 2, 1)]))
    u = disjoint_union([t, t])
    assert u.vertex_count == 6 and u.labels[(4, 5)] == 1 and u.labels[(4, 6)] == 2
