"""Acceptance criteria 1-12, each at its stated tolerance.

Every test prints one ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line; the lines are repeated in the terminal summary.
"""

import itertools
import math

import numpy as np

from conftest import ACCEPTANCE_LINES
from oracles import brute_paints, random_graph, random_palette
from palettekit.constructions import (
    d_eta_density_audit,
    is_reduced_map,
    lift_painting,
    painting_from_reduced_map,
    palette_construction,
    palette_from_slice,
    reduced_from_palette,
    reduced_map_exists,
)
from palettekit.core import Palette, ThreeGraph, density, induced, reverse
from palettekit.extremal import ex_pal, g_nondegenerate, small_graphs
from palettekit.gadgets import build_G_sigma, build_triangle_system, gsigma_edges, verify_gsigma_claim
from palettekit.hom import find_homomorphism, is_homomorphism
from palettekit.lagrangian import grid_oracle, lambda_eval, maximize_lagrangian
from palettekit.painting import find_painting, paints
from palettekit.regularity import round_cap, regularize

CELLS2 = list(itertools.product((1, 2), repeat=3))


def report(n, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def all_two_color_palettes():
    for bits in range(256):
        yield Palette(2, [cell for i, cell in enumerate(CELLS2) if bits >> i & 1])


def test_criterion_01_painting_oracle():
    graphs = [g for v in range(5) for g in small_graphs(v)]
    palettes = [Palette(0), Palette(1), Palette(1, [(1, 1, 1)])] + list(all_two_color_palettes())
    bad = [(p, g) for g in graphs for p in palettes if paints(p, g) != brute_paints(p, g)]
    report(1, not bad, f"{len(palettes) * len(graphs)} (palette, graph) pairs, {len(bad)} disagreements")


def test_criterion_02_reverse_symmetry():
    rng = np.random.default_rng(2)
    bad = 0
    for _ in range(1000):
        p = random_palette(rng, int(rng.integers(1, 4)))
        f = random_graph(rng, int(rng.integers(3, 6)))
        bad += paints(p, f) != paints(reverse(p), f)
    report(2, bad == 0, f"1000 random cases, {bad} violations")


def test_criterion_03_homomorphism_invariance():
    rng = np.random.default_rng(3)
    bad = found = 0
    while found < 500:
        q = random_palette(rng, int(rng.integers(1, 4)))
        c = int(rng.integers(1, 4))
        psi = rng.integers(1, c + 1, size=q.color_count)
        image = [tuple(int(psi[v - 1]) for v in pat) for pat in q.patterns]
        p = Palette(c, image + list(random_palette(rng, c, density=0.2).patterns))
        hom = find_homomorphism(q, p)
        assert hom is not None and is_homomorphism(q, p, hom)
        found += 1
        f = random_graph(rng, int(rng.integers(3, 6)))
        bad += paints(q, f) and not paints(p, f)
    report(3, bad == 0, f"{found} homomorphic pairs, {bad} violations")


def _random_palettes(seed, count, max_colors):
    rng = np.random.default_rng(seed)
    return [random_palette(rng, int(rng.integers(1, max_colors + 1))) for _ in range(count)]


def test_criterion_04_lagrangian_accuracy():
    worst = 0.0
    for p in _random_palettes(4, 200, 3):
        worst = max(worst, abs(maximize_lagrangian(p).value - grid_oracle(p, 60)))
    fixtures = {
        "{111}": (Palette(1, [(1, 1, 1)]), 1.0),
        "{123}": (Palette(3, [(1, 2, 3)]), 1 / 27),
        "all orderings": (Palette(3, itertools.permutations((1, 2, 3))), 2 / 9),
    }
    errs = {k: abs(maximize_lagrangian(p).value - v) for k, (p, v) in fixtures.items()}
    ok = worst <= 3 / 60 and all(e <= 1e-6 for e in errs.values())
    report(4, ok, f"max |ascent - grid(60)| = {worst:.2e} over 200 palettes; fixture errors {max(errs.values()):.1e}")


def test_criterion_05_density_below_lagrangian():
    palettes = _random_palettes(4, 200, 3) + _random_palettes(5, 100, 5)
    gaps = [float(density(p)) - maximize_lagrangian(p).value for p in palettes]
    report(5, max(gaps) <= 1e-9, f"{len(palettes)} palettes, max d(P) - Lambda = {max(gaps):.2e}")


def test_criterion_06_reverse_lagrangian():
    rng = np.random.default_rng(6)
    worst = 0.0
    for _ in range(200):
        p = random_palette(rng, int(rng.integers(1, 5)))
        u = [x for x in range(1, p.color_count + 1) if rng.random() < 0.7] or [1]
        a = maximize_lagrangian(induced(p, u)).value
        b = maximize_lagrangian(induced(reverse(p), u)).value
        worst = max(worst, abs(a - b))
    report(6, worst <= 1e-6, f"200 random (P, U), max difference {worst:.1e}")


def test_criterion_07_nondegenerate_monotonicity():
    graphs = [g for v in range(5) for g in small_graphs(v) if g.e]
    bad, rows = 0, []
    for g in graphs:
        g3, g4 = g_nondegenerate(3, [g]), g_nondegenerate(4, [g])
        rows.append(f"{g.edges}:{g3}/{g4}")
        bad += g4 / 24 > g3 / 6
    report(7, bad == 0, f"{len(graphs)} graphs with edges, {bad} violations (g3/g4: {'; '.join(rows)})")


def test_criterion_08_ex_pal_exactness():
    edge = ThreeGraph(3, [(1, 2, 3)])
    bad = [n for n in range(1, 5) if ex_pal(n, [edge]).ex_value != 0 or ex_pal(n, []).ex_value != n**3]
    k4 = ThreeGraph.complete(4)
    brute = max(p.e for p in all_two_color_palettes() if not brute_paints(p, k4))
    value = ex_pal(2, [k4]).ex_value
    report(8, not bad and value == brute, f"trivial families ok for n<=4: {not bad}; K4 at n=2: {value} vs brute force {brute}")


def test_criterion_09_regularity_engine():
    eps = 0.25
    cap = round_cap(eps)
    problems = []
    for seed in range(50):
        p = random_palette(np.random.default_rng(900 + seed), 60)
        cert = regularize(p, eps, 3, seed=seed, audit_samples=50)
        trace = cert.energy_trace
        if any(b < a - 1e-12 for a, b in zip(trace, trace[1:])):
            problems.append(f"seed {seed}: energy dropped")
        if any(not 0 <= e <= 1 for e in trace + [cert.energy]):
            problems.append(f"seed {seed}: energy out of range")
        if not all(inc.holds for inc in cert.increments):
            problems.append(f"seed {seed}: increment below eps^5 bound")
        if cert.rounds > cap:
            problems.append(f"seed {seed}: {cert.rounds} rounds")
    report(9, not problems, f"50 palettes, n=60, eps=0.25; problems: {problems or 'none'}")


def test_criterion_10_gadgets():
    s3 = [s for s in itertools.permutations((1, 2, 3)) if s not in ((1, 2, 3), (3, 2, 1))]
    certs = [verify_gsigma_claim(s) for s in s3] + [verify_gsigma_claim((3, 1, 4, 2), (2, 3, 1, 2))]
    claims = all(c.holds for c in certs) and [c.orders_checked for c in certs] == [720] * 4 + [362880]
    g = build_G_sigma((3, 1, 4, 2), (2, 3, 1, 2))
    layout = gsigma_edges(g, (3, 1, 4, 2), (2, 3, 1, 2)) == ((1, 2, 4, 6), (3, 4, 5, 7), (2, 5, 8, 9))
    q = Palette(3, [(1, 2, 1), (1, 3, 3), (2, 2, 1), (3, 1, 2)])
    classes = build_triangle_system(q).label_classes()[1] == [(1, 2), (2, 3), (4, 5), (8, 9), (10, 12)]
    report(10, claims and layout and classes, f"claims hold: {claims}; G_sigma(3,1,4,2) edges: {layout}; triangle-system color-1 class: {classes}")


def test_criterion_11_palette_construction():
    p = Palette(3, [(1, 2, 3)])
    x = maximize_lagrangian(p).argmax
    lam = lambda_eval(p, x)
    n = 200
    total = math.comb(n, 3)
    fractions, audits = [], []
    for seed in range(20):
        built = palette_construction(p, x, n, seed)
        fractions.append(built.graph.e / total)
        audits.append(d_eta_density_audit(built.graph, lam - 0.05, 0.01, mode="sampled", samples=10_000, seed=seed))
    mean = float(np.mean(fractions))
    se = float(np.std(fractions, ddof=1)) / math.sqrt(len(fractions))
    within = abs(mean - lam) <= 3 * se
    dense = all(a.dense for a in audits)
    report(
        11,
        within and dense,
        f"mean density {mean:.5f} vs lambda {lam:.5f} (3 SE = {3 * se:.5f}); audit passed on {sum(a.dense for a in audits)}/20",
    )


def test_criterion_12_reduced_round_trip():
    rng = np.random.default_rng(12)
    bad = []
    for trial in range(100):
        s, t = int(rng.integers(1, 4)), int(rng.integers(3, 6))
        p = random_palette(rng, s)
        r, ident = reduced_from_palette(p, t)
        if palette_from_slice(r, range(1, t + 1), ident) != p:
            bad.append(f"{trial}: slice")
        f = random_graph(rng, int(rng.integers(3, t + 1)))
        painting, rmap = find_painting(p, f), reduced_map_exists(f, r)
        if (painting is None) != (rmap is None):
            bad.append(f"{trial}: existence")
        elif painting is not None:
            if not is_reduced_map(f, r, lift_painting(painting, f, r, ident)):
                bad.append(f"{trial}: lifted painting")
            if not painting_from_reduced_map(f, rmap, ident).is_valid(p, f):
                bad.append(f"{trial}: pulled-back map")
    report(12, not bad, f"100 random slices, problems: {bad or 'none'}")
