"""The palette Lagrange polynomial and its maximum over the simplex.

Values here are floating point; exact pattern densities live in
:func:`palettekit.core.density`.  Maximization is by multi-start projected
gradient ascent, so the reported maximum is a lower bound on the true one.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import Palette, as_weights

DEFAULT_RESTARTS = 8
DEFAULT_ITERS = 5000
DEFAULT_TOL = 1e-10
REDUCED_TOL = 1e-7
GRID_LIMIT = 10**7


@dataclass(frozen=True)
class LagrangianResult:
    value: float
    argmax: np.ndarray
    restarts_used: int
    converged: bool

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "argmax": [round(float(v), 12) for v in self.argmax],
            "restarts_used": self.restarts_used,
            "converged": self.converged,
        }


def lambda_eval(palette: Palette, x) -> float:
    """``sum over patterns (i,j,k) of x_i x_j x_k``."""
    x = as_weights(x, palette.color_count)
    return _value(palette.index_array, x)


def _value(idx: np.ndarray, x: np.ndarray) -> float:
    if idx.shape[0] == 0:
        return 0.0
    return float(np.sum(x[idx[:, 0]] * x[idx[:, 1]] * x[idx[:, 2]]))


def _grad(idx: np.ndarray, x: np.ndarray) -> np.ndarray:
    g = np.zeros_like(x)
    if idx.shape[0] == 0:
        return g
    a, b, c = x[idx[:, 0]], x[idx[:, 1]], x[idx[:, 2]]
    # repeated colors hit the same slot more than once, which is the product rule
    np.add.at(g, idx[:, 0], b * c)
    np.add.at(g, idx[:, 1], a * c)
    np.add.at(g, idx[:, 2], a * b)
    return g


def lambda_grad(palette: Palette, x) -> np.ndarray:
    """Gradient of the Lagrange polynomial (defined on all of R^c, evaluated at ``x``)."""
    arr = np.asarray(x, dtype=float).ravel()
    if arr.shape[0] != palette.color_count:
        raise ValueError(f"point has {arr.shape[0]} entries, palette has {palette.color_count} colors")
    return _grad(palette.index_array, arr)


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort and threshold)."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(v) + 1)
    rho = np.nonzero(u + (1.0 - css) / k > 0)[0][-1]
    theta = (1.0 - css[rho]) / (rho + 1)
    return np.maximum(v + theta, 0.0)


def _ascend(idx: np.ndarray, x: np.ndarray, iters: int, tol: float) -> tuple[np.ndarray, float, bool]:
    f = _value(idx, x)
    step = 1.0
    for _ in range(iters):
        g = _grad(idx, x)
        if np.linalg.norm(project_simplex(x + g) - x) < tol:
            return x, f, True
        step = min(step * 2.0, 1e6)
        while True:
            y = project_simplex(x + step * g)
            fy = _value(idx, y)
            # Armijo condition along the projection arc
            if fy >= f + 1e-4 * float(g @ (y - x)) or step < 1e-14:
                break
            step *= 0.5
        if fy <= f and step < 1e-14:
            return x, f, False
        x, f = y, fy
    g = _grad(idx, x)
    return x, f, bool(np.linalg.norm(project_simplex(x + g) - x) < tol)


def _starts(c: int, restarts: int, rng: np.random.Generator) -> list[np.ndarray]:
    starts = [np.full(c, 1.0 / c)]
    starts += [np.eye(c)[i] for i in range(c)]
    starts += list(rng.dirichlet(np.ones(c), size=restarts))
    return starts


def maximize_lagrangian(
    palette: Palette,
    restarts: int = DEFAULT_RESTARTS,
    iters: int = DEFAULT_ITERS,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
) -> LagrangianResult:
    """Best local maximum of the Lagrange polynomial from several starting points.

    Starts are the barycenter, every vertex of the simplex and ``restarts``
    Dirichlet(1) samples.  Ties are broken towards the lexicographically
    least argmax (rounded to 1e-9), preferring converged runs, so the result is deterministic for a seed.
    """
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    c = palette.color_count
    if c == 0:
        raise ValueError("palette has no colors")
    idx = palette.index_array
    rng = np.random.default_rng(seed)
    best = None
    for x0 in _starts(c, restarts, rng):
        x, f, ok = _ascend(idx, x0.copy(), iters, tol)
        key = (-round(f, 12), not ok, tuple(np.round(x, 9)))
        if best is None or key < best[0]:
            best = (key, x, f, ok)
    _, x, f, ok = best
    return LagrangianResult(value=_value(idx, x), argmax=x, restarts_used=restarts, converged=ok)


def compositions(m: int, parts: int) -> np.ndarray:
    """All non-negative integer vectors of length ``parts`` summing to ``m`` (stars and bars)."""
    if parts == 1:
        return np.array([[m]], dtype=np.int64)
    bars = np.array(list(itertools.combinations(range(m + parts - 1), parts - 1)), dtype=np.int64)
    if bars.size == 0:
        return np.zeros((0, parts), dtype=np.int64)
    edges = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), m + parts - 1)])
    return np.diff(edges, axis=1) - 1


def grid_oracle(palette: Palette, m: int) -> float:
    """Maximum of the Lagrange polynomial over simplex points with denominator ``m``."""
    c = palette.color_count
    if c == 0 or m < 1:
        raise ValueError("need at least one color and m >= 1")
    count = math.comb(m + c - 1, c - 1)
    if count > GRID_LIMIT:
        raise ValueError(f"grid has {count} points, more than the limit {GRID_LIMIT}")
    if palette.e == 0:
        return 0.0
    pts = compositions(m, c) / m
    idx = palette.index_array
    best = 0.0
    for start in range(0, len(pts), 200_000):
        X = pts[start : start + 200_000]
        vals = np.sum(X[:, idx[:, 0]] * X[:, idx[:, 1]] * X[:, idx[:, 2]], axis=1)
        best = max(best, float(vals.max()))
    return best


def blowup_pattern_count(palette: Palette, sizes: Sequence[int]) -> int:
    """Number of patterns of the blow-up with the given class sizes."""
    return sum(sizes[a - 1] * sizes[b - 1] * sizes[c - 1] for a, b, c in palette.patterns)


def max_blowup(palette: Palette, n: int) -> tuple[int, list[tuple[int, ...]]]:
    """Largest pattern count of a blow-up on ``n`` colors and every size vector achieving it."""
    comps = compositions(n, palette.color_count)
    if palette.e == 0:
        return 0, [tuple(map(int, r)) for r in comps]
    idx = palette.index_array
    counts = np.sum(comps[:, idx[:, 0]] * comps[:, idx[:, 1]] * comps[:, idx[:, 2]], axis=1)
    top = int(counts.max())
    return top, [tuple(map(int, r)) for r in comps[counts == top]]


def max_blowup_density(palette: Palette, n: int) -> float:
    return max_blowup(palette, n)[0] / n**3


def min_part_fraction(sizes: Sequence[int]) -> float:
    """Smallest class as a fraction of all colors."""
    total = sum(sizes)
    if not sizes or total == 0:
        raise ValueError("partition must be nonempty")
    return min(sizes) / total


def is_reduced(palette: Palette, tol: float = REDUCED_TOL, restarts: int = DEFAULT_RESTARTS, seed: int = 0) -> bool | None:
    """Whether every single-pattern deletion lowers the Lagrangian by more than ``tol``.

    Returns ``None`` (inconclusive) when some deletion lowers the computed
    maximum by a positive amount no larger than ``tol``.  A deletion whose
    optimum matches the full palette's to within ``tol / 100`` counts as
    not lowering it.  Checking single deletions suffices because removing
    patterns never increases the Lagrangian.
    """
    if palette.e == 0:
        raise ValueError("reducedness needs at least one pattern")
    full = maximize_lagrangian(palette, restarts=restarts, seed=seed)
    verdict: bool | None = True
    for p in palette.patterns:
        sub = palette.with_patterns(q for q in palette.patterns if q != p)
        val = maximize_lagrangian(sub, restarts=restarts, seed=seed).value
        # the full optimum minus the deleted monomial is a feasible value for the deletion
        val = max(val, _value(sub.index_array, full.argmax))
        margin = full.value - val
        if margin <= tol / 100:
            return False
        if margin <= tol:
            verdict = None
    return verdict
