"""Weak regularity for palettes at desk scale.

Colors of a palette play the role of vertices and patterns the role of
ordered hyperedges.  An ordered triple of color sets is eps-regular when
every sub-triple with ``|W_i| >= eps |V_i|`` has density within ``eps`` of
the whole.

Searching for an irregularity witness uses one reduction: with two of the
sets fixed, the density is an average over the third set, so the extreme
value among sets of size at least ``k`` is the top (or bottom) ``k``
average.  It follows that only sets of size exactly ``k_i = ceil(eps |V_i|)``
need to be considered.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import Equipartition, Palette

EXHAUSTIVE_PART = 12
DEFAULT_SAMPLES = 200
DEFAULT_MAX_PARTS = 64
SLACK = 1e-12

Cells = Sequence[Sequence[int]]


def triple_density(palette: Palette, w1, w2, w3) -> float:
    """Fraction of ``W1 x W2 x W3`` that are patterns (argument order matters)."""
    sets = [np.asarray(sorted(set(w)), dtype=np.intp) for w in (w1, w2, w3)]
    if any(len(s) == 0 for s in sets):
        raise ValueError("density of a triple needs three nonempty sets")
    block = palette.cube()[np.ix_(sets[0] - 1, sets[1] - 1, sets[2] - 1)]
    return float(block.sum()) / (len(sets[0]) * len(sets[1]) * len(sets[2]))


@dataclass(frozen=True)
class AuditResult:
    """Outcome of a witness search on one ordered triple.

    ``witness`` is ``None`` when no witness was found; that is proof of
    regularity only when ``mode == "exhaustive"``.
    """

    witness: tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]] | None
    deviation: float
    base_density: float
    mode: str
    checked: int

    @property
    def irregular(self) -> bool:
        return self.witness is not None

    def to_json(self) -> dict:
        return {
            "irregular": self.irregular,
            "witness": None if self.witness is None else [list(w) for w in self.witness],
            "deviation": self.deviation,
            "base_density": self.base_density,
            "mode": self.mode,
            "checked": self.checked,
        }


def _sizes(parts, eps):
    return [max(1, math.ceil(eps * len(v) - 1e-12)) for v in parts]


def _topk(values: np.ndarray, k: int, largest: bool) -> np.ndarray:
    order = np.argsort(-values if largest else values, kind="stable")
    return np.sort(order[:k])


def _exhaustive(block: np.ndarray, ks, base: float):
    """Best deviation over all size-k subsets of the first two axes; third axis by sorting."""
    a, b, c = block.shape
    s1 = np.array(list(itertools.combinations(range(a), ks[0])))
    s2 = np.array(list(itertools.combinations(range(b), ks[1])))
    m1 = np.zeros((len(s1), a))
    m1[np.arange(len(s1))[:, None], s1] = 1
    m2 = np.zeros((len(s2), b))
    m2[np.arange(len(s2))[:, None], s2] = 1
    # sums over W1 first: (s1, b, c)
    part = np.einsum("sa,abc->sbc", m1, block)
    best = (-1.0, None)
    denom = ks[0] * ks[1] * ks[2]
    step = max(1, 2_000_000 // max(1, len(s2) * c))
    for lo in range(0, len(s1), step):
        g = np.einsum("tb,sbc->stc", m2, part[lo : lo + step])
        g.sort(axis=2)
        hi_sum = g[:, :, -ks[2] :].sum(axis=2) / denom
        lo_sum = g[:, :, : ks[2]].sum(axis=2) / denom
        for vals, largest in ((hi_sum, True), (lo_sum, False)):
            dev = np.abs(vals - base)
            i = int(np.argmax(dev))
            if dev.flat[i] > best[0]:
                x, y = np.unravel_index(i, dev.shape)
                best = (float(dev.flat[i]), (lo + x, y, largest))
    dev, (x, y, largest) = best
    w1, w2 = s1[x], s2[y]
    f3 = block[np.ix_(w1, w2, np.arange(c))].sum(axis=(0, 1))
    w3 = _topk(f3, ks[2], largest)
    return dev, (tuple(w1), tuple(w2), tuple(w3)), len(s1) * len(s2)


def _ascent(block: np.ndarray, ws, ks, largest: bool, sweeps: int = 6):
    ws = [np.array(w) for w in ws]
    for _ in range(sweeps):
        changed = False
        for axis in range(3):
            others = [ws[j] for j in range(3) if j != axis]
            sub = np.moveaxis(block, axis, 0)
            scores = sub[:, others[0]][:, :, others[1]].sum(axis=(1, 2))
            new = _topk(scores, ks[axis], largest)
            if not np.array_equal(new, ws[axis]):
                ws[axis], changed = new, True
        if not changed:
            break
    return ws


def _sampled(block: np.ndarray, ks, base: float, samples: int, rng: np.random.Generator):
    dims = block.shape
    denom = ks[0] * ks[1] * ks[2]
    starts = []
    # degree-sorted prefixes in both directions
    for largest in (True, False):
        degs = [block.sum(axis=tuple(j for j in range(3) if j != i)) for i in range(3)]
        starts.append(([_topk(degs[i], ks[i], largest) for i in range(3)], largest))
    for s in range(samples):
        ws = [np.sort(rng.choice(dims[i], size=ks[i], replace=False)) for i in range(3)]
        starts.append((ws, bool(s % 2)))
    best = (-1.0, None)
    for ws, largest in starts:
        for candidate in (ws, _ascent(block, ws, ks, largest)):
            d = float(block[np.ix_(*candidate)].sum()) / denom
            dev = abs(d - base)
            if dev > best[0]:
                best = (dev, tuple(tuple(int(v) for v in w) for w in candidate))
    return best[0], best[1], len(starts)


def eps_regular_audit(
    palette: Palette,
    v1,
    v2,
    v3,
    eps: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    exhaustive_limit: int = EXHAUSTIVE_PART,
) -> AuditResult:
    """Look for sets ``W_i`` of size at least ``eps |V_i|`` whose density strays from the triple's by more than ``eps``.

    Exhaustive when every part has at most ``exhaustive_limit`` colors,
    otherwise random subsets, degree-sorted prefixes and coordinate ascent.
    A returned witness is always re-checked with exact counting.
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    parts = [tuple(sorted(set(v))) for v in (v1, v2, v3)]
    if any(not p for p in parts):
        raise ValueError("parts must be nonempty")
    ks = _sizes(parts, eps)
    block = palette.cube()[np.ix_(*(np.array(p) - 1 for p in parts))].astype(np.float64)
    base = float(block.mean())
    if max(len(p) for p in parts) <= exhaustive_limit:
        # the sorted axis should be the one with the most subsets
        counts = [math.comb(len(p), k) for p, k in zip(parts, ks)]
        last = int(np.argmax(counts))
        perm = [i for i in range(3) if i != last] + [last]
        dev, local, checked = _exhaustive(block.transpose(perm), [ks[i] for i in perm], base)
        ws = [None] * 3
        for pos, axis in enumerate(perm):
            ws[axis] = local[pos]
        mode = "exhaustive"
    else:
        rng = np.random.default_rng(seed)
        dev, ws, checked = _sampled(block, ks, base, samples, rng)
        mode = "sampled"
    witness = tuple(tuple(parts[i][j] for j in ws[i]) for i in range(3))
    if dev > eps + SLACK and abs(triple_density(palette, *witness) - base) > eps + SLACK:
        return AuditResult(witness, dev, base, mode, checked)
    return AuditResult(None, dev, base, mode, checked)


def tri_energy(palette: Palette, a1: Cells, a2: Cells, a3: Cells, n: int | None = None) -> float:
    """Sum of ``e(A,B,C)^2 / (|A||B||C| n^3)`` over cells ``A in a1, B in a2, C in a3``."""
    n = palette.color_count if n is None else n
    if n == 0:
        return 0.0
    cube = palette.cube().astype(np.float64)

    def indicator(cells):
        m = np.zeros((len(cells), palette.color_count))
        for r, cell in enumerate(cells):
            if not cell:
                raise ValueError("cells must be nonempty")
            m[r, np.array(list(cell)) - 1] = 1
        return m

    m1, m2, m3 = indicator(a1), indicator(a2), indicator(a3)
    counts = np.einsum("ai,ijk->ajk", m1, cube)
    counts = np.einsum("bj,ajk->abk", m2, counts)
    counts = np.einsum("ck,abk->abc", m3, counts)
    s1, s2, s3 = m1.sum(1), m2.sum(1), m3.sum(1)
    sizes = s1[:, None, None] * s2[None, :, None] * s3[None, None, :]
    return float((counts**2 / sizes).sum() / n**3)


def energy(palette: Palette, partition: Equipartition) -> float:
    """Energy of a partition, with every exceptional color as its own cell."""
    if partition.universe != palette.color_count:
        raise ValueError("partition and palette have different color counts")
    cells = partition.cells()
    return tri_energy(palette, cells, cells, cells)


@dataclass(frozen=True)
class IncrementCheck:
    triple: tuple[int, int, int]
    gain: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.gain >= self.bound - SLACK


@dataclass
class RegularityCertificate:
    partition: Equipartition
    epsilon: float
    irregular_triples: list[tuple[tuple[int, int, int], AuditResult]]
    audited_samples: int
    energy: float
    complete: bool = True
    rounds: int = 0
    energy_trace: list[float] = field(default_factory=list)
    increments: list[IncrementCheck] = field(default_factory=list)
    audit_mode: str = "exhaustive"
    stop_reason: str = ""
    refined: Equipartition | None = None

    @property
    def irregular_fraction(self) -> float:
        t = self.partition.t
        return len(self.irregular_triples) / t**3 if t else 0.0

    def to_json(self) -> dict:
        return {
            "partition": self.partition.to_json(),
            "epsilon": self.epsilon,
            "irregular_triples": [
                {"triple": list(ijk), "witness": [list(w) for w in res.witness], "deviation": res.deviation}
                for ijk, res in self.irregular_triples
            ],
            "audited_samples": self.audited_samples,
            "energy": self.energy,
            "complete": self.complete,
            "rounds": self.rounds,
            "energy_trace": self.energy_trace,
            "increments_ok": all(c.holds for c in self.increments),
            "increment_count": len(self.increments),
            "audit_mode": self.audit_mode,
            "stop_reason": self.stop_reason,
        }


def round_cap(eps: float) -> int:
    return math.ceil(16 / eps**6) + 1


def audit_partition(palette: Palette, parts: Sequence[Sequence[int]], eps: float, samples: int, seed: int):
    """Audit every ordered triple of parts (repeats allowed); return the irregular ones and the modes used."""
    bad, modes = [], set()
    t = len(parts)
    # a part too small to have a proper subset of the required size cannot host a witness
    free = {i for i, p in enumerate(parts) if _sizes([p], eps)[0] < len(p)}
    if not free:
        return bad, "exhaustive"
    for ijk in itertools.product(range(t), repeat=3):
        if free.isdisjoint(ijk):
            continue
        res = eps_regular_audit(palette, *(parts[i] for i in ijk), eps, samples, seed=[seed, *ijk])
        modes.add(res.mode)
        if res.irregular:
            bad.append((ijk, res))
    return bad, ("sampled" if "sampled" in modes else "exhaustive")


def _increment(palette: Palette, parts, ijk, res: AuditResult, eps: float) -> IncrementCheck:
    n = palette.color_count
    vs = [parts[i] for i in ijk]
    splits = []
    for v, w in zip(vs, res.witness):
        rest = tuple(sorted(set(v) - set(w)))
        splits.append([tuple(w)] + ([rest] if rest else []))
    before = tri_energy(palette, [vs[0]], [vs[1]], [vs[2]])
    after = tri_energy(palette, *splits)
    bound = eps**5 * len(vs[0]) * len(vs[1]) * len(vs[2]) / n**3
    return IncrementCheck(ijk, after - before, bound)


def _refine(parts, cuts, n, max_parts, allowance):
    """Split each part along its cuts, then chunk the pieces into equal blocks.

    The block size is the largest one that sends at most ``allowance``
    colors to the exceptional set and yields at most ``max_parts`` blocks.
    """
    atoms = []
    for i, part in enumerate(parts):
        groups: dict[tuple, list[int]] = {}
        for v in part:
            groups.setdefault(tuple(v in c for c in cuts[i]), []).append(v)
        atoms += sorted(groups.values())
    sizes = np.array([len(a) for a in atoms])
    block = 1
    for b in range(int(sizes.max()), 0, -1):
        if (sizes % b).sum() <= allowance and (sizes // b).sum() <= max_parts:
            block = b
            break
    blocks, leftover = [], []
    for atom in atoms:
        full = len(atom) // block * block
        blocks += [tuple(atom[s : s + block]) for s in range(0, full, block)]
        leftover += atom[full:]
    return blocks, leftover


def redistribute(partition: Equipartition) -> Equipartition:
    """Hand out the exceptional colors round-robin, smallest parts first."""
    parts = [list(p) for p in partition.parts]
    if not parts:
        return partition
    order = sorted(range(len(parts)), key=lambda i: (len(parts[i]), i))
    for r, v in enumerate(sorted(partition.exceptional)):
        parts[order[r % len(parts)]].append(v)
    return Equipartition(tuple(tuple(sorted(p)) for p in parts), (), partition.universe)


def regularize(
    palette: Palette,
    eps: float,
    m: int,
    seed: int = 0,
    audit_samples: int = DEFAULT_SAMPLES,
    max_parts: int = DEFAULT_MAX_PARTS,
    max_rounds: int | None = None,
    initial: Equipartition | None = None,
    redistribute_exceptional: bool = True,
) -> RegularityCertificate:
    """Refine an equipartition until at most ``eps t^3`` ordered part triples have a witness.

    Each round splits every part along the witness sets found for the
    triples it belongs to and re-chunks the pieces into equal blocks, so the
    new partition refines the old one (exceptional colors are singleton
    cells) and the energy never drops.  At the end the exceptional colors
    are spread over the parts and the result is audited once more.
    """
    n = palette.color_count
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= number of colors")
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    cap = round_cap(eps) if max_rounds is None else max_rounds
    part = initial if initial is not None else Equipartition.balanced(n, m)
    trace = [energy(palette, part)]
    increments: list[IncrementCheck] = []
    modes = set()
    rounds, complete, reason = 0, False, "round cap reached"
    while rounds < cap:
        parts = [tuple(p) for p in part.parts]
        bad, mode = audit_partition(palette, parts, eps, audit_samples, seed + rounds)
        modes.add(mode)
        if len(bad) <= eps * len(parts) ** 3:
            complete, reason = True, "audit passed"
            break
        cuts: list[list[set[int]]] = [[] for _ in parts]
        for ijk, res in bad:
            increments.append(_increment(palette, parts, ijk, res, eps))
            for i, w in zip(ijk, res.witness):
                cuts[i].append(set(w))
        blocks, leftover = _refine(parts, cuts, n, max_parts, eps * n / 4)
        if not blocks:
            reason = "refinement left no parts"
            break
        new = Equipartition(tuple(blocks), tuple(sorted(set(part.exceptional) | set(leftover))), n)
        rounds += 1
        if new.parts == part.parts and new.exceptional == part.exceptional:
            reason = "refinement stalled"
            break
        part = new
        trace.append(energy(palette, part))
    refined = part
    final = redistribute(part) if redistribute_exceptional else part
    bad, mode = audit_partition(palette, [tuple(p) for p in final.parts], eps, audit_samples, seed + rounds + 1)
    modes.add(mode)
    return RegularityCertificate(
        partition=final,
        epsilon=eps,
        irregular_triples=bad,
        audited_samples=audit_samples,
        energy=energy(palette, final),
        complete=complete,
        rounds=rounds,
        energy_trace=trace,
        increments=increments,
        audit_mode="sampled" if "sampled" in modes else "exhaustive",
        stop_reason=reason,
        refined=refined,
    )


# -- cleaning --------------------------------------------------------------


@dataclass
class CleanReport:
    reduced: Palette
    cleaned: Palette
    deleted: int
    buckets: dict[str, int]
    bounds: dict[str, float]
    contained_in_blowup: bool

    @property
    def bounds_hold(self) -> bool:
        return all(self.buckets[k] <= self.bounds[k] + 1e-9 for k in self.buckets)

    def to_json(self) -> dict:
        return {
            "reduced": [list(p) for p in self.reduced.patterns],
            "t": self.reduced.color_count,
            "cleaned": [list(p) for p in self.cleaned.patterns],
            "deleted": self.deleted,
            "buckets": self.buckets,
            "bounds": self.bounds,
            "bounds_hold": self.bounds_hold,
            "contained_in_blowup": self.contained_in_blowup,
        }


def clean(palette: Palette, parts: Sequence[Sequence[int]], model_sets: Sequence[Sequence[int]], alpha: float) -> CleanReport:
    """Keep the class triples that are distinct, faithfully sampled and dense, and drop every other pattern.

    A triple ``(i, j, k)`` of classes is kept when the indices are distinct,
    ``|d(U_i,U_j,U_k) - d(V_i,V_j,V_k)| <= 2 alpha / 9`` and
    ``d(U_i,U_j,U_k) > 2 alpha / 9``.  Colors outside every class lose all
    their patterns.
    """
    t, n = len(parts), palette.color_count
    if len(model_sets) != t:
        raise ValueError("need one model set per part")
    for u, v in zip(model_sets, parts):
        if not u:
            raise ValueError("model sets must be nonempty")
        if not set(u) <= set(v):
            raise ValueError("each model set must lie inside its part")
    thr = 2 * alpha / 9
    cls = {}
    for i, v in enumerate(parts):
        for x in v:
            cls[x] = i
    kept, far, thin = set(), set(), set()
    for ijk in itertools.permutations(range(t), 3):
        du = triple_density(palette, *(model_sets[i] for i in ijk))
        dv = triple_density(palette, *(parts[i] for i in ijk))
        if abs(du - dv) > thr:
            far.add(ijk)
        elif du <= thr:
            thin.add(ijk)
        else:
            kept.add(ijk)
    reduced = Palette(t, ((i + 1, j + 1, k + 1) for i, j, k in kept))
    buckets = {"repeated_or_exceptional": 0, "far_from_model": 0, "sparse": 0}
    cleaned = []
    for p in palette.patterns:
        key = tuple(cls.get(x) for x in p)
        if None in key or len(set(key)) < 3:
            buckets["repeated_or_exceptional"] += 1
        elif key in far:
            buckets["far_from_model"] += 1
        elif key in thin:
            buckets["sparse"] += 1
        else:
            cleaned.append(p)
    sizes = [len(v) for v in parts]
    exc = n - sum(sizes)
    vol = lambda ijk: sizes[ijk[0]] * sizes[ijk[1]] * sizes[ijk[2]]
    bounds = {
        "repeated_or_exceptional": float(min(n**3, 3 * n * sum(s * s for s in sizes) + 3 * exc * n * n)),
        "far_from_model": float(sum(vol(ijk) for ijk in far)),
        # a sparse triple has d(V) <= d(U) + 2a/9 <= 4a/9
        "sparse": sum(min(1.0, 2 * thr) * vol(ijk) for ijk in thin),
    }
    q = palette.with_patterns(cleaned)
    inside = all((cls[a] + 1, cls[b] + 1, cls[c] + 1) in reduced.pattern_set for a, b, c in q.patterns)
    return CleanReport(reduced, q, palette.e - q.e, buckets, bounds, inside)


@dataclass
class ModelSets:
    sets: list[tuple[int, ...]]
    choices: list[int]
    attempts: int
    passed: bool
    irregular: int
    far: int
    min_fraction: float

    def to_json(self) -> dict:
        return {
            "sets": [list(s) for s in self.sets],
            "choices": self.choices,
            "attempts": self.attempts,
            "passed": self.passed,
            "irregular": self.irregular,
            "far": self.far,
            "min_fraction": self.min_fraction,
        }


def cells_within(coarse: Equipartition, fine: Equipartition) -> list[list[tuple[int, ...]]]:
    """For each coarse part, the fine parts inside it; raises unless ``fine`` refines ``coarse``."""
    where = {}
    for i, p in enumerate(coarse.parts):
        for v in p:
            where[v] = i
    groups: list[list[tuple[int, ...]]] = [[] for _ in coarse.parts]
    for cell in fine.parts:
        owners = {where.get(v) for v in cell}
        if len(owners) != 1 or None in owners:
            raise ValueError("the fine partition does not refine the coarse one")
        groups[owners.pop()].append(tuple(cell))
    if any(not g for g in groups):
        raise ValueError("some coarse part contains no fine part")
    return groups


def sample_model_sets(
    palette: Palette,
    coarse: Equipartition,
    fine: Equipartition,
    eps: float,
    seed: int = 0,
    retries: int = 100,
    samples: int = DEFAULT_SAMPLES,
) -> ModelSets:
    """Pick one fine cell per coarse part uniformly at random until the picks look representative.

    A pick passes when every triple of picked cells audits as regular and
    all but ``eps t^3`` of the triples have density within ``eps`` of the
    coarse triple.  The best attempt is returned if none passes.
    """
    groups = cells_within(coarse, fine)
    t = coarse.t
    rng = np.random.default_rng(seed)
    coarse_d = {ijk: triple_density(palette, *(coarse.parts[i] for i in ijk)) for ijk in itertools.product(range(t), repeat=3)}
    best = None
    for attempt in range(1, retries + 1):
        choices = [int(rng.integers(len(g))) for g in groups]
        sets = [groups[i][c] for i, c in enumerate(choices)]
        irregular, _ = audit_partition(palette, sets, eps, samples, seed + attempt)
        far = sum(
            abs(triple_density(palette, *(sets[i] for i in ijk)) - d) >= eps for ijk, d in coarse_d.items()
        )
        ok = not irregular and far <= eps * t**3
        key = (not ok, len(irregular), far)
        if best is None or key < best[0]:
            best = (key, choices, sets, attempt, ok, len(irregular), far)
        if ok:
            break
    _, choices, sets, _, ok, irr, far = best
    return ModelSets(
        sets=sets,
        choices=choices,
        attempts=attempt,
        passed=ok,
        irregular=irr,
        far=far,
        min_fraction=min(len(s) for s in sets) / palette.color_count,
    )
