"""Command-line entry point: ``palettekit <command> ...`` prints one JSON document.

Exit status is 0 for a definitive answer, 2 when a search ran out of budget
or a verdict is inconclusive, and 1 for bad input.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import constructions, extremal, gadgets, hom, lagrangian, painting, regularity
from .core import BudgetExceeded, ParseError, parse_graph, parse_palette

EXIT_OK, EXIT_INPUT, EXIT_UNKNOWN = 0, 1, 2


class InputError(ValueError):
    pass


class Context:
    def __init__(self, args):
        self.args = args
        self.sources: list[tuple[str, str]] = []

    def read(self, path: str) -> str:
        if path == "-":
            text = sys.stdin.read()
        else:
            try:
                with open(path, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise InputError(f"cannot read {path}: {exc.strerror}") from exc
        self.sources.append((path, text))
        return text

    def palette(self, path: str):
        return _parsed(parse_palette, self.read(path), path)

    def graph(self, path: str):
        return _parsed(parse_graph, self.read(path), path)

    def json(self, path: str):
        text = self.read(path)
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc.msg}", exc.lineno, exc.colno) from exc

    def digest(self) -> str:
        h = hashlib.sha256()
        skip = {"json_pretty", "threads", "func"}
        flags = {k: v for k, v in vars(self.args).items() if k not in skip}
        h.update(json.dumps(flags, sort_keys=True, default=str).encode())
        for _, text in self.sources:
            h.update(b"\0")
            h.update(text.encode())
        return h.hexdigest()


def _parsed(fn, text, path):
    try:
        return fn(text)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc.reason}", exc.line, exc.column) from exc


def _ints(text: str, what: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"{what} must be comma-separated integers") from exc


def _floats(text: str, what: str) -> list[float]:
    try:
        return [float(Fraction(v.strip())) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{what} must be comma-separated numbers") from exc


def _need_seed(args):
    if args.seed is None:
        raise InputError(f"{args.command} is randomized and needs --seed")
    return args.seed


def _budget(args, nodes=None, exhausted=False) -> dict:
    return {"budget": args.budget, "nodes": nodes, "exceeded": exhausted}


# -- subcommands -------------------------------------------------------------


def cmd_paints(ctx, args):
    p, f = ctx.palette(args.palette), ctx.graph(args.graph)
    search = painting.PaintingSearch(p, f, args.budget)
    witness = search.find()
    result = {"result": witness is not None}
    if witness is not None:
        result["witness"] = witness.to_json()
    if args.count:
        counter = painting.PaintingSearch(p, f, args.budget)
        result["count"] = len(counter.colorings())
        search.nodes += counter.nodes
    return result, _budget(args, search.nodes), EXIT_OK


def cmd_count(ctx, args):
    p, f = ctx.palette(args.palette), ctx.graph(args.graph)
    search = painting.PaintingSearch(p, f, args.budget)
    return {"result": len(search.colorings())}, _budget(args, search.nodes), EXIT_OK


def cmd_hom(ctx, args):
    src, dst = ctx.palette(args.source), ctx.palette(args.target)
    it = hom.iter_homomorphisms(src, dst, injective=args.injective, budget=args.budget)
    psi = next(it, None)
    return {"result": psi is not None, "map": None if psi is None else list(psi)}, _budget(args), EXIT_OK


def cmd_iso(ctx, args):
    a, b = ctx.palette(args.first), ctx.palette(args.second)
    if max(a.color_count, b.color_count) > 8:
        raise InputError("isomorphism testing is limited to 8 colors")
    psi = hom.find_isomorphism(a, b, args.budget) if hom.is_isomorphic(a, b) else None
    return {"result": psi is not None, "map": None if psi is None else list(psi)}, _budget(args), EXIT_OK


def cmd_dominates(ctx, args):
    p = ctx.palette(args.palette)
    if args.a is None or args.b is None:
        pairs = hom.dominated_pairs(p)
        return {"result": bool(pairs), "pairs": [list(x) for x in pairs]}, _budget(args), EXIT_OK
    try:
        return {"result": hom.dominates(p, args.a, args.b)}, _budget(args), EXIT_OK
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def cmd_lagrangian(ctx, args):
    p = ctx.palette(args.palette)
    if p.color_count == 0:
        raise InputError("palette has no colors")
    res = lagrangian.maximize_lagrangian(p, restarts=args.restarts, seed=args.seed or 0)
    out = res.to_json()
    out["density"] = str(p.e and Fraction(p.e, p.color_count**3))
    if args.grid:
        try:
            out["grid_value"] = lagrangian.grid_oracle(p, args.grid)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
    return out, _budget(args), EXIT_OK


def cmd_reduced(ctx, args):
    p = ctx.palette(args.palette)
    if p.e == 0:
        raise InputError("reducedness needs at least one pattern")
    verdict = lagrangian.is_reduced(p, tol=args.tol, seed=args.seed or 0)
    label = {True: "reduced", False: "not reduced", None: "inconclusive"}[verdict]
    out = {"result": verdict, "verdict": label, "tol": args.tol, "note": "numerical surrogate for a strict inequality"}
    return out, _budget(args), EXIT_OK if verdict is not None else EXIT_UNKNOWN


def cmd_expal(ctx, args):
    family = [ctx.graph(path) for path in args.family.split(",") if path] if args.family else []
    heuristic = args.heuristic or (args.n > extremal.EXHAUSTIVE_MAX_COLORS and not args.exhaustive)
    if args.exhaustive and args.n > extremal.EXHAUSTIVE_MAX_COLORS:
        raise InputError(f"exhaustive mode supports n <= {extremal.EXHAUSTIVE_MAX_COLORS}")
    seed = _need_seed(args) if heuristic else (args.seed or 0)
    rep = extremal.ex_pal(args.n, family, args.budget, nondegenerate=args.nondegenerate, heuristic=heuristic, seed=seed)
    out = rep.to_json()
    out["result"] = rep.ex_value
    code = EXIT_OK if rep.optimal else EXIT_UNKNOWN
    return out, _budget(args, rep.nodes_searched, not rep.optimal and not heuristic), code


def cmd_regularize(ctx, args):
    p = ctx.palette(args.palette)
    seed = _need_seed(args)
    try:
        cert = regularity.regularize(p, args.eps, args.m, seed=seed, audit_samples=args.samples, max_parts=args.max_parts)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = cert.to_json()
    out["result"] = cert.complete
    return out, _budget(args), EXIT_OK if cert.complete else EXIT_UNKNOWN


def cmd_clean(ctx, args):
    p = ctx.palette(args.palette)
    data = ctx.json(args.partition)
    try:
        report = regularity.clean(p, data["parts"], data.get("model_sets", data["parts"]), args.alpha)
    except (KeyError, TypeError) as exc:
        raise InputError("partition file needs 'parts' and optionally 'model_sets'") from exc
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = report.to_json()
    out["result"] = report.deleted
    return out, _budget(args), EXIT_OK


def cmd_construct(ctx, args):
    p = ctx.palette(args.palette)
    seed = _need_seed(args)
    w = _floats(args.weights, "--weights")
    try:
        built = constructions.palette_construction(p, w, args.n, seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    g = built.graph
    total = g.vertex_count * (g.vertex_count - 1) * (g.vertex_count - 2) // 6
    out = {
        "result": {"vertices": g.vertex_count, "edges": g.e},
        "edge_fraction": g.e / total,
        "expected_fraction": lagrangian.lambda_eval(p, w),
        "painted_by_construction": built.painting().is_valid(p, g),
    }
    if args.emit_graph:
        out["graph"] = [list(e) for e in g.edges]
    if args.audit:
        d, eta = _floats(args.audit, "--audit")
        out["audit"] = constructions.d_eta_density_audit(g, d, eta, samples=args.samples, seed=seed).to_json()
    return out, _budget(args), EXIT_OK


def cmd_audit(ctx, args):
    g = ctx.graph(args.graph)
    mode = args.mode
    if mode == "auto":
        mode = "exhaustive" if g.vertex_count <= constructions.EXHAUSTIVE_AUDIT else "sampled"
    seed = _need_seed(args) if mode == "sampled" else (args.seed or 0)
    try:
        rep = constructions.d_eta_density_audit(g, args.d, args.eta, mode=mode, samples=args.samples, seed=seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = rep.to_json()
    out["result"] = rep.dense
    return out, _budget(args), EXIT_OK


def cmd_gadget(ctx, args):
    if args.kind == "gsigma":
        sigma = _ints(args.perm, "--perm")
        idx = _ints(args.abcd, "--abcd") if args.abcd else None
        try:
            g = gadgets.build_G_sigma(sigma, idx)
            edges = gadgets.gsigma_edges(g, sigma, idx)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        out = {
            "result": {"vertex_count": g.vertex_count, "edges": [list(e) for e in edges]},
            "abcd": list(idx or gadgets.abcd(sigma)),
        }
        if args.verify:
            cert = gadgets.verify_gsigma_claim(sigma, idx, budget=args.budget)
            out["certificate"] = cert.to_json()
        return out, _budget(args), EXIT_OK
    q = ctx.palette(args.palette)
    if q.e == 0:
        raise InputError("palette has no patterns")
    g = gadgets.build_triangle_system(q)
    h = gadgets.hypergraph_from_colored_graph(g, q)
    out = {
        "result": g.to_json(),
        "classes": {str(c): [list(e) for e in es] for c, es in sorted(g.label_classes().items())},
        "hypergraph": [list(e) for e in h.edges],
        "painted_by_construction": gadgets.natural_painting(g, h).is_valid(q, h),
    }
    return out, _budget(args), EXIT_OK


def cmd_reduced3(ctx, args):
    if args.from_palette:
        p = ctx.palette(args.from_palette)
        red, ident = constructions.reduced_from_palette(p, args.t)
    elif args.file:
        try:
            red = constructions.Reduced3Graph.from_json(ctx.json(args.file))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParseError):
                raise
            raise InputError(f"bad reduced 3-graph: {exc}") from exc
        ident = None
    else:
        raise InputError("give --file or --from-palette")
    out: dict = {"reduced": red.to_json() if args.emit else None}
    code = EXIT_OK
    if args.d is not None:
        out["uniformly_dense"] = constructions.is_uniformly_dense_reduced(red, args.d)
    if ident is not None:
        out["slice"] = [list(pat) for pat in constructions.palette_from_slice(red, range(1, red.t + 1), ident).patterns]
    if args.graph:
        f = ctx.graph(args.graph)
        rmap = constructions.reduced_map_exists(f, red, args.budget)
        out["result"] = rmap is not None
        out["map"] = None if rmap is None else rmap.to_json()
    else:
        out["result"] = out.get("uniformly_dense", True)
    return out, _budget(args), code


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--budget", type=int, default=painting.DEFAULT_BUDGET, help="search node limit")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--threads", type=int, default=1, help="worker cap (work runs in one thread)")
    common.add_argument("--tol", type=float, default=lagrangian.REDUCED_TOL)
    common.add_argument("--json-pretty", action="store_true")

    parser = argparse.ArgumentParser(prog="palettekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=fn)
        return p

    p = add("paints", cmd_paints, "decide whether a palette paints a 3-graph")
    p.add_argument("--palette", required=True)
    p.add_argument("--graph", required=True)
    p.add_argument("--count", action="store_true")

    p = add("count", cmd_count, "count shadow colorings that extend to a painting")
    p.add_argument("--palette", required=True)
    p.add_argument("--graph", required=True)

    p = add("hom", cmd_hom, "find a palette homomorphism")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--injective", action="store_true")

    p = add("iso", cmd_iso, "test palette isomorphism")
    p.add_argument("first")
    p.add_argument("second")

    p = add("dominates", cmd_dominates, "color domination")
    p.add_argument("--palette", required=True)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)

    p = add("lagrangian", cmd_lagrangian, "maximize the Lagrange polynomial")
    p.add_argument("--palette", required=True)
    p.add_argument("--restarts", type=int, default=lagrangian.DEFAULT_RESTARTS)
    p.add_argument("--grid", type=int, default=0)

    p = add("reduced", cmd_reduced, "check that every pattern deletion lowers the maximum")
    p.add_argument("--palette", required=True)

    p = add("expal", cmd_expal, "largest palette painting no member of a family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--family", default="", help="comma-separated graph files")
    p.add_argument("--nondegenerate", action="store_true")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--heuristic", action="store_true")

    p = add("regularize", cmd_regularize, "refine toward an eps-regular equipartition")
    p.add_argument("--palette", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--samples", type=int, default=regularity.DEFAULT_SAMPLES)
    p.add_argument("--max-parts", type=int, default=regularity.DEFAULT_MAX_PARTS)

    p = add("clean", cmd_clean, "drop patterns outside faithfully sampled dense class triples")
    p.add_argument("--palette", required=True)
    p.add_argument("--partition", required=True, help="JSON with 'parts' and 'model_sets'")
    p.add_argument("--alpha", type=float, required=True)

    p = add("construct", cmd_construct, "random 3-graph painted by a palette")
    p.add_argument("--palette", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--audit", help="d,eta")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--emit-graph", action="store_true")

    p = add("audit", cmd_audit, "(d, eta)-density audit of a 3-graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--d", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--mode", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--samples", type=int, default=10_000)

    p = add("gadget", cmd_gadget, "ordering and triangle gadgets")
    p.add_argument("kind", choices=["gsigma", "triangles"])
    p.add_argument("--perm")
    p.add_argument("--abcd")
    p.add_argument("--verify", action="store_true")
    p.add_argument("--palette")

    p = add("reduced3", cmd_reduced3, "reduced 3-graphs and reduced maps")
    p.add_argument("--file")
    p.add_argument("--from-palette")
    p.add_argument("--t", type=int, default=3)
    p.add_argument("--graph")
    p.add_argument("--d", type=float)
    p.add_argument("--emit", action="store_true")
    return parser


def _default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def emit(doc: dict, pretty: bool) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2 if pretty else None, default=_default)
    sys.stdout.write(text + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gadget":
        if args.kind == "gsigma" and not args.perm:
            parser.error("gadget gsigma needs --perm")
        if args.kind == "triangles" and not args.palette:
            parser.error("gadget triangles needs --palette")
    ctx = Context(args)
    doc: dict = {"command": args.command}
    try:
        out, budget, code = args.func(ctx, args)
    except ParseError as exc:
        doc.update(error=str(exc), line=exc.line, column=exc.column, inputs_digest=ctx.digest())
        emit(doc, args.json_pretty)
        print(f"palettekit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InputError as exc:
        doc.update(error=str(exc), inputs_digest=ctx.digest())
        emit(doc, args.json_pretty)
        print(f"palettekit: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        doc.update(
            result="unknown",
            inputs_digest=ctx.digest(),
            budget_report={"budget": exc.budget, "nodes": exc.nodes, "exceeded": True},
        )
        if args.seed is not None:
            doc["seed"] = args.seed
        emit(doc, args.json_pretty)
        return EXIT_UNKNOWN
    doc.update(out)
    doc["inputs_digest"] = ctx.digest()
    doc["budget_report"] = budget
    if args.seed is not None or args.command in {"lagrangian", "reduced"}:
        doc["seed"] = args.seed if args.seed is not None else 0
    emit(doc, args.json_pretty)
    return code


if __name__ == "__main__":
    sys.exit(main())
