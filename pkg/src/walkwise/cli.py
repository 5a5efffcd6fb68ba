"""Command-line interface: ``walkwise {sparsify,walk-index,verify-bounds,stats}``.

Exit codes: 0 success, 1 failed verification, 2 usage or parse error,
3 refused because a resource budget would be exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from ._parallel import THREADS_ENV, resolve_threads
from .edgelist import format_edge_list, read_edge_list
from .errors import BudgetExceededError, EdgeListParseError, GraphError, VertexSpecError, WalkwiseError
from .graph import Graph, boundary
from .sparsify import ARGMAX_ORDERS, TIE_BREAKS, GwisConfig, RemovalTrace, gwis, one_wis, random_sparsify, wis
from .walk_index import WalkIndexQuery, walk_index

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(WalkwiseError):
    """Invalid combination of command-line options."""


def parse_vertex_spec(spec: str, num_vertices: int | None = None) -> frozenset[int]:
    """Parse ``"0,2,5-7"`` into a vertex set. An empty string is the empty set."""
    out: set[int] = set()
    for raw in spec.split(","):
        token = raw.strip()
        if not token:
            if spec.strip():
                raise VertexSpecError(raw, "empty element in vertex spec")
            continue
        if "-" in token[1:]:
            lo_s, hi_s = token.split("-", 1)
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise VertexSpecError(token, "bad vertex range") from None
            if lo > hi or lo < 0:
                raise VertexSpecError(token, "bad vertex range")
            ids = range(lo, hi + 1)
        else:
            try:
                v = int(token)
            except ValueError:
                raise VertexSpecError(token, "bad vertex id") from None
            if v < 0:
                raise VertexSpecError(token, "bad vertex id")
            ids = range(v, v + 1)
        if num_vertices is not None and ids and ids[-1] >= num_vertices:
            raise VertexSpecError(token, f"vertex id out of range for {num_vertices} vertices")
        out.update(ids)
    return frozenset(out)


def parse_removal(text: str, num_edges: int) -> int:
    """``"N"`` or ``"p%"`` (rounded down) to an edge count."""
    text = text.strip()
    if text.endswith("%"):
        pct = _parse_percent(text[:-1])
        return math.floor(pct * num_edges / 100)
    try:
        n = int(text)
    except ValueError:
        raise UsageError(f"--remove expects N or p%, got {text!r}") from None
    if n < 0:
        raise UsageError("--remove must be nonnegative")
    return n


def _parse_percent(text: str) -> float:
    try:
        pct = float(text)
    except ValueError:
        raise UsageError(f"bad percentage {text!r}") from None
    if not 0 <= pct <= 100:
        raise UsageError(f"percentage {text!r} outside [0, 100]")
    return pct


def parse_sweep(text: str) -> list[float]:
    """Comma-separated strictly increasing percentages in [0, 100]."""
    values = [_parse_percent(t.strip().rstrip("%")) for t in text.split(",") if t.strip()]
    if not values:
        raise UsageError("--sweep needs at least one percentage")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise UsageError("--sweep percentages must be strictly increasing")
    return values


def _load(args) -> Graph:
    return read_edge_list(args.input, directed=getattr(args, "directed", False), num_vertices=args.num_vertices)


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


# -- sparsify ------------------------------------------------------------------


def _run_algorithm(args, g: Graph, n_remove: int) -> RemovalTrace:
    threads = args.threads
    if args.algo == "wis":
        if args.depth is None:
            raise UsageError("--algo wis requires --depth")
        if args.fast_path and args.depth == 2 and args.batch == 1:
            return one_wis(g, n_remove, args.tie_break)
        return wis(g, args.depth, n_remove, args.batch, args.tie_break, threads)
    if args.algo == "1-wis":
        if args.batch != 1:
            raise UsageError("--algo 1-wis does not batch; drop --batch")
        return one_wis(g, n_remove, args.tie_break)
    if args.algo == "gwis":
        if args.config is None:
            raise UsageError(
                "--algo gwis requires --config FILE holding JSON with 'graph_partitions' "
                "(lists of vertex ids), 'vertex_partitions' ([vertex ids, target] pairs), "
                f"optional 'argmax_order' (one of {', '.join(ARGMAX_ORDERS)}) and 'depth'"
            )
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
            cfg = GwisConfig.from_dict(data, depth=args.depth)
        except (OSError, json.JSONDecodeError, ValueError, TypeError) as exc:
            raise UsageError(f"bad GWIS config {args.config}: {exc}") from exc
        return gwis(g, cfg, n_remove, args.batch, args.tie_break, threads)
    if args.algo == "random":
        if args.seed is None:
            raise UsageError("--algo random requires --seed")
        return random_sparsify(g, n_remove, args.seed)
    raise UsageError(f"unknown algorithm {args.algo!r}")


def cmd_sparsify(args) -> int:
    g = _load(args)
    if g.directed:
        raise UsageError("sparsification needs an undirected graph")
    if (args.remove is None) == (args.sweep is None):
        raise UsageError("give exactly one of --remove or --sweep")
    sweep = parse_sweep(args.sweep) if args.sweep is not None else None
    if sweep is not None:
        if args.out_dir is None:
            raise UsageError("--sweep requires --out-dir")
        counts = [math.floor(p * g.num_edges / 100) for p in sweep]
        n_remove = counts[-1]
        full = sweep[-1] == 100
    else:
        n_remove = parse_removal(args.remove, g.num_edges)
        full = args.remove.strip() == "100%"
    start = time.perf_counter()
    trace = _run_algorithm(args, g, n_remove)
    elapsed = time.perf_counter() - start

    if sweep is not None:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.input).stem
        for pct, count in zip(sweep, counts):
            prefix = trace.prefix_graph(g, min(count, len(trace)))
            (out_dir / f"{stem}_{_pct_label(pct)}.edges").write_text(format_edge_list(prefix), encoding="utf-8")
        (out_dir / f"{stem}.trace").write_text(trace.to_text(), encoding="utf-8")
        (out_dir / f"{stem}.trace.json").write_text(trace.to_json() + "\n", encoding="utf-8")
    else:
        _write(args.output, format_edge_list(trace.final_graph))
    if args.trace:
        _write(args.trace, trace.to_text())
    if args.trace_json:
        _write(args.trace_json, trace.to_json() + "\n")

    print(
        f"{trace.algorithm}: removed {len(trace)} of {g.num_edges} edges "
        f"(requested {trace.requested}) in {elapsed:.3f}s",
        file=sys.stderr,
    )
    if trace.exhausted:
        print(f"warning: only {len(trace)} removable edges; trace is exhausted", file=sys.stderr)
    elif full and g.num_edges:
        print("warning: removing 100% of edges leaves only self-loops", file=sys.stderr)
    return EXIT_OK


def _pct_label(pct: float) -> str:
    return f"p{pct:g}".replace(".", "_")


# -- walk-index ----------------------------------------------------------------


def cmd_walk_index(args) -> int:
    g = _load(args)
    subset = parse_vertex_spec(args.subset, g.num_vertices)
    if args.mode == "vertex":
        if args.target is None:
            raise UsageError("--mode vertex requires --target")
        if not 0 <= args.target < g.num_vertices:
            raise VertexSpecError(str(args.target), "target out of range")
        q = WalkIndexQuery.vertex(args.length, subset, args.target)
    else:
        q = WalkIndexQuery.graph(args.length, subset)
    print(walk_index(g, q))
    return EXIT_OK


# -- verify-bounds ---------------------------------------------------------------


def cmd_verify_bounds(args) -> int:
    from .seprank import (
        ProductGnn,
        TemplateSet,
        basis_construction,
        bound_report,
        grid_matricization,
        lower_bound_witness,
        random_rationals,
        rank_exact,
        verify_witness,
    )

    g = _load(args)
    subset = parse_vertex_spec(args.subset, g.num_vertices)
    if args.mode == "vertex" and args.target is None:
        raise UsageError("--mode vertex requires --target")
    if args.target is not None and not 0 <= args.target < g.num_vertices:
        raise VertexSpecError(str(args.target), "target out of range")
    target = args.target if args.mode == "vertex" else None
    report = bound_report(g, subset, args.depth, args.input_dim, args.hidden_dim, args.mode, target)
    failures: list[str] = []

    if args.grid_check:
        m = args.num_templates or args.input_dim
        if m**g.num_vertices > args.budget:
            raise BudgetExceededError(
                f"grid check needs {m}^{g.num_vertices} = {m**g.num_vertices} evaluations, budget is {args.budget}"
            )
        rng = np.random.default_rng(args.seed)
        net = ProductGnn.random(args.depth, args.input_dim, args.hidden_dim, rng, num_edge_types=g.num_edge_types)
        templates = TemplateSet(random_rationals(rng, (m, args.input_dim)))
        gm = grid_matricization(net, g, templates, subset, args.mode, target, args.budget)
        report.observed_grid_rank = rank_exact(gm.matrix)
        if not report.rank_within_upper(report.observed_grid_rank):
            failures.append(
                f"grid rank {report.observed_grid_rank} exceeds {args.hidden_dim}^{report.upper_exponent}"
            )

    if args.with_witness:
        if report.lower_walks == 0:
            report.notes.append("no witness available: lower bound is zero")
        elif args.depth == 1:
            net, templates = basis_construction(args.input_dim, args.hidden_dim, g.num_edge_types)
            gm = grid_matricization(net, g, templates, subset, args.mode, target, args.budget)
            report.witness_rank = rank_exact(gm.matrix)
            if report.witness_rank < report.certified_rank:
                failures.append(f"basis construction rank {report.witness_rank} below {report.certified_rank}")
        else:
            w = lower_bound_witness(
                g, subset, args.depth, args.input_dim, args.hidden_dim, args.mode, target, budget=args.budget
            )
            check = verify_witness(w, g)
            report.witness_rank = check.rank
            if not check.ok:
                failures.append(f"witness block rank {check.rank}, expected {check.expected_rank}")

    for f in failures:
        report.notes.append(f"FAILED: {f}")
    _write(args.json, report.to_json() + "\n")
    if failures:
        for f in failures:
            print(f"verification failed: {f}", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


# -- stats -----------------------------------------------------------------------


def cmd_stats(args) -> int:
    g = _load(args)
    deg = g.degrees()
    stats = {
        "vertices": g.num_vertices,
        "edges": g.num_edges,
        "directed": g.directed,
        "edge_types": g.num_edge_types,
        "isolated": int((deg == 1).sum()) if not g.directed else int(((deg == 1) & (g.in_degrees() == 1)).sum()),
        "min_degree": int(deg.min()) if g.num_vertices else 0,
        "max_degree": int(deg.max()) if g.num_vertices else 0,
        "mean_degree": float(deg.mean()) if g.num_vertices else 0.0,
        "fingerprint": g.fingerprint(),
    }
    if args.subset is not None:
        stats["boundary"] = sorted(boundary(g, parse_vertex_spec(args.subset, g.num_vertices)))
    print(json.dumps(stats, indent=2, sort_keys=True))
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="walkwise", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--threads", type=int, default=None, help=f"worker threads for edge scoring (default: ${THREADS_ENV} or 1)"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def graph_args(p, directed_flag: bool = True):
        p.add_argument("input", help="edge-list file")
        p.add_argument("--num-vertices", type=int, default=None, help="vertex count (default: the vertices= header, else max id + 1)")
        if directed_flag:
            p.add_argument("--directed", action="store_true", help="read the edge list as directed arcs")

    sp = sub.add_parser("sparsify", help="remove edges with a greedy or random sparsifier")
    graph_args(sp, directed_flag=False)
    sp.add_argument("--algo", required=True, choices=["wis", "1-wis", "gwis", "random"])
    sp.add_argument("--depth", type=int, default=None, help="network depth L (wis, gwis)")
    sp.add_argument("--batch", type=int, default=1, help="edges removed per scoring pass")
    sp.add_argument("--remove", default=None, help="number of edges N or percentage p%%")
    sp.add_argument("--sweep", default=None, help="comma-separated increasing percentages, e.g. 10,20,50")
    sp.add_argument("--out-dir", default=None, help="directory for sweep outputs")
    sp.add_argument("--seed", type=int, default=None, help="seed for --algo random")
    sp.add_argument("--tie-break", default="smallest", choices=TIE_BREAKS)
    sp.add_argument("--config", default=None, help="JSON partition config for --algo gwis")
    sp.add_argument("--output", "-o", default=None, help="sparsified edge list (default: stdout)")
    sp.add_argument("--trace", default=None, help="write the text removal trace here")
    sp.add_argument("--trace-json", default=None, help="write the JSON removal trace here")
    sp.add_argument("--fast-path", action="store_true", help="run wis at depth 2 as the equivalent degree-based 1-wis")
    sp.set_defaults(func=cmd_sparsify)

    wp = sub.add_parser("walk-index", help="walk index of a partition")
    graph_args(wp)
    wp.add_argument("--subset", required=True, help="vertex spec such as 0,2,5-7")
    wp.add_argument("--length", type=int, required=True, help="walk length (depth minus one)")
    wp.add_argument("--mode", default="graph", choices=["graph", "vertex"])
    wp.add_argument("--target", type=int, default=None)
    wp.set_defaults(func=cmd_walk_index)

    vp = sub.add_parser("verify-bounds", help="separation-rank bounds with optional exact checks")
    graph_args(vp)
    vp.add_argument("--subset", required=True, help="vertex spec such as 0,2,5-7")
    vp.add_argument("--depth", type=int, required=True)
    vp.add_argument("--input-dim", type=int, required=True)
    vp.add_argument("--hidden-dim", type=int, required=True)
    vp.add_argument("--mode", default="graph", choices=["graph", "vertex"])
    vp.add_argument("--target", type=int, default=None)
    vp.add_argument("--grid-check", action="store_true", help="check a random exact grid rank against the upper bound")
    vp.add_argument("--with-witness", action="store_true", help="build the explicit construction and check its rank")
    vp.add_argument("--num-templates", type=int, default=None, help="templates for --grid-check (default: input dim)")
    vp.add_argument("--seed", type=int, default=0, help="seed for --grid-check weights and templates")
    vp.add_argument("--budget", type=int, default=10**6, help="maximum network evaluations")
    vp.add_argument("--json", default=None, help="write the report here (default: stdout)")
    vp.set_defaults(func=cmd_verify_bounds)

    tp = sub.add_parser("stats", help="summary statistics of an edge list")
    graph_args(tp)
    tp.add_argument("--subset", default=None, help="also print the boundary of this vertex set")
    tp.set_defaults(func=cmd_stats)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.threads = resolve_threads(args.threads)
        return args.func(args)
    except BudgetExceededError as exc:
        print(f"walkwise: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (EdgeListParseError, VertexSpecError, UsageError) as exc:
        print(f"walkwise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GraphError, ValueError, OSError) as exc:
        print(f"walkwise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
