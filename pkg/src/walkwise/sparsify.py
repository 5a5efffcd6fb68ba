"""Greedy walk-index edge sparsification and a random baseline.

Every sparsifier returns a :class:`RemovalTrace`. Greedy selection picks the
candidate with the largest score; equal scores are resolved by canonical edge
order (``tie_break="smallest"`` picks the smallest sorted endpoint pair,
``"largest"`` the largest). With ``batch_size = b > 1`` one scoring pass
removes its top ``b`` candidates together, which may differ from ``b``
sequential greedy steps.
"""

from __future__ import annotations

import heapq
import json
import math
from collections import Counter
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import GraphError
from .graph import Edge, EditableGraph, Graph, adjacency_matrix
from .walk_index import ScoreTuple, WalkIndexQuery, edge_removal_scores, singleton_queries

TIE_BREAKS = ("smallest", "largest")
ARGMAX_ORDERS = ("sorted-lexicographic", "sum", "min", "max")

Score = Union[ScoreTuple, tuple[int, int], None]

# Memory cap for one stacked chunk of candidate matrices in the dense WIS path.
_DENSE_CHUNK_BYTES = 1 << 26
_DENSE_MAX_VERTICES = 2048
_FLOAT_EXACT_BITS = 52
_INT64_EXACT_BITS = 62


@dataclass(frozen=True)
class Removal:
    """One removed edge. ``iteration`` counts removals from 0; ``batch`` counts scoring passes."""

    iteration: int
    edge: Edge
    score: Score
    batch: int
    ties: int = 1


@dataclass
class RemovalTrace:
    """Ordered record of a sparsification run."""

    algorithm: str
    params: dict[str, Any]
    tie_break: str
    removals: list[Removal]
    final_graph: Graph
    requested: int
    exhausted: bool = False
    input_fingerprint: str = ""

    @property
    def removed_edges(self) -> list[Edge]:
        return [r.edge for r in self.removals]

    def __len__(self) -> int:
        return len(self.removals)

    def replay(self, g: Graph, count: int | None = None) -> Graph:
        """Remove the first ``count`` traced edges (all by default) from ``g``."""
        work = EditableGraph(g)
        for r in self.removals[: len(self.removals) if count is None else count]:
            work.remove_edge(r.edge)
        return work.snapshot()

    def prefix_graph(self, g: Graph, count: int) -> Graph:
        return self.replay(g, count)

    def to_text(self) -> str:
        lines = [
            f"# algorithm={self.algorithm} tie_break={self.tie_break}",
            f"# params={json.dumps(self.params, sort_keys=True, separators=(',', ':'))}",
            f"# input={self.input_fingerprint} final={self.final_graph.fingerprint()}",
            f"# requested={self.requested} removed={len(self.removals)} exhausted={str(self.exhausted).lower()}",
        ]
        batch = None
        for r in self.removals:
            if r.batch != batch:
                batch = r.batch
                lines.append(f"# batch {batch}")
            lines.append(f"{r.iteration} {r.edge[0]} {r.edge[1]} {_summary(r.score)}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict[str, Any]:
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "tie_break": self.tie_break,
            "requested": self.requested,
            "exhausted": self.exhausted,
            "input_fingerprint": self.input_fingerprint,
            "final_fingerprint": self.final_graph.fingerprint(),
            "removals": [
                {
                    "iteration": r.iteration,
                    "edge": list(r.edge),
                    "score_kind": _score_kind(r.score),
                    "score": _score_payload(r.score),
                    "batch": r.batch,
                    "ties": r.ties,
                }
                for r in self.removals
            ],
        }

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict[str, Any], g: Graph) -> "RemovalTrace":
        """Rebuild a trace against its input graph; the final graph is replayed."""
        removals = [
            Removal(
                iteration=int(r["iteration"]),
                edge=(int(r["edge"][0]), int(r["edge"][1])),
                score=_score_from_payload(r["score_kind"], r["score"]),
                batch=int(r["batch"]),
                ties=int(r["ties"]),
            )
            for r in data["removals"]
        ]
        trace = cls(
            algorithm=data["algorithm"],
            params=dict(data["params"]),
            tie_break=data["tie_break"],
            removals=removals,
            final_graph=g,
            requested=int(data["requested"]),
            exhausted=bool(data["exhausted"]),
            input_fingerprint=data.get("input_fingerprint", ""),
        )
        trace.final_graph = trace.replay(g)
        return trace


def _score_kind(score: Score) -> str:
    if score is None:
        return "none"
    if isinstance(score, ScoreTuple):
        return "walk-indices"
    return "degrees"


def _score_payload(score: Score):
    if score is None:
        return None
    if isinstance(score, ScoreTuple):
        # walk counts can exceed the exactly representable JSON number range
        return [str(x) for x in score.entries]
    return list(score)


def _score_from_payload(kind: str, payload) -> Score:
    if kind == "none":
        return None
    if kind == "walk-indices":
        return ScoreTuple(int(x) for x in payload)
    return (int(payload[0]), int(payload[1]))


def _summary(score: Score) -> str:
    if score is None:
        return "-"
    if isinstance(score, ScoreTuple):
        return score.summary()
    return f"deg={score[0]},{score[1]}"


# -- shared greedy driver ------------------------------------------------------


def _check_common(g: Graph, n_remove: int, batch_size: int, tie_break: str) -> None:
    if g.directed:
        raise GraphError("walk-index sparsification is defined for undirected graphs")
    if n_remove < 0:
        raise ValueError("number of removals must be nonnegative")
    if batch_size < 1:
        raise ValueError("batch_size must be at least 1")
    if tie_break not in TIE_BREAKS:
        raise ValueError(f"tie_break must be one of {TIE_BREAKS}")


# A pass takes the working graph, the number of edges to pick and the tie-break,
# and returns [(edge id, score, tie count)] in selection order.
PassFn = Callable[[EditableGraph, int, str], list[tuple[int, Score, int]]]


def _greedy(
    g: Graph,
    select: PassFn,
    n_remove: int,
    batch_size: int,
    tie_break: str,
    algorithm: str,
    params: dict[str, Any],
) -> RemovalTrace:
    work = EditableGraph(g)
    removals: list[Removal] = []
    batch = 0
    while len(removals) < n_remove and work.num_edges:
        take = min(batch_size, n_remove - len(removals))
        for idx, score, ties in select(work, take, tie_break):
            edge = tuple(g.edges[idx].tolist())
            removals.append(Removal(len(removals), edge, score, batch, ties))
            work.remove_edge_id(idx)
        batch += 1
    return RemovalTrace(
        algorithm=algorithm,
        params=params,
        tie_break=tie_break,
        removals=removals,
        final_graph=work.snapshot(),
        requested=n_remove,
        exhausted=len(removals) < n_remove,
        input_fingerprint=g.fingerprint(),
    )


def _rank_python(
    ids: Sequence[int], scores: Sequence[Score], key: Callable[[Any], Any], take: int, tie_break: str
) -> list[tuple[int, Score, int]]:
    """Top ``take`` candidates by ``key`` descending, ties by edge id per ``tie_break``."""
    order = list(range(len(ids)))
    if tie_break == "largest":
        order.reverse()
    keys = [key(s) for s in scores]
    order.sort(key=lambda i: keys[i], reverse=True)  # stable, so edge order breaks ties
    counts = Counter(keys)
    return [(ids[i], scores[i], counts[keys[i]]) for i in order[:take]]


# -- WIS -----------------------------------------------------------------------


def wis(
    g: Graph,
    depth: int,
    n_remove: int,
    batch_size: int = 1,
    tie_break: str = "smallest",
    threads: int | None = None,
    method: str = "auto",
) -> RemovalTrace:
    """Walk index sparsification for depth ``depth >= 2``.

    Each pass scores every remaining edge ``e`` by the tuple over vertices ``t``
    of the length ``depth - 1`` walk index of ``({t}, t)`` in the graph without
    ``e``, sorted ascending, and removes the lexicographically largest.

    ``method="dense"`` evaluates all candidates with stacked dense matrix powers
    using the identity that this walk index equals the ``t``-th diagonal entry
    of the ``depth``-th adjacency power (zero for isolated ``t``).
    ``method="generic"`` calls :func:`edge_removal_scores`. Both give the same
    trace; ``"auto"`` uses dense for graphs up to 2048 vertices.
    """
    if depth < 2:
        raise ValueError(
            "wis needs depth >= 2; use one_wis for the degree-based variant, "
            "or walk_index with length 0 for boundary sizes"
        )
    _check_common(g, n_remove, batch_size, tie_break)
    if method == "auto":
        method = "dense" if g.num_vertices <= _DENSE_MAX_VERTICES else "generic"
    if method == "dense":
        select = _dense_selector(depth)
    elif method == "generic":
        queries = singleton_queries(g.num_vertices, depth - 1)

        def select(work, take, tb):
            return _generic_pass(work, queries, lambda s: s.sorted_view, take, tb, threads)

    else:
        raise ValueError(f"unknown method {method!r}")
    params = {"depth": depth, "batch_size": batch_size}
    return _greedy(g, select, n_remove, batch_size, tie_break, "wis", params)


def _generic_pass(
    work: EditableGraph,
    queries: Sequence[WalkIndexQuery],
    key: Callable[[ScoreTuple], Any],
    take: int,
    tie_break: str,
    threads: int | None,
) -> list[tuple[int, Score, int]]:
    ids = work.edge_ids()
    edges = [tuple(e) for e in work.base.edges[ids].tolist()]
    scores = edge_removal_scores(work, queries, edges, threads=threads)
    return _rank_python(ids.tolist(), [scores[e] for e in edges], key, take, tie_break)


def _dense_selector(depth: int) -> PassFn:
    def select(work: EditableGraph, take: int, tie_break: str):
        return _dense_pass(work, depth, take, tie_break)

    return select


def _dense_scores(work: EditableGraph, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Score matrix (candidates x vertices) for every present edge, plus the edge ids."""
    n = work.num_vertices
    ids = work.edge_ids()
    a = adjacency_matrix(work)
    deg = a.sum(axis=1)
    bits = depth * math.log2(max(int(deg.max()) if n else 1, 1))
    if bits < _FLOAT_EXACT_BITS:
        dtype = np.float64
    elif bits < _INT64_EXACT_BITS:
        dtype = np.int64
    else:
        dtype = object
    a = a.astype(dtype)
    lo, hi = depth // 2, depth - depth // 2
    ends = work.base.edges[ids]
    out = np.empty((len(ids), n), dtype=object if dtype is object else np.int64)
    chunk = max(1, _DENSE_CHUNK_BYTES // max(8 * n * n * 4, 1))
    for start in range(0, len(ids), chunk):
        u = ends[start : start + chunk, 0]
        v = ends[start : start + chunk, 1]
        k = len(u)
        b = np.broadcast_to(a, (k, n, n)).copy()
        rows = np.arange(k)
        b[rows, u, v] = 0
        b[rows, v, u] = 0
        p = _stack_power(b, lo)
        q = p if hi == lo else _stack_power(b, hi)
        # B is symmetric, so diag(B^lo B^hi)_t = sum_j P[t, j] Q[t, j]
        diag = (p * q).sum(axis=2)
        d = np.broadcast_to(deg, (k, n)).copy()
        d[rows, u] -= 1
        d[rows, v] -= 1
        diag[d <= 1] = 0
        out[start : start + k] = diag if dtype is object else diag.astype(np.int64)
    return out, ids


def _stack_power(b: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return b
    if b.dtype == object:
        result = b
        for _ in range(k - 1):
            result = np.matmul(result, b)
        return result
    return np.linalg.matrix_power(b, k)


def _dense_pass(work: EditableGraph, depth: int, take: int, tie_break: str) -> list[tuple[int, Score, int]]:
    scores, ids = _dense_scores(work, depth)
    ordered = np.sort(scores, axis=1)
    if ordered.dtype == object:
        rows = [tuple(int(x) for x in r) for r in ordered]
        picked = _rank_python(list(range(len(ids))), rows, lambda s: s, take, tie_break)
        return [(int(ids[i]), ScoreTuple(scores[i]), ties) for i, _, ties in picked]
    pos = np.arange(len(ids))
    tie_key = pos if tie_break == "smallest" else -pos
    keys = [tie_key] + [-ordered[:, c] for c in range(ordered.shape[1] - 1, -1, -1)]
    order = np.lexsort(keys) if ordered.shape[1] else pos
    out = []
    for i in order[:take].tolist():
        ties = int((ordered == ordered[i]).all(axis=1).sum())
        out.append((int(ids[i]), ScoreTuple(scores[i].tolist()), ties))
    return out


# -- 1-WIS -----------------------------------------------------------------------


def one_wis(g: Graph, n_remove: int, tie_break: str = "smallest") -> RemovalTrace:
    """Degree-based sparsification: repeatedly remove the edge maximizing ``(deg_min, deg_max)``.

    Degrees count the self-loop. A lazily invalidated heap keeps each step
    proportional to the degrees of the two endpoints (times a log factor).
    """
    _check_common(g, n_remove, 1, tie_break)
    n, m = g.num_vertices, g.num_edges
    deg = np.diff(g._out_csr().indptr).tolist()
    eu = g.edges[:, 0].tolist()
    ev = g.edges[:, 1].tolist()
    sign = 1 if tie_break == "smallest" else -1
    present = [True] * m
    stamp = [0] * m
    counts: Counter[tuple[int, int]] = Counter()

    def key(i: int) -> tuple[int, int]:
        a, b = deg[eu[i]], deg[ev[i]]
        return (a, b) if a <= b else (b, a)

    heap = []
    current: list[tuple[int, int]] = []
    for i in range(m):
        k = key(i)
        current.append(k)
        counts[k] += 1
        heap.append((-k[0], -k[1], sign * eu[i], sign * ev[i], i, 0))
    heapq.heapify(heap)

    csr = g._out_csr()
    indptr, entry_edge = csr.indptr, csr.entry_edge
    removals: list[Removal] = []
    while len(removals) < n_remove and heap:
        _, _, _, _, i, s = heapq.heappop(heap)
        if not present[i] or s != stamp[i]:
            continue
        k = current[i]
        removals.append(Removal(len(removals), (eu[i], ev[i]), k, len(removals), counts[k]))
        present[i] = False
        counts[k] -= 1
        u, v = eu[i], ev[i]
        deg[u] -= 1
        deg[v] -= 1
        touched = set(entry_edge[indptr[u] : indptr[u + 1]].tolist())
        touched.update(entry_edge[indptr[v] : indptr[v + 1]].tolist())
        for j in sorted(touched):
            if j < 0 or not present[j]:
                continue
            counts[current[j]] -= 1
            k = key(j)
            current[j] = k
            counts[k] += 1
            stamp[j] += 1
            heapq.heappush(heap, (-k[0], -k[1], sign * eu[j], sign * ev[j], j, stamp[j]))

    keep = np.array(present, dtype=bool)
    types = None if g.edge_types is None else g.edge_types[keep]
    final = Graph(n, g.edges[keep], g.directed, types)
    return RemovalTrace(
        algorithm="1-wis",
        params={},
        tie_break=tie_break,
        removals=removals,
        final_graph=final,
        requested=n_remove,
        exhausted=len(removals) < n_remove,
        input_fingerprint=g.fingerprint(),
    )


# -- GWIS ------------------------------------------------------------------------


@dataclass(frozen=True)
class GwisConfig:
    """Partitions whose walk indices general walk index sparsification preserves.

    Score tuples list the graph-partition entries first, then the
    vertex-partition entries, in the given order.
    """

    depth: int
    graph_partitions: tuple[frozenset[int], ...] = ()
    vertex_partitions: tuple[tuple[frozenset[int], int], ...] = ()
    argmax_order: str = "sorted-lexicographic"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        object.__setattr__(self, "graph_partitions", tuple(frozenset(int(v) for v in p) for p in self.graph_partitions))
        object.__setattr__(
            self,
            "vertex_partitions",
            tuple((frozenset(int(v) for v in p), int(t)) for p, t in self.vertex_partitions),
        )
        if not self.graph_partitions and not self.vertex_partitions:
            raise ValueError("at least one graph or vertex partition is required")
        if self.argmax_order not in ARGMAX_ORDERS:
            raise ValueError(f"argmax_order must be one of {ARGMAX_ORDERS}")

    def queries(self) -> list[WalkIndexQuery]:
        length = self.depth - 1
        qs = [WalkIndexQuery.graph(length, p) for p in self.graph_partitions]
        qs += [WalkIndexQuery.vertex(length, p, t) for p, t in self.vertex_partitions]
        return qs

    def key(self, s: ScoreTuple):
        if self.argmax_order == "sorted-lexicographic":
            return s.sorted_view
        agg = {"sum": sum, "min": min, "max": max}[self.argmax_order](s.entries)
        return (agg, s.sorted_view)

    def to_dict(self) -> dict[str, Any]:
        return {
            "depth": self.depth,
            "graph_partitions": [sorted(p) for p in self.graph_partitions],
            "vertex_partitions": [[sorted(p), t] for p, t in self.vertex_partitions],
            "argmax_order": self.argmax_order,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any], depth: int | None = None) -> "GwisConfig":
        known = {"depth", "graph_partitions", "vertex_partitions", "argmax_order"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown GWIS config keys: {sorted(extra)}")
        d = data.get("depth", depth)
        if d is None:
            raise ValueError("GWIS config needs a depth")
        vparts = []
        for item in data.get("vertex_partitions", []):
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise ValueError("each vertex partition must be a [vertex list, target] pair")
            vparts.append((item[0], item[1]))
        return cls(
            depth=int(d),
            graph_partitions=tuple(data.get("graph_partitions", [])),
            vertex_partitions=tuple(vparts),
            argmax_order=data.get("argmax_order", "sorted-lexicographic"),
        )


def gwis(
    g: Graph,
    cfg: GwisConfig,
    n_remove: int,
    batch_size: int = 1,
    tie_break: str = "smallest",
    threads: int | None = None,
) -> RemovalTrace:
    """General walk index sparsification over the partitions in ``cfg``."""
    _check_common(g, n_remove, batch_size, tie_break)
    queries = cfg.queries()
    for q in queries:
        q.validate(g)

    def select(work, take, tb):
        return _generic_pass(work, queries, cfg.key, take, tb, threads)

    params = {"batch_size": batch_size, **cfg.to_dict()}
    return _greedy(g, select, n_remove, batch_size, tie_break, "gwis", params)


# -- random baseline -------------------------------------------------------------


def random_sparsify(g: Graph, n_remove: int, seed: int) -> RemovalTrace:
    """Remove ``n_remove`` distinct edges uniformly at random without replacement."""
    if n_remove < 0:
        raise ValueError("number of removals must be nonnegative")
    order = np.random.default_rng(seed).permutation(g.num_edges)[:n_remove]
    removals = [Removal(i, tuple(g.edges[idx].tolist()), None, 0) for i, idx in enumerate(order.tolist())]
    keep = np.ones(g.num_edges, dtype=bool)
    keep[order] = False
    types = None if g.edge_types is None else g.edge_types[keep]
    return RemovalTrace(
        algorithm="random",
        params={"seed": int(seed)},
        tie_break="none",
        removals=removals,
        final_graph=Graph(g.num_vertices, g.edges[keep], g.directed, types),
        requested=n_remove,
        exhausted=len(removals) < n_remove,
        input_fingerprint=g.fingerprint(),
    )
