"""Partition walk indices and per-edge removal scores."""

from __future__ import annotations

import functools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ._parallel import chunked_map
from .errors import GraphError
from .graph import AnyGraph, Edge, EditableGraph, _boundary_mask, walk_vector


@dataclass(frozen=True)
class WalkIndexQuery:
    """Walk index of the partition ``(subset, complement)``.

    ``length`` is the walk length (one less than the network depth). With a
    ``target`` only walks ending at that vertex are counted (vertex prediction);
    otherwise walks may end anywhere (graph prediction).
    """

    length: int
    subset: frozenset[int]
    target: int | None = None

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("walk length must be nonnegative")
        object.__setattr__(self, "subset", frozenset(int(v) for v in self.subset))
        if self.target is not None:
            object.__setattr__(self, "target", int(self.target))

    @classmethod
    def graph(cls, length: int, subset: Iterable[int]) -> "WalkIndexQuery":
        return cls(length, frozenset(subset))

    @classmethod
    def vertex(cls, length: int, subset: Iterable[int], target: int) -> "WalkIndexQuery":
        return cls(length, frozenset(subset), target)

    @property
    def kind(self) -> str:
        return "graph" if self.target is None else "vertex"

    def validate(self, g: AnyGraph) -> None:
        g.vertex_set(self.subset)
        if self.target is not None and not 0 <= self.target < g.num_vertices:
            raise GraphError(f"target {self.target} out of range for graph with {g.num_vertices} vertices")


def singleton_queries(num_vertices: int, length: int) -> list[WalkIndexQuery]:
    """Vertex-prediction queries ``({t}, t)`` for every vertex, as scored by WIS."""
    return [WalkIndexQuery.vertex(length, (t,), t) for t in range(num_vertices)]


@functools.total_ordering
class ScoreTuple:
    """Walk indices of the tracked partitions after a candidate removal.

    ``entries`` keep query order. Comparison is lexicographic over the
    ascending ``sorted_view``.
    """

    __slots__ = ("entries", "sorted_view")

    def __init__(self, entries: Iterable[int]):
        self.entries = tuple(int(x) for x in entries)
        self.sorted_view = tuple(sorted(self.entries))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScoreTuple):
            return NotImplemented
        return self.sorted_view == other.sorted_view

    def __lt__(self, other: "ScoreTuple") -> bool:
        return self.sorted_view < other.sorted_view

    def __hash__(self) -> int:
        return hash(self.sorted_view)

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        return f"ScoreTuple({list(self.entries)})"

    def summary(self) -> str:
        if not self.entries:
            return "empty"
        return f"min={self.sorted_view[0]},sum={sum(self.entries)}"


class _Evaluator:
    """Walk-index evaluation on one graph state, sharing walk vectors between queries."""

    def __init__(self, g: AnyGraph):
        self.g = g
        self._walks: dict[tuple[int, int | None], np.ndarray] = {}

    def walks(self, length: int, target: int | None) -> np.ndarray:
        key = (length, target)
        w = self._walks.get(key)
        if w is None:
            dst = range(self.g.num_vertices) if target is None else (target,)
            w = walk_vector(self.g, length, dst)
            self._walks[key] = w
        return w

    def __call__(self, q: WalkIndexQuery) -> int:
        inside = np.zeros(self.g.num_vertices, dtype=bool)
        if q.subset:
            inside[list(q.subset)] = True
        c = _boundary_mask(self.g, inside)
        if not c.any():
            return 0
        w = self.walks(q.length, q.target)[c]
        return int(sum(int(x) for x in w)) if w.dtype == object else int(w.sum())


def walk_index(g: AnyGraph, q: WalkIndexQuery) -> int:
    """Count length-``q.length`` walks from the boundary of ``q.subset`` (into ``q.target`` if set)."""
    q.validate(g)
    return _Evaluator(g)(q)


def _candidate_ids(g: AnyGraph, candidates: Iterable[Sequence[int]]) -> tuple[EditableGraph, list[Edge], list[int]]:
    work = g.copy() if isinstance(g, EditableGraph) else EditableGraph(g)
    base = work.base
    out: dict[int, Edge] = {}
    for e in candidates:
        u, v = base.canonical_edge(e)
        if u == v:
            raise GraphError(f"self-loop {(u, v)} cannot be a removal candidate")
        if not work.has_edge((u, v)):
            raise GraphError(f"candidate edge {(u, v)} is not in the graph")
        out[base.edge_id((u, v))] = (u, v)
    ids = sorted(out)
    return work, [out[i] for i in ids], ids


def edge_removal_scores(
    g: AnyGraph,
    queries: Sequence[WalkIndexQuery],
    candidate_edges: Iterable[Sequence[int]],
    threads: int | None = None,
) -> dict[Edge, ScoreTuple]:
    """Score each candidate by the query walk indices of the graph without that edge.

    ``g`` is never modified. The returned mapping iterates in canonical
    (sorted endpoint pair) edge order regardless of input order or threading.
    """
    for q in queries:
        q.validate(g)
    work, edges, ids = _candidate_ids(g, candidate_edges)

    def score_chunk(chunk: Sequence[int]) -> list[ScoreTuple]:
        local = work.copy()
        out = []
        for idx in chunk:
            local.remove_edge_id(idx)
            ev = _Evaluator(local)
            out.append(ScoreTuple(ev(q) for q in queries))
            local.undo()
        return out

    scores = chunked_map(score_chunk, ids, threads)
    return dict(zip(edges, scores))
