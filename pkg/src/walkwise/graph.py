"""Graphs with implicit self-loops, neighborhoods, partition boundaries and walk counts.

Every vertex carries a self-loop that is never stored in user data and can never
be removed. Adjacency is held in compressed sparse row form, one row per vertex,
with the self-loop included in the row. For directed graphs the out-rows hold
``N_out(i)`` and a second structure holds the in-rows ``N_in(i)``.

Walk counts are exact Python integers. Vector propagation runs in ``int64``
whenever the largest reachable count provably fits, and falls back to object
arrays of Python integers otherwise.
"""

from __future__ import annotations

import hashlib
import math
from collections.abc import Iterable, Mapping, Sequence
from typing import Union

import numpy as np

from .errors import GraphError

Edge = tuple[int, int]
VertexSet = frozenset

# Counts are propagated in int64 only while n * maxdeg**l stays below 2**62.
_INT64_SAFE_BITS = 62
DENSE_POWER_THRESHOLD = 4096


class _CSR:
    __slots__ = ("indptr", "indices", "entry_edge")

    def __init__(self, indptr: np.ndarray, indices: np.ndarray, entry_edge: np.ndarray):
        self.indptr = indptr
        self.indices = indices
        self.entry_edge = entry_edge


def _build_csr(n: int, src: np.ndarray, dst: np.ndarray) -> _CSR:
    m = len(src)
    loops = np.arange(n, dtype=np.int64)
    rows = np.concatenate([loops, src])
    cols = np.concatenate([loops, dst])
    eids = np.concatenate([np.full(n, -1, dtype=np.int64), np.arange(m, dtype=np.int64)])
    order = np.lexsort((cols, rows))
    counts = np.bincount(rows, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return _CSR(indptr, cols[order], eids[order])


def _safe_dtype(num_vertices: int, max_degree: int, length: int):
    if num_vertices == 0 or max_degree <= 1:
        return np.int64
    bits = math.log2(max(num_vertices, 1)) + length * math.log2(max_degree)
    return np.int64 if bits < _INT64_SAFE_BITS else object


class _AdjacencyOps:
    """Shared neighborhood and propagation logic over (possibly masked) CSR rows."""

    num_vertices: int
    directed: bool

    def _out_csr(self) -> _CSR:
        raise NotImplementedError

    def _in_csr(self) -> _CSR:
        raise NotImplementedError

    def _out_mask(self) -> np.ndarray | None:
        return None

    def _in_mask(self) -> np.ndarray | None:
        return None

    @staticmethod
    def _row_sum(csr: _CSR, mask: np.ndarray | None, x: np.ndarray) -> np.ndarray:
        vals = x[csr.indices]
        if mask is not None:
            vals = np.where(mask, vals, 0)
            if x.dtype == object:
                vals = vals.astype(object)
        return np.add.reduceat(vals, csr.indptr[:-1])

    def _out_matvec(self, x: np.ndarray) -> np.ndarray:
        """y_i = sum of x_j over j in N_out(i): multiplication by the adjacency matrix."""
        if self.num_vertices == 0:
            return x.copy()
        return self._row_sum(self._out_csr(), self._out_mask(), x)

    def _in_matvec(self, x: np.ndarray) -> np.ndarray:
        """y_i = sum of x_j over j in N_in(i): multiplication by the transpose."""
        if self.num_vertices == 0:
            return x.copy()
        return self._row_sum(self._in_csr(), self._in_mask(), x)

    def _row(self, csr: _CSR, mask: np.ndarray | None, i: int) -> np.ndarray:
        lo, hi = csr.indptr[i], csr.indptr[i + 1]
        row = csr.indices[lo:hi]
        if mask is not None:
            row = row[mask[lo:hi]]
        return row

    def degrees(self) -> np.ndarray:
        """|N(i)| (undirected) or |N_out(i)| (directed), self-loop included."""
        csr, mask = self._out_csr(), self._out_mask()
        if mask is None:
            return np.diff(csr.indptr)
        if self.num_vertices == 0:
            return np.zeros(0, dtype=np.int64)
        return np.add.reduceat(mask.astype(np.int64), csr.indptr[:-1])

    def in_degrees(self) -> np.ndarray:
        csr, mask = self._in_csr(), self._in_mask()
        if mask is None:
            return np.diff(csr.indptr)
        if self.num_vertices == 0:
            return np.zeros(0, dtype=np.int64)
        return np.add.reduceat(mask.astype(np.int64), csr.indptr[:-1])

    def max_degree(self) -> int:
        if self.num_vertices == 0:
            return 0
        return int(max(self.degrees().max(), self.in_degrees().max()))

    def vertex_set(self, members: Iterable[int]) -> frozenset[int]:
        """Validate ``members`` against this graph and return them as a frozenset."""
        out = frozenset(int(v) for v in members)
        for v in out:
            if not 0 <= v < self.num_vertices:
                raise GraphError(f"vertex {v} out of range for graph with {self.num_vertices} vertices")
        return out

    def complement(self, members: Iterable[int]) -> frozenset[int]:
        return frozenset(range(self.num_vertices)) - self.vertex_set(members)

    def _indicator(self, members: Iterable[int], dtype=np.int64) -> np.ndarray:
        x = np.zeros(self.num_vertices, dtype=dtype)
        idx = list(members)
        if idx:
            x[idx] = 1
        return x


class Graph(_AdjacencyOps):
    """Immutable graph on vertices ``0..n-1`` with a self-loop at every vertex.

    Undirected edges are stored once as ``(u, v)`` with ``u < v``; directed arcs
    as ordered pairs. Edges are kept sorted lexicographically. Construct
    instances with :func:`build_graph`; the constructor trusts its input.
    """

    __slots__ = (
        "num_vertices",
        "directed",
        "_edges",
        "_types",
        "_keys",
        "_out",
        "_in",
        "_hash",
    )

    def __init__(
        self,
        num_vertices: int,
        edges: np.ndarray,
        directed: bool = False,
        edge_types: np.ndarray | None = None,
    ):
        self.num_vertices = int(num_vertices)
        self.directed = bool(directed)
        self._edges = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
        self._edges.setflags(write=False)
        self._types = None
        if edge_types is not None:
            self._types = np.ascontiguousarray(edge_types, dtype=np.int64)
            self._types.setflags(write=False)
        self._keys = self._edges[:, 0] * max(self.num_vertices, 1) + self._edges[:, 1]
        self._out: _CSR | None = None
        self._in: _CSR | None = None
        self._hash: int | None = None

    # -- structure ---------------------------------------------------------

    def _out_csr(self) -> _CSR:
        if self._out is None:
            u, v = self._edges[:, 0], self._edges[:, 1]
            if self.directed:
                self._out = _build_csr(self.num_vertices, u, v)
            else:
                self._out = _build_csr(self.num_vertices, np.concatenate([u, v]), np.concatenate([v, u]))
                m = len(u)
                ee = self._out.entry_edge
                ee[ee >= m] -= m
        return self._out

    def _in_csr(self) -> _CSR:
        if not self.directed:
            return self._out_csr()
        if self._in is None:
            self._in = _build_csr(self.num_vertices, self._edges[:, 1], self._edges[:, 0])
        return self._in

    @property
    def edges(self) -> np.ndarray:
        """Read-only ``(m, 2)`` array of canonical edges, self-loops excluded."""
        return self._edges

    @property
    def edge_types(self) -> np.ndarray | None:
        return self._types

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    @property
    def num_edge_types(self) -> int:
        if self._types is None or len(self._types) == 0:
            return 1
        return int(self._types.max()) + 1

    def edge_list(self) -> list[Edge]:
        return [tuple(e) for e in self._edges.tolist()]

    def canonical_edge(self, e: Sequence[int]) -> Edge:
        u, v = int(e[0]), int(e[1])
        if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
            raise GraphError(f"edge {(u, v)} has an endpoint out of range")
        if not self.directed and u > v:
            u, v = v, u
        return (u, v)

    def edge_id(self, e: Sequence[int]) -> int:
        """Index of ``e`` in :attr:`edges`; raises for self-loops and absent edges."""
        u, v = self.canonical_edge(e)
        if u == v:
            raise GraphError(f"self-loop {(u, v)} is implicit and not an edge of the edge set")
        key = u * max(self.num_vertices, 1) + v
        pos = int(np.searchsorted(self._keys, key))
        if pos >= len(self._keys) or self._keys[pos] != key:
            raise GraphError(f"edge {(u, v)} is not in the graph")
        return pos

    def has_edge(self, e: Sequence[int]) -> bool:
        u, v = self.canonical_edge(e)
        if u == v:
            return True
        key = u * max(self.num_vertices, 1) + v
        pos = int(np.searchsorted(self._keys, key))
        return pos < len(self._keys) and self._keys[pos] == key

    def edge_type(self, e: Sequence[int]) -> int:
        u, v = self.canonical_edge(e)
        if u == v or self._types is None:
            return 0
        return int(self._types[self.edge_id((u, v))])

    def neighbors(self, i: int, direction: str | None = None) -> frozenset[int]:
        return neighbors(self, i, direction)

    def remove_edge(self, e: Sequence[int]) -> "Graph":
        """Persistent removal: return a new graph without ``e``."""
        idx = self.edge_id(e)
        keep = np.ones(self.num_edges, dtype=bool)
        keep[idx] = False
        types = None if self._types is None else self._types[keep]
        return Graph(self.num_vertices, self._edges[keep], self.directed, types)

    def editable(self) -> "EditableGraph":
        return EditableGraph(self)

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.num_vertices}:{int(self.directed)}:".encode())
        h.update(self._edges.tobytes())
        if self._types is not None:
            h.update(b"types:" + self._types.tobytes())
        return h.hexdigest()[:16]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        if (self.num_vertices, self.directed, self.num_edges) != (other.num_vertices, other.directed, other.num_edges):
            return False
        if not np.array_equal(self._edges, other._edges):
            return False
        a = self._types if self._types is not None else np.zeros(self.num_edges, dtype=np.int64)
        b = other._types if other._types is not None else np.zeros(other.num_edges, dtype=np.int64)
        return bool(np.array_equal(a, b))

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.fingerprint())
        return self._hash

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, num_vertices={self.num_vertices}, num_edges={self.num_edges})"


class EditableGraph(_AdjacencyOps):
    """Undo-able in-place edge removal over a fixed base graph.

    Removal flips the CSR entries of an edge off, so each removal and each undo
    is O(1). Only edges of the base graph can be re-added. Single owner: do not
    share an instance across threads while it is being mutated; use
    :meth:`copy` to hand a private view to each worker.
    """

    def __init__(self, base: Graph):
        self.base = base
        self.num_vertices = base.num_vertices
        self.directed = base.directed
        out = base._out_csr()
        self._out_active = np.ones(len(out.indices), dtype=bool)
        self._in_active = np.ones(len(base._in_csr().indices), dtype=bool) if base.directed else self._out_active
        self._present = np.ones(base.num_edges, dtype=bool)
        self._out_pos, self._in_pos = _edge_positions(base)
        self._undo: list[int] = []

    def copy(self) -> "EditableGraph":
        new = EditableGraph.__new__(EditableGraph)
        new.base = self.base
        new.num_vertices = self.num_vertices
        new.directed = self.directed
        new._out_active = self._out_active.copy()
        new._in_active = self._in_active.copy() if self.directed else new._out_active
        new._present = self._present.copy()
        new._out_pos, new._in_pos = self._out_pos, self._in_pos
        new._undo = list(self._undo)
        return new

    def _out_csr(self) -> _CSR:
        return self.base._out_csr()

    def _in_csr(self) -> _CSR:
        return self.base._in_csr()

    def _out_mask(self) -> np.ndarray:
        return self._out_active

    def _in_mask(self) -> np.ndarray:
        return self._in_active

    @property
    def num_edges(self) -> int:
        return int(self._present.sum())

    @property
    def present(self) -> np.ndarray:
        """Boolean mask over ``base.edges``; do not mutate."""
        return self._present

    def edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self._present)

    def edge_list(self) -> list[Edge]:
        return [tuple(e) for e in self.base.edges[self._present].tolist()]

    def canonical_edge(self, e: Sequence[int]) -> Edge:
        return self.base.canonical_edge(e)

    def has_edge(self, e: Sequence[int]) -> bool:
        u, v = self.canonical_edge(e)
        if u == v:
            return True
        return self.base.has_edge((u, v)) and bool(self._present[self.base.edge_id((u, v))])

    def _set(self, idx: int, value: bool) -> None:
        self._present[idx] = value
        self._out_active[self._out_pos[idx]] = value
        if self.directed:
            self._in_active[self._in_pos[idx]] = value

    def remove_edge(self, e: Sequence[int]) -> "EditableGraph":
        idx = self.base.edge_id(e)
        if not self._present[idx]:
            raise GraphError(f"edge {self.canonical_edge(e)} is not in the graph")
        self.remove_edge_id(idx)
        return self

    def remove_edge_id(self, idx: int) -> None:
        self._set(idx, False)
        self._undo.append(idx)

    def add_edge(self, e: Sequence[int]) -> "EditableGraph":
        """Re-add a previously removed edge of the base graph."""
        idx = self.base.edge_id(e)
        if self._present[idx]:
            raise GraphError(f"edge {self.canonical_edge(e)} is already present")
        self._set(idx, True)
        # the edge is no longer pending, so undo must not re-add it
        pos = len(self._undo) - 1 - self._undo[::-1].index(idx)
        del self._undo[pos]
        return self

    def undo(self) -> Edge:
        """Re-add the most recently removed edge and return it."""
        if not self._undo:
            raise GraphError("nothing to undo")
        idx = self._undo.pop()
        self._set(idx, True)
        return tuple(self.base.edges[idx].tolist())

    def snapshot(self) -> Graph:
        types = None if self.base.edge_types is None else self.base.edge_types[self._present]
        return Graph(self.num_vertices, self.base.edges[self._present], self.directed, types)

    def neighbors(self, i: int, direction: str | None = None) -> frozenset[int]:
        return neighbors(self, i, direction)


def _edge_positions(g: Graph) -> tuple[np.ndarray, np.ndarray | None]:
    def positions(csr: _CSR, per_edge: int) -> np.ndarray:
        ent = np.flatnonzero(csr.entry_edge >= 0)
        order = np.argsort(csr.entry_edge[ent], kind="stable")
        return ent[order].reshape(g.num_edges, per_edge)

    if g.directed:
        return positions(g._out_csr(), 1), positions(g._in_csr(), 1)
    return positions(g._out_csr(), 2), None


AnyGraph = Union[Graph, EditableGraph]


# -- construction ------------------------------------------------------------


def build_graph(
    edge_list: Iterable[Sequence[int]] | np.ndarray,
    num_vertices: int,
    directed: bool = False,
    edge_types: Mapping[Edge, int] | Sequence[int] | np.ndarray | None = None,
) -> Graph:
    """Validate an edge list and build a :class:`Graph` with all self-loops.

    ``edge_types`` is either a mapping from edge to type id or a sequence aligned
    with ``edge_list``. It is only accepted in directed mode.
    """
    n = int(num_vertices)
    if n < 0:
        raise GraphError("num_vertices must be nonnegative")
    if isinstance(edge_list, np.ndarray):
        arr = edge_list.astype(np.int64, copy=False).reshape(-1, 2)
    else:
        pairs = [tuple(e) for e in edge_list]
        for e in pairs:
            if len(e) != 2:
                raise GraphError(f"edge {e!r} is not a vertex pair")
        arr = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    if edge_types is not None and not directed:
        raise GraphError("edge types are only supported for directed graphs")

    if len(arr):
        bad = (arr < 0) | (arr >= n)
        if bad.any():
            row = int(np.flatnonzero(bad.any(axis=1))[0])
            raise GraphError(f"edge {tuple(arr[row].tolist())} has an endpoint out of range for {n} vertices")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            row = int(np.flatnonzero(loops)[0])
            raise GraphError(f"explicit self-loop {tuple(arr[row].tolist())}: self-loops are implicit")

    types = None
    if edge_types is not None:
        if isinstance(edge_types, Mapping):
            types = np.array([_lookup_type(edge_types, tuple(e)) for e in arr.tolist()], dtype=np.int64)
        else:
            types = np.asarray(edge_types, dtype=np.int64).reshape(-1)
            if len(types) != len(arr):
                raise GraphError("edge_types must align with edge_list")
        if len(types) and types.min() < 0:
            raise GraphError("edge type ids must be nonnegative")

    canon = arr.copy()
    if not directed and len(canon):
        canon.sort(axis=1)
    keys = canon[:, 0] * max(n, 1) + canon[:, 1]
    order = np.argsort(keys, kind="stable")
    keys = keys[order]
    if len(keys) > 1:
        dup = np.flatnonzero(keys[1:] == keys[:-1])
        if len(dup):
            e = tuple(canon[order[dup[0]]].tolist())
            raise GraphError(f"duplicate edge {e}")
    canon = canon[order]
    if types is not None:
        types = types[order]
    return Graph(n, canon, directed, types)


def _lookup_type(mapping: Mapping[Edge, int], e: Edge) -> int:
    try:
        return int(mapping[e])
    except KeyError:
        raise GraphError(f"no edge type given for edge {e}") from None


def remove_edge(g: AnyGraph, e: Sequence[int]) -> AnyGraph:
    """Remove ``e``: a new :class:`Graph` for immutable input, in place for editable graphs."""
    return g.remove_edge(e)


# -- neighborhoods and boundaries -------------------------------------------


def _check_vertex(g: AnyGraph, i: int) -> int:
    i = int(i)
    if not 0 <= i < g.num_vertices:
        raise GraphError(f"vertex {i} out of range for graph with {g.num_vertices} vertices")
    return i


def neighbors(g: AnyGraph, i: int, direction: str | None = None) -> frozenset[int]:
    """``N(i)``, ``N_in(i)`` or ``N_out(i)``; always contains ``i``.

    ``direction`` must be ``"undirected"`` for undirected graphs and ``"in"`` or
    ``"out"`` for directed ones. ``None`` picks ``undirected``/``out``.
    """
    i = _check_vertex(g, i)
    if direction is None:
        direction = "out" if g.directed else "undirected"
    if direction == "undirected":
        if g.directed:
            raise GraphError("direction 'undirected' requested on a directed graph")
        row = g._row(g._out_csr(), g._out_mask(), i)
    elif direction in ("in", "out"):
        if not g.directed:
            raise GraphError(f"direction {direction!r} requested on an undirected graph")
        if direction == "out":
            row = g._row(g._out_csr(), g._out_mask(), i)
        else:
            row = g._row(g._in_csr(), g._in_mask(), i)
    else:
        raise GraphError(f"unknown direction {direction!r}")
    return frozenset(row.tolist())


def neighbors_of_set(g: AnyGraph, members: Iterable[int], direction: str | None = None) -> frozenset[int]:
    out: set[int] = set()
    for i in members:
        out |= neighbors(g, i, direction)
    return frozenset(out)


def _check_boundary_direction(g: AnyGraph, direction: str | None) -> None:
    if direction is None:
        return
    if direction == "undirected" and g.directed:
        raise GraphError("undirected boundary requested on a directed graph")
    if direction == "directed" and not g.directed:
        raise GraphError("directed boundary requested on an undirected graph")
    if direction not in ("undirected", "directed"):
        raise GraphError(f"unknown direction {direction!r}")


def _boundary_mask(g: AnyGraph, inside: np.ndarray) -> np.ndarray:
    # vertices of I with an in-neighbor outside, plus vertices outside with an in-neighbor in I
    from_inside = g._in_matvec(inside.astype(np.int64)) > 0
    from_outside = g._in_matvec((~inside).astype(np.int64)) > 0
    return (inside & from_outside) | (~inside & from_inside)


def boundary(g: AnyGraph, subset: Iterable[int], direction: str | None = None) -> frozenset[int]:
    """Vertices with an edge crossing the partition ``(I, I^c)``.

    Undirected: ``C_I``. Directed: vertices with an incoming edge from the other side.
    Empty for ``I = {}`` and ``I = V``.
    """
    _check_boundary_direction(g, direction)
    members = g.vertex_set(subset)
    inside = np.zeros(g.num_vertices, dtype=bool)
    if members:
        inside[list(members)] = True
    return frozenset(np.flatnonzero(_boundary_mask(g, inside)).tolist())


def shared_neighbors(g: AnyGraph, subset: Iterable[int]) -> frozenset[int]:
    """``N(I) & N(I^c)`` (``N_out`` for directed graphs), from explicit neighbor sets."""
    members = g.vertex_set(subset)
    rest = frozenset(range(g.num_vertices)) - members
    direction = "out" if g.directed else "undirected"
    return neighbors_of_set(g, members, direction) & neighbors_of_set(g, rest, direction)


# -- walks -------------------------------------------------------------------


def walk_vector(g: AnyGraph, length: int, targets: Iterable[int]) -> np.ndarray:
    """Vector whose ``i``-th entry counts length-``length`` walks from ``i`` into ``targets``."""
    if length < 0:
        raise ValueError("walk length must be nonnegative")
    dtype = _safe_dtype(g.num_vertices, g.max_degree(), length)
    x = g._indicator(targets, dtype=np.int64)
    if dtype is object:
        x = x.astype(object)
    for _ in range(length):
        x = g._out_matvec(x)
    return x


def count_walks(g: AnyGraph, length: int, sources: Iterable[int], targets: Iterable[int]) -> int:
    """Number of length-``length`` walks starting in ``sources`` and ending in ``targets``.

    Equal to ``sum((A**l)[i, j] for i in I for j in J)`` with ``A`` the 0/1
    adjacency matrix including self-loops.
    """
    if length < 0:
        raise ValueError("walk length must be nonnegative")
    src = g.vertex_set(sources)
    dst = g.vertex_set(targets)
    if not src or not dst:
        return 0
    w = walk_vector(g, length, dst)
    return int(sum(int(v) for v in w[sorted(src)].tolist())) if w.dtype == object else int(w[sorted(src)].sum())


def adjacency_matrix(g: AnyGraph, dtype=np.int64) -> np.ndarray:
    """Dense 0/1 adjacency with self-loops; ``A[i, j] = 1`` iff ``j`` in ``N_out(i)``."""
    n = g.num_vertices
    a = np.zeros((n, n), dtype=dtype)
    csr, mask = g._out_csr(), g._out_mask()
    rows = np.repeat(np.arange(n), np.diff(csr.indptr))
    cols = csr.indices
    if mask is not None:
        rows, cols = rows[mask], cols[mask]
    a[rows, cols] = 1
    return a


def adjacency_power(g: AnyGraph, length: int, method: str = "auto"):
    """Exact ``A**length`` by repeated squaring.

    ``method="dense"`` returns an ``(n, n)`` ndarray (``int64`` when overflow is
    impossible, Python integers otherwise). ``method="sparse"`` returns a list of
    row dicts ``{j: count}`` holding the nonzero entries. ``"auto"`` picks dense
    for ``n <= DENSE_POWER_THRESHOLD``.
    """
    if length < 0:
        raise ValueError("power must be nonnegative")
    if method == "auto":
        method = "dense" if g.num_vertices <= DENSE_POWER_THRESHOLD else "sparse"
    if method == "dense":
        return _dense_power(g, length)
    if method == "sparse":
        return _sparse_power(g, length)
    raise ValueError(f"unknown method {method!r}")


def _dense_power(g: AnyGraph, length: int) -> np.ndarray:
    dtype = _safe_dtype(g.num_vertices, g.max_degree(), length)
    base = adjacency_matrix(g).astype(dtype)
    result = np.eye(g.num_vertices, dtype=np.int64).astype(dtype)
    k = length
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def _sparse_rows(g: AnyGraph) -> list[dict[int, int]]:
    csr, mask = g._out_csr(), g._out_mask()
    rows = []
    for i in range(g.num_vertices):
        rows.append({int(j): 1 for j in g._row(csr, mask, i).tolist()})
    return rows


def _sparse_matmul(p: list[dict[int, int]], q: list[dict[int, int]]) -> list[dict[int, int]]:
    out = []
    for row in p:
        acc: dict[int, int] = {}
        for k, a in row.items():
            for j, b in q[k].items():
                acc[j] = acc.get(j, 0) + a * b
        out.append(acc)
    return out


def _sparse_power(g: AnyGraph, length: int) -> list[dict[int, int]]:
    base = _sparse_rows(g)
    result = [{i: 1} for i in range(g.num_vertices)]
    k = length
    while k:
        if k & 1:
            result = _sparse_matmul(result, base)
        k >>= 1
        if k:
            base = _sparse_matmul(base, base)
    return result
