"""Walk-count bounds on the separation rank of product-aggregation networks.

Exponents are in units of ``log(hidden_dim)``: the separation rank with
respect to ``I`` is at most ``hidden_dim ** upper_exponent``. Lower bounds are
natural logarithms.
"""

from __future__ import annotations

import json
import math
from collections.abc import Iterable
from dataclasses import asdict, dataclass, field
from typing import Any

from ..errors import GraphError
from ..graph import AnyGraph, boundary, count_walks
from .admissible import DEFAULT_MAX_VERTICES, admissible_pairs
from .gnn import MODES


def multiset_coefficient(d: int, p: int) -> int:
    """Number of size-``p`` multisets over ``d`` symbols, ``binom(d + p - 1, p)``."""
    if d < 1 or p < 0:
        raise ValueError("expects d >= 1 and p >= 0")
    return math.comb(d + p - 1, p)


def _targets(g: AnyGraph, mode: str, target: int | None) -> range | tuple[int]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "graph":
        return range(g.num_vertices)
    if target is None:
        raise ValueError("vertex mode needs a target")
    if not 0 <= int(target) < g.num_vertices:
        raise GraphError(f"target {target} out of range")
    return (int(target),)


def upper_exponent(
    g: AnyGraph,
    subset: Iterable[int],
    depth: int,
    mode: str = "graph",
    target: int | None = None,
    directed: bool | None = None,
) -> int:
    """Integer ``e`` with separation rank at most ``hidden_dim ** e``.

    Undirected: ``4 * rho + 1`` (graph) or ``4 * rho`` (vertex) with ``rho`` the
    length ``depth - 1`` walks from the boundary. Directed: the sum of walk
    counts of lengths ``0..depth-1`` from the directed boundary, plus one for
    graph prediction.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    if directed is None:
        directed = g.directed
    if g.directed and not directed:
        raise GraphError("a directed graph needs the directed bound")
    members = g.vertex_set(subset)
    dst = _targets(g, mode, target)
    c = boundary(g, members)
    extra = 1 if mode == "graph" else 0
    if directed:
        return sum(count_walks(g, depth - l, c, dst) for l in range(1, depth + 1)) + extra
    return 4 * count_walks(g, depth - 1, c, dst) + extra


def lower_bound_value(walks: int, depth: int, dim: int, mode: str) -> float:
    """Natural-log lower bound contributed by an admissible subset with ``walks`` walks. Zero when ``walks == 0``."""
    if walks == 0:
        return 0.0
    if depth == 1:
        # graph: log(dim ** (1 / walks)) * walks; vertex: log(dim) * walks, where walks is 1
        return math.log(dim) if mode == "graph" else math.log(dim) * walks
    return walks * math.log((dim - 1) / walks + 1)


def certified_rank(walks: int, depth: int, dim: int) -> int:
    """Grid rank achieved by the explicit weight and template construction."""
    if walks == 0:
        return 1
    if depth == 1:
        return dim
    return multiset_coefficient(dim, walks)


@dataclass
class BoundReport:
    """Upper and lower separation-rank bounds for one partition."""

    graph_fingerprint: str
    subset: list[int]
    depth: int
    input_dim: int
    hidden_dim: int
    mode: str
    target: int | None
    directed: bool
    boundary: list[int]
    boundary_walks: int
    upper_exponent: int
    upper_log: float
    lower_log: float
    lower_walks: int
    witness_subset: list[int]
    witness_pair: tuple[list[int], list[int]]
    certified_rank: int
    num_admissible: int
    observed_grid_rank: int | None = None
    witness_rank: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def min_dim(self) -> int:
        return min(self.input_dim, self.hidden_dim)

    def rank_within_upper(self, rank: int) -> bool:
        """Exact check ``rank <= hidden_dim ** upper_exponent``."""
        return rank <= self.hidden_dim**self.upper_exponent

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["witness_pair"] = [list(p) for p in self.witness_pair]
        return d

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)


def bound_report(
    g: AnyGraph,
    subset: Iterable[int],
    depth: int,
    input_dim: int,
    hidden_dim: int,
    mode: str = "graph",
    target: int | None = None,
    directed: bool | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> BoundReport:
    """Upper bound from the boundary walk count and lower bound maximized over admissible subsets.

    The lower-bound value is nondecreasing in the walk count of the admissible
    subset, so the maximizer is the subset with the most walks (ties go to the
    first subset in enumeration order).
    """
    if input_dim < 1 or hidden_dim < 1:
        raise ValueError("widths must be positive")
    if directed is None:
        directed = g.directed
    members = g.vertex_set(subset)
    dst = _targets(g, mode, target)
    c_i = boundary(g, members)
    up = upper_exponent(g, members, depth, mode, target, directed)
    pairs = admissible_pairs(g, members, g.directed, max_vertices)
    dim = min(input_dim, hidden_dim)
    best, best_walks = frozenset(), 0
    for c in pairs:
        w = count_walks(g, depth - 1, c, dst)
        if w > best_walks:
            best, best_walks = c, w
    pair = pairs[best]
    notes = []
    if best_walks == 0:
        notes.append("no admissible subset has a positive walk count; lower bound is zero")
    return BoundReport(
        graph_fingerprint=g.snapshot().fingerprint() if hasattr(g, "snapshot") else g.fingerprint(),
        subset=sorted(members),
        depth=depth,
        input_dim=input_dim,
        hidden_dim=hidden_dim,
        mode=mode,
        target=None if mode == "graph" else int(target),
        directed=bool(directed),
        boundary=sorted(c_i),
        boundary_walks=count_walks(g, depth - 1, c_i, dst),
        upper_exponent=up,
        upper_log=up * math.log(hidden_dim),
        lower_log=lower_bound_value(best_walks, depth, dim, mode),
        lower_walks=best_walks,
        witness_subset=sorted(best),
        witness_pair=(sorted(pair[0]), sorted(pair[1])),
        certified_rank=certified_rank(best_walks, depth, dim),
        num_admissible=len(pairs),
        notes=notes,
    )
