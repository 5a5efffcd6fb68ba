"""Admissible subsets of a partition boundary.

A pair ``I' <= I``, ``J' <= I^c`` qualifies when every shared neighbor ``k`` of
``I'`` and ``J'`` has exactly one neighbor in each of them (on directed graphs:
``k`` is an out-neighbor of both and has exactly one in-neighbor in each). The
admissible subset it yields is the set of those shared neighbors.
"""

from __future__ import annotations

from collections.abc import Iterable

import numpy as np

from ..errors import BudgetExceededError, GraphError
from ..graph import AnyGraph, neighbors

DEFAULT_MAX_VERTICES = 16


def _subset_tables(members: list[int], nbr: list[int]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """For every subset of ``members`` (bit k = members[k]): vertex mask, covered set, covered-once set."""
    size = 1 << len(members)
    vmask = np.zeros(size, dtype=np.int64)
    once = np.zeros(size, dtype=np.int64)
    many = np.zeros(size, dtype=np.int64)
    for s in range(1, size):
        low = s & -s
        k = low.bit_length() - 1
        prev = s ^ low
        nb = nbr[members[k]]
        vmask[s] = vmask[prev] | (1 << members[k])
        many[s] = many[prev] | (once[prev] & nb)
        once[s] = (once[prev] | nb) & ~many[s]
    return vmask, once | many, once


def _bits(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def admissible_pairs(
    g: AnyGraph,
    subset: Iterable[int],
    directed: bool | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> dict[frozenset[int], tuple[frozenset[int], frozenset[int]]]:
    """Map each admissible subset to one ``(I', J')`` pair producing it.

    The recorded pair is the first valid one in enumeration order (``I'`` as
    bitmask, then ``J'``), so results are deterministic.
    """
    if directed is None:
        directed = g.directed
    if directed != g.directed:
        raise GraphError("directed flag does not match the graph")
    n = g.num_vertices
    if n > max_vertices:
        raise BudgetExceededError(f"admissible-subset enumeration is limited to {max_vertices} vertices, graph has {n}")
    inside = sorted(g.vertex_set(subset))
    outside = sorted(set(range(n)) - set(inside))
    direction = "out" if directed else "undirected"
    nbr = [0] * n
    for i in range(n):
        for j in neighbors(g, i, direction):
            nbr[i] |= 1 << j
    vi, cover_i, once_i = _subset_tables(inside, nbr)
    vj, cover_j, once_j = _subset_tables(outside, nbr)
    shared = cover_i[:, None] & cover_j[None, :]
    ok = ((shared & ~once_i[:, None]) == 0) & ((shared & ~once_j[None, :]) == 0)
    result: dict[frozenset[int], tuple[frozenset[int], frozenset[int]]] = {}
    for a, b in zip(*np.nonzero(ok)):
        c = _bits(int(shared[a, b]))
        if c not in result:
            result[c] = (_bits(int(vi[a])), _bits(int(vj[b])))
    return dict(sorted(result.items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))))


def admissible_subsets(
    g: AnyGraph,
    subset: Iterable[int],
    directed: bool | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> list[frozenset[int]]:
    """All admissible subsets of the boundary of ``subset``, smallest first. Always includes the empty set."""
    return list(admissible_pairs(g, subset, directed, max_vertices))


def has_no_repeating_shared_neighbors(g: AnyGraph, left: Iterable[int], right: Iterable[int]) -> bool:
    """Direct check of the pair condition from explicit neighbor sets."""
    left, right = g.vertex_set(left), g.vertex_set(right)
    out_dir = "out" if g.directed else "undirected"
    in_dir = "in" if g.directed else "undirected"
    nl = set().union(*(neighbors(g, i, out_dir) for i in left)) if left else set()
    nr = set().union(*(neighbors(g, j, out_dir) for j in right)) if right else set()
    for k in nl & nr:
        incoming = neighbors(g, k, in_dir)
        if len(incoming & left) != 1 or len(incoming & right) != 1:
            return False
    return True
