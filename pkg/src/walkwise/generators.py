"""Seeded random graphs and small named fixtures."""

from __future__ import annotations

import numpy as np

from .graph import Graph, build_graph


def erdos_renyi(
    n: int,
    p: float,
    seed: int | np.random.Generator,
    directed: bool = False,
    num_edge_types: int = 1,
) -> Graph:
    """G(n, p): each non-self-loop pair (ordered pair when directed) is present with probability ``p``.

    With ``num_edge_types > 1`` (directed only) every arc gets a uniform type id.
    """
    rng = np.random.default_rng(seed)
    if directed:
        u, v = np.nonzero(~np.eye(n, dtype=bool))
    else:
        u, v = np.triu_indices(n, k=1)
    keep = rng.random(len(u)) < p
    edges = np.stack([u[keep], v[keep]], axis=1)
    types = None
    if directed and num_edge_types > 1:
        types = rng.integers(0, num_edge_types, size=len(edges))
    return build_graph(edges, n, directed=directed, edge_types=types)


def gnm(n: int, m: int, seed: int | np.random.Generator) -> Graph:
    """Undirected graph with exactly ``m`` distinct edges drawn uniformly by rejection.

    Vectorized so that ``n = 10**5, m = 10**6`` builds in well under a second.
    """
    max_edges = n * (n - 1) // 2
    if m > max_edges:
        raise ValueError(f"cannot place {m} edges on {n} vertices")
    rng = np.random.default_rng(seed)
    keys = np.zeros(0, dtype=np.int64)
    while len(keys) < m:
        need = m - len(keys)
        draw = int(need * 1.1) + 16
        u = rng.integers(0, n, size=draw)
        v = rng.integers(0, n, size=draw)
        ok = u != v
        lo, hi = np.minimum(u[ok], v[ok]), np.maximum(u[ok], v[ok])
        fresh = np.unique(lo * n + hi)
        keys = np.union1d(keys, fresh)
    if len(keys) > m:
        keys = rng.choice(keys, size=m, replace=False)
    keys.sort()
    return build_graph(np.stack([keys // n, keys % n], axis=1), n)


def path_graph(n: int) -> Graph:
    return build_graph([(i, i + 1) for i in range(n - 1)], n)


def cycle_graph(n: int) -> Graph:
    return build_graph([(i, (i + 1) % n) for i in range(n)], n)


def complete_graph(n: int) -> Graph:
    return build_graph([(i, j) for i in range(n) for j in range(i + 1, n)], n)


def star_graph(num_leaves: int) -> Graph:
    """Center 0 joined to leaves ``1..num_leaves``."""
    return build_graph([(0, j) for j in range(1, num_leaves + 1)], num_leaves + 1)


def two_triangles(bridge: bool = False) -> Graph:
    """Triangles on {0,1,2} and {3,4,5}, optionally joined by the edge {2,3}."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]
    if bridge:
        edges.append((2, 3))
    return build_graph(edges, 6)


def relabel(g: Graph, perm: np.ndarray | list[int]) -> Graph:
    """Graph with vertex ``i`` renamed to ``perm[i]``."""
    perm = np.asarray(perm, dtype=np.int64)
    edges = perm[g.edges] if g.num_edges else g.edges
    return build_graph(edges, g.num_vertices, directed=g.directed, edge_types=g.edge_types)
