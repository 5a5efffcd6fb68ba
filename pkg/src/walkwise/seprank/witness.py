"""Explicit weights and templates whose grid matricization attains the lower bound.

For depth ``L >= 2`` and an admissible subset ``C = N(I') & N(J')`` with
``rho`` walks of length ``L - 1`` (to all vertices, or to the target):

* layer 1 is a zero-padded identity, layer 2 has an all-ones first row, later
  layers keep only entry (1, 1), and the output reads coordinate 1;
* templates ``v^1..v^M`` hold the rows ``z^m`` with ``z^m_d = gamma ** q^m_d``
  for the ``M = binom(D + rho - 1, rho)`` compositions ``q^m`` of ``rho`` into
  ``D`` parts, padded with zeros, plus one all-ones template;
* the ``M x M`` block taking ``I'`` to ``v^m``, ``J'`` to ``v^n`` and every other
  vertex to the all-ones template equals ``phi_m <z^m, z^n>^rho psi_n`` with
  positive ``phi, psi``, so its rank equals ``M`` once the matrix
  ``gamma ** <q^m, q^n>`` is nonsingular.

For depth 1 the zero-padded identity with an all-ones output and standard
basis templates gives output 1 exactly when the relevant template indices
all agree, which has rank ``D`` across any partition it straddles.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Iterator
from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceededError, WitnessError
from ..graph import AnyGraph, count_walks
from .admissible import DEFAULT_MAX_VERTICES, admissible_pairs
from .bounds import _targets, multiset_coefficient
from .gnn import ProductGnn
from .grid import DEFAULT_BUDGET, TemplateSet, evaluate_assignments, grid_matricization
from .linalg import det_exact, mpq, rank_exact

MAX_GAMMA_CANDIDATES = 50


def compositions(parts: int, total: int) -> list[tuple[int, ...]]:
    """All ``q`` in ``N^parts`` with ``sum(q) == total``, lexicographically descending."""
    out = []
    for combo in itertools.combinations_with_replacement(range(parts), total):
        q = [0] * parts
        for d in combo:
            q[d] += 1
        out.append(tuple(q))
    return out


def _primes() -> Iterator[int]:
    found: list[int] = []
    k = 2
    while True:
        if all(k % p for p in found if p * p <= k):
            found.append(k)
            yield k
        k += 1


def gamma_candidates(limit: int = MAX_GAMMA_CANDIDATES) -> list:
    """``2, 3, 1/2, 5, 1/3, 7, 1/5, ...``: primes interleaved with reciprocals of the previous prime."""
    out = []
    prev = None
    for p in _primes():
        out.append(mpq(p))
        if prev is not None:
            out.append(mpq(1, prev))
        prev = p
        if len(out) >= limit:
            return out[:limit]
    return out


def configuration_matrix(configs: list[tuple[int, ...]], gamma) -> list[list]:
    """``A[m][n] = gamma ** <q^m, q^n>``."""
    return [[gamma ** sum(a * b for a, b in zip(qm, qn)) for qn in configs] for qm in configs]


def select_gamma(configs: list[tuple[int, ...]], limit: int = MAX_GAMMA_CANDIDATES):
    """First candidate making the configuration matrix nonsingular."""
    for gamma in gamma_candidates(limit):
        if det_exact(configuration_matrix(configs, gamma)) != 0:
            return gamma
    raise WitnessError(f"no gamma among the first {limit} candidates gives a nonsingular configuration matrix")


def _padded_identity(rows: int, cols: int) -> np.ndarray:
    w = np.full((rows, cols), mpq(0), dtype=object)
    for d in range(min(rows, cols)):
        w[d, d] = mpq(1)
    return w


def witness_network(depth: int, input_dim: int, hidden_dim: int, num_edge_types: int = 1) -> ProductGnn:
    """Weights used by the depth ``>= 2`` construction; every edge type shares them."""
    if depth < 2:
        raise ValueError("the walk-count witness needs depth >= 2; use basis_construction for depth 1")
    layers = [_padded_identity(hidden_dim, input_dim)]
    second = np.full((hidden_dim, hidden_dim), mpq(0), dtype=object)
    second[0, :] = mpq(1)
    layers.append(second)
    for _ in range(depth - 2):
        w = np.full((hidden_dim, hidden_dim), mpq(0), dtype=object)
        w[0, 0] = mpq(1)
        layers.append(w)
    out = np.full(hidden_dim, mpq(0), dtype=object)
    out[0] = mpq(1)
    return ProductGnn([[w.copy() for _ in range(num_edge_types)] for w in layers], out)


def basis_construction(
    input_dim: int, hidden_dim: int, num_edge_types: int = 1
) -> tuple[ProductGnn, TemplateSet]:
    """Depth-1 network and ``min(input_dim, hidden_dim)`` standard-basis templates."""
    dim = min(input_dim, hidden_dim)
    w1 = _padded_identity(hidden_dim, input_dim)
    net = ProductGnn([[w1.copy() for _ in range(num_edge_types)]], np.full(hidden_dim, mpq(1), dtype=object))
    rows = np.full((dim, input_dim), mpq(0), dtype=object)
    for m in range(dim):
        rows[m, m] = mpq(1)
    return net, TemplateSet(rows)


@dataclass
class LowerBoundWitness:
    """Explicit network, templates and designated block certifying a grid rank."""

    network: ProductGnn
    templates: TemplateSet
    gamma: object
    configurations: list[tuple[int, ...]]
    gram_rows: np.ndarray
    admissible_subset: frozenset[int]
    pair: tuple[frozenset[int], frozenset[int]]
    subset: frozenset[int]
    walks: int
    depth: int
    dim: int
    mode: str
    target: int | None

    @property
    def expected_rank(self) -> int:
        return len(self.configurations)

    @property
    def ones_index(self) -> int:
        """Index of the all-ones template."""
        return len(self.configurations)

    def block_assignment(self, m: int, n: int, num_vertices: int) -> list[int]:
        left, right = self.pair
        out = [self.ones_index] * num_vertices
        for i in left:
            out[i] = m
        for j in right:
            out[j] = n
        return out


def lower_bound_witness(
    g: AnyGraph,
    subset: Iterable[int],
    depth: int,
    input_dim: int,
    hidden_dim: int,
    mode: str = "graph",
    target: int | None = None,
    admissible: Iterable[int] | None = None,
    budget: int = DEFAULT_BUDGET,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> LowerBoundWitness:
    """Build the depth ``>= 2`` witness for the admissible subset with the most walks.

    ``admissible`` pins a specific admissible subset instead. The designated
    block needs ``M**2`` network evaluations, refused above ``budget``.
    """
    if depth < 2:
        raise ValueError("lower_bound_witness needs depth >= 2; use basis_construction for depth 1")
    members = g.vertex_set(subset)
    dst = _targets(g, mode, target)
    pairs = admissible_pairs(g, members, g.directed, max_vertices)
    if admissible is not None:
        chosen = frozenset(int(v) for v in admissible)
        if chosen not in pairs:
            raise WitnessError(f"{sorted(chosen)} is not an admissible subset for this partition")
        walks = count_walks(g, depth - 1, chosen, dst)
    else:
        chosen, walks = frozenset(), 0
        for c in pairs:
            w = count_walks(g, depth - 1, c, dst)
            if w > walks:
                chosen, walks = c, w
    if walks == 0:
        raise WitnessError("no positive-walk admissible subset for this partition")
    dim = min(input_dim, hidden_dim)
    size = multiset_coefficient(dim, walks)
    if size * size > budget:
        raise BudgetExceededError(f"witness block needs {size}^2 = {size * size} evaluations, budget is {budget}")
    configs = compositions(dim, walks)
    gamma = select_gamma(configs)
    z = np.array([[gamma**qd for qd in q] for q in configs], dtype=object)
    rows = np.full((size + 1, input_dim), mpq(0), dtype=object)
    rows[:size, :dim] = z
    rows[size, :] = mpq(1)
    num_types = g.snapshot().num_edge_types if hasattr(g, "snapshot") else g.num_edge_types
    return LowerBoundWitness(
        network=witness_network(depth, input_dim, hidden_dim, num_types),
        templates=TemplateSet(rows),
        gamma=gamma,
        configurations=configs,
        gram_rows=z,
        admissible_subset=chosen,
        pair=pairs[chosen],
        subset=members,
        walks=walks,
        depth=depth,
        dim=dim,
        mode=mode,
        target=None if mode == "graph" else int(target),
    )


def witness_submatrix(w: LowerBoundWitness, g: AnyGraph, via_grid: bool = False, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """The designated ``M x M`` block of the grid matricization.

    By default only the ``M**2`` block entries are evaluated. ``via_grid=True``
    evaluates the full grid over all ``M + 1`` templates and slices the block
    out through the matricization index maps.
    """
    size = w.expected_rank
    n = g.num_vertices
    if via_grid:
        gm = grid_matricization(w.network, g, w.templates, w.subset, w.mode, w.target, budget)
        block = np.empty((size, size), dtype=object)
        for m in range(size):
            for k in range(size):
                a = w.block_assignment(m, k, n)
                block[m, k] = gm.matrix[gm.row_index(dict(enumerate(a))), gm.col_index(dict(enumerate(a)))]
        return block
    assignments = [w.block_assignment(m, k, n) for m in range(size) for k in range(size)]
    values = evaluate_assignments(w.network, g, w.templates, assignments, w.mode, w.target)
    block = np.empty(size * size, dtype=object)
    block[:] = values
    return block.reshape(size, size)


@dataclass
class WitnessCheck:
    rank: int
    expected_rank: int
    factorizes: bool

    @property
    def ok(self) -> bool:
        return self.rank == self.expected_rank and self.factorizes


def hadamard_gram(z: np.ndarray, power: int) -> np.ndarray:
    """``(Z Z^T) ** power`` elementwise."""
    gram = np.matmul(z, z.T)
    return np.vectorize(lambda x: x**power, otypes=[object])(gram)


def factorizes_through_gram(block: np.ndarray, z: np.ndarray, power: int) -> bool:
    """Whether ``block = diag(s) (Z Z^T)^{.power} diag(q)`` with all ``s, q`` positive."""
    gram = hadamard_gram(z, power)
    if any(x == 0 for x in gram.reshape(-1)):
        return False
    ratio = block / gram
    if any(x <= 0 for x in ratio.reshape(-1)):
        return False
    size = ratio.shape[0]
    return all(ratio[m, k] * ratio[0, 0] == ratio[m, 0] * ratio[0, k] for m in range(size) for k in range(size))


def verify_witness(w: LowerBoundWitness, g: AnyGraph, via_grid: bool = False, budget: int = DEFAULT_BUDGET) -> WitnessCheck:
    """Exact rank of the designated block and its diagonal-scaling structure."""
    block = witness_submatrix(w, g, via_grid, budget)
    return WitnessCheck(
        rank=rank_exact(block),
        expected_rank=w.expected_rank,
        factorizes=factorizes_through_gram(block, w.gram_rows, w.walks),
    )
