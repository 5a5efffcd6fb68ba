"""Grid tensors of network outputs over template assignments, and their matricizations.

Assignments ``(d_0, ..., d_{n-1})`` are enumerated in mixed radix with vertex 0
most significant. The matricization with respect to ``I`` indexes rows by the
template choices of ``I`` and columns by those of the complement, each packed
in ascending vertex order with the smallest vertex most significant.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import BudgetExceededError
from ..graph import AnyGraph
from .gnn import ProductGnn, gnn_forward_batch
from .linalg import mpq_array, rank_exact

DEFAULT_BUDGET = 10**6
_CHUNK = 2048


@dataclass
class TemplateSet:
    """``M`` template vectors of dimension ``input_dim``, stored as rows."""

    vectors: np.ndarray

    def __post_init__(self):
        if self.vectors.ndim != 2 or self.vectors.shape[0] < 1:
            raise ValueError("templates must be a non-empty (M, input_dim) array")

    @classmethod
    def from_rows(cls, rows, exact: bool = True) -> "TemplateSet":
        return cls(mpq_array(rows) if exact else np.asarray(rows, dtype=np.float64))

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]


@dataclass
class GridMatricization:
    """Grid tensor matricized with respect to ``rows_vertices``."""

    matrix: np.ndarray
    row_vertices: tuple[int, ...]
    col_vertices: tuple[int, ...]
    num_templates: int

    def row_assignment(self, r: int) -> dict[int, int]:
        return _unpack(r, self.row_vertices, self.num_templates)

    def col_assignment(self, c: int) -> dict[int, int]:
        return _unpack(c, self.col_vertices, self.num_templates)

    def row_index(self, assignment: dict[int, int]) -> int:
        return _pack(assignment, self.row_vertices, self.num_templates)

    def col_index(self, assignment: dict[int, int]) -> int:
        return _pack(assignment, self.col_vertices, self.num_templates)

    def rank(self) -> int:
        return rank_exact(self.matrix)


def _pack(assignment: dict[int, int], vertices: Sequence[int], m: int) -> int:
    idx = 0
    for v in vertices:
        idx = idx * m + assignment[v]
    return idx


def _unpack(idx: int, vertices: Sequence[int], m: int) -> dict[int, int]:
    out = {}
    for v in reversed(vertices):
        idx, out[v] = divmod(idx, m)
    return out


def _evaluate(
    net: ProductGnn,
    g: AnyGraph,
    templates: TemplateSet,
    assignments: Iterable[Sequence[int]],
    mode: str,
    target: int | None,
) -> list:
    out = []
    it = iter(assignments)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return out
        feats = templates.vectors[np.asarray(block, dtype=np.int64)]
        out.extend(gnn_forward_batch(net, g, feats, mode, target).tolist())


def grid_tensor(
    net: ProductGnn,
    g: AnyGraph,
    templates: TemplateSet,
    mode: str = "graph",
    target: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> np.ndarray:
    """Order-``|V|`` tensor of outputs with entry ``[d_0, ..., d_{n-1}]``."""
    n, m = g.num_vertices, len(templates)
    if templates.dim != net.input_dim:
        raise ValueError(f"templates have dimension {templates.dim}, network expects {net.input_dim}")
    total = m**n
    if total > budget:
        raise BudgetExceededError(f"grid needs {m}^{n} = {total} evaluations, budget is {budget}")
    values = _evaluate(net, g, templates, itertools.product(range(m), repeat=n), mode, target)
    arr = np.empty(total, dtype=object if net.exact else np.float64)
    arr[:] = values
    return arr.reshape((m,) * n)


def grid_matricization(
    net: ProductGnn,
    g: AnyGraph,
    templates: TemplateSet,
    subset: Iterable[int],
    mode: str = "graph",
    target: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> GridMatricization:
    """Matricize the grid tensor so rows follow ``subset`` and columns its complement."""
    rows = tuple(sorted(g.vertex_set(subset)))
    cols = tuple(sorted(set(range(g.num_vertices)) - set(rows)))
    tensor = grid_tensor(net, g, templates, mode, target, budget)
    m = len(templates)
    mat = tensor.transpose(rows + cols).reshape(m ** len(rows), m ** len(cols))
    return GridMatricization(mat, rows, cols, m)


def evaluate_assignments(
    net: ProductGnn,
    g: AnyGraph,
    templates: TemplateSet,
    assignments: Sequence[Sequence[int]],
    mode: str = "graph",
    target: int | None = None,
) -> list:
    """Outputs for explicit assignments (one template index per vertex)."""
    return _evaluate(net, g, templates, assignments, mode, target)
