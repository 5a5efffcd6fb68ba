"""Message-passing networks with product aggregation.

Layer ``l`` computes ``h_i = prod_{j in N(i)} W_l h_j`` elementwise (in-neighbors
and per-edge-type weights on directed graphs, self-loops using type 0). Graph
prediction returns ``w_o . (prod_i h_i)`` and vertex prediction ``w_o . h_t``.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import GraphError
from ..graph import AnyGraph
from .linalg import mpq, mpq_array, to_fraction

MODES = ("graph", "vertex")


@dataclass
class ProductGnn:
    """Weights of a depth-``L`` product-aggregation network.

    ``weights[l][q]`` is the layer-``l`` matrix for edge type ``q``; layer 0 has
    shape ``(hidden_dim, input_dim)``, later layers ``(hidden_dim, hidden_dim)``.
    ``output`` has shape ``(hidden_dim,)``. Exact networks store ``mpq`` object
    arrays; inexact ones store ``float64``.
    """

    weights: list[list[np.ndarray]]
    output: np.ndarray
    exact: bool = True

    def __post_init__(self):
        if not self.weights:
            raise ValueError("network needs at least one layer")
        q = len(self.weights[0])
        if q < 1 or any(len(layer) != q for layer in self.weights):
            raise ValueError("every layer needs the same number of edge-type matrices")
        dh = self.weights[0][0].shape[0]
        for l, layer in enumerate(self.weights):
            cols = self.weights[0][0].shape[1] if l == 0 else dh
            for w in layer:
                if w.shape != (dh, cols):
                    raise ValueError(f"layer {l + 1} weight has shape {w.shape}, expected {(dh, cols)}")
        if self.output.shape != (dh,):
            raise ValueError(f"output weights have shape {self.output.shape}, expected {(dh,)}")

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def input_dim(self) -> int:
        return self.weights[0][0].shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.weights[0][0].shape[0]

    @property
    def num_edge_types(self) -> int:
        return len(self.weights[0])

    @classmethod
    def from_matrices(
        cls,
        weights: Sequence[Sequence | np.ndarray],
        output: Sequence | np.ndarray,
        exact: bool = True,
    ) -> "ProductGnn":
        """Build from one matrix per layer, or a list of per-type matrices per layer."""
        conv = mpq_array if exact else (lambda a: np.asarray(a, dtype=np.float64))
        layers = []
        for w in weights:
            arr = w if isinstance(w, np.ndarray) else None
            if arr is not None and arr.ndim == 2:
                layers.append([conv(arr)])
            elif isinstance(w, (list, tuple)) and w and np.ndim(w[0]) == 2:
                layers.append([conv(x) for x in w])
            else:
                layers.append([conv(w)])
        return cls(layers, conv(np.asarray(output, dtype=object)).reshape(-1), exact)

    @classmethod
    def random(
        cls,
        depth: int,
        input_dim: int,
        hidden_dim: int,
        seed: int | np.random.Generator,
        num_edge_types: int = 1,
        max_int: int = 7,
        exact: bool = True,
    ) -> "ProductGnn":
        """Weights ``+-a/b`` with ``a, b`` uniform on ``1..max_int``."""
        rng = np.random.default_rng(seed)

        def draw(shape):
            return random_rationals(rng, shape, max_int, exact)

        layers = []
        for l in range(depth):
            cols = input_dim if l == 0 else hidden_dim
            layers.append([draw((hidden_dim, cols)) for _ in range(num_edge_types)])
        return cls(layers, draw((hidden_dim,)), exact)

    def with_zero_layer(self, layer: int) -> "ProductGnn":
        """Copy with every matrix of one layer (or the output, ``layer = depth``) set to zero."""
        zero = (lambda a: np.full(a.shape, mpq(0), dtype=object)) if self.exact else np.zeros_like
        weights = [[w.copy() for w in ws] for ws in self.weights]
        output = self.output.copy()
        if layer == self.depth:
            output = zero(output)
        else:
            weights[layer] = [zero(w) for w in weights[layer]]
        return ProductGnn(weights, output, self.exact)


def random_rationals(rng: np.random.Generator, shape, max_int: int = 7, exact: bool = True) -> np.ndarray:
    num = rng.integers(1, max_int + 1, size=shape) * rng.choice([-1, 1], size=shape)
    den = rng.integers(1, max_int + 1, size=shape)
    if not exact:
        return num / den
    out = np.empty(shape, dtype=object)
    flat = out.reshape(-1)
    for k, (a, b) in enumerate(zip(num.reshape(-1).tolist(), den.reshape(-1).tolist())):
        flat[k] = mpq(a, b)
    return out


def _aggregation_plan(net: ProductGnn, g: AnyGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(row pointers, source vertices, edge types) of each vertex's incoming messages."""
    csr = g._in_csr()
    mask = g._in_mask()
    indptr, src, eid = csr.indptr, csr.indices, csr.entry_edge
    if mask is not None:
        keep = mask
        counts = np.add.reduceat(keep.astype(np.int64), indptr[:-1]) if g.num_vertices else np.zeros(0, np.int64)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        src, eid = src[keep], eid[keep]
    base = getattr(g, "base", g)
    types = np.zeros(len(src), dtype=np.int64)
    if base.edge_types is not None:
        has = eid >= 0
        types[has] = base.edge_types[eid[has]]
    if len(types) and types.max() >= net.num_edge_types:
        raise GraphError(
            f"graph uses edge type {int(types.max())} but the network has {net.num_edge_types} edge-type weights"
        )
    return indptr, src, types


def _check_mode(g: AnyGraph, mode: str, target: int | None) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if mode == "vertex":
        if target is None:
            raise ValueError("vertex prediction needs a target vertex")
        if not 0 <= int(target) < g.num_vertices:
            raise GraphError(f"target {target} out of range for graph with {g.num_vertices} vertices")


def gnn_forward_batch(
    net: ProductGnn,
    g: AnyGraph,
    features: np.ndarray,
    mode: str = "graph",
    target: int | None = None,
) -> np.ndarray:
    """Network outputs for a batch of feature assignments of shape ``(B, |V|, input_dim)``."""
    _check_mode(g, mode, target)
    feats = features if features.dtype == object or not net.exact else mpq_array(features)
    if feats.ndim != 3 or feats.shape[1:] != (g.num_vertices, net.input_dim):
        raise ValueError(f"features must have shape (B, {g.num_vertices}, {net.input_dim}), got {feats.shape}")
    if g.num_vertices == 0:
        raise GraphError("the network needs at least one vertex")
    indptr, src, types = _aggregation_plan(net, g)
    single_type = net.num_edge_types == 1 or not types.any()
    h = feats
    for layer in net.weights:
        if single_type:
            gathered = np.matmul(h, layer[0].T)[:, src, :]
        else:
            msgs = np.stack([np.matmul(h, w.T) for w in layer])
            gathered = msgs[types, :, src, :].transpose(1, 0, 2)
        h = np.multiply.reduceat(gathered, indptr[:-1], axis=1)
    if mode == "vertex":
        return np.matmul(h[:, int(target), :], net.output)
    return np.matmul(np.multiply.reduce(h, axis=1), net.output)


def gnn_forward(
    net: ProductGnn,
    g: AnyGraph,
    features,
    mode: str = "graph",
    target: int | None = None,
) -> Fraction | float:
    """Network output for one assignment of per-vertex features, shape ``(|V|, input_dim)``.

    Exact networks return a :class:`fractions.Fraction`.
    """
    arr = np.asarray(features, dtype=object if net.exact else np.float64)
    if arr.ndim != 2:
        raise ValueError("features must be a (num_vertices, input_dim) array")
    out = gnn_forward_batch(net, g, arr[None], mode, target)[0]
    return to_fraction(out) if net.exact else float(out)
