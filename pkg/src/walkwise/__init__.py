"""Walk-index edge sparsification and exact separation-rank verification."""

from .errors import (
    BudgetExceededError,
    EdgeListParseError,
    GraphError,
    VertexSpecError,
    WalkwiseError,
    WitnessError,
)
from .graph import (
    EditableGraph,
    Graph,
    adjacency_matrix,
    adjacency_power,
    boundary,
    build_graph,
    count_walks,
    neighbors,
    remove_edge,
    shared_neighbors,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "EdgeListParseError",
    "EditableGraph",
    "Graph",
    "GraphError",
    "VertexSpecError",
    "WalkwiseError",
    "WitnessError",
    "adjacency_matrix",
    "adjacency_power",
    "boundary",
    "build_graph",
    "count_walks",
    "neighbors",
    "remove_edge",
    "shared_neighbors",
]
