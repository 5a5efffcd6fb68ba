"""Exact separation-rank checks for product-aggregation networks on small graphs."""

from .admissible import admissible_pairs, admissible_subsets, has_no_repeating_shared_neighbors
from .bounds import BoundReport, bound_report, certified_rank, lower_bound_value, multiset_coefficient, upper_exponent
from .gnn import ProductGnn, gnn_forward, gnn_forward_batch, random_rationals
from .grid import GridMatricization, TemplateSet, evaluate_assignments, grid_matricization, grid_tensor
from .linalg import det_exact, rank_exact
from .witness import (
    LowerBoundWitness,
    WitnessCheck,
    basis_construction,
    compositions,
    configuration_matrix,
    factorizes_through_gram,
    gamma_candidates,
    hadamard_gram,
    lower_bound_witness,
    select_gamma,
    verify_witness,
    witness_network,
    witness_submatrix,
)

__all__ = [
    "BoundReport",
    "GridMatricization",
    "LowerBoundWitness",
    "ProductGnn",
    "TemplateSet",
    "WitnessCheck",
    "admissible_pairs",
    "admissible_subsets",
    "basis_construction",
    "bound_report",
    "certified_rank",
    "compositions",
    "configuration_matrix",
    "det_exact",
    "evaluate_assignments",
    "factorizes_through_gram",
    "gamma_candidates",
    "gnn_forward",
    "gnn_forward_batch",
    "grid_matricization",
    "grid_tensor",
    "hadamard_gram",
    "has_no_repeating_shared_neighbors",
    "lower_bound_value",
    "lower_bound_witness",
    "multiset_coefficient",
    "random_rationals",
    "rank_exact",
    "select_gamma",
    "upper_exponent",
    "verify_witness",
    "witness_network",
    "witness_submatrix",
]
