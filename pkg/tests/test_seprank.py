import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_forward, naive_grid, sets_of
from test_graph import graph_and_subset
from walkwise import BudgetExceededError, GraphError, WitnessError, build_graph, count_walks
from walkwise.generators import complete_graph, cycle_graph, erdos_renyi, path_graph, star_graph, two_triangles
from walkwise.seprank import (
    ProductGnn,
    TemplateSet,
    admissible_pairs,
    admissible_subsets,
    basis_construction,
    bound_report,
    compositions,
    configuration_matrix,
    det_exact,
    factorizes_through_gram,
    gamma_candidates,
    gnn_forward,
    gnn_forward_batch,
    grid_matricization,
    grid_tensor,
    hadamard_gram,
    has_no_repeating_shared_neighbors,
    lower_bound_witness,
    multiset_coefficient,
    random_rationals,
    rank_exact,
    select_gamma,
    upper_exponent,
    verify_witness,
    witness_submatrix,
)
from walkwise.seprank.linalg import mpq


def _frac_lists(arr):
    """Nested lists of Fractions, converted through text so the oracle shares no arithmetic."""
    return [[Fraction(str(x)) for x in row] for row in arr.tolist()]


def _oracle_weights(net):
    return [[_frac_lists(w) for w in layer] for layer in net.weights], [Fraction(str(x)) for x in net.output.tolist()]


def _type_map(g):
    if g.edge_types is None:
        return {}
    return {tuple(e): int(t) for e, t in zip(g.edge_list(), g.edge_types.tolist())}


# -- forward pass ----------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(12))
def test_forward_matches_per_vertex_reference(seed):
    rng = np.random.default_rng(seed)
    directed = bool(seed % 2)
    types = 2 if directed and seed % 4 == 1 else 1
    n = int(rng.integers(1, 6))
    g = erdos_renyi(n, 0.5, seed=seed, directed=directed, num_edge_types=types)
    depth, dx, dh = int(rng.integers(1, 4)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
    net = ProductGnn.random(depth, dx, dh, seed=rng, num_edge_types=types)
    feats = random_rationals(rng, (n, dx))
    weights, output = _oracle_weights(net)
    for mode, target in [("graph", None)] + [("vertex", t) for t in range(n)]:
        got = gnn_forward(net, g, feats, mode, target)
        want = naive_forward(weights, output, n, g.edge_list(), _frac_lists(feats), directed, _type_map(g), mode, target)
        assert got == want


def test_single_vertex_is_a_scalar_chain():
    g = build_graph([], 1)
    net = ProductGnn.from_matrices([[[mpq(2)]], [[mpq(-3, 2)]], [[mpq(5)]]], [mpq(1, 7)])
    x = mpq(4, 3)
    assert gnn_forward(net, g, [[x]]) == Fraction(1, 7) * 2 * Fraction(-3, 2) * 5 * Fraction(4, 3)
    assert gnn_forward(net, g, [[x]], "vertex", 0) == gnn_forward(net, g, [[x]])


def test_zero_features_give_zero():
    g = cycle_graph(4)
    net = ProductGnn.random(2, 3, 2, seed=1)
    zeros = np.full((4, 3), mpq(0), dtype=object)
    assert gnn_forward(net, g, zeros) == 0
    assert gnn_forward(net, g, zeros, "vertex", 2) == 0


@pytest.mark.parametrize("dim", [2, 3])
def test_depth_one_basis_network_detects_agreement(dim):
    g = path_graph(3)
    net, templates = basis_construction(dim, dim)
    for assign in itertools.product(range(dim), repeat=3):
        out = gnn_forward(net, g, templates.vectors[list(assign)])
        assert out == (1 if len(set(assign)) == 1 else 0)


def test_forward_input_checks():
    g = path_graph(3)
    net = ProductGnn.random(1, 2, 2, seed=0)
    with pytest.raises(ValueError, match="target"):
        gnn_forward(net, g, np.ones((3, 2)), "vertex")
    with pytest.raises(ValueError, match="shape"):
        gnn_forward(net, g, np.ones((3, 3)))
    with pytest.raises(ValueError, match="mode"):
        gnn_forward(net, g, np.ones((3, 2)), "edge")
    typed = build_graph([(0, 1)], 2, directed=True, edge_types=[1])
    with pytest.raises(GraphError, match="edge type"):
        gnn_forward(net, typed, np.ones((2, 2)))


def test_network_shape_validation():
    with pytest.raises(ValueError):
        ProductGnn.from_matrices([np.ones((2, 3)), np.ones((3, 2))], np.ones(2))
    with pytest.raises(ValueError):
        ProductGnn.from_matrices([np.ones((2, 3))], np.ones(3))
    net = ProductGnn.random(3, 2, 4, seed=0, num_edge_types=2)
    assert (net.depth, net.input_dim, net.hidden_dim, net.num_edge_types) == (3, 2, 4, 2)


def test_float_network_agrees_with_exact():
    g = erdos_renyi(5, 0.5, seed=1)
    exact = ProductGnn.random(2, 2, 2, seed=3)
    approx = ProductGnn([[w.astype(float) for w in layer] for layer in exact.weights], exact.output.astype(float), exact=False)
    feats = random_rationals(np.random.default_rng(0), (5, 2))
    assert math.isclose(float(gnn_forward(exact, g, feats)), gnn_forward(approx, g, feats.astype(float)), rel_tol=1e-9)


# -- grid matricization ---------------------------------------------------------------------


def test_two_vertex_grid_matches_double_loop():
    g = complete_graph(2)
    net = ProductGnn.random(1, 2, 2, seed=7)
    templates = TemplateSet(random_rationals(np.random.default_rng(8), (2, 2)))
    gm = grid_matricization(net, g, templates, {0})
    weights, output = _oracle_weights(net)
    want = naive_grid(weights, output, 2, g.edge_list(), _frac_lists(templates.vectors), [0])
    assert gm.matrix.shape == (2, 2)
    assert [[Fraction(str(x)) for x in row] for row in gm.matrix.tolist()] == want


@pytest.mark.parametrize("seed", range(4))
def test_grid_matches_nested_loops_with_types(seed):
    g = erdos_renyi(4, 0.5, seed=seed, directed=True, num_edge_types=2)
    net = ProductGnn.random(2, 2, 2, seed=seed, num_edge_types=2)
    templates = TemplateSet(random_rationals(np.random.default_rng(seed), (2, 2)))
    weights, output = _oracle_weights(net)
    for rows in ({0}, {1, 3}):
        for mode, target in (("graph", None), ("vertex", 2)):
            gm = grid_matricization(net, g, templates, rows, mode, target)
            want = naive_grid(weights, output, 4, g.edge_list(), _frac_lists(templates.vectors), rows, True, _type_map(g), mode, target)
            assert [[Fraction(str(x)) for x in row] for row in gm.matrix.tolist()] == want


def test_index_maps_address_the_right_entries():
    g = path_graph(4)
    net = ProductGnn.random(2, 2, 2, seed=2)
    templates = TemplateSet(random_rationals(np.random.default_rng(2), (3, 2)))
    gm = grid_matricization(net, g, templates, {2, 0})
    assert gm.row_vertices == (0, 2) and gm.col_vertices == (1, 3)
    assert gm.matrix.shape == (9, 9)
    for r in (0, 4, 8):
        assert gm.row_index(gm.row_assignment(r)) == r
    for r, c in [(0, 0), (5, 7), (8, 3)]:
        a = gm.row_assignment(r) | gm.col_assignment(c)
        assert gm.matrix[r, c] == gnn_forward(net, g, templates.vectors[[a[v] for v in range(4)]])
    # first listed vertex is the most significant digit
    assert gm.row_index({0: 1, 2: 0}) == 3


def test_grid_budget_is_enforced():
    net, templates = basis_construction(3, 3)
    with pytest.raises(BudgetExceededError):
        grid_tensor(net, path_graph(5), templates, budget=100)
    assert grid_tensor(net, path_graph(4), templates, budget=81).shape == (3,) * 4


@pytest.mark.parametrize("layer", [0, 1, 2])
def test_zero_weights_force_rank_zero(layer):
    g = path_graph(3)
    net = ProductGnn.random(2, 2, 2, seed=5).with_zero_layer(layer)
    templates = TemplateSet(random_rationals(np.random.default_rng(1), (2, 2)))
    gm = grid_matricization(net, g, templates, {0})
    assert all(x == 0 for x in gm.matrix.reshape(-1))
    assert gm.rank() == 0


@pytest.mark.parametrize("dim", [2, 3])
def test_depth_one_construction_has_one_nonzero_per_template(dim):
    g = cycle_graph(4)
    net, templates = basis_construction(dim, dim)
    gm = grid_matricization(net, g, templates, {0, 1})
    nz = np.argwhere(gm.matrix != 0)
    assert len(nz) == dim
    assert len(set(nz[:, 0])) == dim and len(set(nz[:, 1])) == dim
    assert gm.rank() == dim


def test_batch_and_single_forward_agree():
    g = star_graph(3)
    net = ProductGnn.random(2, 2, 3, seed=4)
    feats = random_rationals(np.random.default_rng(4), (5, 4, 2))
    batch = gnn_forward_batch(net, g, feats, "vertex", 0)
    assert [gnn_forward(net, g, f, "vertex", 0) for f in feats] == [Fraction(str(x)) for x in batch]


# -- exact linear algebra -------------------------------------------------------------------


def test_rank_simple_cases():
    assert rank_exact(np.eye(3, dtype=int)) == 3
    assert rank_exact(np.outer([1, 2, 3], [4, -5])) == 1
    assert rank_exact(np.zeros((2, 3))) == 0
    assert rank_exact(np.zeros((0, 0))) == 0


@pytest.mark.parametrize("seed", range(20))
def test_rank_matches_sympy_and_other_orderings(seed):
    rng = np.random.default_rng(seed)
    inner = int(rng.integers(1, 6))
    m = np.matmul(random_rationals(rng, (5, inner)), random_rationals(rng, (inner, 5)))
    ref = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in m.tolist()]).rank()
    for order in ("forward", "reverse", "transpose"):
        assert rank_exact(m, order) == ref


def test_rank_unknown_order():
    with pytest.raises(ValueError):
        rank_exact(np.eye(2), "diagonal")


@pytest.mark.parametrize("seed", range(8))
def test_determinant_matches_sympy(seed):
    m = random_rationals(np.random.default_rng(seed), (4, 4))
    ref = sympy.Matrix([[sympy.Rational(str(x)) for x in row] for row in m.tolist()]).det()
    assert Fraction(str(det_exact(m))) == Fraction(str(ref))


# -- admissible subsets ------------------------------------------------------------------------


def literal_admissible(g, subset):
    out, inc = sets_of(g)
    inside = sorted(subset)
    outside = [v for v in range(g.num_vertices) if v not in subset]

    def powerset(xs):
        return itertools.chain.from_iterable(itertools.combinations(xs, k) for k in range(len(xs) + 1))

    found = set()
    for left in powerset(inside):
        for right in powerset(outside):
            nl = set().union(*(out[i] for i in left))
            nr = set().union(*(out[j] for j in right))
            shared = nl & nr
            if all(len(inc[k] & set(left)) == 1 and len(inc[k] & set(right)) == 1 for k in shared):
                found.add(frozenset(shared))
    return found


@settings(max_examples=150, deadline=None)
@given(graph_and_subset(max_vertices=6))
def test_admissible_subsets_match_literal_enumeration(case):
    g, subset = case
    pairs = admissible_pairs(g, subset)
    assert set(pairs) == literal_admissible(g, subset)
    assert frozenset() in pairs
    for c, (left, right) in pairs.items():
        assert left <= subset and not (right & subset)
        assert has_no_repeating_shared_neighbors(g, left, right)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_complete_graph_whole_vertex_set_is_admissible(n):
    assert frozenset(range(n)) in admissible_subsets(complete_graph(n), {0})
    assert frozenset(range(n)) in admissible_subsets(complete_graph(n), set(range(n - 1)))


@settings(max_examples=100, deadline=None)
@given(graph_and_subset(max_vertices=7, directed=False))
def test_single_pair_neighbor_intersections_are_admissible(case):
    g, subset = case
    out, _ = sets_of(g)
    found = set(admissible_subsets(g, subset))
    for i in subset:
        for j in set(range(g.num_vertices)) - subset:
            assert frozenset(out[i] & out[j]) in found


def test_isolated_partition_has_only_the_empty_subset():
    assert admissible_subsets(two_triangles(), {0, 1, 2}) == [frozenset()]


def test_admissible_size_guard_and_flag_check():
    with pytest.raises(BudgetExceededError):
        admissible_subsets(path_graph(8), {0}, max_vertices=7)
    with pytest.raises(GraphError):
        admissible_subsets(path_graph(3), {0}, directed=True)


# -- bounds ------------------------------------------------------------------------------------


def test_path_upper_exponent():
    report = bound_report(path_graph(3), {0}, 2, 2, 2)
    assert report.upper_exponent == 21
    assert math.isclose(report.upper_log, 21 * math.log(2))
    assert report.boundary == [0, 1] and report.boundary_walks == 5


def test_disconnected_partition_bounds():
    graph_mode = bound_report(two_triangles(), {0, 1, 2}, 3, 2, 2)
    assert graph_mode.upper_exponent == 1 and graph_mode.lower_log == 0 and graph_mode.lower_walks == 0
    assert graph_mode.certified_rank == 1 and graph_mode.notes
    vertex_mode = bound_report(two_triangles(), {0, 1, 2}, 3, 2, 2, "vertex", 4)
    assert vertex_mode.upper_exponent == 0 and vertex_mode.lower_log == 0


@pytest.mark.parametrize("dx, dh", [(2, 3), (3, 2), (3, 3)])
def test_depth_one_graph_lower_bound_is_log_width(dx, dh):
    report = bound_report(complete_graph(3), {0}, 1, dx, dh)
    # the whole vertex set is admissible with zero-length walk count |C| = 3
    assert report.lower_walks == 3
    assert math.isclose(report.lower_log, math.log(min(dx, dh)))


def test_vertex_upper_exponent():
    g = path_graph(3)
    assert upper_exponent(g, {1}, 2, "vertex", 1) == 4 * count_walks(g, 1, {0, 1, 2}, {1})


def test_directed_upper_exponent_sums_walk_lengths():
    g = build_graph([(0, 1), (1, 2)], 3, directed=True)
    # directed boundary of {0} is {1}; walks from 1: one of length 0, two of length 1
    assert upper_exponent(g, {0}, 2) == 1 + 2 + 1
    assert upper_exponent(g, {0}, 2, "vertex", 2) == 0 + 1
    with pytest.raises(GraphError):
        upper_exponent(g, {0}, 2, directed=False)


def test_bound_report_serializes():
    import json

    report = bound_report(path_graph(4), {0, 1}, 2, 2, 3, "vertex", 3)
    data = json.loads(report.to_json())
    assert data["upper_exponent"] == report.upper_exponent
    assert data["witness_pair"] == [list(p) for p in report.witness_pair]
    assert report.rank_within_upper(3**report.upper_exponent)
    assert not report.rank_within_upper(3**report.upper_exponent + 1)


def test_bound_report_input_checks():
    with pytest.raises(ValueError):
        bound_report(path_graph(3), {0}, 2, 0, 2)
    with pytest.raises(ValueError):
        bound_report(path_graph(3), {0}, 2, 2, 2, "vertex")
    with pytest.raises(GraphError):
        bound_report(path_graph(3), {0}, 2, 2, 2, "vertex", 5)


@settings(max_examples=100, deadline=None)
@given(graph_and_subset(max_vertices=6, directed=False), st.integers(1, 3), st.integers(2, 4), st.integers(2, 4))
def test_lower_bound_never_exceeds_upper(case, depth, dx, dh):
    g, subset = case
    report = bound_report(g, subset, depth, dx, dh)
    assert report.lower_log <= report.upper_log + 1e-12
    assert report.rank_within_upper(report.certified_rank)


# -- multiset coefficients and Hadamard powers ---------------------------------------------------


def test_multiset_examples():
    assert multiset_coefficient(2, 3) == 4
    assert all(multiset_coefficient(d, 0) == 1 for d in range(1, 6))
    assert multiset_coefficient(3, 2) == 6 >= ((3 - 1) / 2 + 1) ** 2
    with pytest.raises(ValueError):
        multiset_coefficient(0, 1)


def test_multiset_is_the_composition_count():
    for d in range(1, 5):
        for p in range(5):
            assert len(compositions(d, p)) == multiset_coefficient(d, p) == len(set(compositions(d, p)))


@pytest.mark.parametrize("seed", range(15))
def test_hadamard_power_rank_ceiling(seed):
    rng = np.random.default_rng(seed)
    d, p = int(rng.integers(1, 4)), int(rng.integers(1, 4))
    rows = multiset_coefficient(d, p) + int(rng.integers(0, 4))
    z = np.empty((rows, d), dtype=object)
    z[:] = [[mpq(int(a), int(b)) for a, b in zip(rng.integers(1, 9, d), rng.integers(1, 9, d))] for _ in range(rows)]
    assert rank_exact(hadamard_gram(z, p)) <= multiset_coefficient(d, p)


# -- witnesses ----------------------------------------------------------------------------------------


def test_gamma_candidate_order():
    assert gamma_candidates(7) == [mpq(2), mpq(3), mpq(1, 2), mpq(5), mpq(1, 3), mpq(7), mpq(1, 5)]
    assert len(gamma_candidates()) == 50


def test_two_configuration_determinant():
    configs = compositions(2, 1)
    assert sorted(configs) == [(0, 1), (1, 0)]
    for gamma in (mpq(2), mpq(1, 3), mpq(7, 5)):
        a = configuration_matrix(configs, gamma)
        # entries gamma^<q, q'>: ones off the diagonal, gamma on it
        assert det_exact(a) == gamma * gamma - 1
    assert det_exact(configuration_matrix(configs, mpq(1))) == 0
    assert select_gamma(configs) == 2


def test_width_two_single_walk_witness():
    g = path_graph(4)
    w = lower_bound_witness(g, {0, 1}, 2, 2, 2, "vertex", 3)
    assert w.walks == 1 and w.expected_rank == 2
    block = witness_submatrix(w, g)
    assert block.shape == (2, 2) and det_exact(block) != 0
    assert verify_witness(w, g).ok


def test_width_two_double_walk_witness():
    g = path_graph(3)
    w = lower_bound_witness(g, {0}, 2, 2, 2, "vertex", 1)
    assert w.walks == 2 and w.expected_rank == multiset_coefficient(2, 2) == 3
    check = verify_witness(w, g)
    assert check.rank == 3 and check.factorizes


def test_no_positive_walk_subset_raises():
    with pytest.raises(WitnessError, match="no positive-walk admissible subset"):
        lower_bound_witness(two_triangles(), {0, 1, 2}, 2, 2, 2)


def test_witness_argument_checks():
    with pytest.raises(ValueError, match="basis_construction"):
        lower_bound_witness(path_graph(3), {0}, 1, 2, 2)
    with pytest.raises(BudgetExceededError):
        lower_bound_witness(complete_graph(4), {0, 1}, 3, 3, 3, budget=100)
    with pytest.raises(WitnessError, match="not an admissible"):
        lower_bound_witness(path_graph(3), {0}, 2, 2, 2, admissible={2})


@pytest.mark.parametrize(
    "g, subset, dim",
    [(path_graph(3), {0}, 2), (star_graph(2), {1}, 2), (path_graph(3), {1}, 2), (cycle_graph(3), {0}, 2)],
)
def test_graph_mode_witnesses(g, subset, dim):
    w = lower_bound_witness(g, subset, 2, dim, dim)
    check = verify_witness(w, g)
    assert check.ok and check.rank == multiset_coefficient(dim, w.walks)
    assert w.walks == bound_report(g, subset, 2, dim, dim).lower_walks


def test_block_extraction_through_the_full_grid():
    g = path_graph(3)
    w = lower_bound_witness(g, {0}, 2, 2, 2, "vertex", 1)
    direct = witness_submatrix(w, g)
    via = witness_submatrix(w, g, via_grid=True)
    assert (direct == via).all()
    assert verify_witness(w, g, via_grid=True).ok


def test_pinned_admissible_subset():
    g = path_graph(3)
    w = lower_bound_witness(g, {0}, 2, 2, 2, admissible={1})
    assert w.admissible_subset == {1} and w.walks == count_walks(g, 1, {1}, range(3))
    assert verify_witness(w, g).ok


def test_directed_witness():
    g = build_graph([(0, 1), (1, 2), (2, 0)], 3, directed=True)
    report = bound_report(g, {0}, 2, 2, 2)
    w = lower_bound_witness(g, {0}, 2, 2, 2)
    assert w.walks == report.lower_walks > 0
    assert verify_witness(w, g).ok


def test_wider_hidden_layer_pads_templates():
    g = path_graph(3)
    w = lower_bound_witness(g, {0}, 2, 3, 2, "vertex", 1)
    assert w.dim == 2 and w.templates.dim == 3
    assert verify_witness(w, g).ok


def test_factorization_check_rejects_unrelated_matrices():
    z = np.array([[mpq(1), mpq(2)], [mpq(3), mpq(1)]], dtype=object)
    gram = hadamard_gram(z, 2)
    assert factorizes_through_gram(gram, z, 2)
    scaled = gram.copy()
    scaled[0, :] *= 5
    scaled[:, 1] *= mpq(1, 3)
    assert factorizes_through_gram(scaled, z, 2)
    bad = gram.copy()
    bad[0, 0] += 1
    assert not factorizes_through_gram(bad, z, 2)
    assert not factorizes_through_gram(-gram, z, 2)
