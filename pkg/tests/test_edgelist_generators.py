import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from test_graph import graphs
from walkwise import EdgeListParseError, build_graph, count_walks
from walkwise.edgelist import format_edge_list, parse_edge_list, read_edge_list, write_edge_list
from walkwise.generators import (
    complete_graph,
    cycle_graph,
    erdos_renyi,
    gnm,
    path_graph,
    relabel,
    star_graph,
    two_triangles,
)


@settings(max_examples=100, deadline=None)
@given(graphs())
def test_text_round_trip(g):
    assert parse_edge_list(format_edge_list(g), directed=g.directed) == g


def test_typed_round_trip_through_a_file(tmp_path):
    g = erdos_renyi(8, 0.4, seed=3, directed=True, num_edge_types=3)
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    back = read_edge_list(path, directed=True)
    assert back == g
    assert list(back.edge_types) == list(g.edge_types)


def test_header_keeps_trailing_isolated_vertices():
    g = build_graph([(0, 1)], 5)
    assert parse_edge_list(format_edge_list(g)).num_vertices == 5
    assert parse_edge_list(format_edge_list(g, header=False)).num_vertices == 2
    assert parse_edge_list(format_edge_list(g), num_vertices=7).num_vertices == 7


def test_comments_and_blank_lines_are_skipped():
    g = parse_edge_list("# a comment\n\n0 1\n  # indented\n1 2\n")
    assert g.edge_list() == [(0, 1), (1, 2)]


def test_format_is_canonical():
    a = parse_edge_list("2 1\n1 0\n")
    assert format_edge_list(a) == "# undirected vertices=3 edges=2\n0 1\n1 2\n"


@pytest.mark.parametrize(
    "text, directed, line, match",
    [
        ("0 1\n1 2 3 4\n", True, 2, "expected 2 or 3 fields"),
        ("0\n", False, 1, "expected 2 or 3 fields"),
        ("0 1 1\n", False, 1, "only allowed for directed"),
        ("0 1 0\n1 2\n", True, 2, "mixes typed"),
        ("0 1\n# c\nx 2\n", False, 3, "non-integer"),
        ("0 -1\n", False, 1, "nonnegative"),
        ("0 1\n2 2\n", False, 2, "self-loop"),
        ("0 1\n1 0\n", False, 2, "duplicate"),
        ("0 1\n0 1\n", True, 2, "duplicate"),
    ],
)
def test_parse_errors_carry_line_numbers(text, directed, line, match):
    with pytest.raises(EdgeListParseError, match=match) as info:
        parse_edge_list(text, directed=directed)
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}:")


def test_out_of_range_against_declared_size():
    with pytest.raises(EdgeListParseError, match="out of range") as info:
        parse_edge_list("0 1\n1 4\n", num_vertices=3)
    assert info.value.line_number == 2


def test_empty_input_is_the_empty_graph():
    g = parse_edge_list("")
    assert g.num_vertices == 0 and g.num_edges == 0


# -- generators -------------------------------------------------------------------


def test_path_cycle_star_complete_counts():
    assert path_graph(4).edge_list() == [(0, 1), (1, 2), (2, 3)]
    assert cycle_graph(4).num_edges == 4
    assert star_graph(3).edge_list() == [(0, 1), (0, 2), (0, 3)]
    assert complete_graph(5).num_edges == 10
    assert two_triangles(bridge=True).has_edge((3, 2))
    assert not two_triangles().has_edge((2, 3))


def test_gnm_has_exactly_m_edges_and_is_seeded():
    g = gnm(200, 1500, seed=11)
    assert g.num_edges == 1500
    assert g == gnm(200, 1500, seed=11)
    assert g != gnm(200, 1500, seed=12)


def test_gnm_can_fill_the_complete_graph():
    assert gnm(6, 15, seed=0) == complete_graph(6)
    with pytest.raises(ValueError):
        gnm(6, 16, seed=0)


def test_erdos_renyi_is_seeded_and_respects_extremes():
    assert erdos_renyi(7, 0.5, seed=4) == erdos_renyi(7, 0.5, seed=4)
    assert erdos_renyi(7, 0.0, seed=4).num_edges == 0
    assert erdos_renyi(7, 1.0, seed=4) == complete_graph(7)
    assert erdos_renyi(5, 1.0, seed=4, directed=True).num_edges == 20


@settings(max_examples=50, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_relabel_preserves_walk_counts(g, rnd):
    perm = list(range(g.num_vertices))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    assert h.num_edges == g.num_edges
    inv = np.argsort(perm)
    assert relabel(h, inv) == g
    subset = set(range(0, g.num_vertices, 2))
    image = {perm[v] for v in subset}
    assert count_walks(g, 3, subset, range(g.num_vertices)) == count_walks(h, 3, image, range(g.num_vertices))
