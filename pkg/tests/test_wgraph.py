import pytest
from hypothesis import given, settings

from graphs import G1, G4, G6, G8, graphs, load
from wlpa.wgraph import (
    Edge,
    GraphError,
    GraphParseError,
    Letter,
    WeightedGraph,
    all_special_assignments,
    double_graph,
    ensure_valid,
    format_graph,
    hat_graph,
    parse_graph,
    rose,
    special_edges,
    tree,
    validate,
)


def test_vertex_weights_and_sinks():
    assert G1.vertex_weight("u") == 2
    assert G1.vertex_weight("v") == 1
    assert G1.vertex_weight("x") == 0
    assert G1.sinks == ("x",)
    assert G1.regular_vertices == ("u", "v")
    assert G1.max_weight == 2


def test_hat_graph_copies_each_edge():
    h = hat_graph(G4)
    assert sorted(e.id for e in h.edges) == ["e_1", "f_1", "f_2"]
    assert all(e.weight == 1 for e in h.edges)


def test_double_graph_has_ghosts():
    arrows = double_graph(G4)
    assert len(arrows) == 6
    ghosts = [a for a in arrows if a.letter.is_ghost]
    assert {(a.source, a.target) for a in ghosts} == {("u", "v"), ("x", "v")}


def test_tree_is_forward_closure():
    assert tree(G6, ["y"]) == frozenset({"y", "z"})
    assert tree(G6, ["t"]) == frozenset({"t", "u"})


def test_letter_rendering_and_star():
    e2 = Letter.real("e", 2)
    assert str(e2) == "e_2"
    assert str(e2.star) == "e_2^*"
    assert e2.star.star == e2
    assert str(Letter.vertex("v")) == "v"


def test_letter_source_and_target():
    assert G4.source(Letter.ghost("f", 2)) == "x"
    assert G4.target(Letter.ghost("f", 2)) == "v"
    assert G4.is_letter(Letter.real("f", 2))
    assert not G4.is_letter(Letter.real("e", 2))


def test_parse_rejects_bad_weight_with_position():
    with pytest.raises(GraphParseError) as info:
        parse_graph("vertex v\nedge e v v 0\n")
    assert info.value.line == 2
    assert info.value.column == 12


def test_parse_rejects_unknown_endpoint():
    with pytest.raises(GraphParseError) as info:
        parse_graph("vertex v\nedge e v w 1\n")
    assert info.value.line == 2
    assert "w" in str(info.value)


def test_parse_rejects_duplicate_and_unknown_directive():
    with pytest.raises(GraphParseError):
        parse_graph("vertex v\nvertex v\n")
    with pytest.raises(GraphParseError):
        parse_graph("node v\n")


def test_special_edge_must_have_max_weight():
    with pytest.raises(GraphParseError):
        parse_graph("vertex v\nvertex x\nedge e v x 1\nedge f v x 2\nspecial v e\n")


def test_declared_special_is_used():
    g = parse_graph("vertex v\nedge e v v 2\nedge f v v 2\nspecial v f\n")
    assert special_edges(g, "declared")["v"] == "f"
    assert special_edges(g)["v"] == "e"


def test_all_special_assignments_enumerates_choices():
    assert len(list(all_special_assignments(G8))) == 2
    assert len(list(all_special_assignments(G1))) == 2
    assert len(list(all_special_assignments(G4))) == 1


def test_graph_constructor_validates():
    with pytest.raises(GraphError):
        WeightedGraph(("v",), (Edge("e", "v", "w", 1),))
    with pytest.raises(GraphError):
        WeightedGraph(("v",), (Edge("v", "v", "v", 1),))


def test_validate_reports_disconnected():
    g = WeightedGraph(("a", "b"), ())
    report = validate(g)
    assert not report.ok
    with pytest.raises(GraphError):
        ensure_valid(g)


def test_rose_shape():
    r = rose(2, 3)
    assert r.vertices == ("v",)
    assert [e.weight for e in r.edges] == [2, 2, 2]


@pytest.mark.parametrize("name", ["g1", "g2", "g4", "g5", "g8", "exlpa1", "chain"])
def test_format_round_trip_fixtures(name):
    g = load(name)
    assert parse_graph(format_graph(g)) == g


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_format_round_trip_random(g):
    assert parse_graph(format_graph(g)) == g
