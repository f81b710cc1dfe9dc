"""
Tests for PENMAN parsing, serialization and block files
"""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.errors import DuplicateVariable, EmptyInput, ParseError, SerializeError, UndefinedVariable
from app.graph import (Attribute, Edge, SemanticGraph, Triple, parse_penman, read_line_graphs,
                       read_penman_blocks, scan_parens, serialize_penman, triples, write_penman_blocks)
from app.metrics import scoring_triples
from tests.fixtures import ALL_GRAPHS, ARCHITECT_FINETUNED, ARCHITECT_GOLD, ARCHITECT_UD, WALK_GOLD, random_graph


def test_walk_graph_shape():
    graph = parse_penman(WALK_GOLD)
    assert graph.top == "s"
    assert graph.nodes == {"s": "walk-01", "p": "person", "c": "street"}
    assert len(graph.edges) == 2
    assert len(graph.attributes) == 5
    assert len(triples(graph)) == 11
    assert graph.summary()["triples"] == 11


@pytest.mark.parametrize("text, instances, edges, attributes, total", [
    (ARCHITECT_UD, 6, 6, 0, 13),
    (ARCHITECT_GOLD, 8, 7, 1, 17),
])
def test_architect_graph_shapes(text, instances, edges, attributes, total):
    graph = parse_penman(text)
    assert (len(graph.nodes), len(graph.edges), len(graph.attributes)) == (instances, edges, attributes)
    assert len(triples(graph)) == total


def test_role_case_is_kept():
    graph = parse_penman(WALK_GOLD)
    assert Edge("s", ":Arg0", "p") in graph.edges
    assert Triple("relation", "s", ":Arg0", "p") in triples(graph)


def test_top_triple_shape():
    graph = parse_penman("(x / thing)")
    assert triples(graph) == {
        Triple("top", "TOP", "top", "x"),
        Triple("instance", "x", "instance", "thing"),
    }


def test_quoted_constant_keeps_flag():
    graph = parse_penman(ARCHITECT_FINETUNED)
    value = next(a for a in graph.attributes if a.role == ":value")
    assert value == Attribute("z8", ":value", ":)", quoted=True)
    assert '":)"' in serialize_penman(graph)


def test_reentrancy_is_an_edge():
    graph = parse_penman("(w / want-01 :ARG0 (b / boy) :ARG1 (g / go-02 :ARG0 b))")
    assert Edge("g", ":ARG0", "b") in graph.edges
    assert not graph.attributes


def test_bare_token_that_is_not_a_variable_is_a_constant():
    graph = parse_penman("(g / go-02 :polarity - :mode imperative)")
    assert {(a.role, a.value) for a in graph.attributes} == {(":polarity", "-"), (":mode", "imperative")}


@pytest.mark.parametrize("text", ["", "   \n  "])
def test_empty_input(text):
    with pytest.raises(EmptyInput):
        parse_penman(text)


@pytest.mark.parametrize("text", [
    "(a / b",
    "(a / b))",
    "(a / b) (c / d)",
    "a / b",
    '(a / b :name "open',
])
def test_malformed_text(text):
    with pytest.raises(ParseError):
        parse_penman(text)


def test_unbalanced_error_has_position():
    with pytest.raises(ParseError) as excinfo:
        parse_penman("(a / b :ARG0 (c / d)")
    assert excinfo.value.position is not None


def test_duplicate_variable():
    with pytest.raises(DuplicateVariable) as excinfo:
        parse_penman("(a / b :ARG0 (a / c))")
    assert excinfo.value.variable == "a"


def test_undefined_variable():
    with pytest.raises(UndefinedVariable) as excinfo:
        parse_penman("(s1a / b :ARG0 s1z)")
    assert excinfo.value.variable == "s1z"


def test_undefined_numbered_variable():
    with pytest.raises(UndefinedVariable):
        parse_penman("(z0 / and :op1 (z1 / go-02) :op2 z9)")


def test_variable_shaped_constant_outside_the_id_family():
    graph = parse_penman("(h / have-03 :ARG1 x1 :mod (r / red))")
    assert Attribute("h", ":ARG1", "x1") in graph.attributes
    assert ":ARG1 x1" in serialize_penman(graph, indent=None)
    assert triples(parse_penman(serialize_penman(graph))) == triples(graph)


def test_quoted_concepts_stay_quoted():
    text = '(s / "Main Street" :mod (b / busy) :ARG0 (x / "thing"))'
    graph = parse_penman(text)
    assert graph.nodes["s"] == "Main Street"
    assert graph.quoted_concepts == {"s", "x"}
    assert serialize_penman(graph, indent=None) == text
    assert triples(parse_penman(serialize_penman(graph))) == triples(graph)


def test_disconnected_graph_does_not_serialize():
    graph = SemanticGraph(top="a", nodes={"a": "x", "b": "y"})
    assert not graph.is_connected()
    with pytest.raises(SerializeError) as excinfo:
        serialize_penman(graph)
    assert excinfo.value.unreachable == ["b"]


def test_edge_into_the_top_is_written_inverted():
    graph = SemanticGraph(top="b", nodes={"w": "want-01", "b": "boy"}, edges=(Edge("w", ":ARG0", "b"),))
    text = serialize_penman(graph, indent=None)
    assert ":ARG0-of" in text
    assert scoring_triples(parse_penman(text)) == scoring_triples(graph)


def test_constant_equal_to_a_variable_is_quoted():
    graph = SemanticGraph(top="a", nodes={"a": "thing"}, attributes=(Attribute("a", ":mod", "a"),))
    text = serialize_penman(graph, indent=None)
    assert '"a"' in text
    assert triples(parse_penman(text)) == triples(graph)


def test_single_line_serialization():
    text = serialize_penman(parse_penman(WALK_GOLD), indent=None)
    assert "\n" not in text
    assert text.startswith("(s / walk-01")


@pytest.mark.parametrize("text", ALL_GRAPHS)
def test_fixture_roundtrip(text):
    graph = parse_penman(text)
    assert triples(parse_penman(serialize_penman(graph))) == triples(graph)


def test_random_twenty_node_roundtrip():
    graph = random_graph(random.Random(20), 20)
    assert triples(parse_penman(serialize_penman(graph))) == triples(graph)


@settings(max_examples=1000, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1), size=st.integers(min_value=1, max_value=20))
def test_random_graph_roundtrip(seed, size):
    graph = random_graph(random.Random(seed), size)
    assert triples(parse_penman(serialize_penman(graph))) == triples(graph)


def test_scan_parens_counts_depth_outside_strings():
    scan = scan_parens('(a / b :value ")(" :ARG0 (c / d)')
    assert scan.depth == 1
    assert scan.stray_close is None
    assert scan.unterminated_string is None


def test_read_penman_blocks():
    text = (
        "# ::id a1\n"
        "# ::snt They walked on the street\n"
        "(s / walk-01\n"
        "   :Arg0 (p / person))\n"
        "\n"
        "# ::id a2 ::snt Hi\n"
        "(h / hi)\n"
    )
    blocks = read_penman_blocks(text)
    assert [b.id for b in blocks] == ["a1", "a2"]
    assert blocks[0].sentence == "They walked on the street"
    assert blocks[1].sentence == "Hi"
    assert blocks[0].line == 1
    assert blocks[1].line == 6
    assert parse_penman(blocks[0].text).top == "s"


def test_comment_only_block_is_skipped():
    blocks = read_penman_blocks("# just a note\n\n(a / b)\n")
    assert [b.text for b in blocks] == ["(a / b)"]


def test_write_then_read_blocks():
    blocks = read_penman_blocks("# ::id x1\n# ::snt One\n(a / b)\n\n# ::id x2\n(c / d)\n")
    again = read_penman_blocks(write_penman_blocks(blocks))
    assert [(b.id, b.sentence, b.text) for b in again] == [(b.id, b.sentence, b.text) for b in blocks]


def test_read_line_graphs():
    blocks = read_line_graphs("(a / b)\n\n(c / d :mod (e / f))\n")
    assert [b.text for b in blocks] == ["(a / b)", "(c / d :mod (e / f))"]
    assert [b.line for b in blocks] == [1, 3]
