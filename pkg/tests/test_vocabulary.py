"""
Tests for UMR vocabulary validation
"""

import pytest

from app.errors import DataError
from app.graph import Edge, SemanticGraph, parse_penman
from app.vocabulary import default_vocabulary, load_vocabulary, validate_umr
from tests.fixtures import ARCHITECT_FINETUNED, ARCHITECT_GOLD, WALK_GOLD


@pytest.mark.parametrize("text", [WALK_GOLD, ARCHITECT_GOLD, ARCHITECT_FINETUNED])
def test_reference_graphs_are_clean(text):
    assert validate_umr(parse_penman(text)) == []


def test_unknown_aspect_value():
    graph = parse_penman("(s / walk-01 :aspect Sleepy)")
    issues = validate_umr(graph)
    assert [i.kind for i in issues] == ["UnknownAttributeValue"]
    assert issues[0].variable == "s"
    assert issues[0].value == "Sleepy"


def test_values_match_case_insensitively():
    assert validate_umr(parse_penman("(s / walk-01 :modstr fullaff :refer-number plural)")) == []


def test_invalid_role_name():
    graph = SemanticGraph(top="a", nodes={"a": "x", "b": "y"}, edges=(Edge("a", "ARG0!", "b"),))
    issues = validate_umr(graph)
    assert [i.kind for i in issues] == ["InvalidRoleName"]
    assert issues[0].role == "ARG0!"


def test_custom_role_pattern():
    graph = parse_penman("(a / x :FR (b / y))")
    issues = validate_umr(graph, role_pattern=r"^:(ARG\d|op\d)$")
    assert [i.kind for i in issues] == ["InvalidRoleName"]


def test_disconnected_graph():
    graph = SemanticGraph(top="a", nodes={"a": "x", "b": "y", "c": "z"}, edges=(Edge("b", ":mod", "c"),))
    issues = validate_umr(graph)
    assert [i.kind for i in issues] == ["Disconnected"]
    assert issues[0].details == ("b", "c")


def test_validation_does_not_change_the_graph():
    graph = parse_penman("(s / walk-01 :aspect Sleepy)")
    before = (dict(graph.nodes), graph.edges, graph.attributes)
    validate_umr(graph)
    assert (dict(graph.nodes), graph.edges, graph.attributes) == before


def test_custom_vocabulary_file(tmp_path):
    path = tmp_path / "vocab.tsv"
    path.write_text("# test vocabulary\naspect\tState\nmode\texpressive\n", encoding="utf-8")
    vocab = load_vocabulary(path)
    assert vocab.aspect_values == {"State"}
    issues = validate_umr(parse_penman("(s / walk-01 :aspect Activity)"), vocab)
    assert [i.kind for i in issues] == ["UnknownAttributeValue"]


def test_unknown_vocabulary_role(tmp_path):
    path = tmp_path / "vocab.tsv"
    path.write_text("tense\tpast\n", encoding="utf-8")
    with pytest.raises(DataError):
        load_vocabulary(path)


def test_default_vocabulary_is_cached():
    assert default_vocabulary() is default_vocabulary()
    assert "FullAff" in default_vocabulary().modstr_values
