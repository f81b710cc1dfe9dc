"""
Tests for CoNLL-U reading, validation and tag merging
"""

import pytest

from app.conllu_io import normalize_tags, parse_conllu, read_conllu_file, serialize_conllu
from app.errors import ConlluError, CyclicHeads, MultipleRoots, NonContiguousIds, WrongColumnCount
from tests.fixtures import ARCHITECT_CONLLU, WALK_CONLLU


def row(*cells) -> str:
    return "\t".join(str(c) for c in cells) + "\n"


def test_walk_sentence():
    [sentence] = parse_conllu(WALK_CONLLU)
    assert sentence.sent_id == "walk1"
    assert sentence.text == "They walked on the street"
    assert len(sentence.tokens) == 5
    assert sentence.root.id == 2
    assert sentence.tokens[0].feats == {"Case": "Nom", "Number": "Plur", "Person": "3", "PronType": "Prs"}
    assert [t.id for t in sentence.children(5)] == [3, 4]


def test_defaults_without_metadata():
    text = row(1, "Hello", "hello", "INTJ", "_", "_", 0, "root", "_", "_") + "\n"
    [sentence] = parse_conllu(text)
    assert sentence.sent_id == "1"
    assert sentence.text == "Hello"


def test_several_sentences():
    sentences = parse_conllu(WALK_CONLLU + ARCHITECT_CONLLU)
    assert [s.sent_id for s in sentences] == ["walk1", "tag1"]


def test_multiword_ranges_are_skipped():
    text = (
        row("1-2", "don't", "_", "_", "_", "_", "_", "_", "_", "_")
        + row(1, "do", "do", "AUX", "_", "_", 3, "aux", "_", "_")
        + row(2, "n't", "not", "PART", "_", "_", 3, "advmod", "_", "_")
        + row(3, "go", "go", "VERB", "_", "_", 0, "root", "_", "_")
        + "\n"
    )
    [sentence] = parse_conllu(text)
    assert [t.form for t in sentence.tokens] == ["do", "n't", "go"]


def test_wrong_column_count():
    text = "# sent_id = x\n1\tHello\thello\tINTJ\t_\t_\t0\troot\n\n"
    with pytest.raises(WrongColumnCount) as excinfo:
        parse_conllu(text)
    assert excinfo.value.line == 2


def test_non_contiguous_ids():
    text = row(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_") + row(3, "b", "b", "NOUN", "_", "_", 1, "nmod", "_", "_") + "\n"
    with pytest.raises(NonContiguousIds):
        parse_conllu(text)


def test_multiple_roots():
    text = row(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_") + row(2, "b", "b", "NOUN", "_", "_", 0, "root", "_", "_") + "\n"
    with pytest.raises(MultipleRoots):
        parse_conllu(text)


def test_cyclic_heads():
    text = (
        row(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_")
        + row(2, "b", "b", "NOUN", "_", "_", 3, "nmod", "_", "_")
        + row(3, "c", "c", "NOUN", "_", "_", 2, "nmod", "_", "_")
        + "\n"
    )
    with pytest.raises(CyclicHeads):
        parse_conllu(text)


def test_head_out_of_range():
    text = row(1, "a", "a", "NOUN", "_", "_", 0, "root", "_", "_") + row(2, "b", "b", "NOUN", "_", "_", 7, "nmod", "_", "_") + "\n"
    with pytest.raises(ConlluError):
        parse_conllu(text)


def test_read_file_and_serialize(tmp_path):
    path = tmp_path / "walk.conllu"
    path.write_text(WALK_CONLLU, encoding="utf-8")
    sentences = read_conllu_file(path)
    again = parse_conllu(serialize_conllu(sentences))
    assert again == sentences


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        read_conllu_file(tmp_path / "missing.conllu")


def test_merge_angle_bracket_tag():
    [sentence] = parse_conllu(ARCHITECT_CONLLU)
    merged = normalize_tags(sentence)
    assert [t.form for t in merged.tokens] == ["<Architect>", "sorry"]
    tag, sorry = merged.tokens
    assert (tag.id, tag.upos, tag.head, tag.deprel) == (1, "PROPN", 2, "vocative")
    assert (sorry.id, sorry.head) == (2, 0)


def test_merge_square_bracket_tag():
    text = (
        row(1, "[", "[", "PUNCT", "_", "_", 2, "punct", "_", "_")
        + row(2, "Builder", "Builder", "PROPN", "_", "_", 3, "nsubj", "_", "_")
        + row(3, "puts", "put", "VERB", "_", "_", 0, "root", "_", "_")
        + "\n"
    )
    merged = normalize_tags(parse_conllu(text)[0])
    assert [t.form for t in merged.tokens] == ["[Builder", "puts"]
    assert merged.tokens[0].deprel == "nsubj"
    assert merged.tokens[0].head == 2


def test_no_tags_returns_sentence_unchanged():
    [sentence] = parse_conllu(WALK_CONLLU)
    assert normalize_tags(sentence) is sentence


def test_merging_is_idempotent():
    [sentence] = parse_conllu(ARCHITECT_CONLLU)
    merged = normalize_tags(sentence)
    assert normalize_tags(merged) is merged
    assert [t.form for t in normalize_tags(merged).tokens] == ["<Architect>", "sorry"]
