"""
Tests for parenthesis repair
"""

import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.graph import parse_penman, serialize_penman, triples
from app.repair import (CLEAN, REPAIRED, UNRECOVERABLE, repair_parens, repair_report, status_lines)
from tests.fixtures import ALL_GRAPHS, ARCHITECT_GOLD, WALK_GOLD, random_graph


def drop_trailing_closers(text: str, k: int) -> str:
    stripped = text.rstrip()
    assert stripped.endswith(")" * k)
    return stripped[:-k]


def test_clean_text_is_untouched():
    outcome = repair_parens(WALK_GOLD)
    assert outcome.status == CLEAN
    assert outcome.text == WALK_GOLD
    assert outcome.edits == []


@pytest.mark.parametrize("k", [1, 2, 3])
def test_missing_final_closers(k):
    original = parse_penman(ARCHITECT_GOLD)
    outcome = repair_parens(drop_trailing_closers(ARCHITECT_GOLD, k))
    assert outcome.status == REPAIRED
    assert len(outcome.edits) == k
    assert triples(parse_penman(outcome.text)) == triples(original)


def test_surplus_closers_are_removed():
    outcome = repair_parens("(a / b :ARG0 (c / d)))")
    assert outcome.status == REPAIRED
    assert outcome.text == "(a / b :ARG0 (c / d))"


def test_interior_mismatch():
    outcome = repair_parens("(a / b :ARG0 (c / d)) :ARG1 (e / f))")
    assert outcome.status == REPAIRED
    assert outcome.text == "(a / b :ARG0 (c / d) :ARG1 (e / f))"
    assert [e.action for e in outcome.edits] == ["delete"]


def test_repair_keeps_labels():
    broken = "(s / walk-01 :Arg0 (p / person :refer-number Plural) :Arg1 (c / street"
    outcome = repair_parens(broken)
    assert outcome.status == REPAIRED
    assert outcome.text.replace(")", "").replace("(", "") == broken.replace(")", "").replace("(", "")


def test_stray_close_is_unrecoverable():
    text = ")))) (a / b"
    outcome = repair_parens(text)
    assert outcome.status == UNRECOVERABLE
    assert outcome.text == text
    assert outcome.diagnostics


@pytest.mark.parametrize("text", ["walk-01 :ARG0 person", '(a / b :name "open', "(a b c)"])
def test_non_paren_errors_are_unrecoverable(text):
    assert repair_parens(text).status == UNRECOVERABLE


def test_repair_campaign():
    rng = random.Random(7)
    repaired = 0
    for i in range(100):
        graph = random_graph(rng, rng.randint(2, 15))
        k = rng.randint(1, 3)
        text = serialize_penman(graph)
        if not text.rstrip().endswith(")" * k):
            k = 1
        outcome = repair_parens(drop_trailing_closers(text, k))
        if outcome.status == REPAIRED and triples(parse_penman(outcome.text)) == triples(graph):
            repaired += 1
    assert repaired == 100


@pytest.mark.parametrize("text", ALL_GRAPHS)
def test_repair_is_idempotent(text):
    once = repair_parens(text[:-1])
    twice = repair_parens(once.text)
    assert once.status == REPAIRED
    assert twice.status == CLEAN
    assert twice.text == once.text


@settings(max_examples=200, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_repair_never_breaks_valid_text(seed):
    text = serialize_penman(random_graph(random.Random(seed), 6))
    outcome = repair_parens(text)
    assert outcome.status == CLEAN
    assert outcome.text == text


def test_report_and_status_lines():
    outcomes = [repair_parens(WALK_GOLD), repair_parens(WALK_GOLD[:-1]), repair_parens(")))) (a / b")]
    summary = repair_report(outcomes, ["g1", None, "g3"])
    assert summary.counts == {CLEAN: 1, REPAIRED: 1, UNRECOVERABLE: 1}
    assert summary.unrecoverable == ["g3"]
    assert summary.to_dict()["counts"][REPAIRED] == 1

    lines = status_lines(outcomes, ["g1", None, "g3"]).splitlines()
    assert lines[0] == "id\tstatus\tedits\tdiagnostic"
    assert lines[1].startswith("g1\tclean\t0")
    assert lines[2].startswith("2\trepaired\t1")
    assert lines[3].startswith("g3\tunrecoverable\t0\t")


def test_report_labels_by_position_without_ids():
    summary = repair_report([repair_parens(")))) (a / b")])
    assert summary.unrecoverable == ["1"]


def long_line() -> str:
    text = serialize_penman(random_graph(random.Random(5), 60), indent=None)
    assert "\n" not in text
    return text


def test_long_interior_mismatch_is_bounded():
    text = long_line()
    middle = text.index(" :", len(text) // 2)
    broken = text[:middle] + ")" + text[middle:-1]
    start = time.perf_counter()
    outcome = repair_parens(broken)
    assert time.perf_counter() - start < 5.0
    assert outcome.status in (REPAIRED, UNRECOVERABLE)
    if outcome.status == REPAIRED:
        parse_penman(outcome.text)


def test_long_unrepairable_text_gives_up_quickly():
    text = long_line()
    middle = text.index(" :", len(text) // 2) + 1
    broken = text[:middle] + "((((" + text[middle:]
    start = time.perf_counter()
    outcome = repair_parens(broken)
    assert time.perf_counter() - start < 5.0
    assert outcome.status == UNRECOVERABLE
    assert outcome.text == broken
