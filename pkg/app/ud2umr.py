"""Bootstrap partial UMR graphs from UD trees, and move them to and from an
external completion model as JSON-lines records."""

import json
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .config import UD_RULES_FILE
from .conllu_io import ConlluSentence, ConlluToken
from .errors import DataError, IdMismatch, LengthMismatch, UnmappableRoot
from .graph import Attribute, Edge, SemanticGraph, parse_penman, serialize_penman
from .logger_config import get_logger
from .repair import CLEAN, REPAIRED, repair_parens

logger = get_logger("ud2umr")

DROP = "DROP"
OP = "OP"
PLACEHOLDER_SENSE = "-00"
POLICIES = frozenset({"predicate", "lemma", "pronoun"})

NUMBER_VALUES = {"Sing": "Singular", "Plur": "Plural", "Dual": "Dual", "Tri": "Trial", "Pauc": "Paucal"}
PERSON_VALUES = {"1": "1st", "2": "2nd", "3": "3rd", "4": "4th"}

_UNSAFE = re.compile(r'[\s()"/:~,]+')


@dataclass(frozen=True)
class RuleTable:
    deprel_map: Mapping[str, str] = field(default_factory=dict)
    pos_map: Mapping[str, str] = field(default_factory=dict)
    thing_pronouns: frozenset[str] = frozenset()
    version: str = "unversioned"

    def role_for(self, deprel: str) -> str | None:
        """Role, OP or DROP for a relation; None when the relation is unknown."""
        if deprel in self.deprel_map:
            return self.deprel_map[deprel]
        return self.deprel_map.get(deprel.split(":")[0])

    def with_deprel(self, deprel: str, role: str) -> "RuleTable":
        return replace(self, deprel_map={**self.deprel_map, deprel: role})


def load_rules(path: str | Path | None = None) -> RuleTable:
    path = Path(path) if path else UD_RULES_FILE
    deprel_map: dict[str, str] = {}
    pos_map: dict[str, str] = {}
    thing: set[str] = set()
    version = "unversioned"
    section = None

    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1]
                if section not in ("deprel", "upos", "thing-pronouns"):
                    raise DataError(f"{path}:{lineno}: unknown section [{section}]")
                continue
            key, _, value = line.partition("\t")
            value = value.strip()
            if section is None:
                if key == "version":
                    version = value
                    continue
                raise DataError(f"{path}:{lineno}: entry outside a section")
            if section == "thing-pronouns":
                thing.add(key.lower())
            elif section == "deprel":
                if key in deprel_map:
                    raise DataError(f"{path}:{lineno}: relation '{key}' is mapped twice")
                if value not in (DROP, OP) and not value.startswith(":"):
                    raise DataError(f"{path}:{lineno}: '{value}' is not a role, {OP} or {DROP}")
                deprel_map[key] = value
            else:
                if value not in POLICIES:
                    raise DataError(f"{path}:{lineno}: unknown concept policy '{value}'")
                pos_map[key] = value

    logger.debug(f"Loaded UD rules {version} from {path}: {len(deprel_map)} relations, {len(pos_map)} POS policies")
    return RuleTable(deprel_map, pos_map, frozenset(thing), version)


_default_rules: RuleTable | None = None


def default_rules() -> RuleTable:
    global _default_rules
    if _default_rules is None:
        _default_rules = load_rules()
    return _default_rules


# --- bootstrap ---------------------------------------------------------------

def _symbol(text: str) -> str:
    return _UNSAFE.sub("-", text).strip("-")


def _concept(token: ConlluToken, policy: str, rules: RuleTable) -> str:
    if policy == "pronoun":
        return "thing" if token.lemma.lower() in rules.thing_pronouns else "person"
    lemma = token.lemma if token.lemma not in ("", "_") else token.form
    lemma = lemma if token.upos == "PROPN" else lemma.lower()
    concept = _symbol(lemma) or "thing"
    return concept + PLACEHOLDER_SENSE if policy == "predicate" else concept


def _attributes(token: ConlluToken, policy: str) -> list[tuple[str, str]]:
    attrs = []
    if policy == "pronoun" and token.feats.get("Person") in PERSON_VALUES:
        attrs.append((":refer-person", PERSON_VALUES[token.feats["Person"]]))
    if policy == "pronoun" or token.upos in ("NOUN", "PROPN"):
        number = token.feats.get("Number")
        if number in NUMBER_VALUES:
            attrs.append((":refer-number", NUMBER_VALUES[number]))
    return attrs


def bootstrap_partial(sentence: ConlluSentence, rules: RuleTable | None = None,
                      sentence_index: int = 1) -> SemanticGraph:
    """Deterministically turn a UD tree into a partial UMR graph.

    Content tokens with a POS policy become nodes, relations become roles per
    the rule table, and conjuncts are gathered under an "and"/"or" node.
    Aspect and modal strength are left for the completion step.

    Raises:
        UnmappableRoot: the root token's POS has no concept policy.
    """
    rules = rules or default_rules()
    by_id = {token.id: token for token in sentence.tokens}
    root = sentence.root
    if root.upos not in rules.pos_map:
        raise UnmappableRoot(f"sentence {sentence.sent_id}: root '{root.form}' has POS {root.upos} without a concept policy")

    kept = {root.id}
    for token in sentence.tokens:
        if token.id == root.id or token.upos not in rules.pos_map:
            continue
        role = rules.role_for(token.deprel)
        if role is None:
            logger.debug(f"Unknown relation '{token.deprel}' on token {token.id}; dropping it")
        elif role != DROP:
            kept.add(token.id)

    def kept_parent(token: ConlluToken) -> int:
        head = token.head
        while head not in kept:
            head = by_id[head].head
        return head

    # children per kept node, coordination collected separately
    children: dict[object, list[tuple[str, object]]] = {tid: [] for tid in kept}
    conjuncts: dict[int, list[int]] = {}
    for token in sentence.tokens:
        if token.id not in kept or token.id == root.id:
            continue
        parent = kept_parent(token)
        role = rules.role_for(token.deprel)
        if role == OP:
            conjuncts.setdefault(parent, []).append(token.id)
        else:
            children[parent].append((role, token.id))

    top: object = root.id
    anchors: dict[object, int] = {tid: tid for tid in kept}
    concepts: dict[object, str] = {tid: _concept(by_id[tid], rules.pos_map[by_id[tid].upos], rules) for tid in kept}
    for first, rest in conjuncts.items():
        coord = ("coord", first)
        cc = [t for conj in rest for t in sentence.children(conj) if t.deprel == "cc"]
        concepts[coord] = "or" if any(t.lemma.lower() == "or" for t in cc) else "and"
        anchors[coord] = cc[0].id if cc else first
        children[coord] = [(f":op{i}", tid) for i, tid in enumerate([first, *rest], start=1)]
        if first == top:
            top = coord
        else:
            for key, items in children.items():
                if key != coord:
                    children[key] = [(role, coord if child == first else child) for role, child in items]

    # variables in preorder: sentence prefix + first concept letter + counter
    variables: dict[object, str] = {}
    letter_counts: dict[str, int] = {}
    edges: list[Edge] = []
    attributes: list[Attribute] = []
    sequence: list[tuple[str, int]] = []

    def name(key) -> str:
        letter = concepts[key][0].lower()
        letter = letter if "a" <= letter <= "z" else "x"
        count = letter_counts.get(letter, 0) + 1
        letter_counts[letter] = count
        return f"s{sentence_index}{letter}" + (str(count) if count > 1 else "")

    def visit(key) -> None:
        variables[key] = name(key)
        for role, child in children.get(key, []):
            visit(child)
            sequence.append(("edge", len(edges)))
            edges.append(Edge(variables[key], role, variables[child]))
        if not isinstance(key, tuple):
            token = by_id[key]
            for role, value in _attributes(token, rules.pos_map[token.upos]):
                sequence.append(("attr", len(attributes)))
                attributes.append(Attribute(variables[key], role, value))

    visit(top)

    graph = SemanticGraph(
        top=variables[top],
        nodes={variables[key]: concepts[key] for key in variables},
        edges=tuple(edges),
        attributes=tuple(attributes),
        alignments={variables[key]: (anchors[key], anchors[key]) for key in variables},
        branch_sequence=tuple(sequence),
    )
    logger.debug(f"Bootstrapped {sentence.sent_id}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    return graph


# --- completion records -------------------------------------------------------

@dataclass(frozen=True)
class CompletionRecord:
    sent_id: str
    sentence: str
    partial: str
    gold: str = ""


def _single_line(graph_or_text: SemanticGraph | str | None) -> str:
    if graph_or_text is None:
        return ""
    if isinstance(graph_or_text, SemanticGraph):
        return serialize_penman(graph_or_text, indent=None)
    return " ".join(graph_or_text.split())


def export_completion_records(sentences: Sequence[ConlluSentence], partials: Sequence[SemanticGraph | str],
                              golds: Sequence[SemanticGraph | str | None] | None = None) -> list[CompletionRecord]:
    if len(sentences) != len(partials):
        raise LengthMismatch(f"{len(sentences)} sentences but {len(partials)} partial graphs")
    if golds is not None and len(golds) != len(sentences):
        raise LengthMismatch(f"{len(sentences)} sentences but {len(golds)} gold graphs")
    golds = golds if golds is not None else [None] * len(sentences)
    records = [
        CompletionRecord(sentence.sent_id, sentence.text, _single_line(partial), _single_line(gold))
        for sentence, partial, gold in zip(sentences, partials, golds, strict=True)
    ]
    logger.info(f"Exported {len(records)} completion record(s)")
    return records


def write_completion_records(records: Sequence[CompletionRecord]) -> str:
    """One JSON object per line; JSON string escaping covers tabs and newlines."""
    return "".join(
        json.dumps({"sent_id": r.sent_id, "sentence": r.sentence, "partial": r.partial, "gold": r.gold},
                   ensure_ascii=False) + "\n"
        for r in records
    )


def read_completion_records(text: str) -> list[CompletionRecord]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
            record = CompletionRecord(str(data["sent_id"]), data["sentence"], data["partial"], data.get("gold") or "")
        except (json.JSONDecodeError, KeyError, TypeError) as e:
            raise DataError(f"line {lineno}: malformed completion record: {e}") from e
        parse_penman(record.partial)
        if record.gold:
            parse_penman(record.gold)
        records.append(record)
    return records


# --- ingestion ----------------------------------------------------------------

@dataclass(frozen=True)
class ParseFailureReport:
    sent_id: str
    text: str
    error: str


@dataclass
class IngestResult:
    graphs: list[tuple[str, SemanticGraph]] = field(default_factory=list)
    failures: list[ParseFailureReport] = field(default_factory=list)
    repaired: list[str] = field(default_factory=list)


def ingest_completions(records: Sequence[CompletionRecord],
                       completions: Sequence[str] | Mapping[str, str]) -> IngestResult:
    """Repair and parse model completions, aligned by order or by sent_id."""
    if isinstance(completions, Mapping):
        missing = [r.sent_id for r in records if r.sent_id not in completions]
        extra = sorted(set(completions) - {r.sent_id for r in records})
        if missing or extra:
            raise IdMismatch(f"completions do not match records; missing {missing}, unexpected {extra}")
        texts = [completions[r.sent_id] for r in records]
    else:
        if len(completions) != len(records):
            raise IdMismatch(f"{len(records)} records but {len(completions)} completions")
        texts = list(completions)

    result = IngestResult()
    for record, text in zip(records, texts, strict=True):
        outcome = repair_parens(text)
        if outcome.status not in (CLEAN, REPAIRED):
            logger.warning(f"Unparseable completion for {record.sent_id}: {outcome.diagnostics[0]}")
            result.failures.append(ParseFailureReport(record.sent_id, text, "; ".join(outcome.diagnostics)))
            continue
        if outcome.status == REPAIRED:
            result.repaired.append(record.sent_id)
        result.graphs.append((record.sent_id, parse_penman(outcome.text)))

    logger.info(f"Ingested {len(result.graphs)} completion(s): {len(result.repaired)} repaired, {len(result.failures)} failed")
    return result
