import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import conllu
import networkx as nx
from conllu.exceptions import ParseException
from conllu.models import Token, TokenList

from .errors import ConlluError, CyclicHeads, MultipleRoots, NonContiguousIds, WrongColumnCount
from .logger_config import get_logger

logger = get_logger("conllu_io")

COLUMNS = 10

# Per-token regexes; a run of tokens matching one pattern is merged into one token.
DEFAULT_TAG_PATTERNS: tuple[tuple[str, ...], ...] = (
    (r"^<$", r"^\w+$", r"^>$"),     # "<", "Architect", ">"  -> "<Architect>"
    (r"^\[$", r"^\w+$"),            # "[", "Builder"         -> "[Builder"
)


@dataclass(frozen=True)
class ConlluToken:
    id: int
    form: str
    lemma: str
    upos: str
    feats: dict[str, str] = field(default_factory=dict)
    head: int = 0
    deprel: str = "_"
    xpos: str | None = None
    deps: object = None
    misc: dict | None = None


@dataclass(frozen=True)
class ConlluSentence:
    sent_id: str
    text: str
    tokens: tuple[ConlluToken, ...] = ()

    @property
    def root(self) -> ConlluToken:
        return next(token for token in self.tokens if token.head == 0)

    def children(self, token_id: int) -> list[ConlluToken]:
        return [token for token in self.tokens if token.head == token_id]


def _chunks(text: str):
    """Blank-line separated sentences with the line number of their first line."""
    lines: list[str] = []
    start = 1
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if lines:
                yield start, lines
            lines = []
            continue
        if not lines:
            start = lineno
        lines.append(line)
    if lines:
        yield start, lines


def _check_tree(tokens: Sequence[ConlluToken], line: int) -> None:
    roots = [token.id for token in tokens if token.head == 0]
    if len(roots) > 1:
        raise MultipleRoots(f"{len(roots)} tokens attach to the root: {roots}", line)

    heads = nx.DiGraph()
    heads.add_nodes_from(token.id for token in tokens)
    for token in tokens:
        if token.head == token.id:
            raise CyclicHeads(f"token {token.id} is its own head", line)
        if token.head != 0:
            heads.add_edge(token.head, token.id)
    if not nx.is_directed_acyclic_graph(heads):
        cycle = [source for source, _ in nx.find_cycle(heads)]
        raise CyclicHeads(f"head graph has a cycle through tokens {cycle}", line)
    if not roots:
        raise CyclicHeads("no token attaches to the root", line)


def _sentence(token_list: TokenList, index: int, line: int) -> ConlluSentence:
    tokens = []
    for token in token_list:
        if not isinstance(token["id"], int):
            continue  # multiword range or empty node
        tokens.append(ConlluToken(
            id=token["id"],
            form=token["form"],
            lemma=token["lemma"] if token["lemma"] is not None else "_",
            upos=token["upos"] if token["upos"] is not None else "_",
            feats=dict(token["feats"] or {}),
            head=token["head"] if token["head"] is not None else 0,
            deprel=token["deprel"] if token["deprel"] is not None else "_",
            xpos=token["xpos"],
            deps=token["deps"],
            misc=token["misc"],
        ))

    ids = [token.id for token in tokens]
    if ids != list(range(1, len(ids) + 1)):
        raise NonContiguousIds(f"token ids are not 1..{len(ids)}: {ids}", line)
    for token in tokens:
        if not 0 <= token.head <= len(tokens):
            raise ConlluError(f"token {token.id} has head {token.head} outside 0..{len(tokens)}", line)
    _check_tree(tokens, line)

    metadata = token_list.metadata or {}
    return ConlluSentence(
        sent_id=metadata.get("sent_id") or str(index),
        text=metadata.get("text") or " ".join(token.form for token in tokens),
        tokens=tuple(tokens),
    )


def parse_conllu(text: str) -> list[ConlluSentence]:
    """Parse and validate CoNLL-U text; errors carry the offending line number."""
    sentences: list[ConlluSentence] = []
    for start, lines in _chunks(text):
        for offset, line in enumerate(lines):
            if line.startswith("#"):
                continue
            columns = line.split("\t")
            if len(columns) != COLUMNS:
                raise WrongColumnCount(f"expected {COLUMNS} tab-separated columns, got {len(columns)}", start + offset)
        try:
            parsed = conllu.parse("\n".join(lines) + "\n\n")
        except (ParseException, ValueError) as e:
            logger.error(f"CoNLL-U parse failed near line {start}: {e}", exc_info=True)
            raise ConlluError(str(e), start) from e
        for token_list in parsed:
            sentences.append(_sentence(token_list, len(sentences) + 1, start))
    logger.debug(f"Parsed {len(sentences)} CoNLL-U sentence(s)")
    return sentences


def read_conllu_file(path: str | Path) -> list[ConlluSentence]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read {path}: {e}", exc_info=True)
        raise
    sentences = parse_conllu(text)
    logger.info(f"Read {len(sentences)} sentence(s) from {path}")
    return sentences


def _token_list(sentence: ConlluSentence) -> TokenList:
    tokens = [
        Token({
            "id": token.id,
            "form": token.form,
            "lemma": token.lemma,
            "upos": token.upos,
            "xpos": token.xpos,
            "feats": dict(token.feats) or None,
            "head": token.head,
            "deprel": token.deprel,
            "deps": token.deps,
            "misc": token.misc,
        })
        for token in sentence.tokens
    ]
    return TokenList(tokens, metadata={"sent_id": sentence.sent_id, "text": sentence.text})


def serialize_conllu(sentences: Sequence[ConlluSentence]) -> str:
    return "".join(_token_list(sentence).serialize() for sentence in sentences)


# --- tag merging -------------------------------------------------------------

def _depths(tokens: Sequence[ConlluToken]) -> dict[int, int]:
    head_of = {token.id: token.head for token in tokens}
    depths: dict[int, int] = {}
    for token in tokens:
        depth, current = 0, token.id
        while head_of[current] != 0:
            current = head_of[current]
            depth += 1
        depths[token.id] = depth
    return depths


def _match_groups(tokens: Sequence[ConlluToken], patterns) -> list[tuple[int, int]]:
    """Non-overlapping (start, length) windows of tokens matching a pattern."""
    compiled = [[re.compile(part) for part in pattern] for pattern in patterns]
    groups = []
    i = 0
    while i < len(tokens):
        for parts in compiled:
            window = tokens[i:i + len(parts)]
            if len(window) == len(parts) and all(p.match(t.form) for p, t in zip(parts, window, strict=True)):
                groups.append((i, len(parts)))
                i += len(parts)
                break
        else:
            i += 1
    return groups


def normalize_tags(sentence: ConlluSentence,
                   patterns: Sequence[Sequence[str]] = DEFAULT_TAG_PATTERNS) -> ConlluSentence:
    """Merge tokenizer-split dialogue tags ("<", "Architect", ">") into one token.

    The merged token keeps the POS and features of its word part and the
    attachment of the group member closest to the root; heads are re-indexed.
    """
    tokens = sentence.tokens
    groups = _match_groups(tokens, patterns)
    if not groups:
        return sentence

    depths = _depths(tokens)
    new_id: dict[int, int] = {}
    merged_at: dict[int, tuple[ConlluToken, ...]] = {}
    next_id = 1
    grouped = {start: length for start, length in groups}
    i = 0
    while i < len(tokens):
        length = grouped.get(i, 1)
        members = tokens[i:i + length]
        for member in members:
            new_id[member.id] = next_id
        merged_at[next_id] = members
        next_id += 1
        i += length

    result = []
    for token_id, members in merged_at.items():
        if len(members) == 1:
            token = members[0]
            result.append(replace(token, id=token_id, head=new_id.get(token.head, 0)))
            continue
        anchor = min(members, key=lambda t: (depths[t.id], t.id))
        word = next((t for t in members if re.match(r"^\w+$", t.form)), anchor)
        form = "".join(t.form for t in members)
        result.append(ConlluToken(
            id=token_id, form=form, lemma=form, upos=word.upos, feats=dict(word.feats),
            head=new_id.get(anchor.head, 0), deprel=anchor.deprel,
            xpos=word.xpos, deps=None, misc=anchor.misc,
        ))

    logger.debug(f"Merged {len(groups)} tag group(s) in sentence {sentence.sent_id}")
    return replace(sentence, tokens=tuple(result))
