"""UMR corpus files, filters and train/dev/test splits.

Block format, one block per sentence::

    # meta-info :: sent_id = english-0001 :: doc_id = english-doc1
    # :: snt1	They walked on the street
    Index: 1 2 3 4 5
    Words: They walked on the street
    # sentence level graph:
    (s1w / walk-01 ...)
    # alignment:
    s1w: 2-2
    # document level annotation:
    (s1s0 / sentence ...)

The sentence comes from the ``Words:`` line, or from the ``# :: snt`` line
when there is none. Alignment lines are ``var: start-end`` (``0-0`` means
unaligned). Document-level sections are skipped and counted. A block's
language comes from an optional ``:: lang = xx`` meta-info field, else from
a release prefix such as ``english-`` on its ids or file name.
"""

import json
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError, MalformedBlock, RatiosInvalid, UsageError
from .graph import SemanticGraph, parse_penman, serialize_penman
from .logger_config import get_logger

logger = get_logger("corpus")

PARTITIONS = ("train", "dev", "test")
MINECRAFT = "minecraft"
DEFAULT_MINECRAFT_PATTERNS = ("Builder", "Architect")
BUILDER_PREFIX = "[Builder"

_ALIGNMENT = re.compile(r"^(\S+)\s*:\s*(-?\d+)\s*-\s*(-?\d+)\s*$")
_TERMINAL_PUNCT = re.compile(r"[\s.!?;:,…]+$")

# id and file-name prefixes used by the UMR releases
LANGUAGE_PREFIXES = {
    "english": "en",
    "chinese": "zh",
    "arapaho": "arp",
    "navajo": "nv",
    "sanapana": "spn",
    "kukama": "cod",
}
_LANGUAGE_KEYS = ("lang", "language")


@dataclass(frozen=True)
class UmrEntry:
    doc_id: str
    sent_id: str
    sentence: str
    graph: SemanticGraph
    language: str = "en"
    tags: frozenset[str] = frozenset()

    __hash__ = None


@dataclass(frozen=True)
class BlockIssue:
    path: str
    line: int
    sent_id: str | None
    message: str


@dataclass
class CorpusReadResult:
    entries: list[UmrEntry] = field(default_factory=list)
    issues: list[BlockIssue] = field(default_factory=list)
    document_sections: int = 0


# --- reading -----------------------------------------------------------------------

@dataclass
class _Block:
    line: int
    sent_id: str | None = None
    doc_id: str | None = None
    language: str | None = None
    sentence: str | None = None
    graph_line: int | None = None
    graph_lines: list[str] = field(default_factory=list)
    alignment_lines: list[tuple[int, str]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return self.sentence is None and not self.graph_lines and self.sent_id is None


def _meta(line: str, block: _Block) -> None:
    for part in line.split("::")[1:]:
        key, _, value = part.partition("=")
        key, value = key.strip(), value.strip()
        if key == "sent_id" and value:
            block.sent_id = value
        elif key == "doc_id" and value:
            block.doc_id = value
        elif key in _LANGUAGE_KEYS and value:
            block.language = value


def _prefix_language(name: str | None) -> str | None:
    if not name:
        return None
    prefix = re.split(r"[-_.\s]", name.lower(), maxsplit=1)[0]
    return LANGUAGE_PREFIXES.get(prefix)


def block_language(block: _Block, path: Path, default: str) -> str:
    """Explicit ``lang`` metadata, else the sent_id, doc_id or file-name prefix, else ``default``."""
    if block.language:
        return block.language
    for name in (block.sent_id, block.doc_id, path.stem):
        language = _prefix_language(name)
        if language:
            return language
    return default


def _finish(block: _Block, path: Path, index: int, language: str, result: CorpusReadResult) -> None:
    sent_id = block.sent_id or f"{path.stem}-{index}"

    def issue(message: str, line: int) -> None:
        logger.warning(f"{path}:{line}: skipping block {sent_id}: {message}")
        result.issues.append(BlockIssue(str(path), line, sent_id, message))

    if not block.sentence or not block.sentence.strip():
        issue("missing sentence", block.line)
        return
    text = "\n".join(block.graph_lines).strip()
    if not text:
        issue("missing sentence level graph", block.line)
        return
    try:
        graph = parse_penman(text)
    except DataError as e:
        issue(f"graph does not parse: {e}", block.graph_line or block.line)
        return

    alignments = {}
    for lineno, line in block.alignment_lines:
        match = _ALIGNMENT.match(line)
        if not match:
            issue(f"bad alignment line {line!r}", lineno)
            return
        var, start, end = match.group(1), int(match.group(2)), int(match.group(3))
        if var in graph.nodes and start > 0 and end >= start:
            alignments[var] = (start, end)

    result.entries.append(UmrEntry(
        doc_id=block.doc_id or path.stem,
        sent_id=sent_id,
        sentence=" ".join(block.sentence.split()),
        graph=replace(graph, alignments=alignments),
        language=block_language(block, path, language),
    ))


def read_umr_text(text: str, path: str | Path = "<string>", language: str = "en") -> CorpusReadResult:
    path = Path(path)
    result = CorpusReadResult()
    block = _Block(line=1)
    section = None
    count = 0

    def flush(next_line: int) -> _Block:
        nonlocal count
        if not block.empty:
            count += 1
            _finish(block, path, count, language, result)
        return _Block(line=next_line)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("# meta-info"):
            block = flush(lineno)
            _meta(line, block)
            section = None
        elif re.match(r"^#\s*::\s*snt\d*", line):
            if block.sentence is not None or block.graph_lines:
                block = flush(lineno)
            rest = re.sub(r"^#\s*::\s*snt\d*", "", line).strip()
            block.sentence = rest or block.sentence
            section = None
        elif line.startswith("Index:"):
            continue
        elif line.startswith("Words:"):
            block.sentence = line[len("Words:"):].strip()
        elif line.startswith("# sentence level graph"):
            section = "graph"
            block.graph_line = lineno + 1
        elif line.startswith("# alignment"):
            section = "alignment"
        elif line.startswith("# document level annotation"):
            section = "document"
            result.document_sections += 1
        elif line.startswith("#"):
            section = None
        elif section == "graph":
            block.graph_lines.append(raw.rstrip())
        elif section == "alignment" and line:
            block.alignment_lines.append((lineno, line))
    flush(0)
    return result


def read_umr_corpus(files: Sequence[str | Path], language: str = "en", jobs: int = 1,
                    strict: bool = False) -> CorpusReadResult:
    """Read UMR block files; malformed blocks are reported with file and line.

    ``language`` applies to blocks whose language cannot be resolved otherwise.
    With ``strict`` the first malformed block raises ``MalformedBlock``.
    """
    def read_one(path: Path) -> CorpusReadResult:
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as e:
            logger.error(f"Cannot read corpus file {path}: {e}", exc_info=True)
            raise
        return read_umr_text(text, path, language)

    paths = [Path(p) for p in files]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(read_one, paths))
    else:
        parts = [read_one(path) for path in paths]

    result = CorpusReadResult()
    for part in parts:
        result.entries.extend(part.entries)
        result.issues.extend(part.issues)
        result.document_sections += part.document_sections
    if strict and result.issues:
        first = result.issues[0]
        raise MalformedBlock(f"{first.sent_id}: {first.message}", first.path, first.line)
    logger.info(f"Read {len(result.entries)} entries from {len(paths)} file(s); "
                f"{len(result.issues)} malformed block(s), {result.document_sections} document section(s) skipped")
    return result


def write_umr_corpus(entries: Iterable[UmrEntry]) -> str:
    blocks = []
    for index, entry in enumerate(entries, start=1):
        lines = [
            f"# meta-info :: sent_id = {entry.sent_id} :: doc_id = {entry.doc_id} :: lang = {entry.language}",
            f"# :: snt{index}\t{entry.sentence}",
            "# sentence level graph:",
            serialize_penman(entry.graph),
        ]
        if entry.graph.alignments:
            lines.append("# alignment:")
            lines.extend(f"{var}: {start}-{end}" for var, (start, end) in sorted(entry.graph.alignments.items()))
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")


# --- filters -------------------------------------------------------------------------

def normalize_sentence(sentence: str) -> str:
    """Lowercase, collapse whitespace, strip terminal punctuation."""
    text = " ".join(sentence.lower().split())
    return _TERMINAL_PUNCT.sub("", text)


def exclude_overlap(entries: Sequence[UmrEntry], amr_sentences: Iterable[str]) -> tuple[list[UmrEntry], list[UmrEntry]]:
    amr = {normalize_sentence(s) for s in amr_sentences}
    amr.discard("")
    kept, excluded = [], []
    for entry in entries:
        (excluded if normalize_sentence(entry.sentence) in amr else kept).append(entry)
    logger.info(f"Overlap exclusion: {len(excluded)} excluded, {len(kept)} kept")
    return kept, excluded


def tag_minecraft(entries: Sequence[UmrEntry],
                  patterns: Sequence[str] = DEFAULT_MINECRAFT_PATTERNS) -> list[UmrEntry]:
    """Add the "minecraft" tag to entries whose sentence contains any pattern."""
    tagged = [
        replace(entry, tags=entry.tags | {MINECRAFT}) if any(p in entry.sentence for p in patterns) else entry
        for entry in entries
    ]
    logger.info(f"Tagged {sum(MINECRAFT in e.tags for e in tagged)} of {len(tagged)} entries as {MINECRAFT}")
    return tagged


def downsample_builder(entries: Sequence[UmrEntry], cap: int, seed: int | None = None) -> list[UmrEntry]:
    """Keep at most ``cap`` entries starting with "[Builder"; others are untouched.

    Without a seed the first ``cap`` builder entries in corpus order are kept;
    with a seed a random subset is kept, still in corpus order.
    """
    if cap < 0:
        raise UsageError(f"builder cap must be >= 0, got {cap}")
    builder = [i for i, entry in enumerate(entries) if entry.sentence.startswith(BUILDER_PREFIX)]
    if len(builder) <= cap:
        return list(entries)
    if seed is None:
        keep = set(builder[:cap])
    else:
        keep = set(random.Random(seed).sample(builder, cap))
    dropped = set(builder) - keep
    logger.info(f"Builder downsampling: {len(builder)} builder entries, kept {cap}")
    return [entry for i, entry in enumerate(entries) if i not in dropped]


# --- splits ----------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterStep:
    name: str   # exclude-overlap | builder-downsample | language
    params: dict = field(default_factory=dict)

    __hash__ = None


@dataclass(frozen=True)
class SplitSpec:
    seed: int = 0
    ratios: dict[str, float] | None = None
    ids: dict[str, list[str]] | None = None
    filters: tuple[FilterStep, ...] = ()

    __hash__ = None


FILTERS = ("exclude-overlap", "builder-downsample", "language")


def load_split_spec(path: str | Path) -> SplitSpec:
    """Read a JSON split spec; an ``amr_sentences_file`` is resolved next to it."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        logger.error(f"Cannot load split spec {path}: {e}", exc_info=True)
        raise UsageError(f"cannot load split spec {path}: {e}") from e

    filters = []
    for item in data.get("filters", []):
        params = {k: v for k, v in item.items() if k != "name"}
        if "amr_sentences_file" in params:
            amr_path = path.parent / params.pop("amr_sentences_file")
            params["amr_sentences"] = [line for line in amr_path.read_text(encoding="utf-8").splitlines() if line.strip()]
        filters.append(FilterStep(item.get("name", ""), params))
    return SplitSpec(seed=int(data.get("seed", 0)), ratios=data.get("ratios"), ids=data.get("ids"),
                     filters=tuple(filters))


def _validate(spec: SplitSpec) -> None:
    if (spec.ratios is None) == (spec.ids is None):
        raise RatiosInvalid("a split spec needs exactly one of ratios or ids")
    if spec.ratios is not None:
        if set(spec.ratios) != set(PARTITIONS):
            raise RatiosInvalid(f"ratios must name exactly {', '.join(PARTITIONS)}")
        if any(r < 0 for r in spec.ratios.values()) or abs(sum(spec.ratios.values()) - 1.0) > 1e-9:
            raise RatiosInvalid(f"ratios must be non-negative and sum to 1, got {spec.ratios}")
    else:
        if not set(spec.ids) <= set(PARTITIONS):
            raise RatiosInvalid(f"id lists must be among {', '.join(PARTITIONS)}")
        seen: set[str] = set()
        for ids in spec.ids.values():
            overlap = seen & set(ids)
            if overlap:
                raise RatiosInvalid(f"ids listed in two partitions: {sorted(overlap)}")
            seen |= set(ids)
    for step in spec.filters:
        if step.name not in FILTERS:
            raise RatiosInvalid(f"unknown filter '{step.name}' (known: {', '.join(FILTERS)})")


def apply_filter(entries: list[UmrEntry], step: FilterStep, seed: int) -> list[UmrEntry]:
    if step.name == "exclude-overlap":
        kept, _ = exclude_overlap(entries, step.params.get("amr_sentences", []))
        return kept
    if step.name == "builder-downsample":
        use_seed = step.params.get("seeded", False)
        return downsample_builder(entries, int(step.params.get("cap", 1000)), seed if use_seed else None)
    language = step.params.get("language", "en")
    return [entry for entry in entries if entry.language == language]


@dataclass
class SplitResult:
    train: list[UmrEntry]
    dev: list[UmrEntry]
    test: list[UmrEntry]
    manifest: dict

    def partition(self, name: str) -> list[UmrEntry]:
        return getattr(self, name)


def _partition_by_ratio(entries: list[UmrEntry], ratios: dict[str, float], seed: int) -> dict[str, set[str]]:
    docs: dict[str, list[str]] = {}
    for entry in entries:
        docs.setdefault(entry.doc_id, []).append(entry.sent_id)
    order = sorted(docs)
    random.Random(seed).shuffle(order)

    total = len(entries)
    bounds = (ratios["train"] * total, (ratios["train"] + ratios["dev"]) * total)
    assigned: dict[str, set[str]] = {name: set() for name in PARTITIONS}
    count = 0
    for doc in order:
        if count < bounds[0]:
            name = "train"
        elif count < bounds[1]:
            name = "dev"
        else:
            name = "test"
        assigned[name].update(docs[doc])
        count += len(docs[doc])
    return assigned


def _build(entries: list[UmrEntry], assigned: dict[str, set[str]], manifest: dict) -> SplitResult:
    parts = {name: [e for e in entries if e.sent_id in assigned.get(name, set())] for name in PARTITIONS}
    manifest["partitions"] = {name: [e.sent_id for e in parts[name]] for name in PARTITIONS}
    return SplitResult(parts["train"], parts["dev"], parts["test"], manifest)


def build_split(entries: Sequence[UmrEntry], spec: SplitSpec) -> SplitResult:
    """Filter in spec order, then partition documents into train/dev/test.

    Raises:
        RatiosInvalid: bad ratios, overlapping id lists or an unknown filter.
    """
    _validate(spec)
    ids = [entry.sent_id for entry in entries]
    if len(set(ids)) != len(ids):
        raise DataError("sent_id values must be unique to build a split")

    current = list(entries)
    counts = []
    for step in spec.filters:
        before = len(current)
        current = apply_filter(current, step, spec.seed)
        counts.append({"filter": step.name, "before": before, "after": len(current)})
        logger.info(f"Filter {step.name}: {before} -> {len(current)}")

    manifest: dict = {"seed": spec.seed, "filters": counts}
    if spec.ratios is not None:
        manifest["ratios"] = dict(spec.ratios)
        assigned = _partition_by_ratio(current, spec.ratios, spec.seed)
    else:
        assigned = {name: set(spec.ids.get(name, [])) for name in PARTITIONS}
        present = {entry.sent_id for entry in current}
        manifest["unassigned"] = sorted(present - set().union(*assigned.values()))
        manifest["missing"] = sorted(set().union(*assigned.values()) - present)
        if manifest["missing"]:
            logger.warning(f"{len(manifest['missing'])} listed id(s) are not in the filtered corpus")

    result = _build(current, assigned, manifest)
    logger.info("Split sizes: " + ", ".join(f"{name}={len(result.partition(name))}" for name in PARTITIONS))
    return result


def write_manifest(manifest: dict) -> str:
    return json.dumps(manifest, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_manifest(text: str) -> dict:
    try:
        manifest = json.loads(text)
    except json.JSONDecodeError as e:
        raise DataError(f"manifest is not valid JSON: {e}") from e
    if "partitions" not in manifest:
        raise DataError("manifest has no partitions")
    return manifest


def replay_manifest(entries: Sequence[UmrEntry], manifest: dict) -> SplitResult:
    """Rebuild partitions from the ids a manifest recorded, in manifest order."""
    by_id = {entry.sent_id: entry for entry in entries}
    parts = {}
    for name in PARTITIONS:
        ids = manifest["partitions"].get(name, [])
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise DataError(f"manifest lists {len(missing)} id(s) not in the corpus: {missing[:5]}")
        parts[name] = [by_id[i] for i in ids]
    return SplitResult(parts["train"], parts["dev"], parts["test"], json.loads(json.dumps(manifest)))
