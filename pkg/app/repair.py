"""Parenthesis repair for model-generated PENMAN text.

Only parentheses are ever inserted or deleted; concepts, roles and constants
are left exactly as generated.
"""

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import DataError
from .graph import parse_penman, scan_parens
from .logger_config import get_logger

logger = get_logger("repair")

CLEAN = "clean"
REPAIRED = "repaired"
UNRECOVERABLE = "unrecoverable"
STATUSES = (CLEAN, REPAIRED, UNRECOVERABLE)

MAX_EDITS = 3
MAX_COMBINATIONS = 100_000
MAX_CANDIDATES = 2_000
MAX_PARSES = 200


@dataclass(frozen=True)
class Edit:
    position: int   # offset in the original text
    action: str     # insert | delete
    char: str = ")"


@dataclass
class RepairOutcome:
    status: str
    text: str
    edits: list[Edit] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)


def _parses(text: str) -> str | None:
    """None when the text parses, else the error message."""
    try:
        parse_penman(text)
    except DataError as e:
        return str(e)
    return None


def _apply(text: str, edits: Iterable[Edit]) -> str:
    for edit in sorted(edits, key=lambda e: (e.position, e.action == "delete"), reverse=True):
        if edit.action == "delete":
            text = text[:edit.position] + text[edit.position + 1:]
        else:
            text = text[:edit.position] + edit.char + text[edit.position:]
    return text


def _edit_sites(text: str) -> tuple[list[int], list[int]]:
    """Parenthesis offsets and ')' insertion points, outside string constants."""
    parens: list[int] = []
    inserts: list[int] = []
    in_string = False
    escaped = False
    for i, ch in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch in "()":
            parens.append(i)
        elif ch == ":" and i > 0 and text[i - 1].isspace():
            # before the whitespace that precedes a role
            j = i - 1
            while j > 0 and text[j - 1].isspace():
                j -= 1
            inserts.append(j)
    end = len(text.rstrip())
    if end not in inserts:
        inserts.append(end)
    return parens, inserts


def _balanced(text: str) -> bool:
    scan = scan_parens(text)
    return scan.depth == 0 and scan.stray_close is None and scan.trailing is None and scan.start is not None


def _anomaly(text: str) -> int:
    """Where the parenthesis structure first goes wrong."""
    scan = scan_parens(text)
    if scan.stray_close is not None:
        return scan.stray_close
    if scan.trailing is not None:
        return scan.trailing
    return len(text.rstrip())


def _search(text: str, budget: int) -> tuple[str, list[Edit]] | None:
    """Smallest set of parenthesis edits (up to ``budget``) that makes the text parse.

    Edit sites nearest the first anomaly are tried first. The search stops
    after ``MAX_COMBINATIONS`` edit sets, ``MAX_CANDIDATES`` sets with as many
    openers as closers, or ``MAX_PARSES`` parse attempts, whichever comes first.
    """
    parens, inserts = _edit_sites(text)
    ops = [Edit(i, "delete", text[i]) for i in parens] + [Edit(i, "insert") for i in inserts]
    anchor = _anomaly(text)
    ops.sort(key=lambda e: (abs(e.position - anchor), e.position, e.action))
    opens = sum(1 for i in parens if text[i] == "(")
    closes = len(parens) - opens
    tried = candidates = parses = 0

    for size in range(1, budget + 1):
        for combo in combinations(ops, size):
            tried += 1
            if tried > MAX_COMBINATIONS or candidates >= MAX_CANDIDATES or parses >= MAX_PARSES:
                logger.debug(f"Edit search stopped after {tried - 1} edit sets, {candidates} candidates, {parses} parses")
                return None
            delta_open = -sum(1 for e in combo if e.action == "delete" and e.char == "(")
            delta_close = sum(1 if e.action == "insert" else -1 for e in combo if e.char == ")")
            if opens + delta_open != closes + delta_close:
                continue
            candidates += 1
            candidate = _apply(text, combo)
            if not _balanced(candidate):
                continue
            parses += 1
            if _parses(candidate) is None:
                return candidate, sorted(combo, key=lambda e: e.position)
    return None


def repair_parens(text: str) -> RepairOutcome:
    """Return clean, repaired or unrecoverable; repaired text always parses."""
    error = _parses(text)
    if error is None:
        return RepairOutcome(CLEAN, text)

    scan = scan_parens(text)
    if scan.start is None or scan.unterminated_string is not None:
        return RepairOutcome(UNRECOVERABLE, text, diagnostics=[error])
    if _balanced(text):
        # structurally fine, so parenthesis edits cannot help
        return RepairOutcome(UNRECOVERABLE, text, diagnostics=[error])

    # missing closers at the end
    if scan.depth > 0 and scan.stray_close is None and scan.trailing is None:
        end = len(text.rstrip())
        candidate = text[:end] + ")" * scan.depth + text[end:]
        if _parses(candidate) is None:
            return RepairOutcome(REPAIRED, candidate, [Edit(end, "insert") for _ in range(scan.depth)])

    # surplus closers after the graph
    if scan.end is not None and scan.stray_close is not None and scan.stray_close > scan.end:
        tail = text[scan.end + 1:]
        if set(tail.strip()) == {")"}:
            positions = [scan.end + 1 + i for i, ch in enumerate(tail) if ch == ")"]
            candidate = _apply(text, [Edit(p, "delete") for p in positions])
            if _parses(candidate) is None:
                return RepairOutcome(REPAIRED, candidate, [Edit(p, "delete") for p in positions])

    found = _search(text, MAX_EDITS)
    if found is not None:
        candidate, edits = found
        return RepairOutcome(REPAIRED, candidate, edits)

    return RepairOutcome(UNRECOVERABLE, text, diagnostics=[
        error, f"no parenthesis-only repair within {MAX_EDITS} edits"])


@dataclass
class RepairSummary:
    counts: dict[str, int]
    unrecoverable: list[str]

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "unrecoverable": list(self.unrecoverable)}


def repair_report(outcomes: Sequence[RepairOutcome], ids: Sequence[str | None] | None = None) -> RepairSummary:
    counts = {status: 0 for status in STATUSES}
    unrecoverable = []
    for index, outcome in enumerate(outcomes):
        counts[outcome.status] += 1
        if outcome.status == UNRECOVERABLE:
            label = ids[index] if ids is not None and ids[index] is not None else str(index + 1)
            unrecoverable.append(label)
    logger.info(f"Repair: {counts[CLEAN]} clean, {counts[REPAIRED]} repaired, {counts[UNRECOVERABLE]} unrecoverable")
    return RepairSummary(counts, unrecoverable)


def status_lines(outcomes: Sequence[RepairOutcome], ids: Sequence[str | None]) -> str:
    """Tab-separated sidecar: id, status, edit count, first diagnostic."""
    lines = ["id\tstatus\tedits\tdiagnostic"]
    for index, (outcome, block_id) in enumerate(zip(outcomes, ids, strict=True)):
        diagnostic = outcome.diagnostics[0].replace("\t", " ").replace("\n", " ") if outcome.diagnostics else ""
        lines.append(f"{block_id or index + 1}\t{outcome.status}\t{len(outcome.edits)}\t{diagnostic}")
    return "\n".join(lines) + "\n"
