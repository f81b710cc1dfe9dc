import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .config import ANIMACY_FILE, ROLE_MAPPINGS_FILE, SPLIT_ROLES_FILE
from .errors import DataError, DuplicateSourceRole, EmptyCandidates, UnknownSelector
from .graph import Edge, SemanticGraph
from .logger_config import get_logger
from .metrics import NON_INVERSE_ROLES

logger = get_logger("amr2umr")

ANIMATE = "animate"
INANIMATE = "inanimate"
MOTION = "motion"
STATIC = "static"

_SENSE = re.compile(r"-\d+$")


@dataclass(frozen=True)
class RoleMapping:
    source_role: str
    candidates: tuple[str, ...]
    selector: str = "identity"


@dataclass(frozen=True)
class AnimacyLexicon:
    animate_concepts: frozenset[str] = frozenset()
    animate_suffix_rules: tuple[str, ...] = ()
    motion_predicates: frozenset[str] = frozenset()

    def is_animate(self, concept: str) -> bool:
        concept = concept.lower()
        if concept in self.animate_concepts:
            return True
        return any(re.search(rule, concept) for rule in self.animate_suffix_rules)

    def is_motion(self, concept: str) -> bool:
        return _SENSE.sub("", concept.lower()) in self.motion_predicates


@dataclass(frozen=True)
class SplitRule:
    role: str
    animacy: str
    context: str
    choice: str

    def matches(self, role: str, animacy: str, context: str) -> bool:
        return (self.role == role and self.animacy in ("*", animacy)
                and self.context in ("*", context))


@dataclass(frozen=True)
class Decision:
    sent_id: str | None
    source: str
    role: str
    target: str
    candidates: tuple[str, ...]
    chosen: str
    selector: str
    rationale: str


DecisionKey = tuple[str | None, str, str, str]


# --- table loading -------------------------------------------------------------

def _data_lines(path: Path):
    with open(path, encoding="utf-8") as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.rstrip("\n")
            if line.strip() and not line.lstrip().startswith("#"):
                yield lineno, line


def load_mappings(path: str | Path | None = None) -> list[RoleMapping]:
    """Read a role mapping table: source role, candidate list, selector id.

    Raises:
        DuplicateSourceRole: the same source role appears twice.
        EmptyCandidates: a row lists no candidates.
        UnknownSelector: a row names a selector that is not registered.
    """
    path = Path(path) if path else ROLE_MAPPINGS_FILE
    mappings: list[RoleMapping] = []
    seen: set[str] = set()
    for lineno, line in _data_lines(path):
        columns = line.split("\t")
        if len(columns) != 3:
            raise DataError(f"{path}:{lineno}: expected 3 tab-separated columns, got {len(columns)}")
        source, candidates, selector = (column.strip() for column in columns)
        if source in seen:
            raise DuplicateSourceRole(f"{path}:{lineno}: source role '{source}' is mapped twice")
        options = tuple(c.strip() for c in candidates.split(",") if c.strip())
        if not options:
            raise EmptyCandidates(f"{path}:{lineno}: no candidates for '{source}'")
        if selector not in SELECTORS:
            raise UnknownSelector(f"{path}:{lineno}: unknown selector '{selector}' (known: {', '.join(sorted(SELECTORS))})")
        seen.add(source)
        mappings.append(RoleMapping(source, options, selector))
    logger.debug(f"Loaded {len(mappings)} role mapping(s) from {path}")
    return mappings


def load_split_rules(path: str | Path | None = None) -> list[SplitRule]:
    path = Path(path) if path else SPLIT_ROLES_FILE
    rules = []
    for lineno, line in _data_lines(path):
        columns = [c.strip() for c in line.split("\t")]
        if len(columns) != 4:
            raise DataError(f"{path}:{lineno}: expected 4 tab-separated columns, got {len(columns)}")
        role, animacy, context, choice = columns
        if animacy not in (ANIMATE, INANIMATE, "*") or context not in (MOTION, STATIC, "*"):
            raise DataError(f"{path}:{lineno}: bad animacy/context '{animacy}'/'{context}'")
        rules.append(SplitRule(role, animacy, context, choice))
    return rules


def load_animacy(path: str | Path | None = None) -> AnimacyLexicon:
    path = Path(path) if path else ANIMACY_FILE
    sections: dict[str, list[str]] = {"animate": [], "suffix": [], "motion": []}
    current = None
    for lineno, line in _data_lines(path):
        line = line.strip()
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current not in sections:
                raise DataError(f"{path}:{lineno}: unknown section [{current}]")
            continue
        if current is None:
            raise DataError(f"{path}:{lineno}: entry outside a section")
        sections[current].append(line if current == "suffix" else line.lower())
    for rule in sections["suffix"]:
        try:
            re.compile(rule)
        except re.error as e:
            raise DataError(f"{path}: bad suffix rule {rule!r}: {e}") from e
    return AnimacyLexicon(frozenset(sections["animate"]), tuple(sections["suffix"]), frozenset(sections["motion"]))


def load_decisions(path: str | Path) -> dict[DecisionKey, str]:
    """Per-edge decisions: sent_id, source var, role, target var, chosen role.

    A sent_id of "-" matches graphs without an id. Extra columns are ignored,
    so a decision log written by ``decision_lines`` can be replayed as is.
    """
    path = Path(path)
    decisions: dict[DecisionKey, str] = {}
    for lineno, line in _data_lines(path):
        columns = [c.strip() for c in line.split("\t")]
        if columns[0] == "sent_id":
            continue  # header of a decision log
        if len(columns) < 5:
            raise DataError(f"{path}:{lineno}: expected at least 5 tab-separated columns, got {len(columns)}")
        sent_id, source, role, target, chosen = columns[:5]
        key = (None if sent_id == "-" else sent_id, source, role, target)
        if key in decisions:
            raise DataError(f"{path}:{lineno}: duplicate decision for {key}")
        decisions[key] = chosen
    logger.info(f"Loaded {len(decisions)} role decision(s) from {path}")
    return decisions


# --- selectors -------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeContext:
    sent_id: str | None
    edge: Edge
    role: str           # forward role looked up in the table
    head_concept: str   # concept of the semantic head
    dependent_concept: str
    mapping: RoleMapping


Selector = Callable[["RoleConverter", EdgeContext], tuple[str, str]]
SELECTORS: dict[str, Selector] = {}


def register_selector(name: str):
    def wrap(fn: Selector) -> Selector:
        SELECTORS[name] = fn
        return fn
    return wrap


@register_selector("identity")
def _identity(converter: "RoleConverter", ctx: EdgeContext) -> tuple[str, str]:
    return ctx.mapping.candidates[0], "first candidate"


@register_selector("animacy-heuristic")
def _animacy(converter: "RoleConverter", ctx: EdgeContext) -> tuple[str, str]:
    animacy = ANIMATE if converter.lexicon.is_animate(ctx.dependent_concept) else INANIMATE
    context = MOTION if converter.lexicon.is_motion(ctx.head_concept) else STATIC
    for rule in converter.split_rules:
        if rule.matches(ctx.role, animacy, context):
            if rule.choice in ctx.mapping.candidates:
                return rule.choice, f"{animacy} '{ctx.dependent_concept}', {context} head '{ctx.head_concept}'"
            converter.logger.warning(f"Split rule choice {rule.choice} is not a candidate for {ctx.role}")
            break
    return ctx.mapping.candidates[0], f"no split rule for {ctx.role} ({animacy}, {context})"


@register_selector("decisions")
def _decisions(converter: "RoleConverter", ctx: EdgeContext) -> tuple[str, str]:
    # the decision file is consulted before every selector; reaching here means no entry
    return ctx.mapping.candidates[0], "no external decision; first candidate"


# --- conversion --------------------------------------------------------------------

def _split_inverse(role: str) -> tuple[str, bool]:
    if role.lower().endswith("-of") and role.lower() not in NON_INVERSE_ROLES:
        return role[:-3], True
    return role, False


class RoleConverter:
    """Rewrites edge roles through a mapping table; every mapped edge yields a Decision."""

    def __init__(self, mappings: Sequence[RoleMapping], lexicon: AnimacyLexicon | None = None,
                 split_rules: Sequence[SplitRule] | None = None,
                 overrides: Mapping[DecisionKey, str] | None = None):
        self.logger = get_logger("amr2umr.converter")
        self.mappings = {m.source_role: m for m in mappings}
        for mapping in mappings:
            if mapping.selector not in SELECTORS:
                raise UnknownSelector(f"unknown selector '{mapping.selector}' for {mapping.source_role}")
        self.lexicon = lexicon if lexicon is not None else load_animacy()
        self.split_rules = list(split_rules) if split_rules is not None else load_split_rules()
        self.overrides = dict(overrides or {})

    def _lookup(self, role: str) -> RoleMapping | None:
        return self.mappings.get(role) or self.mappings.get(role.lower())

    def convert(self, graph: SemanticGraph, sent_id: str | None = None) -> tuple[SemanticGraph, list[Decision]]:
        edges: list[Edge] = []
        decisions: list[Decision] = []
        for edge in graph.edges:
            forward, inverse = _split_inverse(edge.role)
            mapping = self._lookup(forward)
            if mapping is None:
                edges.append(edge)
                continue

            head, dependent = (edge.target, edge.source) if inverse else (edge.source, edge.target)
            ctx = EdgeContext(sent_id, edge, forward, graph.nodes[head], graph.nodes[dependent], mapping)
            key = (sent_id, edge.source, edge.role, edge.target)
            if key in self.overrides:
                chosen = self.overrides[key]
                if inverse:
                    chosen = _split_inverse(chosen)[0]
                if chosen not in mapping.candidates:
                    raise DataError(f"decision {chosen} for {key} is not among {', '.join(mapping.candidates)}")
                selector, rationale = "decisions", "external decision"
            else:
                chosen, rationale = SELECTORS[mapping.selector](self, ctx)
                selector = mapping.selector

            new_role = f"{chosen}-of" if inverse else chosen
            self.logger.debug(f"{sent_id or '-'} {edge.source} {edge.role} {edge.target} -> {new_role} ({rationale})")
            decisions.append(Decision(sent_id, edge.source, edge.role, edge.target,
                                      mapping.candidates, new_role, selector, rationale))
            edges.append(replace(edge, role=new_role))

        return replace(graph, edges=tuple(edges)), decisions


def convert_roles(graph: SemanticGraph, mappings: Sequence[RoleMapping], lexicon: AnimacyLexicon | None = None,
                  overrides: Mapping[DecisionKey, str] | None = None,
                  sent_id: str | None = None) -> tuple[SemanticGraph, list[Decision]]:
    """Rewrite AMR role labels to UMR ones; only edge labels change."""
    return RoleConverter(mappings, lexicon, overrides=overrides).convert(graph, sent_id)


def decision_lines(decisions: Sequence[Decision]) -> str:
    """Decision log as TSV, in the column order the decisions file reads back."""
    lines = ["sent_id\tsource\trole\ttarget\tchosen\tcandidates\tselector\trationale"]
    for d in decisions:
        lines.append("\t".join([d.sent_id or "-", d.source, d.role, d.target, d.chosen,
                                ",".join(d.candidates), d.selector, d.rationale]))
    return "\n".join(lines) + "\n"
