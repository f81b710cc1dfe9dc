import re
from dataclasses import dataclass, field
from pathlib import Path

from .config import VOCABULARY_FILE
from .errors import DataError
from .graph import SemanticGraph
from .logger_config import get_logger

logger = get_logger("vocabulary")

# Relation roles: ":ARG0", ":op1", ":FR", ":ARG0-of", ":refer-number" ...
DEFAULT_ROLE_PATTERN = r"^:[A-Za-z][A-Za-z0-9]*(-[A-Za-z0-9]+)*$"


@dataclass(frozen=True)
class UmrVocabulary:
    aspect_values: frozenset[str] = frozenset()
    modstr_values: frozenset[str] = frozenset()
    refer_number_values: frozenset[str] = frozenset()
    refer_person_values: frozenset[str] = frozenset()
    mode_values: frozenset[str] = frozenset()

    def allowed_values(self, role: str) -> frozenset[str] | None:
        """Allowed values for a constrained attribute role, else None."""
        key = role.lstrip(":").lower()
        table = {
            "aspect": self.aspect_values,
            "modstr": self.modstr_values,
            "refer-number": self.refer_number_values,
            "refer-person": self.refer_person_values,
            "mode": self.mode_values,
        }
        return table.get(key)


_FIELDS = {
    "aspect": "aspect_values",
    "modstr": "modstr_values",
    "refer-number": "refer_number_values",
    "refer-person": "refer_person_values",
    "mode": "mode_values",
}


def load_vocabulary(path: str | Path | None = None) -> UmrVocabulary:
    path = Path(path) if path else VOCABULARY_FILE
    values: dict[str, frozenset[str]] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            role, _, rest = line.partition("\t")
            if role not in _FIELDS:
                raise DataError(f"{path}:{lineno}: unknown vocabulary role '{role}'")
            values[_FIELDS[role]] = frozenset(rest.split())
    logger.debug(f"Loaded vocabulary from {path}")
    return UmrVocabulary(**values)


_default: UmrVocabulary | None = None


def default_vocabulary() -> UmrVocabulary:
    global _default
    if _default is None:
        _default = load_vocabulary()
    return _default


@dataclass(frozen=True)
class ValidationIssue:
    kind: str  # UnknownAttributeValue | InvalidRoleName | Disconnected
    message: str
    variable: str | None = None
    role: str | None = None
    value: str | None = None
    details: tuple[str, ...] = field(default=())


def validate_umr(graph: SemanticGraph, vocab: UmrVocabulary | None = None,
                 role_pattern: str = DEFAULT_ROLE_PATTERN) -> list[ValidationIssue]:
    """Check attribute values, relation role names and connectedness.

    Issues are returned as data; the graph is never modified.
    """
    vocab = vocab or default_vocabulary()
    pattern = re.compile(role_pattern)
    issues: list[ValidationIssue] = []

    for attr in graph.attributes:
        allowed = vocab.allowed_values(attr.role)
        if allowed is None:
            continue
        if attr.value.lower() not in {v.lower() for v in allowed}:
            issues.append(ValidationIssue(
                kind="UnknownAttributeValue",
                message=f"{attr.role} value '{attr.value}' on '{attr.source}' is not in the vocabulary",
                variable=attr.source, role=attr.role, value=attr.value,
            ))

    for edge in graph.edges:
        if not pattern.match(edge.role):
            issues.append(ValidationIssue(
                kind="InvalidRoleName",
                message=f"role '{edge.role}' on '{edge.source}' does not match {role_pattern}",
                variable=edge.source, role=edge.role,
            ))

    unreachable = graph.unreachable_variables()
    if unreachable:
        issues.append(ValidationIssue(
            kind="Disconnected",
            message=f"variables not connected to the top: {', '.join(unreachable)}",
            details=tuple(unreachable),
        ))

    return issues
