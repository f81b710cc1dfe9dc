"""Sentence-level UMR/AMR graphs in PENMAN notation.

``parse_penman`` lexes text with the ``penman`` package and builds a
``SemanticGraph`` on top of the resulting tree, enforcing the toolkit's own
rules: a bare target is a relation only when it names a variable defined
somewhere in the graph, duplicate definitions are rejected, and quoted
constants keep a flag so they re-serialize the way they were written.
"""

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import networkx as nx
import penman

from .errors import DataError, DuplicateVariable, EmptyInput, ParseError, SerializeError, UndefinedVariable
from .logger_config import get_logger

logger = get_logger("graph")

# Generated variable ids: a letter, a sentence or node number, and an optional
# suffix (s2i, z8, s34a). An undefined bare token is read as a dangling
# reference only when it belongs to the same id family as a defined variable.
VARIABLE_SHAPE = re.compile(r"^([a-z])(\d+)([a-z]*\d*)$")


def variable_family(token: str) -> tuple[str, ...] | None:
    """(letter, number) for suffixed ids like s2i, (letter,) for z8, None otherwise."""
    match = VARIABLE_SHAPE.match(token)
    if not match:
        return None
    letter, number, suffix = match.groups()
    return (letter, number) if suffix else (letter,)


def _families(variables: Iterable[str]) -> set[tuple[str, ...]]:
    return {family for var in variables if (family := variable_family(var)) is not None}


_NEEDS_QUOTES = re.compile(r'[\s()"/:~,]')


@dataclass(frozen=True)
class Edge:
    source: str
    role: str
    target: str


@dataclass(frozen=True)
class Attribute:
    source: str
    role: str
    value: str
    quoted: bool = False


@dataclass(frozen=True, order=True)
class Triple:
    """Atomic unit of graph comparison.

    ``kind`` is one of instance, relation, attribute, top. Top triples are
    ``(top, "TOP", "top", <root variable>)``; instance triples are
    ``(instance, <var>, "instance", <concept>)``.
    """
    kind: str
    arg1: str
    role: str
    arg2: str


@dataclass(frozen=True)
class SemanticGraph:
    top: str
    nodes: Mapping[str, str]
    edges: tuple[Edge, ...] = ()
    attributes: tuple[Attribute, ...] = ()
    # variable -> (first token, last token), 1-based inclusive
    alignments: Mapping[str, tuple[int, int]] = field(default_factory=dict)
    # ("edge", i) / ("attr", j) in source-text order; empty for built graphs
    branch_sequence: tuple[tuple[str, int], ...] = ()
    # variables whose concept was written as a string literal
    quoted_concepts: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "nodes", dict(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "alignments", dict(self.alignments))
        object.__setattr__(self, "branch_sequence", tuple(self.branch_sequence))
        object.__setattr__(self, "quoted_concepts", frozenset(self.quoted_concepts))

        if self.top not in self.nodes:
            raise DataError(f"top variable '{self.top}' is not a node")
        for var, concept in self.nodes.items():
            if not concept:
                raise DataError(f"node '{var}' has an empty concept")
        for edge in self.edges:
            for endpoint in (edge.source, edge.target):
                if endpoint not in self.nodes:
                    raise DataError(f"edge {edge.source} {edge.role} {edge.target} references unknown variable '{endpoint}'")
        for attr in self.attributes:
            if attr.source not in self.nodes:
                raise DataError(f"attribute {attr.role} references unknown variable '{attr.source}'")

    __hash__ = None

    @property
    def variables(self) -> list[str]:
        return list(self.nodes)

    def unreachable_variables(self) -> list[str]:
        """Variables not connected to the top when edges are undirected."""
        undirected = nx.Graph()
        undirected.add_nodes_from(self.nodes)
        undirected.add_edges_from((e.source, e.target) for e in self.edges)
        reachable = nx.node_connected_component(undirected, self.top)
        return sorted(set(self.nodes) - reachable)

    def is_connected(self) -> bool:
        return not self.unreachable_variables()

    def summary(self) -> dict:
        return {
            "top": self.top,
            "nodes": len(self.nodes),
            "edges": len(self.edges),
            "attributes": len(self.attributes),
            "triples": len(self.nodes) + len(self.edges) + len(self.attributes) + 1,
        }


def triples(graph: SemanticGraph) -> frozenset[Triple]:
    """Top, instance, relation and attribute triples of a graph, verbatim."""
    result = {Triple("top", "TOP", "top", graph.top)}
    result.update(Triple("instance", var, "instance", concept) for var, concept in graph.nodes.items())
    result.update(Triple("relation", e.source, e.role, e.target) for e in graph.edges)
    result.update(Triple("attribute", a.source, a.role, a.value) for a in graph.attributes)
    return frozenset(result)


# --- parsing ---------------------------------------------------------------

@dataclass(frozen=True)
class ParenScan:
    depth: int                      # unclosed '(' at end of text
    start: int | None               # position of the first '('
    end: int | None                 # position of the ')' closing the first group
    stray_close: int | None         # first ')' that drove depth below zero
    trailing: int | None            # first non-space character after ``end``
    leading: int | None             # first non-comment character before ``start``
    unterminated_string: int | None


def scan_parens(text: str) -> ParenScan:
    """Track parenthesis depth, skipping quoted strings and leading comments."""
    depth = 0
    start = end = stray = trailing = leading = unterminated = None
    in_string = False
    string_start = None
    at_line_start = True
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if in_string:
            if ch == "\\":
                i += 2
                continue
            if ch == '"':
                in_string = False
            i += 1
            continue
        if start is None and at_line_start and ch == "#":
            newline = text.find("\n", i)
            i = n if newline == -1 else newline + 1
            continue
        at_line_start = ch == "\n" or (at_line_start and ch in " \t\r")
        if ch == '"':
            in_string = True
            string_start = i
        elif ch == "(":
            if start is None:
                start = i
            elif end is not None and trailing is None:
                trailing = i
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0 and stray is None:
                stray = i
            if depth == 0 and end is None and start is not None:
                end = i
        elif not ch.isspace():
            if start is None and leading is None:
                leading = i
            elif end is not None and trailing is None:
                trailing = i
        i += 1
    if in_string:
        unterminated = string_start
    return ParenScan(depth, start, end, stray, trailing, leading, unterminated)


def _check_structure(text: str) -> None:
    scan = scan_parens(text)
    if scan.start is None:
        raise ParseError("expected '(' to open a graph", scan.leading if scan.leading is not None else 0)
    if scan.leading is not None:
        raise ParseError("unexpected content before the graph", scan.leading)
    if scan.unterminated_string is not None:
        raise ParseError("unterminated string constant", scan.unterminated_string)
    if scan.stray_close is not None:
        raise ParseError("unbalanced parentheses: unexpected ')'", scan.stray_close)
    if scan.depth > 0:
        raise ParseError(f"unbalanced parentheses: {scan.depth} unclosed '('", len(text))
    if scan.trailing is not None:
        raise ParseError("unexpected content after the graph", scan.trailing)


def _unquote(token: str) -> str:
    return re.sub(r"\\(.)", r"\1", token[1:-1])


def _definition_position(text: str, var: str, occurrence: int) -> int | None:
    matches = list(re.finditer(rf"\(\s*{re.escape(var)}\s*/", text))
    if len(matches) > occurrence:
        return matches[occurrence].start()
    return None


def _normalize_role(role: str) -> str:
    return role if role.startswith(":") else f":{role}"


def parse_penman(text: str) -> SemanticGraph:
    """Parse a single PENMAN expression into a SemanticGraph.

    Raises:
        EmptyInput: the text is empty or whitespace.
        ParseError: unbalanced parentheses or other syntax errors.
        DuplicateVariable: a variable is defined twice.
        UndefinedVariable: a bare token in the id family of the defined
            variables (s1z next to s1a) is never defined.
    """
    if text is None or not text.strip():
        raise EmptyInput()

    _check_structure(text)

    try:
        tree = penman.parse(text)
    except penman.DecodeError as e:
        raise ParseError(f"malformed PENMAN: {e}", getattr(e, "offset", None)) from e

    defined: dict[str, str] = {}
    quoted_concepts: set[str] = set()

    def collect(node):
        var, branches = node
        if var is None:
            raise ParseError("node without a variable")
        if var in defined:
            raise DuplicateVariable(var, _definition_position(text, var, 1))
        concept = next((target for role, target in branches if role == "/"), None)
        if concept is None or concept == "":
            raise ParseError(f"node '{var}' has no concept", _definition_position(text, var, 0))
        if concept.startswith('"'):
            defined[var] = _unquote(concept)
            quoted_concepts.add(var)
        else:
            defined[var] = concept
        for role, target in branches:
            if role != "/" and isinstance(target, tuple):
                collect(target)

    collect(tree.node)
    families = _families(defined)

    edges: list[Edge] = []
    attributes: list[Attribute] = []
    sequence: list[tuple[str, int]] = []
    seen: set = set()

    def build(node):
        var, branches = node
        for role, target in branches:
            if role == "/":
                continue
            role = _normalize_role(role)
            if target is None:
                raise ParseError(f"role {role} on '{var}' has no target")
            if isinstance(target, tuple):
                item = Edge(var, role, target[0])
            elif target.startswith('"'):
                item = Attribute(var, role, _unquote(target), quoted=True)
            elif target in defined:
                item = Edge(var, role, target)
            elif variable_family(target) in families:
                raise UndefinedVariable(target, text.find(target))
            else:
                item = Attribute(var, role, target)

            key = (item.source, item.role, item.target) if isinstance(item, Edge) else (item.source, item.role, item.value)
            if key in seen:
                logger.debug(f"Dropping duplicate branch {role} on '{var}'")
            else:
                seen.add(key)
                if isinstance(item, Edge):
                    sequence.append(("edge", len(edges)))
                    edges.append(item)
                else:
                    sequence.append(("attr", len(attributes)))
                    attributes.append(item)
            if isinstance(target, tuple):
                build(target)

    build(tree.node)

    return SemanticGraph(
        top=tree.node[0],
        nodes=defined,
        edges=tuple(edges),
        attributes=tuple(attributes),
        branch_sequence=tuple(sequence),
        quoted_concepts=frozenset(quoted_concepts),
    )


# --- serialization ---------------------------------------------------------

def invert_role(role: str) -> str:
    if role.endswith("-of"):
        return role[:-3]
    return f"{role}-of"


def _quote(value: str) -> str:
    escaped = value.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _format_value(attr: Attribute, variables: Mapping[str, str], families: set[tuple[str, ...]]) -> str:
    value = attr.value
    if (attr.quoted or not value or _NEEDS_QUOTES.search(value)
            or value in variables or variable_family(value) in families):
        return _quote(value)
    return value


def _format_concept(graph: SemanticGraph, var: str) -> str:
    concept = graph.nodes[var]
    if var in graph.quoted_concepts or _NEEDS_QUOTES.search(concept):
        return _quote(concept)
    return concept


def _ordered_branches(graph: SemanticGraph) -> dict[str, list]:
    """Outgoing branches per variable, in source order when known."""
    outgoing: dict[str, list] = {var: [] for var in graph.nodes}
    if graph.branch_sequence:
        for kind, index in graph.branch_sequence:
            item = graph.edges[index] if kind == "edge" else graph.attributes[index]
            outgoing[item.source].append(item)
        listed = {id(item) for items in outgoing.values() for item in items}
        for item in (*graph.edges, *graph.attributes):
            if id(item) not in listed:
                outgoing[item.source].append(item)
    else:
        for item in (*graph.edges, *graph.attributes):
            outgoing[item.source].append(item)
        for items in outgoing.values():
            items.sort(key=lambda it: (it.role, it.target if isinstance(it, Edge) else it.value))
    return outgoing


def to_tree(graph: SemanticGraph) -> penman.Tree:
    unreachable = graph.unreachable_variables()
    if unreachable:
        raise SerializeError(unreachable)

    outgoing = _ordered_branches(graph)
    families = _families(graph.nodes)

    directed = nx.DiGraph()
    directed.add_nodes_from(graph.nodes)
    directed.add_edges_from((e.source, e.target) for e in graph.edges)
    forward = nx.descendants(directed, graph.top) | {graph.top}

    # edges whose source cannot be reached from the top are written inverted
    incoming: dict[str, list[Edge]] = {var: [] for var in graph.nodes}
    for edge in graph.edges:
        if edge.source not in forward:
            incoming[edge.target].append(edge)
    for edges in incoming.values():
        edges.sort(key=lambda e: (e.role, e.source))

    visited: set[str] = set()
    emitted: set[int] = set()

    def node(var: str):
        visited.add(var)
        branches = [("/", _format_concept(graph, var))]
        for item in outgoing[var]:
            if isinstance(item, Attribute):
                branches.append((item.role, _format_value(item, graph.nodes, families)))
                continue
            if id(item) in emitted:
                continue
            emitted.add(id(item))
            if item.target in visited:
                branches.append((item.role, item.target))
            else:
                branches.append((item.role, node(item.target)))
        for edge in incoming[var]:
            if id(edge) in emitted:
                continue
            emitted.add(id(edge))
            role = invert_role(edge.role)
            if edge.source in visited:
                branches.append((role, edge.source))
            else:
                branches.append((role, node(edge.source)))
        return (var, branches)

    return penman.Tree(node(graph.top))


def serialize_penman(graph: SemanticGraph, indent: int | None = -1) -> str:
    """Write a graph as PENMAN text; ``indent=None`` gives a single line."""
    return penman.format(to_tree(graph), indent=indent)


# --- block files -----------------------------------------------------------

@dataclass
class PenmanBlock:
    text: str
    id: str | None = None
    sentence: str | None = None
    metadata: dict = field(default_factory=dict)
    line: int = 1


_METADATA = re.compile(r"::(\S+)(?:[ \t]+([^\n]*?))?(?=\s+::|$)")


def _read_metadata(comment: str, metadata: dict) -> None:
    for key, value in _METADATA.findall(comment.lstrip("#").strip()):
        metadata[key] = value.strip()


def read_penman_blocks(text: str) -> list[PenmanBlock]:
    """Split a file into blank-line-separated graph blocks.

    Comment lines (``# ::id x``, ``# ::snt ...``) become block metadata; a
    block made only of comments is skipped.
    """
    blocks: list[PenmanBlock] = []
    comments: dict = {}
    body: list[str] = []
    start_line = 1

    def flush():
        if body:
            blocks.append(PenmanBlock(
                text="\n".join(body),
                id=comments.get("id"),
                sentence=comments.get("snt"),
                metadata=dict(comments),
                line=start_line,
            ))

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            comments, body = {}, []
            continue
        if not body and not comments:
            start_line = lineno
        if line.lstrip().startswith("#") and not body:
            _read_metadata(line, comments)
        else:
            body.append(line.rstrip())
    flush()
    return blocks


def read_line_graphs(text: str) -> list[PenmanBlock]:
    """One graph per non-empty line."""
    return [
        PenmanBlock(text=line.strip(), line=lineno)
        for lineno, line in enumerate(text.splitlines(), start=1)
        if line.strip()
    ]


def write_penman_blocks(blocks: Iterable[PenmanBlock]) -> str:
    parts = []
    for block in blocks:
        lines = []
        if block.id is not None:
            lines.append(f"# ::id {block.id}")
        if block.sentence is not None:
            lines.append(f"# ::snt {block.sentence}")
        lines.append(block.text.rstrip())
        parts.append("\n".join(lines))
    return "\n\n".join(parts) + ("\n" if parts else "")
