"""Graph-to-graph scores over triples.

All metrics share one triple view (``scoring_triples``): inverse roles are
rewritten as forward edges, role labels are lower-cased when
``normalize_case`` is set, and the top triple is included. Scores differ
only in how the variable alignment is found:

* ``smatch``        the ``smatch`` package's restarted hill climbing, or the exact oracle for small graphs
* ``smatch_exact``  branch-and-bound over injective mappings (optimal)
* ``smatchpp``      the ``smatchpp`` package with its ILP solver, plus category sub-scores
* ``ancast``        anchors on uniquely shared concepts, then broadcasts to neighbours
"""

import random
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import smatch as smatch_core
from smatchpp import Smatchpp, solvers

from .config import Settings
from .errors import DataError, InvalidConfig, TooLarge
from .graph import SemanticGraph, Triple, serialize_penman
from .logger_config import get_logger

logger = get_logger("metrics")

# roles that end in "-of" without being inverses
NON_INVERSE_ROLES = frozenset({":consist-of", ":prep-out-of", ":prep-on-behalf-of"})

SRL_ROLE = re.compile(r"^:arg\d+$", re.IGNORECASE)

# branch-and-bound nodes visited before smatch_exact gives up
EXACT_EXPANSION_BUDGET = 2_000_000

@dataclass(frozen=True)
class MetricConfig:
    restarts: int = 4
    exact_threshold: int = 8
    normalize_case: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.restarts < 1:
            raise InvalidConfig(f"restarts must be >= 1, got {self.restarts}")
        if self.exact_threshold < 1:
            raise InvalidConfig(f"exact_threshold must be >= 1, got {self.exact_threshold}")

    @classmethod
    def from_settings(cls, settings: Settings, **overrides) -> "MetricConfig":
        values = {
            "restarts": settings.restarts,
            "exact_threshold": settings.exact_threshold,
            "seed": settings.seed,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass(frozen=True)
class Alignment:
    """Injective partial map from predicted to gold variables."""
    mapping: Mapping[str, str] = field(default_factory=dict)
    matched: int = 0


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f1: float
    matched: int
    pred_count: int
    gold_count: int
    alignment: Alignment = field(default_factory=Alignment)

    @classmethod
    def from_counts(cls, matched: int, pred_count: int, gold_count: int,
                    alignment: Alignment | None = None) -> "Score":
        precision, recall, f1 = prf(matched, pred_count, gold_count)
        return cls(precision, recall, f1, matched, pred_count, gold_count, alignment or Alignment())


@dataclass(frozen=True)
class FineGrainedScore:
    overall: Score
    categories: Mapping[str, Score]

    @property
    def f1(self) -> float:
        return self.overall.f1


def prf(matched: int, pred_count: int, gold_count: int) -> tuple[float, float, float]:
    precision = matched / pred_count if pred_count else 0.0
    recall = matched / gold_count if gold_count else 0.0
    if precision + recall == 0:
        return precision, recall, 0.0
    return precision, recall, 2 * precision * recall / (precision + recall)


# --- triple view -----------------------------------------------------------

def _role(role: str, normalize_case: bool) -> tuple[str, bool]:
    """Normalized role label and whether it was an inverse."""
    label = role.lower() if normalize_case else role
    if label.lower().endswith("-of") and label.lower() not in NON_INVERSE_ROLES:
        return label[:-3], True
    return label, False


def scoring_triples(graph: SemanticGraph, normalize_case: bool = True,
                    standardize: bool = False) -> frozenset[Triple]:
    """Triples as compared by the metrics.

    ``standardize`` additionally lower-cases concepts and constants and strips
    stray quotes; identical triples collapse since the result is a set.
    """
    result = {Triple("top", "TOP", "top", graph.top)}
    for var, concept in graph.nodes.items():
        result.add(Triple("instance", var, "instance", concept.lower() if standardize else concept))
    for edge in graph.edges:
        role, inverse = _role(edge.role, normalize_case)
        if inverse:
            result.add(Triple("relation", edge.target, role, edge.source))
        else:
            result.add(Triple("relation", edge.source, role, edge.target))
    for attr in graph.attributes:
        role = attr.role.lower() if normalize_case else attr.role
        value = attr.value
        if standardize:
            value = value.strip('"').lower()
        result.add(Triple("attribute", attr.source, role, value))
    return frozenset(result)


def _variables(triple_set: frozenset[Triple]) -> list[str]:
    found = {t.arg1 for t in triple_set if t.kind == "instance"}
    found.update(t.arg2 for t in triple_set if t.kind == "top")
    return sorted(found)


def image(triple: Triple, mapping: Mapping[str, str]) -> Triple | None:
    """The triple with predicted variables replaced by their gold partners."""
    if triple.kind == "top":
        target = mapping.get(triple.arg2)
        return None if target is None else Triple("top", "TOP", "top", target)
    source = mapping.get(triple.arg1)
    if source is None:
        return None
    if triple.kind == "relation":
        target = mapping.get(triple.arg2)
        return None if target is None else Triple("relation", source, triple.role, target)
    return Triple(triple.kind, source, triple.role, triple.arg2)


def count_matches(pred: frozenset[Triple], gold: frozenset[Triple], mapping: Mapping[str, str]) -> int:
    return sum(1 for t in pred if (mapped := image(t, mapping)) is not None and mapped in gold)


class TripleMatcher:
    """Precomputed gains for aligning one predicted triple set with a gold one.

    Unary triples (top, instance, attribute, self-loops) depend on one
    variable; relations between two distinct variables are checked against the
    gold relation set.
    """

    def __init__(self, pred: frozenset[Triple], gold: frozenset[Triple]):
        self.pred = pred
        self.gold = gold
        self.pred_vars = _variables(pred)
        self.gold_vars = _variables(gold)

        gold_unary: dict[tuple, set[str]] = {}
        self.gold_rels: set[tuple[str, str, str]] = set()
        for t in gold:
            key, var = self._unary_key(t)
            if key is None:
                self.gold_rels.add((t.arg1, t.role, t.arg2))
            else:
                gold_unary.setdefault(key, set()).add(var)
        gold_roles = {role for _, role, _ in self.gold_rels}

        self.unary: dict[tuple[str, str], int] = {}
        self.pred_rels: list[tuple[str, str, str]] = []
        for t in sorted(pred):
            key, var = self._unary_key(t)
            if key is None:
                self.pred_rels.append((t.arg1, t.role, t.arg2))
                continue
            for g in gold_unary.get(key, ()):
                self.unary[(var, g)] = self.unary.get((var, g), 0) + 1

        self.rels_by_var: dict[str, list[int]] = {p: [] for p in self.pred_vars}
        self.useful_rels: list[int] = []
        for index, (p1, role, p2) in enumerate(self.pred_rels):
            self.rels_by_var.setdefault(p1, []).append(index)
            self.rels_by_var.setdefault(p2, []).append(index)
            if role in gold_roles:
                self.useful_rels.append(index)

        self.upper_bound = min(len(pred), len(gold))

    @staticmethod
    def _unary_key(t: Triple) -> tuple[tuple | None, str | None]:
        if t.kind == "top":
            return ("top",), t.arg2
        if t.kind == "relation":
            if t.arg1 == t.arg2:
                return ("loop", t.role), t.arg1
            return None, None
        return (t.kind, t.role, t.arg2), t.arg1

    def rel_matches(self, index: int, mapping: Mapping[str, str | None]) -> bool:
        p1, role, p2 = self.pred_rels[index]
        g1, g2 = mapping.get(p1), mapping.get(p2)
        return g1 is not None and g2 is not None and (g1, role, g2) in self.gold_rels

    def score(self, mapping: Mapping[str, str | None]) -> int:
        total = sum(self.unary.get((p, g), 0) for p, g in mapping.items() if g is not None)
        return total + sum(1 for i in range(len(self.pred_rels)) if self.rel_matches(i, mapping))

    def local(self, mapping: Mapping[str, str | None], variables: tuple[str, ...]) -> int:
        """Matches that depend on any of ``variables``."""
        total = 0
        rel_indexes: set[int] = set()
        for p in variables:
            g = mapping.get(p)
            if g is not None:
                total += self.unary.get((p, g), 0)
            rel_indexes.update(self.rels_by_var.get(p, ()))
        return total + sum(1 for i in rel_indexes if self.rel_matches(i, mapping))


    # local improvement

    def best_move(self, mapping: dict[str, str | None]) -> tuple[int, tuple | None]:
        best_delta, best_move = 0, None
        used = {g for g in mapping.values() if g is not None}

        for p in self.pred_vars:
            current = mapping[p]
            base = self.local(mapping, (p,))
            for g in (*self.gold_vars, None):
                if g == current or (g is not None and g in used):
                    continue
                mapping[p] = g
                delta = self.local(mapping, (p,)) - base
                mapping[p] = current
                if delta > best_delta:
                    best_delta, best_move = delta, ("move", p, g)

        for i, p1 in enumerate(self.pred_vars):
            for p2 in self.pred_vars[i + 1:]:
                g1, g2 = mapping[p1], mapping[p2]
                if g1 == g2:
                    continue
                base = self.local(mapping, (p1, p2))
                mapping[p1], mapping[p2] = g2, g1
                delta = self.local(mapping, (p1, p2)) - base
                mapping[p1], mapping[p2] = g1, g2
                if delta > best_delta:
                    best_delta, best_move = delta, ("swap", p1, p2)

        return best_delta, best_move

    def improve(self, mapping: Mapping[str, str]) -> dict[str, str]:
        """Apply the best single move or swap until none adds a match."""
        current: dict[str, str | None] = {p: mapping.get(p) for p in self.pred_vars}
        while True:
            _, move = self.best_move(current)
            if move is None:
                break
            if move[0] == "move":
                current[move[1]] = move[2]
            else:
                _, p1, p2 = move
                current[p1], current[p2] = current[p2], current[p1]
        return {p: g for p, g in current.items() if g is not None}

    # exact search

    def exact(self, budget: int | None = None) -> tuple[dict[str, str], int]:
        """Optimal mapping by branch and bound; needs |pred vars| <= |gold vars|.

        Mapping every predicted variable never loses matches, so only complete
        injective maps are enumerated. ``budget`` caps the number of search
        nodes visited.

        Raises:
            TooLarge: the search visited more than ``budget`` nodes.
        """
        assert len(self.pred_vars) <= len(self.gold_vars)
        best_unary = {
            p: max((self.unary.get((p, g), 0) for g in self.gold_vars), default=0)
            for p in self.pred_vars
        }
        order = sorted(self.pred_vars, key=lambda p: (-best_unary[p] - len(self.rels_by_var.get(p, ())), p))
        position = {p: i for i, p in enumerate(order)}
        n = len(order)

        decided_at: list[list[int]] = [[] for _ in range(n)]
        suffix_rel = [0] * (n + 1)
        for index, (p1, _, p2) in enumerate(self.pred_rels):
            step = max(position[p1], position[p2])
            decided_at[step].append(index)
        for index in self.useful_rels:
            p1, _, p2 = self.pred_rels[index]
            suffix_rel[max(position[p1], position[p2])] += 1
        suffix_unary = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            suffix_rel[i] += suffix_rel[i + 1]
            suffix_unary[i] = suffix_unary[i + 1] + best_unary[order[i]]
        suffix_rel[n] = 0

        best: list = [-1, {}]
        mapping: dict[str, str] = {}
        used: set[str] = set()
        visited = [0]

        def search(i: int, score: int) -> bool:
            visited[0] += 1
            if budget is not None and visited[0] > budget:
                raise TooLarge(f"exact search gave up after {budget} search nodes")
            if score + suffix_unary[i] + suffix_rel[i] <= best[0]:
                return False
            if i == n:
                best[0], best[1] = score, dict(mapping)
                return score == self.upper_bound
            p = order[i]
            options = []
            for g in self.gold_vars:
                if g in used:
                    continue
                mapping[p] = g
                gain = self.unary.get((p, g), 0) + sum(1 for index in decided_at[i] if self.rel_matches(index, mapping))
                del mapping[p]
                options.append((-gain, g))
            options.sort()
            for negative_gain, g in options:
                mapping[p] = g
                used.add(g)
                done = search(i + 1, score - negative_gain)
                used.discard(g)
                del mapping[p]
                if done:
                    return True
            return False

        search(0, 0)
        return best[1], max(best[0], 0)


# --- alignment front ends -------------------------------------------------

def exact_alignment(pred: frozenset[Triple], gold: frozenset[Triple],
                    budget: int | None = None) -> tuple[dict[str, str], int]:
    pred_vars, gold_vars = _variables(pred), _variables(gold)
    if len(pred_vars) <= len(gold_vars):
        return TripleMatcher(pred, gold).exact(budget)
    # matched counts are symmetric, so search from the smaller side
    mapping, matched = TripleMatcher(gold, pred).exact(budget)
    return {p: g for g, p in mapping.items()}, matched


def _smatch_lists(triple_set: frozenset[Triple], variables: list[str], prefix: str) -> tuple[list, list, list]:
    """Instance, attribute and relation lists in the ``smatch`` package layout."""
    names = {var: f"{prefix}{i}" for i, var in enumerate(variables)}
    concepts = {t.arg1: t.arg2 for t in triple_set if t.kind == "instance"}
    instances = [("instance", names[var], concepts[var]) for var in variables]
    attributes, relations = [], []
    for t in sorted(triple_set):
        if t.kind == "top":
            attributes.append(("TOP", names[t.arg2], "top"))
        elif t.kind == "attribute":
            attributes.append((t.role, names[t.arg1], t.arg2))
        elif t.kind == "relation":
            relations.append((t.role, names[t.arg1], names[t.arg2]))
    return instances, attributes, relations


def hill_climb_alignment(pred: frozenset[Triple], gold: frozenset[Triple],
                         cfg: MetricConfig) -> tuple[dict[str, str], int]:
    """Restarted hill climbing from the ``smatch`` package, seeded by ``cfg.seed``.

    The package keeps a triple cache and draws from the global ``random``
    module; both are reset around the call, and the caller's random state is
    restored afterwards. Matches are recounted on our own triple view.
    """
    pred_vars, gold_vars = _variables(pred), _variables(gold)
    instance1, attribute1, relation1 = _smatch_lists(pred, pred_vars, "a")
    instance2, attribute2, relation2 = _smatch_lists(gold, gold_vars, "b")

    state = random.getstate()
    random.seed(cfg.seed)
    smatch_core.iteration_num = cfg.restarts
    smatch_core.match_triple_dict.clear()
    try:
        best_mapping, best_match_num = smatch_core.get_best_match(
            instance1, attribute1, relation1, instance2, attribute2, relation2, "a", "b")
    finally:
        smatch_core.match_triple_dict.clear()
        random.setstate(state)

    mapping = {pred_vars[i]: gold_vars[j] for i, j in enumerate(best_mapping) if j != -1}
    matched = count_matches(pred, gold, mapping)
    logger.debug(f"smatch hill climbing: {best_match_num} matched by the package, {matched} recounted")
    return mapping, matched


def best_alignment(pred: frozenset[Triple], gold: frozenset[Triple], cfg: MetricConfig) -> tuple[dict[str, str], int]:
    n_pred, n_gold = len(_variables(pred)), len(_variables(gold))
    if max(n_pred, n_gold) <= cfg.exact_threshold:
        return exact_alignment(pred, gold)
    return hill_climb_alignment(pred, gold, cfg)


def _score(pred: frozenset[Triple], gold: frozenset[Triple], mapping: dict[str, str], matched: int) -> Score:
    return Score.from_counts(matched, len(pred), len(gold), Alignment(mapping, matched))


def smatch(pred: SemanticGraph, gold: SemanticGraph, cfg: MetricConfig | None = None) -> Score:
    """SMATCH F-score; exact when both graphs are within ``exact_threshold``."""
    cfg = cfg or MetricConfig()
    pred_triples = scoring_triples(pred, cfg.normalize_case)
    gold_triples = scoring_triples(gold, cfg.normalize_case)
    mapping, matched = best_alignment(pred_triples, gold_triples, cfg)
    return _score(pred_triples, gold_triples, mapping, matched)


def smatch_hill_climb(pred: SemanticGraph, gold: SemanticGraph, cfg: MetricConfig | None = None) -> Score:
    """SMATCH by restarted hill climbing only, whatever the graph size."""
    cfg = cfg or MetricConfig()
    pred_triples = scoring_triples(pred, cfg.normalize_case)
    gold_triples = scoring_triples(gold, cfg.normalize_case)
    mapping, matched = hill_climb_alignment(pred_triples, gold_triples, cfg)
    return _score(pred_triples, gold_triples, mapping, matched)


def smatch_exact(pred: SemanticGraph, gold: SemanticGraph, cfg: MetricConfig | None = None) -> Score:
    """Globally optimal SMATCH by exhaustive (pruned) search.

    Raises:
        TooLarge: either graph has more than ``exact_threshold`` variables, or
            the search exceeds ``EXACT_EXPANSION_BUDGET`` nodes.
    """
    cfg = cfg or MetricConfig()
    pred_triples = scoring_triples(pred, cfg.normalize_case)
    gold_triples = scoring_triples(gold, cfg.normalize_case)
    larger = max(len(pred.nodes), len(gold.nodes))
    if larger > cfg.exact_threshold:
        raise TooLarge(f"exact search needs <= {cfg.exact_threshold} variables per graph, got {larger}")
    mapping, matched = exact_alignment(pred_triples, gold_triples, EXACT_EXPANSION_BUDGET)
    return _score(pred_triples, gold_triples, mapping, matched)


# --- SMATCH++ ----------------------------------------------------------------

SMATCHPP_CATEGORIES = ("instance", "relation", "attribute", "srl", "reentrancy")


@lru_cache(maxsize=1)
def _smatchpp_measure() -> Smatchpp:
    return Smatchpp(alignmentsolver=solvers.ILP())


def _smatchpp_counts(pred: SemanticGraph, gold: SemanticGraph) -> tuple[int, int, int]:
    """(matched, pred triples, gold triples) from the ``smatchpp`` package."""
    pred_text = serialize_penman(pred, indent=None)
    gold_text = serialize_penman(gold, indent=None)
    try:
        match, _status, _alignment = _smatchpp_measure().process_pair(pred_text, gold_text)
    except Exception as e:
        logger.error(f"smatchpp failed on {pred_text!r} vs {gold_text!r}: {e}", exc_info=True)
        raise DataError(f"smatchpp could not score the pair: {e}") from e
    counts = match["main"] if isinstance(match, Mapping) else match
    matched, _matched_gold, pred_count, gold_count = (int(round(float(x))) for x in list(counts)[:4])
    return matched, pred_count, gold_count


def _category(triple_set: frozenset[Triple], name: str) -> frozenset[Triple]:
    if name in ("instance", "relation", "attribute"):
        return frozenset(t for t in triple_set if t.kind == name)
    relations = [t for t in triple_set if t.kind == "relation"]
    if name == "srl":
        return frozenset(t for t in relations if SRL_ROLE.match(t.role))
    incoming: dict[str, int] = {}
    for t in relations:
        incoming[t.arg2] = incoming.get(t.arg2, 0) + 1
    return frozenset(t for t in relations if incoming[t.arg2] > 1)


def smatchpp(pred: SemanticGraph, gold: SemanticGraph, cfg: MetricConfig | None = None) -> FineGrainedScore:
    """SMATCH++ overall score with per-category scores under one global alignment.

    The overall counts come from ``smatchpp`` (standardized input, ILP
    alignment). Categories are counted on the standardized triple view under
    the best alignment of that view.
    """
    cfg = cfg or MetricConfig()
    pred_triples = scoring_triples(pred, cfg.normalize_case, standardize=True)
    gold_triples = scoring_triples(gold, cfg.normalize_case, standardize=True)
    mapping, matched = best_alignment(pred_triples, gold_triples, cfg)
    alignment = Alignment(mapping, matched)

    categories = {}
    for name in SMATCHPP_CATEGORIES:
        pred_part = _category(pred_triples, name)
        gold_part = _category(gold_triples, name)
        categories[name] = Score.from_counts(
            count_matches(pred_part, gold_part, mapping), len(pred_part), len(gold_part), alignment)

    overall = Score.from_counts(*_smatchpp_counts(pred, gold), alignment)
    return FineGrainedScore(overall, categories)


# --- AnCast-style anchor broadcast ------------------------------------------

SIGNATURE_ROUNDS = 3


class _GraphView:
    def __init__(self, triple_set: frozenset[Triple]):
        self.concepts = {t.arg1: t.arg2 for t in triple_set if t.kind == "instance"}
        self.top = next(t.arg2 for t in triple_set if t.kind == "top")
        self.attributes: dict[str, list[tuple[str, str]]] = {v: [] for v in self.concepts}
        # variable -> {(neighbour, role, direction)}
        self.neighbours: dict[str, set[tuple[str, str, str]]] = {v: set() for v in self.concepts}
        for t in triple_set:
            if t.kind == "attribute":
                self.attributes[t.arg1].append((t.role, t.arg2))
            elif t.kind == "relation" and t.arg1 == t.arg2:
                self.attributes[t.arg1].append((t.role, "<self>"))
            elif t.kind == "relation":
                self.neighbours[t.arg1].add((t.arg2, t.role, "out"))
                self.neighbours[t.arg2].add((t.arg1, t.role, "in"))

    def concept_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for concept in self.concepts.values():
            counts[concept] = counts.get(concept, 0) + 1
        return counts

    def signatures(self, table: dict[tuple, int], rounds: int = SIGNATURE_ROUNDS) -> list[dict[str, int]]:
        """Structural labels per refinement round, interned in a shared ``table``.

        Round 0 is the concept, the attribute multiset and the top flag; each
        later round adds the multiset of (role, direction, neighbour label).
        """
        labels = {
            v: table.setdefault(("node", self.concepts[v], tuple(sorted(self.attributes[v])), v == self.top),
                                len(table))
            for v in self.concepts
        }
        history = [labels]
        for _ in range(rounds):
            labels = {
                v: table.setdefault(
                    (labels[v], tuple(sorted((role, direction, labels[q]) for q, role, direction in self.neighbours[v]))),
                    len(table))
                for v in self.concepts
            }
            history.append(labels)
        return history


def _anchor_broadcast(pred: _GraphView, gold: _GraphView) -> dict[str, str]:
    mapping: dict[str, str] = {}
    reverse: dict[str, str] = {}

    def align(p: str, g: str) -> None:
        mapping[p] = g
        reverse[g] = p

    table: dict[tuple, int] = {}
    pred_sigs, gold_sigs = pred.signatures(table), gold.signatures(table)

    def agreement(p: str, g: str) -> int:
        return sum(1 for ps, gs in zip(pred_sigs, gold_sigs) if ps[p] == gs[g])

    # anchors: concepts occurring exactly once on both sides
    pred_counts, gold_counts = pred.concept_counts(), gold.concept_counts()
    gold_by_concept = {c: v for v, c in gold.concepts.items() if gold_counts[c] == 1}
    for p in sorted(pred.concepts):
        concept = pred.concepts[p]
        if pred_counts[concept] == 1 and concept in gold_by_concept:
            align(p, gold_by_concept[concept])
    if (pred.top not in mapping and gold.top not in reverse
            and pred.concepts[pred.top] == gold.concepts[gold.top]):
        align(pred.top, gold.top)
    logger.debug(f"AnCast anchors: {len(mapping)}")

    def support(pair: tuple[str, str]) -> int:
        p, g = pair
        gold_neighbours = gold.neighbours[g]
        return sum(1 for q, role, direction in pred.neighbours[p]
                   if q in mapping and (mapping[q], role, direction) in gold_neighbours)

    # broadcast along role-matched neighbours of aligned pairs
    while True:
        candidates: set[tuple[str, str]] = set()
        for p_aligned, g_aligned in mapping.items():
            for p, role, direction in pred.neighbours[p_aligned]:
                if p in mapping:
                    continue
                for g, gold_role, gold_direction in gold.neighbours[g_aligned]:
                    if g not in reverse and gold_role == role and gold_direction == direction:
                        candidates.add((p, g))
        if not candidates:
            break
        ranked = sorted(candidates, key=lambda pair: (
            -support(pair), -agreement(*pair), pred.concepts[pair[0]] != gold.concepts[pair[1]], pair))
        p, g = ranked[0]
        if support((p, g)) == 0:
            break
        align(p, g)

    # leftovers with equal concepts, most similar structure first
    for p in sorted(pred.concepts):
        if p in mapping:
            continue
        options = [g for g in gold.concepts if g not in reverse and gold.concepts[g] == pred.concepts[p]]
        if options:
            align(p, min(options, key=lambda g: (-support((p, g)), -agreement(p, g), g)))

    return mapping


def ancast(pred: SemanticGraph, gold: SemanticGraph, cfg: MetricConfig | None = None) -> Score:
    """Anchor-broadcast alignment score, refined by local moves (deterministic)."""
    cfg = cfg or MetricConfig()
    pred_triples = scoring_triples(pred, cfg.normalize_case)
    gold_triples = scoring_triples(gold, cfg.normalize_case)
    broadcast = _anchor_broadcast(_GraphView(pred_triples), _GraphView(gold_triples))
    mapping = TripleMatcher(pred_triples, gold_triples).improve(broadcast)
    matched = count_matches(pred_triples, gold_triples, mapping)
    return _score(pred_triples, gold_triples, mapping, matched)


METRICS: dict[str, Callable[..., Score | FineGrainedScore]] = {
    "smatch": smatch,
    "smatchpp": smatchpp,
    "ancast": ancast,
}


def relation_score(result: Score | FineGrainedScore, pred: SemanticGraph, gold: SemanticGraph,
                   cfg: MetricConfig | None = None) -> Score:
    """Relation-only counts under the alignment a metric already chose."""
    cfg = cfg or MetricConfig()
    overall = result.overall if isinstance(result, FineGrainedScore) else result
    pred_rel = _category(scoring_triples(pred, cfg.normalize_case), "relation")
    gold_rel = _category(scoring_triples(gold, cfg.normalize_case), "relation")
    mapping = dict(overall.alignment.mapping)
    return Score.from_counts(count_matches(pred_rel, gold_rel, mapping), len(pred_rel), len(gold_rel),
                             overall.alignment)
