import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from tqdm import tqdm

from .errors import EmptyCorpus, UsageError
from .graph import SemanticGraph
from .logger_config import get_logger
from .metrics import METRICS, FineGrainedScore, MetricConfig, Score, relation_score, scoring_triples

logger = get_logger("evaluation")

OVERALL = "overall"
RELATIONS = "relations"


@dataclass(frozen=True)
class EvalPair:
    gold: SemanticGraph
    pred: SemanticGraph | None  # None = unparseable prediction scored as zero
    tags: frozenset[str] = frozenset()
    id: str | None = None


@dataclass(frozen=True)
class ReportRow:
    metric: str
    category: str
    precision: float
    recall: float
    f1: float
    n_pairs: int
    matched: int
    pred_count: int
    gold_count: int


@dataclass
class PairResult:
    index: int
    id: str | None
    tags: tuple[str, ...]
    scores: dict[str, Score]
    relation_scores: dict[str, Score] = field(default_factory=dict)


@dataclass
class ScoreReport:
    metrics: tuple[str, ...]
    rows: list[ReportRow] = field(default_factory=list)
    pairs: list[PairResult] = field(default_factory=list)

    def row(self, metric: str, category: str = OVERALL) -> ReportRow:
        for row in self.rows:
            if row.metric == metric and row.category == category:
                return row
        raise KeyError((metric, category))

    @property
    def categories(self) -> list[str]:
        seen = []
        for row in self.rows:
            if row.category not in seen:
                seen.append(row.category)
        return seen

    def to_dict(self) -> dict:
        return {
            "metrics": list(self.metrics),
            "rows": [asdict(row) for row in self.rows],
            "pairs": [
                {
                    "index": pair.index,
                    "id": pair.id,
                    "tags": list(pair.tags),
                    "scores": {
                        metric: {
                            "precision": score.precision,
                            "recall": score.recall,
                            "f1": score.f1,
                            "matched": score.matched,
                            "pred_count": score.pred_count,
                            "gold_count": score.gold_count,
                        }
                        for metric, score in pair.scores.items()
                    },
                }
                for pair in self.pairs
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        header = ("metric", "category", "n_pairs", "precision", "recall", "f1")
        lines = [
            (row.metric, row.category, str(row.n_pairs),
             f"{row.precision * 100:.2f}", f"{row.recall * 100:.2f}", f"{row.f1 * 100:.2f}")
            for row in self.rows
        ]
        widths = [max(len(cells[i]) for cells in (header, *lines)) for i in range(len(header))]

        def render(cells):
            left = [cells[i].ljust(widths[i]) for i in range(2)]
            right = [cells[i].rjust(widths[i]) for i in range(2, len(cells))]
            return "  ".join(left + right).rstrip()

        return "\n".join([render(header), *(render(cells) for cells in lines)]) + "\n"


def _zero_score(gold: SemanticGraph, cfg: MetricConfig) -> Score:
    return Score.from_counts(0, 0, len(scoring_triples(gold, cfg.normalize_case)))


def _zero_relations(gold: SemanticGraph, cfg: MetricConfig) -> Score:
    gold_relations = [t for t in scoring_triples(gold, cfg.normalize_case) if t.kind == "relation"]
    return Score.from_counts(0, 0, len(gold_relations))


def _score_pair(args: tuple) -> tuple[dict[str, Score], dict[str, Score]]:
    pred, gold, metrics, cfg, relations = args
    scores, relation_scores = {}, {}
    for metric in metrics:
        if pred is None:
            scores[metric] = _zero_score(gold, cfg)
            if relations:
                relation_scores[metric] = _zero_relations(gold, cfg)
            continue
        result = METRICS[metric](pred, gold, cfg)
        scores[metric] = result.overall if isinstance(result, FineGrainedScore) else result
        if relations:
            relation_scores[metric] = relation_score(result, pred, gold, cfg)
    return scores, relation_scores


def _as_pair(item) -> EvalPair:
    if isinstance(item, EvalPair):
        return item
    pred, gold, *rest = item
    tags = frozenset(rest[0]) if rest else frozenset()
    return EvalPair(gold=gold, pred=pred, tags=tags)


def aggregate(metric: str, category: str, scores: Iterable[Score]) -> ReportRow:
    """Micro-average: sum the counts, then compute P/R/F once."""
    scores = list(scores)
    matched = sum(s.matched for s in scores)
    pred_count = sum(s.pred_count for s in scores)
    gold_count = sum(s.gold_count for s in scores)
    total = Score.from_counts(matched, pred_count, gold_count)
    return ReportRow(metric, category, total.precision, total.recall, total.f1,
                     len(scores), matched, pred_count, gold_count)


def corpus_eval(pairs: Sequence, cfg: MetricConfig | None = None,
                metrics: Sequence[str] = ("smatch",), jobs: int = 1,
                progress: bool = False, relations: bool = False) -> ScoreReport:
    """Score every (pred, gold, tags) pair and micro-average per metric and category.

    Pairs are scored independently with the same seed, so the report does not
    depend on ``jobs`` or on scheduling order. With ``relations`` each metric
    also gets a relation-only row under the alignment it chose.
    """
    cfg = cfg or MetricConfig()
    pairs = [_as_pair(item) for item in pairs]
    if not pairs:
        raise EmptyCorpus("corpus_eval needs at least one pair")
    unknown = [m for m in metrics if m not in METRICS]
    if unknown:
        raise UsageError(f"unknown metric(s): {', '.join(unknown)}")
    metrics = tuple(metrics)

    logger.info(f"Scoring {len(pairs)} pair(s) with {', '.join(metrics)} (jobs={jobs})")
    work = [(pair.pred, pair.gold, metrics, cfg, relations) for pair in pairs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(tqdm(pool.map(_score_pair, work), total=len(work), disable=not progress))
    else:
        results = [_score_pair(args) for args in tqdm(work, disable=not progress)]

    report = ScoreReport(metrics=metrics)
    for index, (pair, (scores, relation_scores)) in enumerate(zip(pairs, results, strict=True)):
        report.pairs.append(PairResult(index, pair.id, tuple(sorted(pair.tags)), scores, relation_scores))

    categories = sorted({tag for pair in pairs for tag in pair.tags})
    for metric in metrics:
        report.rows.append(aggregate(metric, OVERALL, (r.scores[metric] for r in report.pairs)))
        if relations:
            report.rows.append(aggregate(metric, RELATIONS, (r.relation_scores[metric] for r in report.pairs)))
        for category in categories:
            members = [r.scores[metric] for r in report.pairs if category in r.tags]
            report.rows.append(aggregate(metric, category, members))

    overall = report.row(metrics[0])
    logger.info(f"{metrics[0]} overall F1 = {overall.f1 * 100:.2f} over {overall.n_pairs} pair(s)")
    return report
