"""Command-line front end.

Exit codes: 0 success, 1 usage error (bad flags, missing paths, invalid
configuration), 2 data error (malformed input, misaligned files).
"""

import argparse
import json
import re
import sys
from pathlib import Path

from .amr2umr import RoleConverter, decision_lines, load_animacy, load_decisions, load_mappings, load_split_rules
from .config import Settings, load_settings
from .conllu_io import normalize_tags, read_conllu_file
from .corpus import (DEFAULT_MINECRAFT_PATTERNS, MINECRAFT, PARTITIONS, load_split_spec, read_manifest,
                     read_umr_corpus, replay_manifest, build_split, write_manifest, write_umr_corpus)
from .errors import CountMismatch, DataError, UnparseablePrediction, UsageError
from .evaluation import EvalPair, corpus_eval
from .graph import PenmanBlock, parse_penman, read_line_graphs, read_penman_blocks, serialize_penman, write_penman_blocks
from .logger_config import ROOT_LOGGER, get_logger, setup_logger
from .metrics import METRICS, MetricConfig
from .repair import REPAIRED, repair_parens, repair_report, status_lines
from .ud2umr import (bootstrap_partial, export_completion_records, ingest_completions, load_rules,
                     read_completion_records, write_completion_records)
from .vocabulary import validate_umr

logger = get_logger("cli")


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(message)


# --- helpers ------------------------------------------------------------------------

def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    return p


def _read(path: str) -> str:
    return _existing(path).read_text(encoding="utf-8")


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text)


def _blocks(path: str, per_line: bool = False) -> list[PenmanBlock]:
    text = _read(path)
    return read_line_graphs(text) if per_line else read_penman_blocks(text)


def _category_patterns(specs: list[str] | None) -> dict[str, re.Pattern]:
    if not specs:
        return {MINECRAFT: re.compile("|".join(re.escape(p) for p in DEFAULT_MINECRAFT_PATTERNS))}
    patterns = {}
    for spec in specs:
        name, sep, regex = spec.partition("=")
        if not sep or not name:
            raise UsageError(f"--category-pattern expects NAME=REGEX, got {spec!r}")
        try:
            patterns[name] = re.compile(regex)
        except re.error as e:
            raise UsageError(f"bad regex for category {name}: {e}") from e
    return patterns


def _align(pred: list[PenmanBlock], gold: list[PenmanBlock]) -> list[tuple[PenmanBlock, PenmanBlock]]:
    """Pair blocks by id when every block has one, else by position."""
    if all(b.id for b in pred) and all(b.id for b in gold) and pred and gold:
        by_id = {b.id: b for b in pred}
        missing = [b.id for b in gold if b.id not in by_id]
        extra = sorted(set(by_id) - {b.id for b in gold})
        if missing or extra:
            raise CountMismatch(f"ids differ: {len(missing)} gold id(s) without prediction, {len(extra)} extra prediction(s)")
        return [(by_id[g.id], g) for g in gold]
    if len(pred) != len(gold):
        raise CountMismatch(f"{len(pred)} predicted graph(s) but {len(gold)} gold graph(s)")
    return list(zip(pred, gold, strict=True))


def _metric_config(args, settings: Settings) -> MetricConfig:
    return MetricConfig.from_settings(settings, restarts=args.restarts, seed=args.seed,
                                      exact_threshold=args.exact_threshold)


# --- subcommands -------------------------------------------------------------------------

def cmd_eval(args, settings: Settings) -> int:
    pred_blocks = _blocks(args.pred, args.per_line)
    gold_blocks = _blocks(args.gold, args.per_line)
    pairs_of_blocks = _align(pred_blocks, gold_blocks)
    patterns = _category_patterns(args.category_pattern)

    pairs: list[EvalPair] = []
    unparseable: list[str] = []
    for index, (pred_block, gold_block) in enumerate(pairs_of_blocks, start=1):
        label = gold_block.id or str(index)
        gold = parse_penman(gold_block.text)
        text = repair_parens(pred_block.text).text if args.repair else pred_block.text
        try:
            pred = parse_penman(text)
        except DataError as e:
            logger.warning(f"Prediction {label} does not parse: {e}")
            unparseable.append(label)
            pred = None
        sentence = gold_block.sentence or pred_block.sentence or ""
        tags = frozenset(name for name, pattern in patterns.items() if pattern.search(sentence))
        pairs.append(EvalPair(gold=gold, pred=pred, tags=tags, id=gold_block.id))

    if unparseable and args.on_unparseable == "fail":
        raise UnparseablePrediction(unparseable)

    metrics = args.metric or ["smatch"]
    report = corpus_eval(pairs, _metric_config(args, settings), metrics=metrics,
                         jobs=args.jobs or settings.jobs, progress=args.progress,
                         relations=args.relations)
    _emit(report.to_json() if args.format == "json" else report.to_table(), args.output)
    return 0


def cmd_convert_ud(args, settings: Settings) -> int:
    rules = load_rules(_existing(args.rules)) if args.rules else load_rules()
    sentences = [normalize_tags(s) for s in read_conllu_file(_existing(args.conllu))]
    partials = [bootstrap_partial(s, rules, sentence_index=i) for i, s in enumerate(sentences, start=1)]

    blocks = [PenmanBlock(serialize_penman(graph), id=s.sent_id, sentence=s.text)
              for s, graph in zip(sentences, partials, strict=True)]
    _emit(write_penman_blocks(blocks), args.output)

    if args.records:
        golds = None
        if args.gold:
            golds = [b.text for b in _blocks(args.gold)]
        records = export_completion_records(sentences, partials, golds)
        _emit(write_completion_records(records), args.records)
    logger.info(f"Converted {len(sentences)} sentence(s) with rules {rules.version}")
    return 0


def cmd_ingest(args, settings: Settings) -> int:
    records = read_completion_records(_read(args.records))
    blocks = _blocks(args.completions, args.per_line)
    if args.by_id:
        completions = {b.id: b.text for b in blocks}
    else:
        completions = [b.text for b in blocks]
    result = ingest_completions(records, completions)

    sentences = {r.sent_id: r.sentence for r in records}
    out = [PenmanBlock(serialize_penman(graph), id=sent_id, sentence=sentences[sent_id])
           for sent_id, graph in result.graphs]
    _emit(write_penman_blocks(out), args.output)
    for failure in result.failures:
        print(f"unparseable\t{failure.sent_id}\t{failure.error}", file=sys.stderr)
    return 2 if result.failures else 0


def cmd_convert_roles(args, settings: Settings) -> int:
    mappings = load_mappings(_existing(args.mappings)) if args.mappings else load_mappings()
    overrides = load_decisions(_existing(args.decisions)) if args.decisions else None
    converter = RoleConverter(mappings, load_animacy(), load_split_rules(), overrides)

    out: list[PenmanBlock] = []
    decisions = []
    for block in _blocks(args.umr):
        graph = parse_penman(block.text)
        converted, made = converter.convert(graph, block.id)
        decisions.extend(made)
        changed = any(d.chosen != d.role for d in made)
        text = serialize_penman(converted) if changed else block.text
        out.append(PenmanBlock(text, id=block.id, sentence=block.sentence))

    _emit(write_penman_blocks(out), args.output)
    log = decision_lines(decisions)
    if args.decision_log:
        _emit(log, args.decision_log)
    else:
        sys.stderr.write(log)
    logger.info(f"Converted {len(out)} graph(s); {sum(d.chosen != d.role for d in decisions)} role(s) rewritten")
    return 0


def cmd_split(args, settings: Settings) -> int:
    files = [_existing(path) for path in args.corpus]
    corpus = read_umr_corpus(files, language=args.language, jobs=args.jobs or settings.jobs, strict=args.strict)

    if args.replay:
        result = replay_manifest(corpus.entries, read_manifest(_read(args.replay)))
    else:
        if not args.spec:
            raise UsageError("split needs --spec or --replay")
        result = build_split(corpus.entries, load_split_spec(_existing(args.spec)))

    out_dir = Path(args.out_dir)
    for name in PARTITIONS:
        _emit(write_umr_corpus(result.partition(name)), str(out_dir / f"{name}.txt"))
    _emit(write_manifest(result.manifest), str(out_dir / "manifest.json"))
    return 0


def cmd_repair(args, settings: Settings) -> int:
    blocks = _blocks(args.file, args.per_line)
    outcomes = [repair_parens(block.text) for block in blocks]
    ids = [block.id for block in blocks]

    if args.per_line:
        text = "".join(outcome.text.strip() + "\n" for outcome in outcomes)
    else:
        text = write_penman_blocks(
            PenmanBlock(outcome.text, id=block.id, sentence=block.sentence)
            for block, outcome in zip(blocks, outcomes, strict=True))
    _emit(text, args.output)

    status_path = args.status or (f"{args.output}.status.tsv" if args.output else None)
    if status_path:
        _emit(status_lines(outcomes, ids), status_path)
    summary = repair_report(outcomes, ids)
    for label in summary.unrecoverable:
        print(f"unrecoverable\t{label}", file=sys.stderr)
    logger.info(f"{summary.counts[REPAIRED]} graph(s) repaired")
    return 0


def cmd_inspect(args, settings: Settings) -> int:
    rows = []
    failed = 0
    for index, block in enumerate(_blocks(args.file, args.per_line), start=1):
        row = {"id": block.id or str(index)}
        try:
            graph = parse_penman(block.text)
        except DataError as e:
            failed += 1
            row.update({"error": str(e)})
            rows.append(row)
            continue
        row.update(graph.summary())
        row["issues"] = [{"kind": i.kind, "message": i.message} for i in validate_umr(graph)]
        rows.append(row)

    if args.format == "json":
        text = json.dumps(rows, indent=2, sort_keys=True) + "\n"
    else:
        lines = ["id\tnodes\tedges\tattributes\ttriples\tissues"]
        for row in rows:
            if "error" in row:
                lines.append(f"{row['id']}\terror: {row['error']}")
            else:
                issues = "; ".join(i["message"] for i in row["issues"]) or "-"
                lines.append(f"{row['id']}\t{row['nodes']}\t{row['edges']}\t{row['attributes']}\t{row['triples']}\t{issues}")
        text = "\n".join(lines) + "\n"
    _emit(text, args.output)
    return 2 if failed else 0


# --- parser ----------------------------------------------------------------------------

def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="umr-tools", description="UMR graph evaluation and conversion toolkit")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="override UMR_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    def common(p, per_line=True):
        p.add_argument("-o", "--output", help="output file (default: stdout)")
        if per_line:
            p.add_argument("--per-line", action="store_true", help="one graph per line instead of blank-line blocks")

    p = sub.add_parser("eval", help="score predicted graphs against gold graphs")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--metric", action="append", choices=sorted(METRICS), help="repeatable; default smatch")
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--exact-threshold", type=int)
    p.add_argument("--category-pattern", action="append", metavar="NAME=REGEX",
                   help="tag pairs whose sentence matches REGEX; default: minecraft")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.add_argument("--jobs", type=int)
    p.add_argument("--on-unparseable", choices=["fail", "zero"], default="fail")
    p.add_argument("--repair", action="store_true", help="repair predicted parentheses before parsing")
    p.add_argument("--relations", action="store_true", help="add a relation-only row per metric")
    p.add_argument("--progress", action="store_true")
    common(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("convert-ud", help="bootstrap partial UMR graphs from CoNLL-U")
    p.add_argument("conllu")
    p.add_argument("--rules", help="UD rule table (default: shipped table)")
    p.add_argument("--records", help="also write completion records (JSON lines) here")
    p.add_argument("--gold", help="gold PENMAN blocks to include in the records")
    common(p, per_line=False)
    p.set_defaults(handler=cmd_convert_ud)

    p = sub.add_parser("ingest", help="repair and parse completions of partial graphs")
    p.add_argument("records")
    p.add_argument("completions")
    p.add_argument("--by-id", action="store_true", help="align completions by '# ::id' instead of order")
    common(p)
    p.set_defaults(handler=cmd_ingest)

    p = sub.add_parser("convert-roles", help="map AMR roles to UMR roles")
    p.add_argument("umr")
    p.add_argument("--mappings", help="role mapping table (default: shipped table)")
    p.add_argument("--decisions", help="per-edge decisions to replay")
    p.add_argument("--decision-log", help="write the decision log here (default: stderr)")
    common(p, per_line=False)
    p.set_defaults(handler=cmd_convert_roles)

    p = sub.add_parser("split", help="build train/dev/test partitions")
    p.add_argument("corpus", nargs="+")
    p.add_argument("--spec", help="JSON split spec")
    p.add_argument("--replay", help="rebuild partitions from a manifest")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--language", default="en", help="language of blocks without lang metadata or a language prefix")
    p.add_argument("--jobs", type=int)
    p.add_argument("--strict", action="store_true", help="fail on the first malformed block")
    p.set_defaults(handler=cmd_split)

    p = sub.add_parser("repair", help="fix parenthesis mismatches")
    p.add_argument("file")
    p.add_argument("--status", help="status sidecar path (default: OUTPUT.status.tsv)")
    common(p)
    p.set_defaults(handler=cmd_repair)

    p = sub.add_parser("inspect", help="parse, validate and summarize graphs")
    p.add_argument("file")
    p.add_argument("--format", choices=["table", "json"], default="table")
    common(p)
    p.set_defaults(handler=cmd_inspect)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        settings = load_settings()
        setup_logger(ROOT_LOGGER, args.log_level or settings.log_level, settings.log_file)
        return args.handler(args, settings)
    except UsageError as e:
        logger.error(f"Usage error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1
    except DataError as e:
        logger.error(f"Data error: {e}")
        logger.debug("Data error traceback", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        logger.error(f"I/O error: {e}", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
