"""
radfindings command line

Every stage is a subcommand reading and writing line-delimited records
("-" = stdin/stdout), so a run can be reproduced by piping stages:

    parse | filter          corpus -> parsed reports -> filtered references
    split                   corpus -> corpus with train/validation/test
    detect-mock             corpus -> detection rows
    prompt                  detection rows -> prompts
    generate                prompts -> generated findings
    evaluate                generations + references -> scores, summary
    run                     all of the above from one config file
    serve                   reference HTTP server (generation + evaluation)

Errors are written to stderr as one JSON record; the exit code is 0 on
success, 1 for validation errors, 2 for runtime errors and 3 for backend errors.
"""

import argparse
import json
import logging
import sys
from typing import Callable, Dict, Iterable, List, Optional

from pydantic import ValidationError

from config import settings
from core import __version__
from core.errors import EXIT_OK, EXIT_RUNTIME, ConfigError, MalformedRecord, PipelineError
from corpus.io import read_corpus, write_corpus
from corpus.parser import parse_report, report_from_record
from corpus.split import split_corpus
from detection.ingest import complete_sets, ingest_detections, write_detections
from detection.mock import mock_detect_all
from evaluation.comparison import BUNDLED_BASELINES, load_baselines, render_comparison
from evaluation.corpus import evaluate_corpus, render_summary, score_records
from filtering.filter import UNFILTERED_VERSION, filter_report, reference_record
from filtering.rules import load_rules
from generation.backends import create_backend, generate_many
from models.generation import GenerationRequest
from models.prompt import PromptOptions
from models.report import Split
from models.scoring import ComparisonRow
from pipeline.config import load_pipeline_config
from pipeline.runner import OUTPUT_FILES, RecordGuard, run_pipeline
from prompting.builder import build_prompt
from utils.jsonl import STDIO, iter_records, write_records

logger = logging.getLogger(__name__)


def _report_skips(guard: RecordGuard) -> None:
    for stage, count in guard.skipped.items():
        logger.warning(f"⚠️ {stage}: {count} records skipped")


def _records_or_skip(path: str, guard: RecordGuard, stage: str, build: Callable[[int, Dict], object]) -> List:
    """Read a record file, converting each record with build(line, record)"""
    results = []
    for line, record in iter_records(path, on_error=guard.handler(stage)):
        try:
            try:
                results.append(build(line, record))
            except (KeyError, TypeError, ValueError) as e:
                detail = e.errors()[0].get("msg", str(e)) if isinstance(e, ValidationError) else f"{type(e).__name__}: {e}"
                raise MalformedRecord(line, detail, path=path)
        except PipelineError as e:
            guard.record_failure(stage, e)
    return results


def _recorded_version(versions: Iterable[Optional[str]], what: str, override: Optional[str] = None) -> str:
    """The single version stamped on a record file, unless overridden"""
    if override is not None:
        return override
    found = sorted({v for v in versions if v})
    if len(found) > 1:
        raise ConfigError(f"Records mix {what} versions: {', '.join(found)}")
    return found[0] if found else ""


# ================================
# STAGE COMMANDS
# ================================

def cmd_parse(args) -> int:
    guard = RecordGuard(strict=args.strict)
    records = read_corpus(args.input, on_error=guard.handler("corpus"))
    reports = guard.map("parse", records, lambda r: parse_report(r.study_id, r.report_text), key=lambda r: r.study_id)
    write_records((r.to_record() for r in reports), args.output)
    _report_skips(guard)
    return EXIT_OK


def cmd_split(args) -> int:
    guard = RecordGuard(strict=args.strict)
    records = split_corpus(read_corpus(args.input, on_error=guard.handler("corpus")), seed=args.seed, group=args.group)
    write_corpus(records, args.output)
    _report_skips(guard)
    return EXIT_OK


def cmd_filter(args) -> int:
    guard = RecordGuard(strict=args.strict)
    rules = None if args.no_filter else load_rules(args.rules)
    rule_set_version = rules.version if rules else UNFILTERED_VERSION
    logger.info(f"📏 Filtering with rule set {rule_set_version}")

    reports = _records_or_skip(args.input, guard, "filter", lambda line, record: report_from_record(record))
    filtered = guard.map("filter", reports, lambda r: (r.study_id, *filter_report(r, rules)), key=lambda r: r.study_id)
    write_records((reference_record(study_id, text, rule_set_version) for study_id, text, _ in filtered), args.output)
    if args.decisions:
        write_records(
            (
                {"study_id": study_id, "index": index, **decision.model_dump()}
                for study_id, _, decisions in filtered
                for index, decision in enumerate(decisions)
            ),
            args.decisions,
        )
    _report_skips(guard)
    return EXIT_OK


def cmd_detect_mock(args) -> int:
    guard = RecordGuard(strict=args.strict)
    study_ids = [r.study_id for r in read_corpus(args.corpus, on_error=guard.handler("corpus"))]
    count = write_detections(mock_detect_all(study_ids, args.seed), args.output)
    logger.info(f"🩻 Wrote {count} mock detections for {len(study_ids)} studies (seed={args.seed})")
    _report_skips(guard)
    return EXIT_OK


def cmd_prompt(args) -> int:
    guard = RecordGuard(strict=args.strict)
    try:
        options = PromptOptions(
            probability_decimals=args.decimals,
            include_bbox=args.include_bbox,
            include_undetected=args.include_undetected,
            threshold=args.threshold,
            terminator=args.terminator,
        )
    except ValidationError as e:
        raise ConfigError(f"Invalid prompt options: {e.errors()[0].get('msg', 'invalid')}")
    sets = ingest_detections(args.input, on_error=guard.handler("detections"))
    if args.corpus:
        sets = complete_sets(sets, [r.study_id for r in read_corpus(args.corpus, on_error=guard.handler("corpus"))])
    prompts = guard.map("prompt", sets, lambda ds: build_prompt(ds, options), key=lambda ds: ds.study_id)
    write_records((p.to_record() for p in prompts), args.output)
    _report_skips(guard)
    return EXIT_OK


def cmd_generate(args) -> int:
    guard = RecordGuard(strict=args.strict)
    requests = _records_or_skip(
        args.input,
        guard,
        "generate",
        lambda line, record: (
            record["study_id"],
            GenerationRequest(prompt=record["prompt"], max_new_tokens=args.max_new_tokens, request_id=record["study_id"]),
            record.get("prompt_options_version"),
        ),
    )
    prompt_options_version = _recorded_version((v for _, _, v in requests), "prompt options") or None
    backend = create_backend(
        args.backend,
        terminator=args.terminator,
        endpoint=args.endpoint,
        timeout=args.timeout,
        retries=args.retries,
        max_in_flight=args.max_in_flight,
    )
    with backend:
        generations = generate_many(
            [(study_id, request) for study_id, request, _ in requests],
            backend,
            workers=args.workers,
            prompt_options_version=prompt_options_version,
        )
    write_records((g.to_record() for g in generations), args.output)
    _report_skips(guard)
    return EXIT_OK


def cmd_evaluate(args) -> int:
    guard = RecordGuard(strict=args.strict)
    hypotheses = _records_or_skip(
        args.generations, guard, "evaluate", lambda line, r: (r["study_id"], r["text"], r.get("prompt_options_version"))
    )
    reference_rows = _records_or_skip(
        args.references, guard, "evaluate", lambda line, r: (r["study_id"], r["findings"], r.get("rule_set_version"))
    )
    references = {study_id: findings for study_id, findings, _ in reference_rows}
    rule_set_version = _recorded_version((v for _, _, v in reference_rows), "rule set", args.rule_set_version)
    prompt_options_version = _recorded_version((v for _, _, v in hypotheses), "prompt options", args.prompt_options_version)

    selected: Optional[set] = None
    if args.split != "all":
        if not args.corpus:
            raise ConfigError("--split needs --corpus with assigned splits")
        wanted = Split(args.split)
        selected = {r.study_id for r in read_corpus(args.corpus) if r.split == wanted}

    pairs = [
        (study_id, text, references[study_id])
        for study_id, text, _ in hypotheses
        if study_id in references and (selected is None or study_id in selected)
    ]
    generated = {study_id for study_id, _, _ in hypotheses}
    missing = sum(1 for study_id in references if study_id not in generated)
    if missing:
        logger.warning(f"⚠️ {missing} references have no generated findings")

    score = evaluate_corpus(
        pairs, beta=args.beta, rule_set_version=rule_set_version, prompt_options_version=prompt_options_version
    )
    if args.scores:
        write_records(score_records(score), args.scores)

    output = render_summary(score, args.split)
    if args.baselines:
        rows = load_baselines(args.baselines) + [ComparisonRow(system=args.system_name, rouge_l=score.mean_f)]
        output += "\n" + render_comparison(rows)
    sys.stdout.write(output)
    _report_skips(guard)
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = list(args.set or [])
    flag_keys = {
        "corpus": "corpus.path",
        "split_seed": "corpus.split_seed",
        "detections": "detections.path",
        "mock_seed": "detections.mock_seed",
        "rules": "filter.rules",
        "backend": "generation.backend",
        "endpoint": "generation.endpoint",
        "beta": "evaluation.beta",
        "baselines": "evaluation.baselines",
        "output_dir": "output.dir",
        "workers": "output.workers",
    }
    for attr, key in flag_keys.items():
        value = getattr(args, attr)
        if value is not None:
            overrides.append(f"{key}={value}")
    if args.no_filter:
        overrides.append("filter.enabled=false")
    if args.strict:
        overrides.append("output.strict=true")

    config = load_pipeline_config(args.config, overrides)
    manifest = run_pipeline(config)
    with open(manifest.outputs["summary"], "r", encoding="utf-8") as f:
        sys.stdout.write(f.read())
    logger.info(f"📁 Outputs in {config.output_dir}: {', '.join(OUTPUT_FILES.values())}, manifest.json")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("core.main:app", host=args.host, port=args.port, log_level=settings.LOG_LEVEL.lower())
    return EXIT_OK


# ================================
# ARGUMENT PARSING
# ================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="radfindings", description="Two-step radiology Findings generation pipeline")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level (logs go to stderr)")
    sub = parser.add_subparsers(dest="command", required=True)

    def stage(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--strict", action="store_true", help="Fail on the first malformed record")
        p.set_defaults(handler=handler)
        return p

    p = stage("parse", cmd_parse, "Parse corpus reports into sections and sentences")
    p.add_argument("--input", default=STDIO, help="Corpus records (default: stdin)")
    p.add_argument("--output", default=STDIO)

    p = stage("split", cmd_split, "Assign train/validation/test splits (70:10:20)")
    p.add_argument("--input", default=STDIO)
    p.add_argument("--output", default=STDIO)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group", choices=["study", "patient"], default="study")

    p = stage("filter", cmd_filter, "Filter parsed Findings into reference text")
    p.add_argument("--input", default=STDIO, help="Parsed report records")
    p.add_argument("--output", default=STDIO, help="Reference records")
    p.add_argument("--decisions", help="Also write per-sentence filter decisions here")
    p.add_argument("--rules", default="builtin", help="Rules file, or 'builtin'")
    p.add_argument("--no-filter", action="store_true", help="Keep the Findings unfiltered")

    p = stage("detect-mock", cmd_detect_mock, "Deterministic mock detections for a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--output", default=STDIO)

    p = stage("prompt", cmd_prompt, "Build prompts from detection rows")
    p.add_argument("--input", default=STDIO, help="Detection rows")
    p.add_argument("--corpus", help="Emit a prompt for every corpus study, in corpus order")
    p.add_argument("--output", default=STDIO)
    p.add_argument("--decimals", type=int, default=2)
    p.add_argument("--include-bbox", action="store_true")
    p.add_argument("--include-undetected", action="store_true", help="List undetected classes with probability zero")
    p.add_argument("--threshold", type=float, default=0.0)
    p.add_argument("--terminator", default="TL;DR")

    p = stage("generate", cmd_generate, "Generate Findings from prompts")
    p.add_argument("--input", default=STDIO, help="Prompt records")
    p.add_argument("--output", default=STDIO)
    p.add_argument("--backend", choices=["template", "remote"], default="template")
    p.add_argument("--endpoint", default=settings.GENERATION_ENDPOINT)
    p.add_argument("--max-new-tokens", type=int, default=settings.MAX_NEW_TOKENS)
    p.add_argument("--timeout", type=float, default=settings.GENERATION_TIMEOUT_SECONDS)
    p.add_argument("--retries", type=int, default=settings.GENERATION_RETRIES)
    p.add_argument("--max-in-flight", type=int, default=settings.GENERATION_MAX_IN_FLIGHT)
    p.add_argument("--workers", type=int, default=settings.PIPELINE_WORKERS)
    p.add_argument("--terminator", default="TL;DR")

    p = stage("evaluate", cmd_evaluate, "Score generations against references with ROUGE-L")
    p.add_argument("--generations", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("--scores", help="Write per-study scores here")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--baselines", nargs="?", const=str(BUNDLED_BASELINES), help="Baselines TSV (bundled table if no path)")
    p.add_argument("--system-name", default="this run")
    p.add_argument("--corpus", help="Split-assigned corpus, needed with --split")
    p.add_argument("--split", choices=["all", "train", "validation", "test"], default="all")
    p.add_argument("--rule-set-version", help="Rule set version to report (default: read from the references)")
    p.add_argument("--prompt-options-version", help="Prompt options version to report (default: read from the generations)")

    p = stage("run", cmd_run, "Run the whole pipeline")
    p.add_argument("--config", help="Pipeline INI file")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="Override a config key")
    p.add_argument("--corpus")
    p.add_argument("--split-seed", type=int)
    p.add_argument("--detections")
    p.add_argument("--mock-seed", type=int)
    p.add_argument("--rules")
    p.add_argument("--no-filter", action="store_true")
    p.add_argument("--backend", choices=["template", "remote"])
    p.add_argument("--endpoint")
    p.add_argument("--beta", type=float)
    p.add_argument("--baselines")
    p.add_argument("--output-dir")
    p.add_argument("--workers", type=int)

    p = sub.add_parser("serve", help="Serve the generation and evaluation API")
    p.add_argument("--host", default=settings.HOST)
    p.add_argument("--port", type=int, default=settings.PORT)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), stream=sys.stderr)

    try:
        return args.handler(args)
    except PipelineError as e:
        sys.stderr.write(json.dumps(e.to_record(), ensure_ascii=False) + "\n")
        return e.exit_code
    except Exception as e:
        logger.error(f"❌ Unexpected failure in '{args.command}': {e}", exc_info=True)
        sys.stderr.write(json.dumps({"error": type(e).__name__, "message": str(e), "exit_code": EXIT_RUNTIME}) + "\n")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
