"""
End-to-end pipeline run

parse -> filter -> detections (file or mock) -> prompt -> generate -> evaluate,
writing every stage's records to the output directory followed by
manifest.json. With the template backend the stage outputs are a pure
function of the config. A PipelineError escaping a stage is re-raised as a
StageFailure naming that stage.

Parse, filter and prompt run record by record on one thread; only
generation goes through the bounded worker pool.
"""

import json
import logging
from collections import Counter
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, Iterable, Iterator, List, Optional, TypeVar

from tqdm import tqdm

from core import __version__
from core.errors import BackendError, PipelineError, StageFailure
from corpus.io import read_corpus, write_corpus
from corpus.parser import parse_report
from corpus.split import split_corpus
from detection.ingest import complete_sets, ingest_detections, write_detections
from detection.mock import mock_detect_all
from evaluation.comparison import load_baselines, render_comparison
from evaluation.corpus import evaluate_corpus, render_summary, score_records
from filtering.filter import UNFILTERED_VERSION, filter_report, reference_record
from filtering.rules import load_rules
from generation.backends import create_backend, generate_many
from models.generation import GenerationRequest
from models.pipeline import PipelineConfig, RunManifest
from models.report import RadiologyReport, Split
from models.scoring import ComparisonRow
from prompting.builder import build_prompt, render_training_pair
from utils.jsonl import write_records, write_text

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

OUTPUT_FILES = {
    "corpus_split": "corpus_split.jsonl",
    "reports": "reports.jsonl",
    "filter_decisions": "filter_decisions.jsonl",
    "references": "references.jsonl",
    "detections": "detections.jsonl",
    "prompts": "prompts.jsonl",
    "training_pairs": "training_pairs.jsonl",
    "generations": "generations.jsonl",
    "scores": "scores.jsonl",
    "summary": "summary.txt",
}
MANIFEST_FILE = "manifest.json"


class RecordGuard:
    """
    Per-record crash isolation.

    A PipelineError raised for one record is logged and counted against its
    stage, and the record is dropped. In strict mode, and for backend
    errors, the error is re-raised as a StageFailure instead.
    """

    def __init__(self, strict: bool = False):
        self.strict = strict
        self.skipped: Counter = Counter()

    def handler(self, stage: str) -> Callable[[PipelineError], None]:
        def on_error(error: PipelineError) -> None:
            self.record_failure(stage, error)

        return on_error

    def record_failure(self, stage: str, error: PipelineError, study_id: Optional[str] = None) -> None:
        if self.strict or isinstance(error, BackendError):
            raise StageFailure(stage, error, study_id=study_id)
        self.skipped[stage] += 1
        logger.warning(f"⚠️ [{stage}] skipped {study_id or 'record'}: {error.message}")

    def map(self, stage: str, items: Iterable[T], fn: Callable[[T], R], key: Callable[[T], str]) -> List[R]:
        results: List[R] = []
        for item in tqdm(items, desc=stage, disable=None, leave=False):
            try:
                results.append(fn(item))
            except PipelineError as e:
                self.record_failure(stage, e, study_id=key(item))
        return results


def _stamp() -> datetime:
    return datetime.now(timezone.utc)


@contextmanager
def _stage(name: str) -> Iterator[None]:
    try:
        yield
    except StageFailure:
        raise
    except PipelineError as e:
        raise StageFailure(name, e)


def run_pipeline(config: PipelineConfig) -> RunManifest:
    """Run every stage; the manifest is written once, on success or failure"""
    output_dir = Path(config.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    outputs = {name: str(output_dir / filename) for name, filename in OUTPUT_FILES.items()}

    manifest = RunManifest(
        tool_version=__version__,
        config=config.snapshot(),
        prompt_options_version=config.prompt.version,
        backend=config.backend,
        outputs=outputs,
        started_at=_stamp(),
    )
    guard = RecordGuard(strict=config.strict)
    logger.info(f"🚀 Pipeline run starting: corpus={config.corpus_path} output_dir={output_dir}")

    try:
        _run_stages(config, manifest, guard, outputs)
        manifest.status = "completed"
        logger.info(f"✅ Pipeline run completed: {manifest.counts}")
    except PipelineError as e:
        manifest.status = "failed"
        manifest.failure = e.to_record()
        logger.error(f"❌ Pipeline run failed: {e.message}")
        raise
    except Exception as e:
        manifest.status = "failed"
        manifest.failure = {"error": type(e).__name__, "message": str(e)}
        logger.error(f"❌ Pipeline run failed unexpectedly: {e}", exc_info=True)
        raise
    finally:
        manifest.skipped = dict(guard.skipped)
        manifest.finished_at = _stamp()
        write_text(json.dumps(manifest.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n",
                   output_dir / MANIFEST_FILE)

    return manifest


def _run_stages(config: PipelineConfig, manifest: RunManifest, guard: RecordGuard, outputs: Dict[str, str]) -> None:
    counts = manifest.counts

    # ================================
    # CORPUS
    # ================================
    with _stage("corpus"):
        records = read_corpus(config.corpus_path, on_error=guard.handler("corpus"))
        records = split_corpus(records, seed=config.split_seed, group=config.split_group)
        counts["corpus"] = write_corpus(records, outputs["corpus_split"])
    split_of = {r.study_id: r.split for r in records}

    with _stage("parse"):
        reports: List[RadiologyReport] = guard.map(
            "parse", records, lambda r: parse_report(r.study_id, r.report_text), key=lambda r: r.study_id
        )
        counts["reports"] = write_records((r.to_record() for r in reports), outputs["reports"])

    # ================================
    # FILTER
    # ================================
    with _stage("filter"):
        rules = load_rules(config.rules) if config.filter_enabled else None
        manifest.rule_set_version = rules.version if rules is not None else UNFILTERED_VERSION

        filtered = guard.map("filter", reports, lambda r: (r.study_id, *filter_report(r, rules)), key=lambda r: r.study_id)
        references = {study_id: text for study_id, text, _ in filtered}
        write_records(
            (
                {"study_id": study_id, "index": index, **decision.model_dump()}
                for study_id, _, decisions in filtered
                for index, decision in enumerate(decisions)
            ),
            outputs["filter_decisions"],
        )
        counts["references"] = write_records(
            (reference_record(study_id, text, manifest.rule_set_version) for study_id, text in references.items()),
            outputs["references"],
        )

    # ================================
    # DETECTIONS
    # ================================
    study_ids = [r.study_id for r in reports]
    with _stage("detections"):
        if config.detections_path is not None:
            detection_sets = complete_sets(
                ingest_detections(config.detections_path, on_error=guard.handler("detections")), study_ids
            )
        else:
            detection_sets = mock_detect_all(study_ids, config.mock_seed)
        counts["detections"] = len(detection_sets)
        counts["detection_rows"] = write_detections(detection_sets, outputs["detections"])

    # ================================
    # PROMPTS
    # ================================
    with _stage("prompt"):
        prompts = guard.map(
            "prompt", detection_sets, lambda ds: build_prompt(ds, config.prompt), key=lambda ds: ds.study_id
        )
        counts["prompts"] = write_records((p.to_record() for p in prompts), outputs["prompts"])

        train_prompts = [p for p in prompts if split_of.get(p.study_id) == Split.TRAIN and references.get(p.study_id)]
        counts["training_pairs"] = write_records(
            ({"study_id": p.study_id, "text": render_training_pair(p, references[p.study_id])} for p in train_prompts),
            outputs["training_pairs"],
        )

    # ================================
    # GENERATION
    # ================================
    with _stage("generate"):
        backend = create_backend(
            config.backend,
            terminator=config.prompt.terminator,
            endpoint=config.endpoint,
            timeout=config.timeout_seconds,
            retries=config.retries,
            max_in_flight=config.max_in_flight,
        )
        requests = [
            (p.study_id, GenerationRequest(prompt=p.text, max_new_tokens=config.max_new_tokens, request_id=p.study_id))
            for p in prompts
        ]
        with backend:
            generations = generate_many(
                requests, backend, workers=config.workers, prompt_options_version=config.prompt.version
            )
        counts["generations"] = write_records((g.to_record() for g in generations), outputs["generations"])

    # ================================
    # EVALUATION
    # ================================
    with _stage("evaluate"):
        pairs = [
            (g.study_id, g.text, references[g.study_id])
            for g in generations
            if g.study_id in references
            and (config.eval_split == "all" or split_of.get(g.study_id) == Split(config.eval_split))
        ]
        score = evaluate_corpus(
            pairs,
            beta=config.beta,
            rule_set_version=manifest.rule_set_version,
            prompt_options_version=config.prompt.version,
        )
        counts["scores"] = write_records(score_records(score), outputs["scores"])
        manifest.corpus_score = score.summary()

        summary = render_summary(score, config.eval_split)
        if config.baselines_path is not None:
            rows = load_baselines(config.baselines_path) + [ComparisonRow(system=config.system_name, rouge_l=score.mean_f)]
            summary += "\n" + render_comparison(rows)
        write_text(summary, outputs["summary"])
