"""
Pipeline tests
End-to-end runs on the synthetic corpus, golden outputs, stage composability through the CLI
"""

import json
import os
import time
from collections import Counter
from pathlib import Path

import pytest

from core.errors import ConfigError, StageFailure
from corpus.io import read_corpus
from corpus.parser import parse_report
from detection.mock import mock_detect
from evaluation.corpus import evaluate_corpus
from filtering.filter import filter_report
from filtering.rules import default_rules
from models.prompt import PromptOptions
from pipeline import load_pipeline_config, run_pipeline
from pipeline.cli import main
from pipeline.runner import MANIFEST_FILE, OUTPUT_FILES
from prompting.builder import build_prompt

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN = FIXTURES / "golden"
CORPUS = FIXTURES / "synthetic_corpus.jsonl"
DETECTIONS = FIXTURES / "synthetic_detections.jsonl"


def read_jsonl(path):
    return [json.loads(line) for line in Path(path).read_text(encoding="utf-8").splitlines() if line.strip()]


def run_fixture(output_dir, ini="pipeline.ini", *overrides):
    config = load_pipeline_config(FIXTURES / ini, [f"output.dir={output_dir}", *overrides])
    return run_pipeline(config)


@pytest.fixture(scope="module")
def fixture_run(tmp_path_factory):
    output_dir = tmp_path_factory.mktemp("run")
    manifest = run_fixture(output_dir)
    return output_dir, manifest


# ================================
# END-TO-END RUNS
# ================================

def test_run_matches_golden_outputs(fixture_run):
    print("🧪 Comparing run outputs with golden files...")
    output_dir, manifest = fixture_run

    for name in ("references", "prompts", "generations"):
        produced = (output_dir / OUTPUT_FILES[name]).read_bytes()
        expected = (GOLDEN / f"{name}.jsonl").read_bytes()
        assert produced == expected, f"{name} differs from golden output"

    assert manifest.status == "completed"
    assert manifest.counts["reports"] == 20
    assert manifest.counts["prompts"] == 20
    assert manifest.counts["generations"] == 20
    assert manifest.counts["scores"] == 18
    assert manifest.counts["detections"] == 20
    assert manifest.counts["detection_rows"] == len(read_jsonl(output_dir / OUTPUT_FILES["detections"]))
    assert manifest.rule_set_version == "default-1"
    assert manifest.skipped == {}
    print("✅ Golden outputs reproduced")


def test_manifest_file_describes_run(fixture_run):
    output_dir, manifest = fixture_run
    written = json.loads((output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))

    assert written["status"] == "completed"
    assert written["failure"] is None
    assert written["corpus_score"]["n"] == 18
    assert written["corpus_score"]["empty_references"] == 2
    assert written["prompt_options_version"] == manifest.prompt_options_version
    assert written["config"]["system_name"] == "template backend"
    assert written["finished_at"] is not None


def test_run_writes_every_stage(fixture_run):
    output_dir, _ = fixture_run
    splits = Counter(record["split"] for record in read_jsonl(output_dir / OUTPUT_FILES["corpus_split"]))
    assert splits == Counter({"train": 14, "validation": 2, "test": 4})

    decisions = read_jsonl(output_dir / OUTPUT_FILES["filter_decisions"])
    assert {"study_id": "s01", "index": 2, "sentence": "No pneumothorax is seen.", "kept": False,
            "matched_rule": "negation:\\bno\\b"} in decisions

    train_ids = {r["study_id"] for r in read_jsonl(output_dir / OUTPUT_FILES["corpus_split"]) if r["split"] == "train"}
    for pair in read_jsonl(output_dir / OUTPUT_FILES["training_pairs"]):
        assert pair["study_id"] in train_ids
        prompt, target = pair["text"].split("\n", 1)
        assert prompt.endswith(" TL;DR") and target

    summary = (output_dir / OUTPUT_FILES["summary"]).read_text(encoding="utf-8")
    assert summary.startswith("ROUGE-L (beta=1.0) over 18 studies, split=all")


def test_rerun_is_byte_identical(tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    run_fixture(first)
    run_fixture(second)
    for filename in OUTPUT_FILES.values():
        assert (first / filename).read_bytes() == (second / filename).read_bytes(), filename


def test_mock_detector_run(tmp_path):
    started = time.perf_counter()
    manifest = run_fixture(tmp_path / "a", "pipeline_mock.ini")
    elapsed = time.perf_counter() - started

    assert manifest.status == "completed"
    assert {k: manifest.counts[k] for k in ("reports", "prompts", "generations")} == {
        "reports": 20, "prompts": 20, "generations": 20,
    }
    assert manifest.corpus_score is not None
    assert elapsed < 5.0

    summary = (tmp_path / "a" / OUTPUT_FILES["summary"]).read_text(encoding="utf-8")
    assert "template backend (mock detections)" in summary
    assert summary.rstrip().splitlines()[-1].split() == ["OURS", "0.373", "*"]

    again = run_fixture(tmp_path / "b", "pipeline_mock.ini")
    for name in ("detections", "prompts", "generations", "scores"):
        assert (tmp_path / "a" / OUTPUT_FILES[name]).read_bytes() == (tmp_path / "b" / OUTPUT_FILES[name]).read_bytes()
    assert again.corpus_score == manifest.corpus_score


def test_evaluation_split_restricts_scored_studies(tmp_path):
    manifest = run_fixture(tmp_path, "pipeline.ini", "evaluation.split=test")
    test_ids = {r["study_id"] for r in read_jsonl(tmp_path / OUTPUT_FILES["corpus_split"]) if r["split"] == "test"}
    scored = {r["study_id"] for r in read_jsonl(tmp_path / OUTPUT_FILES["scores"])}
    assert scored <= test_ids
    assert manifest.corpus_score["n"] == len(scored)


def test_unfiltered_run_keeps_negated_sentences(tmp_path):
    manifest = run_fixture(tmp_path, "pipeline.ini", "filter.enabled=false")
    references = {r["study_id"]: r["findings"] for r in read_jsonl(tmp_path / OUTPUT_FILES["references"])}
    assert manifest.rule_set_version == "unfiltered"
    assert references["s01"] == "There is a small right pleural effusion. The heart size is normal. No pneumothorax is seen."


def test_template_beats_constant_baseline(fixture_run):
    output_dir, manifest = fixture_run
    references = read_jsonl(output_dir / OUTPUT_FILES["references"])
    constant = evaluate_corpus((r["study_id"], "The lungs are clear.", r["findings"]) for r in references)
    empty = evaluate_corpus((r["study_id"], "", r["findings"]) for r in references)

    template_f = manifest.corpus_score["mean_f"]
    print(f"📊 template={template_f:.4f} constant={constant.mean_f:.4f} empty={empty.mean_f:.4f}")
    assert template_f > constant.mean_f > empty.mean_f == 0.0


def test_both_detection_sources_is_rejected(tmp_path):
    with pytest.raises(ConfigError):
        run_fixture(tmp_path, "pipeline.ini", "detections.mock_seed=1")


def test_failed_run_leaves_failure_manifest(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(CORPUS.read_text(encoding="utf-8") + "{not json\n", encoding="utf-8")
    output_dir = tmp_path / "out"
    config = load_pipeline_config(
        None,
        [f"corpus.path={corpus}", "detections.mock_seed=1", f"output.dir={output_dir}", "output.strict=true"],
    )
    with pytest.raises(StageFailure) as excinfo:
        run_pipeline(config)
    assert excinfo.value.stage == "corpus"
    assert excinfo.value.exit_code == 1

    manifest = json.loads((output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["status"] == "failed"
    assert manifest["failure"]["error"] == "StageFailure"
    assert manifest["failure"]["stage"] == "corpus"


def test_stage_errors_name_their_stage(tmp_path):
    rules = tmp_path / "rules.txt"
    rules.write_text("(\n", encoding="utf-8")
    output_dir = tmp_path / "out"
    with pytest.raises(StageFailure) as excinfo:
        run_fixture(output_dir, "pipeline.ini", f"filter.rules={rules}")
    assert excinfo.value.stage == "filter"
    assert excinfo.value.exit_code == 1

    manifest = json.loads((output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["failure"]["stage"] == "filter"
    assert manifest["failure"]["cause"] == "InvalidRule"
    assert manifest["counts"]["reports"] == 20
    assert "references" not in manifest["counts"]


def test_bad_baselines_fail_the_evaluate_stage(tmp_path):
    baselines = tmp_path / "baselines.tsv"
    baselines.write_text("system\trouge_l\nST\t1.5\n", encoding="utf-8")
    output_dir = tmp_path / "out"
    with pytest.raises(StageFailure) as excinfo:
        run_fixture(output_dir, "pipeline.ini", f"evaluation.baselines={baselines}")
    assert excinfo.value.stage == "evaluate"
    assert excinfo.value.exit_code == 1

    manifest = json.loads((output_dir / MANIFEST_FILE).read_text(encoding="utf-8"))
    assert manifest["failure"]["cause"] == "MalformedRecord"
    assert manifest["counts"]["scores"] == 18


def test_lenient_run_skips_bad_records(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(
        CORPUS.read_text(encoding="utf-8") + "{not json\n" + '{"study_id": "s21", "report_text": "   "}\n',
        encoding="utf-8",
    )
    config = load_pipeline_config(
        None, [f"corpus.path={corpus}", "detections.mock_seed=1", f"output.dir={tmp_path / 'out'}"]
    )
    manifest = run_pipeline(config)
    assert manifest.status == "completed"
    assert manifest.skipped == {"corpus": 1, "parse": 1}
    assert manifest.counts["reports"] == 20


# ================================
# COMMAND LINE
# ================================

def test_cli_stages_compose_to_run_outputs(fixture_run, tmp_path, capsys):
    print("🧪 Piping stages through the CLI...")
    output_dir, _ = fixture_run
    reports = tmp_path / "reports.jsonl"
    references = tmp_path / "references.jsonl"
    decisions = tmp_path / "decisions.jsonl"
    prompts = tmp_path / "prompts.jsonl"
    generations = tmp_path / "generations.jsonl"
    scores = tmp_path / "scores.jsonl"

    assert main(["parse", "--input", str(CORPUS), "--output", str(reports)]) == 0
    assert main(["filter", "--input", str(reports), "--output", str(references), "--decisions", str(decisions)]) == 0
    assert main(["prompt", "--input", str(DETECTIONS), "--corpus", str(CORPUS), "--output", str(prompts)]) == 0
    assert main(["generate", "--input", str(prompts), "--output", str(generations)]) == 0
    capsys.readouterr()
    assert main(["evaluate", "--generations", str(generations), "--references", str(references),
                 "--scores", str(scores)]) == 0
    summary = capsys.readouterr().out

    for path, name in [(reports, "reports"), (references, "references"), (decisions, "filter_decisions"),
                       (prompts, "prompts"), (generations, "generations"), (scores, "scores")]:
        assert path.read_bytes() == (output_dir / OUTPUT_FILES[name]).read_bytes(), name

    assert summary == (output_dir / OUTPUT_FILES["summary"]).read_text(encoding="utf-8")
    assert "rule set: default-1" in summary
    assert f"prompt options: {PromptOptions().version}" in summary
    print("✅ Stage-by-stage outputs equal the one-shot run")


def test_cli_split_ratio(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text(
        "".join(json.dumps({"study_id": f"s{i:04d}", "report_text": "FINDINGS: Lungs clear."}) + "\n" for i in range(1000)),
        encoding="utf-8",
    )
    output = tmp_path / "split.jsonl"
    assert main(["split", "--input", str(corpus), "--output", str(output), "--seed", "7"]) == 0
    counts = Counter(record["split"] for record in read_jsonl(output))
    assert (counts["train"], counts["validation"], counts["test"]) == (700, 100, 200)


def test_cli_prompt_for_study_without_detections(tmp_path):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text('{"study_id": "only", "report_text": "FINDINGS: Lungs clear."}\n', encoding="utf-8")
    empty = tmp_path / "detections.jsonl"
    empty.write_text("", encoding="utf-8")
    output = tmp_path / "prompts.jsonl"
    assert main(["prompt", "--input", str(empty), "--corpus", str(corpus), "--output", str(output)]) == 0
    assert read_jsonl(output) == [
        {"study_id": "only", "prompt": "no abnormalities detected TL;DR", "prompt_options_version": PromptOptions().version}
    ]


def test_cli_evaluate_with_baselines(tmp_path, capsys):
    references = tmp_path / "references.jsonl"
    references.write_bytes((GOLDEN / "references.jsonl").read_bytes())
    generations = tmp_path / "generations.jsonl"
    generations.write_text(
        "".join(json.dumps({"study_id": r["study_id"], "text": "The lungs are clear."}) + "\n"
                for r in read_jsonl(references)),
        encoding="utf-8",
    )
    assert main(["evaluate", "--generations", str(generations), "--references", str(references),
                 "--baselines", "--system-name", "constant"]) == 0
    out = capsys.readouterr().out
    table = out.split("\n\n", 1)[1].splitlines()

    systems = [line.split()[0] for line in table[2:]]
    assert set(systems) == {"ST", "CMCL", "PPKED", "CMM+RL", "UAR", "OURS", "constant"}
    assert table[-1].split() == ["OURS", "0.373", "*"]


def test_cli_duplicate_generation_is_rejected(tmp_path, capsys):
    generations = tmp_path / "generations.jsonl"
    generations.write_text('{"study_id": "s1", "text": "a"}\n{"study_id": "s1", "text": "b"}\n', encoding="utf-8")
    references = tmp_path / "references.jsonl"
    references.write_text('{"study_id": "s1", "findings": "a"}\n', encoding="utf-8")
    assert main(["evaluate", "--generations", str(generations), "--references", str(references)]) == 1
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "DuplicateStudy"


def test_cli_evaluate_reports_recorded_versions(tmp_path, capsys):
    generations = tmp_path / "generations.jsonl"
    generations.write_text('{"study_id": "s1", "text": "a", "prompt_options_version": "p-x"}\n', encoding="utf-8")
    references = tmp_path / "references.jsonl"
    references.write_text(
        '{"study_id": "s1", "findings": "a", "rule_set_version": "default-1"}\n'
        '{"study_id": "s2", "findings": "b", "rule_set_version": "file:other"}\n',
        encoding="utf-8",
    )
    argv = ["evaluate", "--generations", str(generations), "--references", str(references)]

    assert main(argv) == 1
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "ConfigError"
    assert "file:other" in record["message"]

    assert main(argv + ["--rule-set-version", "default-1"]) == 0
    out = capsys.readouterr().out
    assert "rule set: default-1" in out
    assert "prompt options: p-x" in out


@pytest.mark.parametrize(
    "argv,exit_code,error",
    [
        (["evaluate", "--generations", "missing.jsonl", "--references", "missing.jsonl"], 2, "IoFailure"),
        (["run", "--config", str(FIXTURES / "pipeline.ini"), "--mock-seed", "3"], 1, "ConfigError"),
        (["prompt", "--input", str(DETECTIONS), "--decimals", "0"], 1, "ConfigError"),
        (["filter", "--input", str(CORPUS), "--rules", "missing-rules.txt"], 2, "IoFailure"),
    ],
)
def test_cli_errors_are_json_records(tmp_path, capsys, argv, exit_code, error):
    if argv[0] == "run":
        argv = argv + ["--output-dir", str(tmp_path)]
    assert main(argv) == exit_code
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == error
    assert record["exit_code"] == exit_code


def test_cli_strict_mode_stops_on_bad_record(tmp_path, capsys):
    corpus = tmp_path / "corpus.jsonl"
    corpus.write_text('{"study_id": "a", "report_text": "FINDINGS: Clear."}\n{"study_id": "b"}\n', encoding="utf-8")
    output = tmp_path / "reports.jsonl"

    assert main(["parse", "--input", str(corpus), "--output", str(output)]) == 0
    assert [r["study_id"] for r in read_jsonl(output)] == ["a"]

    assert main(["parse", "--strict", "--input", str(corpus), "--output", str(output)]) == 1
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "StageFailure"
    assert record["stage"] == "corpus"
    assert record["cause"] == "MalformedRecord"


def test_cli_unreachable_backend_exits_three(tmp_path, capsys):
    prompts = tmp_path / "prompts.jsonl"
    prompts.write_text('{"study_id": "s1", "prompt": "lesion: 0.87 TL;DR"}\n', encoding="utf-8")
    code = main(["generate", "--input", str(prompts), "--output", str(tmp_path / "out.jsonl"),
                 "--backend", "remote", "--endpoint", "http://127.0.0.1:1/api/v1/generate",
                 "--retries", "0", "--timeout", "2"])
    assert code == 3
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "BackendUnreachable"


# ================================
# THROUGHPUT
# ================================

@pytest.mark.skipif(os.environ.get("RADFINDINGS_THROUGHPUT") != "1", reason="set RADFINDINGS_THROUGHPUT=1 to run")
def test_parse_filter_prompt_throughput():
    texts = [record.report_text for record in read_corpus(CORPUS)]
    rules = default_rules()
    print("⏱️ Parsing, filtering and prompting 100,000 reports...")

    started = time.perf_counter()
    for i in range(100_000):
        study_id = f"t{i:06d}"
        report = parse_report(study_id, texts[i % len(texts)])
        filter_report(report, rules)
        build_prompt(mock_detect(study_id, 0))
    elapsed = time.perf_counter() - started

    print(f"✅ 100,000 reports in {elapsed:.1f}s")
    assert elapsed < 60.0
