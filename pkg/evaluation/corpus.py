"""
Corpus-level ROUGE-L aggregation
"""

import logging
import math
from typing import Dict, Iterable, List, Tuple

from core.errors import DuplicateStudy
from evaluation.rouge import rouge_l, tokenize_for_rouge
from models.scoring import CorpusScore, RougeScore

logger = logging.getLogger(__name__)


def _mean(values: List[float]) -> float:
    return math.fsum(values) / len(values) if values else 0.0


def evaluate_corpus(
    pairs: Iterable[Tuple[str, str, str]],
    beta: float = 1.0,
    rule_set_version: str = "",
    prompt_options_version: str = "",
) -> CorpusScore:
    """
    Score (study_id, hypothesis, reference) triples.

    Studies whose reference has no tokens are listed in empty_references and
    left out of the means. Per-study scores are keyed in study_id order, so
    the result does not depend on the order of the input pairs.
    """
    seen = set()
    scored: Dict[str, RougeScore] = {}
    empty: List[str] = []
    for study_id, hyp, ref in pairs:
        if study_id in seen:
            raise DuplicateStudy(study_id)
        seen.add(study_id)
        if not tokenize_for_rouge(ref):
            empty.append(study_id)
            continue
        scored[study_id] = rouge_l(hyp, ref, beta)

    per_study = {study_id: scored[study_id] for study_id in sorted(scored)}
    if empty:
        logger.warning(f"⚠️ {len(empty)} studies have an empty reference and are excluded from the mean")

    score = CorpusScore(
        mean_f=_mean([s.f for s in per_study.values()]),
        mean_precision=_mean([s.precision for s in per_study.values()]),
        mean_recall=_mean([s.recall for s in per_study.values()]),
        per_study=per_study,
        n=len(per_study),
        empty_references=sorted(empty),
        beta=beta,
        rule_set_version=rule_set_version,
        prompt_options_version=prompt_options_version,
    )
    logger.info(f"📊 ROUGE-L over {score.n} studies: mean F={score.mean_f:.4f}")
    return score


def score_records(score: CorpusScore) -> List[Dict]:
    """Per-study score records in study_id order"""
    return [{"study_id": study_id, **s.model_dump()} for study_id, s in score.per_study.items()]


def render_summary(score: CorpusScore, split: str = "all") -> str:
    lines = [
        f"ROUGE-L (beta={score.beta}) over {score.n} studies, split={split}",
        f"mean F: {score.mean_f:.4f}  mean P: {score.mean_precision:.4f}  mean R: {score.mean_recall:.4f}",
        f"empty references: {len(score.empty_references)}",
        f"rule set: {score.rule_set_version or '-'}",
        f"prompt options: {score.prompt_options_version or '-'}",
    ]
    return "\n".join(lines) + "\n"
