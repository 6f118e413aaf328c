"""
Evaluation package - ROUGE-L scoring, corpus aggregation and comparison tables
"""

from .comparison import BUNDLED_BASELINES, load_baselines, render_comparison
from .corpus import evaluate_corpus, render_summary, score_records
from .rouge import f_measure, lcs_length, rouge_l, tokenize_for_rouge

__all__ = [
    "BUNDLED_BASELINES",
    "load_baselines",
    "render_comparison",
    "evaluate_corpus",
    "render_summary",
    "score_records",
    "f_measure",
    "lcs_length",
    "rouge_l",
    "tokenize_for_rouge",
]
