"""
ROUGE-L over whole texts

Sequence-level LCS (not the summary-level union variant), no stemming,
no stopword removal. beta weights recall against precision; 1.0 by default.
"""

import string
from typing import List, Sequence

from models.scoring import RougeScore

_EDGE_PUNCTUATION = string.punctuation


def tokenize_for_rouge(text: str) -> List[str]:
    """Lowercase, split on whitespace, strip edge punctuation, drop empties"""
    tokens = (token.strip(_EDGE_PUNCTUATION) for token in text.lower().split())
    return [token for token in tokens if token]


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length; one DP row over the shorter sequence"""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return 0

    previous = [0] * (len(b) + 1)
    for x in a:
        current = [0] * (len(b) + 1)
        for j, y in enumerate(b, start=1):
            if x == y:
                current[j] = previous[j - 1] + 1
            else:
                current[j] = max(previous[j], current[j - 1])
        previous = current
    return previous[-1]


def f_measure(precision: float, recall: float, beta: float = 1.0) -> float:
    if precision == 0.0 and recall == 0.0:
        return 0.0
    beta_sq = beta ** 2
    f = (1 + beta_sq) * precision * recall / (recall + beta_sq * precision)
    # floating point can overshoot 1 by an ulp
    return min(f, 1.0)


def rouge_l(hyp: str, ref: str, beta: float = 1.0) -> RougeScore:
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")

    hyp_tokens = tokenize_for_rouge(hyp)
    ref_tokens = tokenize_for_rouge(ref)
    lcs = lcs_length(hyp_tokens, ref_tokens)

    precision = lcs / len(hyp_tokens) if hyp_tokens else 0.0
    recall = lcs / len(ref_tokens) if ref_tokens else 0.0
    return RougeScore(
        precision=precision,
        recall=recall,
        f=f_measure(precision, recall, beta),
        lcs_len=lcs,
        hyp_len=len(hyp_tokens),
        ref_len=len(ref_tokens),
    )
