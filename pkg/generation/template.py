"""
Template generator: a GPU-free baseline that turns prompt entries into hedged sentences
"""

from typing import Iterable, Sequence, Tuple

NORMAL_FINDINGS = "The lungs are clear."

# (lower bound, phrasing), checked top-down
HEDGE_BANDS: Sequence[Tuple[float, str]] = (
    (0.75, "There is a {label}."),
    (0.5, "There is likely a {label}."),
    (0.0, "There may be a {label}."),
)


def hedge(label: str, probability: float) -> str:
    for lower, phrasing in HEDGE_BANDS:
        if probability >= lower:
            return phrasing.format(label=label)
    return HEDGE_BANDS[-1][1].format(label=label)


def template_generate(entries: Iterable[Tuple]) -> str:
    """One sentence per (label, probability, ...) entry in prompt order; zero-probability entries are not described"""
    sentences = [hedge(entry[0], entry[1]) for entry in entries if entry[1] > 0]
    return " ".join(sentences) if sentences else NORMAL_FINDINGS
