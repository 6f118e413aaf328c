"""
ROUGE-L comparison tables
Baseline rows come from a tab-separated file with columns system, rouge_l
"""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd
from pydantic import ValidationError

from core.errors import IoFailure, MalformedRecord
from models.scoring import ComparisonRow

logger = logging.getLogger(__name__)

BUNDLED_BASELINES = Path(__file__).parent / "data" / "literature_baselines.tsv"
BEST_MARKER = "*"


def load_baselines(path: Optional[Union[str, Path]] = None) -> List[ComparisonRow]:
    """Literature rows in file order; defaults to the bundled file"""
    path = Path(path) if path is not None else BUNDLED_BASELINES
    if not path.exists():
        raise IoFailure(path, "file does not exist")

    try:
        frame = pd.read_csv(path, sep="\t", dtype={"system": str})
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise MalformedRecord(1, f"unreadable baselines table ({e})", path=str(path))
    missing = {"system", "rouge_l"} - set(frame.columns)
    if missing:
        raise MalformedRecord(1, f"missing columns {sorted(missing)}", path=str(path))

    rows = []
    # header is line 1
    for line, record in enumerate(frame[["system", "rouge_l"]].to_dict("records"), start=2):
        try:
            rows.append(ComparisonRow(system=record["system"], rouge_l=record["rouge_l"]))
        except ValidationError as e:
            raise MalformedRecord(line, e.errors()[0].get("msg", "invalid row"), path=str(path))

    logger.info(f"📚 Loaded {len(rows)} baseline rows from {path}")
    return rows


def render_comparison(rows: Sequence[ComparisonRow], decimals: int = 3) -> str:
    """
    Fixed-width table, ascending by score with ties broken by system name.
    Every row holding the top score is marked with '*'.
    """
    if not rows:
        raise ValueError("render_comparison needs at least one row")

    ordered = sorted(rows, key=lambda r: (r.rouge_l, r.system))
    best = max(r.rouge_l for r in ordered)
    name_width = max(len("System"), *(len(r.system) for r in ordered))
    score_width = max(len("ROUGE-L"), decimals + 2)

    lines = [f"{'System':<{name_width}}  {'ROUGE-L':>{score_width}}"]
    lines.append(f"{'-' * name_width}  {'-' * score_width}")
    for row in ordered:
        marker = f" {BEST_MARKER}" if row.rouge_l == best else ""
        lines.append(f"{row.system:<{name_width}}  {row.rouge_l:>{score_width}.{decimals}f}{marker}")
    return "\n".join(lines) + "\n"
