"""
Deterministic train / validation / test assignment (70:10:20)
"""

import hashlib
import logging
from collections import Counter, OrderedDict
from typing import Dict, List, Literal, Sequence, Tuple

from models.report import Split, StudyRecord

logger = logging.getLogger(__name__)

SPLIT_ORDER: Tuple[Split, ...] = (Split.TRAIN, Split.VALIDATION, Split.TEST)


def split_sizes(n: int) -> Tuple[int, int, int]:
    """floor(0.7n), floor(0.1n) and the remainder, in exact integer arithmetic"""
    train = (7 * n) // 10
    validation = n // 10
    return train, validation, n - train - validation


def rank_key(seed: int, key: str) -> int:
    digest = hashlib.sha256(f"{seed}:{key}".encode("utf-8")).hexdigest()
    return int(digest, 16)


def _units(records: Sequence[StudyRecord], group: str) -> List[Tuple[str, List[StudyRecord]]]:
    units: Dict[str, List[StudyRecord]] = OrderedDict()
    for record in records:
        if group == "patient" and record.patient_id is not None:
            key = f"patient:{record.patient_id}"
        else:
            key = f"study:{record.study_id}"
        units.setdefault(key, []).append(record)
    return list(units.items())


def split_corpus(
    records: Sequence[StudyRecord],
    seed: int,
    group: Literal["study", "patient"] = "study",
) -> List[StudyRecord]:
    """
    Assign a split to every record that has none, returning records in input order.

    Unassigned units (studies, or patients with group="patient") are ranked by
    a seeded hash of their id and dealt into the splits in order train,
    validation, test until each reaches its share of the whole corpus.
    Records that already carry a split keep it, so growing a corpus never
    moves existing studies. A fresh study-level split is exact:
    floor(0.7N) / floor(0.1N) / remainder.
    """
    if not records:
        return []

    targets = split_sizes(len(records))
    assigned = Counter(r.split for r in records if r.split is not None)
    remaining = [max(target - assigned[split], 0) for split, target in zip(SPLIT_ORDER, targets)]

    pending = [r for r in records if r.split is None]
    units = sorted(_units(pending, group), key=lambda unit: (rank_key(seed, unit[0]), unit[0]))

    assignment: Dict[str, Split] = {}
    for _, members in units:
        index = next((i for i in (0, 1) if remaining[i] > 0), 2)
        for record in members:
            assignment[record.study_id] = SPLIT_ORDER[index]
        remaining[index] = max(remaining[index] - len(members), 0)

    result = [r if r.split is not None else r.model_copy(update={"split": assignment[r.study_id]}) for r in records]

    sizes = Counter(r.split for r in result)
    logger.info(
        f"🔀 Split {len(result)} records (seed={seed}, group={group}): "
        f"train={sizes[Split.TRAIN]}, validation={sizes[Split.VALIDATION]}, test={sizes[Split.TEST]}"
    )
    return result
