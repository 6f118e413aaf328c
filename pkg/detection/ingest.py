"""
Detector output ingestion
Rows {study_id, class_id, probability, bbox?} -> canonical DetectionSets
"""

import logging
from collections import OrderedDict
from typing import Callable, Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from core.errors import MalformedDetection, PipelineError, ProbabilityOutOfRange, UnknownClass
from models.detection import BACKGROUND_CLASS_ID, MAX_CLASS_ID, BoundingBox, Detection, DetectionSet
from utils.jsonl import PathLike, iter_records, write_records

logger = logging.getLogger(__name__)

ErrorHandler = Callable[[PipelineError], None]


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def parse_detection_row(row: Dict, line: int) -> Detection:
    """Validate one wire row, mapping each failure to its domain error"""
    study_id = row.get("study_id")
    if not isinstance(study_id, str) or not study_id.strip():
        raise MalformedDetection(line, "missing study_id")

    class_id = row.get("class_id")
    if class_id is None:
        raise MalformedDetection(line, "missing class_id")
    if isinstance(class_id, float) and class_id.is_integer():
        class_id = int(class_id)
    if not isinstance(class_id, int) or isinstance(class_id, bool) or not 0 <= class_id <= MAX_CLASS_ID:
        raise UnknownClass(class_id, line=line)
    if class_id == BACKGROUND_CLASS_ID:
        raise MalformedDetection(line, "Background (class 0) is never a detection")

    probability = row.get("probability")
    if not _is_number(probability):
        raise MalformedDetection(line, "probability must be a number")
    if not 0.0 <= probability <= 1.0:
        raise ProbabilityOutOfRange(probability, line)

    bbox = None
    if row.get("bbox") is not None:
        values = row["bbox"]
        if not isinstance(values, (list, tuple)) or len(values) != 4 or not all(_is_number(v) for v in values):
            raise MalformedDetection(line, "bbox must be [x, y, w, h]")
        try:
            bbox = BoundingBox.from_list(values)
        except ValidationError:
            raise MalformedDetection(line, "bbox coordinates must lie in [0, 1] with w, h > 0")

    return Detection(class_id=class_id, probability=float(probability), bbox=bbox)


def ingest_rows(rows: Iterable[tuple], on_error: Optional[ErrorHandler] = None) -> List[DetectionSet]:
    """Group (line, row) pairs by study, in order of first appearance"""
    grouped: Dict[str, List[Detection]] = OrderedDict()
    for line, row in rows:
        try:
            detection = parse_detection_row(row, line)
        except PipelineError as e:
            if on_error is None:
                raise
            on_error(e)
            continue
        grouped.setdefault(row["study_id"], []).append(detection)
    return [DetectionSet.collapse(study_id, detections) for study_id, detections in grouped.items()]


def ingest_detections(path: PathLike, on_error: Optional[ErrorHandler] = None) -> List[DetectionSet]:
    """Read a detection file into canonical sets (max-probability collapse, ascending class id)"""
    sets = ingest_rows(iter_records(path, on_error=on_error), on_error=on_error)
    logger.info(f"🩻 Ingested detections for {len(sets)} studies from {path}")
    return sets


def write_detections(sets: Iterable[DetectionSet], path: PathLike) -> int:
    return write_records((row for ds in sets for row in ds.to_rows()), path)


def complete_sets(sets: Sequence[DetectionSet], study_ids: Sequence[str]) -> List[DetectionSet]:
    """One set per study id, in study order; studies without rows get an empty set"""
    by_id = {ds.study_id: ds for ds in sets}
    return [by_id.get(study_id) or DetectionSet(study_id=study_id) for study_id in study_ids]
