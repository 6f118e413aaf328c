"""
Corpus record files: one StudyRecord per line
"""

import logging
from typing import Callable, Iterable, List, Optional

from pydantic import ValidationError

from core.errors import MalformedRecord, PipelineError
from models.report import StudyRecord
from utils.jsonl import PathLike, iter_records, write_records

logger = logging.getLogger(__name__)

ErrorHandler = Callable[[PipelineError], None]


def _describe(error: ValidationError) -> str:
    first = error.errors()[0]
    field = ".".join(str(p) for p in first.get("loc", ())) or "record"
    return f"{field}: {first.get('msg', 'invalid')}"


def read_corpus(path: PathLike, on_error: Optional[ErrorHandler] = None) -> List[StudyRecord]:
    """
    Read study records in file order.

    Without on_error the first bad line raises MalformedRecord; with it, the
    error is handed to the callback and the line is skipped.
    """
    records: List[StudyRecord] = []
    seen = set()
    for line, raw in iter_records(path, on_error=on_error):
        try:
            try:
                record = StudyRecord(**raw)
            except ValidationError as e:
                raise MalformedRecord(line, _describe(e), path=str(path))
            except TypeError as e:
                raise MalformedRecord(line, str(e), path=str(path))
            if record.study_id in seen:
                raise MalformedRecord(line, f"duplicate study_id {record.study_id!r}", path=str(path))
        except MalformedRecord as e:
            if on_error is None:
                raise
            on_error(e)
            continue
        seen.add(record.study_id)
        records.append(record)

    logger.info(f"📄 Read {len(records)} study records from {path}")
    return records


def write_corpus(records: Iterable[StudyRecord], path: PathLike) -> int:
    """Write study records in the given order"""
    return write_records((r.to_record() for r in records), path)
