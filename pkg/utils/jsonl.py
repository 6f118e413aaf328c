"""
Line-delimited JSON record I/O shared by all stages
UTF-8, one object per line, '\n' terminators; "-" means stdin/stdout
"""

import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, Iterator, Optional, Tuple, Union

from core.errors import IoFailure, MalformedRecord

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
STDIO = "-"


def dumps_record(record: Dict[str, Any]) -> str:
    """Canonical single-line encoding of a record (key order is preserved)"""
    return json.dumps(record, ensure_ascii=False)


def iter_lines(path: PathLike) -> Iterator[Tuple[int, str]]:
    """Yield (line_number, line) pairs, 1-based, without the trailing newline"""
    if str(path) == STDIO:
        for number, line in enumerate(sys.stdin, start=1):
            yield number, line.rstrip("\n")
        return
    try:
        with open(path, "r", encoding="utf-8", newline="\n") as f:
            for number, line in enumerate(f, start=1):
                yield number, line.rstrip("\n")
    except FileNotFoundError:
        raise IoFailure(path, "file does not exist")
    except OSError as e:
        raise IoFailure(path, str(e))


def iter_records(
    path: PathLike,
    on_error: Optional[Callable[[MalformedRecord], None]] = None,
) -> Iterator[Tuple[int, Dict[str, Any]]]:
    """
    Yield (line_number, record) for every non-blank line.

    Lines that are not JSON objects raise MalformedRecord, or are handed to
    on_error and skipped when a handler is given.
    """
    for number, line in iter_lines(path):
        if not line.strip():
            continue
        try:
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedRecord(number, f"invalid JSON ({e.msg})", path=str(path))
            if not isinstance(record, dict):
                raise MalformedRecord(number, "expected a JSON object", path=str(path))
        except MalformedRecord as error:
            if on_error is None:
                raise
            on_error(error)
            continue
        yield number, record


def write_records(records: Iterable[Dict[str, Any]], path: PathLike) -> int:
    """
    Write records to path, returning the count.

    Files are written to a temporary sibling and renamed into place, so a
    reader never observes a half-written file.
    """
    if str(path) == STDIO:
        count = 0
        for record in records:
            sys.stdout.write(dumps_record(record) + "\n")
            count += 1
        sys.stdout.flush()
        return count

    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
    except OSError as e:
        raise IoFailure(path, str(e))

    count = 0
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            for record in records:
                f.write(dumps_record(record) + "\n")
                count += 1
        os.replace(tmp_name, target)
    except OSError as e:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise IoFailure(path, str(e))
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise

    logger.debug(f"Wrote {count} records to {target}")
    return count


def write_text(text: str, path: PathLike) -> None:
    """Write a text artifact (tables, manifests) with the same atomic rename"""
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", dir=str(target.parent))
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        os.replace(tmp_name, target)
    except OSError as e:
        raise IoFailure(path, str(e))
