"""
Prompt construction

A DetectionSet becomes "<label>: <probability>, ... TL;DR": entries in
ascending class id, probabilities with fixed decimals (round-half-even),
Background and Device never listed, entries at or below the threshold dropped.
With include_undetected every other class is listed too, at probability zero.
"""

import re
from decimal import ROUND_HALF_EVEN, Decimal
from typing import List, NamedTuple, Optional, Tuple

from core.errors import EmptyTarget, PromptParseError, UnknownClass
from detection.taxonomy import TAXONOMY, class_for_label, class_of
from models.detection import BACKGROUND_CLASS_ID, DEVICE_CLASS_ID, BoundingBox, DetectionSet
from models.prompt import NO_ABNORMALITIES, Prompt, PromptOptions

BBOX_DECIMALS = 2

_ENTRY_RE = re.compile(
    r"(?P<label>[a-z][a-z ]*?): (?P<probability>\d+\.\d+)(?: at \[(?P<bbox>[^\]]*)\])?"
)


class PromptEntry(NamedTuple):
    label: str
    probability: float
    bbox: Optional[BoundingBox] = None


def format_fixed(value: float, decimals: int) -> str:
    quantum = Decimal(1).scaleb(-decimals)
    return format(Decimal(repr(float(value))).quantize(quantum, rounding=ROUND_HALF_EVEN), "f")


def build_prompt(ds: DetectionSet, opts: Optional[PromptOptions] = None) -> Prompt:
    opts = opts or PromptOptions()
    detected = {
        d.class_id: d
        for d in ds.detections
        if d.class_id not in (BACKGROUND_CLASS_ID, DEVICE_CLASS_ID) and d.probability > opts.threshold
    }
    if opts.include_undetected:
        class_ids = [c.class_id for c in TAXONOMY if c.class_id not in (BACKGROUND_CLASS_ID, DEVICE_CLASS_ID)]
    else:
        class_ids = sorted(detected)

    entries = []
    for class_id in class_ids:
        detection = detected.get(class_id)
        probability = detection.probability if detection is not None else 0.0
        entry = f"{class_of(class_id).label}: {format_fixed(probability, opts.probability_decimals)}"
        if opts.include_bbox and detection is not None and detection.bbox is not None:
            coords = ", ".join(format_fixed(v, BBOX_DECIMALS) for v in detection.bbox.as_list())
            entry += f" at [{coords}]"
        entries.append(entry)

    body = ", ".join(entries) if entries else NO_ABNORMALITIES
    return Prompt(study_id=ds.study_id, text=f"{body} {opts.terminator}", options=opts)


def parse_prompt(text: str, terminator: str = "TL;DR") -> List[PromptEntry]:
    """Recover the entries of a build_prompt output; anything else raises PromptParseError"""
    suffix = f" {terminator}"
    if not text.endswith(suffix):
        raise PromptParseError(text, f"missing terminator {terminator!r}")
    body = text[: -len(suffix)]
    if body == NO_ABNORMALITIES:
        return []

    entries: List[PromptEntry] = []
    position = 0
    while True:
        match = _ENTRY_RE.match(body, position)
        if match is None:
            raise PromptParseError(text, f"unexpected text at offset {position}")
        try:
            label = class_for_label(match.group("label")).label
        except UnknownClass:
            raise PromptParseError(text, f"unknown label {match.group('label')!r}")
        bbox = None
        if match.group("bbox") is not None:
            try:
                bbox = BoundingBox.from_list(float(v) for v in match.group("bbox").split(","))
            except ValueError:
                raise PromptParseError(text, "malformed bounding box")
        entries.append(PromptEntry(label, float(match.group("probability")), bbox))

        position = match.end()
        if position == len(body):
            return entries
        if not body.startswith(", ", position):
            raise PromptParseError(text, f"expected ', ' at offset {position}")
        position += 2


def render_training_pair(prompt: Prompt, filtered_findings: str) -> str:
    """Input sequence for fine-tuning: prompt, one newline, target Findings"""
    if not filtered_findings or not filtered_findings.strip():
        raise EmptyTarget(prompt.study_id)
    return f"{prompt.text}\n{filtered_findings}"


def split_training_pair(text: str) -> Tuple[str, str]:
    prompt, _, target = text.partition("\n")
    return prompt, target
