"""
Radiology report section parser
Splits free text into Indication / Technique / Comparison / Findings / Impression / Other
"""

import logging
import re
from typing import Dict, Iterable, List, Optional, Tuple

from core.errors import EmptyReport
from corpus.sentences import segment_sentences
from models.report import RadiologyReport, SectionName

logger = logging.getLogger(__name__)

HEADER_KEYWORDS: Dict[str, SectionName] = {
    "INDICATION": SectionName.INDICATION,
    "HISTORY": SectionName.INDICATION,
    "TECHNIQUE": SectionName.TECHNIQUE,
    "COMPARISON": SectionName.COMPARISON,
    "FINDINGS": SectionName.FINDINGS,
    "IMPRESSION": SectionName.IMPRESSION,
}

RENDER_HEADERS: Dict[SectionName, str] = {
    SectionName.INDICATION: "INDICATION",
    SectionName.TECHNIQUE: "TECHNIQUE",
    SectionName.COMPARISON: "COMPARISON",
    SectionName.FINDINGS: "FINDINGS",
    SectionName.IMPRESSION: "IMPRESSION",
}

# A keyword followed by ':' at line start, or after sentence-final punctuation on the same line
HEADER_RE = re.compile(
    r"(?:^[ \t]*|(?<=[.!?])[ \t]+)(?P<keyword>" + "|".join(HEADER_KEYWORDS) + r")[ \t]*:",
    re.IGNORECASE | re.MULTILINE,
)


def find_headers(raw: str) -> List[Tuple[SectionName, int, int]]:
    """
    Locate section headers as (section, header_start, content_start).

    Only the first header of each section name opens a section; a repeated
    header stays part of the running section.
    """
    headers = []
    seen = set()
    for match in HEADER_RE.finditer(raw):
        name = HEADER_KEYWORDS[match.group("keyword").upper()]
        if name in seen:
            logger.debug(f"Ignoring repeated {name.value} header at offset {match.start('keyword')}")
            continue
        seen.add(name)
        headers.append((name, match.start("keyword"), match.end()))
    return headers


def parse_report(study_id: str, raw: str, abbreviations: Optional[Iterable[str]] = None) -> RadiologyReport:
    """Parse raw report text into sections and per-section sentence lists"""
    if not raw or not raw.strip():
        raise EmptyReport(study_id)

    headers = find_headers(raw)
    sections: Dict[SectionName, str] = {}

    preamble = raw[: headers[0][1] if headers else len(raw)].strip()
    if preamble:
        sections[SectionName.OTHER] = preamble

    for index, (name, _, content_start) in enumerate(headers):
        end = headers[index + 1][1] if index + 1 < len(headers) else len(raw)
        text = raw[content_start:end].strip()
        if text:
            sections[name] = text

    sentence_lists = {name: segment_sentences(text, abbreviations) for name, text in sections.items()}
    return RadiologyReport(study_id=study_id, sections=sections, sentence_lists=sentence_lists)


def render_report(report: RadiologyReport) -> str:
    """Serialize sections back to header-delimited text, preserving section order"""
    parts = []
    for name, text in report.sections.items():
        if name == SectionName.OTHER:
            parts.append(text)
        else:
            parts.append(f"{RENDER_HEADERS[name]}:\n{text}")
    return "\n\n".join(parts) + "\n"


def report_from_record(record: Dict) -> RadiologyReport:
    """Rebuild a RadiologyReport from its parsed-report wire record"""
    return RadiologyReport(
        study_id=record["study_id"],
        sections={SectionName(k): v for k, v in record.get("sections", {}).items()},
        sentence_lists={SectionName(k): v for k, v in record.get("sentence_lists", {}).items()},
    )
