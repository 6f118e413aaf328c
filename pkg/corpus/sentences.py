"""
Sentence segmentation for report sections
"""

import re
from typing import Iterable, List, Optional

from config import settings

# '.', '!' or '?' followed by whitespace and an uppercase letter, or by end of text
_BOUNDARY = re.compile(r"[.!?](?=\s+[A-Z]|\s*$)")
_WHITESPACE = re.compile(r"\s+")
_OPENERS = "([{\"'"


def _word_before(text: str, index: int) -> str:
    start = index
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:index].lstrip(_OPENERS)


def _suppressed(text: str, dot_index: int, abbreviations: set) -> bool:
    word = _word_before(text, dot_index).lower()
    if word not in abbreviations:
        return False
    if word == "no":
        # "No." only abbreviates "number" when a digit follows
        return bool(re.match(r"\s+\d", text[dot_index + 1:]))
    return True


def segment_sentences(section_text: str, abbreviations: Optional[Iterable[str]] = None) -> List[str]:
    """
    Split section text into trimmed, non-empty sentences.

    A period directly after a listed abbreviation ("Dr.", "e.g.", "cm.") never
    ends a sentence. Whitespace runs inside a sentence collapse to one space.
    """
    if abbreviations is None:
        abbreviations = settings.SENTENCE_ABBREVIATIONS
    abbrev = {a.lower().rstrip(".") for a in abbreviations}

    text = section_text.strip()
    sentences: List[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        if match.group() == "." and _suppressed(text, match.start(), abbrev):
            continue
        sentence = _WHITESPACE.sub(" ", text[start:match.end()]).strip()
        if sentence:
            sentences.append(sentence)
        start = match.end()

    tail = _WHITESPACE.sub(" ", text[start:]).strip()
    if tail:
        sentences.append(tail)
    return sentences
