"""
Filter rule sets: the pinned built-in defaults and rules files

Rules file format: one regex per line, '#' starts a comment line.
Optional "[negation]" / "[device]" marker lines choose the list that
following patterns go to; patterns before any marker are negation patterns.
File rules replace the defaults entirely.
"""

import hashlib
import logging
import re
from pathlib import Path
from typing import List, Optional, Union

from core.errors import InvalidRule, IoFailure
from models.filtering import FilterRuleSet, compile_pattern
from models.pipeline import BUILTIN_RULES

logger = logging.getLogger(__name__)

DEFAULT_VERSION = "default-1"

DEFAULT_NEGATION_PATTERNS = [
    r"\bno\b",
    r"\bwithout\b",
    r"\bfree of\b",
    r"\bnegative for\b",
    r"\bunremarkable\b",
    r"\bwithin normal limits\b",
    r"\bclear of\b",
    r"\bis normal\b",
    r"\bare normal\b",
    r"\bnot? (seen|identified|visualized|present)\b",
]

DEFAULT_DEVICE_PATTERNS = [
    r"\btube\b",
    r"\bcatheter\b",
    r"\bline\b",
    r"\bpacemaker\b",
    r"\bwire\b",
    r"\bclip\b",
    r"\bdevice\b",
    r"\bport\b",
    r"\bvalve\b",
    r"\bsternotomy\b",
    r"\bpicc\b",
    r"\bdrain\b",
    r"\blead\b",
]

_MARKERS = {"[negation]": "negation", "[device]": "device"}


def default_rules() -> FilterRuleSet:
    return FilterRuleSet(
        negation_patterns=list(DEFAULT_NEGATION_PATTERNS),
        device_patterns=list(DEFAULT_DEVICE_PATTERNS),
        version=DEFAULT_VERSION,
    )


def parse_rules(text: str, name: str = "rules") -> FilterRuleSet:
    """Build a rule set from rules-file text; the version hashes the content"""
    lists = {"negation": [], "device": []}
    target = "negation"
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower() in _MARKERS:
            target = _MARKERS[line.lower()]
            continue
        try:
            compile_pattern(line)
        except re.error as e:
            raise InvalidRule(line, line=number, detail=str(e))
        lists[target].append(line)

    if not lists["negation"] and not lists["device"]:
        raise InvalidRule("", detail=f"{name} contains no patterns")

    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]
    return FilterRuleSet(
        negation_patterns=lists["negation"],
        device_patterns=lists["device"],
        version=f"file:{name}:{digest}",
    )


def load_rules(source: Optional[Union[str, Path]] = None) -> FilterRuleSet:
    """Built-in defaults when source is None or "builtin", otherwise the rules file at source"""
    if source is None or str(source) == BUILTIN_RULES:
        return default_rules()

    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise IoFailure(path, "rules file does not exist")
    except OSError as e:
        raise IoFailure(path, str(e))

    rules = parse_rules(text, name=path.name)
    logger.info(f"📏 Loaded {rules.size} filter patterns from {path} ({rules.version})")
    return rules
