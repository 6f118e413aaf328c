"""
Filtering package - regex-based removal of negation and device sentences from ground truth
"""

from .filter import UNFILTERED_VERSION, classify_sentence, filter_findings, filter_report, reference_record
from .rules import DEFAULT_VERSION, default_rules, load_rules, parse_rules

__all__ = [
    "UNFILTERED_VERSION",
    "classify_sentence",
    "filter_findings",
    "filter_report",
    "reference_record",
    "DEFAULT_VERSION",
    "default_rules",
    "load_rules",
    "parse_rules",
]
