"""
Corpus package - report ingestion, section parsing, sentence segmentation and splits
"""

from .io import read_corpus, write_corpus
from .parser import parse_report, render_report, report_from_record
from .sentences import segment_sentences
from .split import split_corpus, split_sizes

__all__ = [
    "read_corpus",
    "write_corpus",
    "parse_report",
    "render_report",
    "report_from_record",
    "segment_sentences",
    "split_corpus",
    "split_sizes",
]
