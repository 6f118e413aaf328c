"""
Detection package - abnormality taxonomy, detector-output ingestion and the mock detector
"""

from .ingest import complete_sets, ingest_detections, ingest_rows, write_detections
from .mock import mock_detect, mock_detect_all
from .taxonomy import TAXONOMY, class_for_label, class_of, label_of

__all__ = [
    "complete_sets",
    "ingest_detections",
    "ingest_rows",
    "write_detections",
    "mock_detect",
    "mock_detect_all",
    "TAXONOMY",
    "class_for_label",
    "class_of",
    "label_of",
]
