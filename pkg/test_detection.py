"""
Detection tests
Taxonomy lookups, detector-output ingestion and the deterministic mock detector
"""

import json
from pathlib import Path

import pytest
from pydantic import ValidationError

from core.errors import MalformedDetection, MalformedRecord, ProbabilityOutOfRange, UnknownClass
from detection import (
    TAXONOMY,
    class_for_label,
    class_of,
    complete_sets,
    ingest_detections,
    label_of,
    mock_detect,
    mock_detect_all,
    write_detections,
)
from models.detection import BoundingBox, Detection, DetectionSet

FIXTURES = Path(__file__).parent / "fixtures"


def write_rows(path, rows):
    path.write_text("".join(json.dumps(row) + "\n" for row in rows), encoding="utf-8")
    return path


# ================================
# TAXONOMY
# ================================

def test_taxonomy_has_twenty_classes():
    assert len(TAXONOMY) == 20
    assert class_of(0).display_name == "Background"
    assert class_of(3).display_name == "Device"


def test_class_lookup():
    assert class_of(1).display_name == "Lesion"
    assert class_of(7).display_name == "Pneumothorax (PTX)"
    assert label_of(class_of(7)) == "pneumothorax"
    assert label_of(class_of(5)) == "pleural effusion"


@pytest.mark.parametrize("class_id", [20, -1, True, "5"])
def test_unknown_class(class_id):
    with pytest.raises(UnknownClass):
        class_of(class_id)


def test_label_lookup_round_trips():
    for cls in TAXONOMY:
        assert class_for_label(label_of(cls)) == cls
        assert class_for_label(cls.display_name.upper()) == cls
    with pytest.raises(UnknownClass):
        class_for_label("pneumonia")


# ================================
# INGESTION
# ================================

def test_fixture_ingestion_is_canonical():
    sets = {ds.study_id: ds for ds in ingest_detections(FIXTURES / "synthetic_detections.jsonl")}

    assert [d.class_id for d in sets["s04"].detections] == [1, 4]
    s17 = sets["s17"]
    assert [d.class_id for d in s17.detections] == [3, 4, 5]
    assert s17.detections[2].probability == 0.95
    assert sets["s01"].detections[1].bbox == BoundingBox(x=0.55, y=0.6, w=0.3, h=0.25)
    assert "s02" not in sets


def test_duplicate_class_keeps_max_probability(tmp_path):
    path = write_rows(tmp_path / "d.jsonl", [
        {"study_id": "a", "class_id": 5, "probability": 0.4},
        {"study_id": "a", "class_id": 5, "probability": 0.6},
    ])
    (ds,) = ingest_detections(path)
    assert ds.detections == (Detection(class_id=5, probability=0.6),)


def test_detections_sorted_by_class(tmp_path):
    path = write_rows(tmp_path / "d.jsonl", [
        {"study_id": "a", "class_id": 9, "probability": 0.5},
        {"study_id": "a", "class_id": 2, "probability": 0.5},
    ])
    (ds,) = ingest_detections(path)
    assert [d.class_id for d in ds.detections] == [2, 9]


@pytest.mark.parametrize(
    "row,error,line",
    [
        ({"study_id": "a", "class_id": 5, "probability": 1.3}, ProbabilityOutOfRange, 2),
        ({"study_id": "a", "class_id": 5, "probability": -0.1}, ProbabilityOutOfRange, 2),
        ({"study_id": "a", "class_id": 0, "probability": 0.5}, MalformedDetection, 2),
        ({"study_id": "a", "class_id": 20, "probability": 0.5}, UnknownClass, 2),
        ({"class_id": 5, "probability": 0.5}, MalformedDetection, 2),
        ({"study_id": "a", "class_id": 5, "probability": "high"}, MalformedDetection, 2),
        ({"study_id": "a", "class_id": 5, "probability": 0.5, "bbox": [0.1, 0.2]}, MalformedDetection, 2),
        ({"study_id": "a", "class_id": 5, "probability": 0.5, "bbox": [0.1, 0.2, 0.0, 0.3]}, MalformedDetection, 2),
    ],
)
def test_invalid_rows_name_their_line(tmp_path, row, error, line):
    path = write_rows(tmp_path / "d.jsonl", [{"study_id": "a", "class_id": 1, "probability": 0.5}, row])
    with pytest.raises(error) as excinfo:
        ingest_detections(path)
    assert excinfo.value.line == line


def test_invalid_rows_skipped_with_handler(tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text(
        '{"study_id": "a", "class_id": 1, "probability": 0.5}\n'
        "{broken\n"
        '{"study_id": "a", "class_id": 2, "probability": 1.5}\n'
        '{"study_id": "b", "class_id": 2, "probability": 0.25}\n',
        encoding="utf-8",
    )
    errors = []
    sets = ingest_detections(path, on_error=errors.append)
    assert [ds.study_id for ds in sets] == ["a", "b"]
    assert [type(e) for e in errors] == [MalformedRecord, ProbabilityOutOfRange]


def test_write_then_ingest_is_idempotent(tmp_path):
    sets = ingest_detections(FIXTURES / "synthetic_detections.jsonl")
    first = tmp_path / "first.jsonl"
    second = tmp_path / "second.jsonl"
    write_detections(sets, first)
    write_detections(ingest_detections(first), second)
    assert first.read_bytes() == second.read_bytes()
    assert ingest_detections(second) == sets


def test_complete_sets_fills_missing_studies():
    sets = [DetectionSet(study_id="b", detections=(Detection(class_id=2, probability=0.3),))]
    completed = complete_sets(sets, ["a", "b", "c"])
    assert [ds.study_id for ds in completed] == ["a", "b", "c"]
    assert completed[0].detections == () and completed[2].detections == ()
    assert completed[1] == sets[0]


def test_detection_set_rejects_unsorted_detections():
    with pytest.raises(ValidationError):
        DetectionSet(
            study_id="a",
            detections=(Detection(class_id=4, probability=0.1), Detection(class_id=2, probability=0.1)),
        )


# ================================
# MOCK DETECTOR
# ================================

def test_mock_detector_is_deterministic():
    assert mock_detect("s01", 7) == mock_detect("s01", 7)
    ids = [f"s{i:03d}" for i in range(200)]
    assert mock_detect_all(ids, 7) == mock_detect_all(ids, 7)
    assert mock_detect_all(ids, 7) != mock_detect_all(ids, 8)


def test_mock_detector_output_is_valid():
    print("🧪 Checking mock detections for 500 studies...")
    sizes = set()
    for ds in mock_detect_all([f"s{i:03d}" for i in range(500)], 3):
        ids = [d.class_id for d in ds.detections]
        assert ids == sorted(set(ids))
        assert all(1 <= i <= 19 for i in ids)
        for d in ds.detections:
            assert 0.0 <= d.probability <= 1.0
            assert d.bbox is not None
            assert d.bbox.x + d.bbox.w <= 1.0 + 1e-9
            assert d.bbox.y + d.bbox.h <= 1.0 + 1e-9
        sizes.add(len(ids))
    assert sizes == {0, 1, 2, 3, 4}
    print("✅ Mock detections are canonical")
