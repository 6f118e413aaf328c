"""
Deterministic stand-in for the image abnormality detector

Detections are a pure function of (study_id, seed): a SHA-256 digest of both
seeds a numpy Generator, which draws 0-4 distinct non-Background classes with
probabilities and boxes.
"""

import hashlib
from typing import Iterable, List

import numpy as np

from models.detection import MAX_CLASS_ID, BoundingBox, Detection, DetectionSet

MAX_MOCK_DETECTIONS = 4


def _generator(study_id: str, seed: int) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{study_id}".encode("utf-8")).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "big"))


def _box(rng: np.random.Generator) -> BoundingBox:
    x, y = (round(float(v), 4) for v in rng.uniform(0.0, 0.8, size=2))
    w = round(float(rng.uniform(0.05, 1.0 - x)), 4)
    h = round(float(rng.uniform(0.05, 1.0 - y)), 4)
    return BoundingBox(x=x, y=y, w=min(w, 1.0 - x), h=min(h, 1.0 - y))


def mock_detect(study_id: str, seed: int) -> DetectionSet:
    rng = _generator(study_id, seed)
    count = int(rng.integers(0, MAX_MOCK_DETECTIONS + 1))
    class_ids = rng.choice(np.arange(1, MAX_CLASS_ID + 1), size=count, replace=False)
    detections: List[Detection] = []
    for class_id in sorted(int(c) for c in class_ids):
        probability = round(float(rng.random()), 4)
        detections.append(Detection(class_id=class_id, probability=probability, bbox=_box(rng)))
    return DetectionSet(study_id=study_id, detections=tuple(detections))


def mock_detect_all(study_ids: Iterable[str], seed: int) -> List[DetectionSet]:
    return [mock_detect(study_id, seed) for study_id in study_ids]
