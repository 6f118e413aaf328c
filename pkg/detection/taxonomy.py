"""
Chest X-ray abnormality taxonomy (20 classes, Background = 0, Device = 3)
"""

from typing import Dict, List

from core.errors import UnknownClass
from models.detection import MAX_CLASS_ID, AbnormalityClass

DISPLAY_NAMES: List[str] = [
    "Background",
    "Lesion",
    "Consolidation",
    "Device",
    "Atelectasis",
    "Pleural Effusion",
    "Fibrosis",
    "Pneumothorax (PTX)",
    "Calcification",
    "Fracture",
    "Hilar Enlargement",
    "Scoliosis",
    "Eventration",
    "Pneumoperitoneum",
    "Hernia",
    "Emphysema",
    "Aortic Dilatation",
    "Thickening",
    "Tracheal Deviation",
    "Subcutaneous Emphysema",
]

# Prompt labels are the lowercased names; a few are shortened for stable tokenization
_LABEL_OVERRIDES = {7: "pneumothorax"}

TAXONOMY: List[AbnormalityClass] = [
    AbnormalityClass(class_id=i, label=_LABEL_OVERRIDES.get(i, name.lower()), display_name=name)
    for i, name in enumerate(DISPLAY_NAMES)
]

_BY_LABEL: Dict[str, AbnormalityClass] = {}
for _cls in TAXONOMY:
    _BY_LABEL[_cls.label] = _cls
    _BY_LABEL[_cls.display_name.lower()] = _cls


def class_of(class_id: int) -> AbnormalityClass:
    """Taxonomy row for an id in 0..19"""
    if isinstance(class_id, bool) or not isinstance(class_id, int) or not 0 <= class_id <= MAX_CLASS_ID:
        raise UnknownClass(class_id)
    return TAXONOMY[class_id]


def label_of(cls: AbnormalityClass) -> str:
    return cls.label


def class_for_label(label: str) -> AbnormalityClass:
    """Inverse lookup by canonical label or display name (case-insensitive)"""
    try:
        return _BY_LABEL[label.strip().lower()]
    except KeyError:
        raise UnknownClass(label)
