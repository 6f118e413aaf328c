"""
Abnormality detection models
The detector output contract: per-study sets of classified, scored detections
"""

from typing import Any, Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

BACKGROUND_CLASS_ID = 0
DEVICE_CLASS_ID = 3
MAX_CLASS_ID = 19


class AbnormalityClass(BaseModel):
    """One row of the abnormality taxonomy"""
    model_config = ConfigDict(frozen=True)

    class_id: int = Field(..., ge=0, le=MAX_CLASS_ID)
    label: str = Field(..., description="Canonical lowercase label used in prompts")
    display_name: str = Field(..., description="Taxonomy name as published")


class BoundingBox(BaseModel):
    """Box in normalized image coordinates: top-left corner plus width and height"""
    model_config = ConfigDict(frozen=True)

    x: float = Field(..., ge=0.0, le=1.0)
    y: float = Field(..., ge=0.0, le=1.0)
    w: float = Field(..., gt=0.0, le=1.0)
    h: float = Field(..., gt=0.0, le=1.0)

    def as_list(self) -> List[float]:
        return [self.x, self.y, self.w, self.h]

    @classmethod
    def from_list(cls, values: Iterable[float]) -> "BoundingBox":
        x, y, w, h = values
        return cls(x=x, y=y, w=w, h=h)


class Detection(BaseModel):
    """A detected abnormality; Background is never a detection"""
    model_config = ConfigDict(frozen=True)

    class_id: int = Field(..., ge=1, le=MAX_CLASS_ID)
    probability: float = Field(..., ge=0.0, le=1.0)
    bbox: Optional[BoundingBox] = None


class DetectionSet(BaseModel):
    """All detections for one study: one per class, ascending class id"""
    model_config = ConfigDict(frozen=True)

    study_id: str = Field(..., min_length=1)
    detections: Tuple[Detection, ...] = ()

    @model_validator(mode="after")
    def validate_canonical(self):
        ids = [d.class_id for d in self.detections]
        if ids != sorted(set(ids)):
            raise ValueError("detections must have unique class ids in ascending order")
        return self

    @classmethod
    def collapse(cls, study_id: str, detections: Iterable[Detection]) -> "DetectionSet":
        """Build a canonical set: duplicates collapse to the most probable, sorted by class id"""
        best: Dict[int, Detection] = {}
        for detection in detections:
            current = best.get(detection.class_id)
            if current is None or detection.probability > current.probability:
                best[detection.class_id] = detection
        return cls(study_id=study_id, detections=tuple(best[k] for k in sorted(best)))

    def to_rows(self) -> List[Dict[str, Any]]:
        """Detection wire format: one row per detection"""
        rows = []
        for d in self.detections:
            row: Dict[str, Any] = {"study_id": self.study_id, "class_id": d.class_id, "probability": d.probability}
            if d.bbox is not None:
                row["bbox"] = d.bbox.as_list()
            rows.append(row)
        return rows
