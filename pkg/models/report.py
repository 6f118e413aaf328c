"""
Report data models
Study records as stored in corpus files and parsed radiology reports
"""

from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator


class Split(str, Enum):
    """Dataset partition a study belongs to"""
    TRAIN = "train"
    VALIDATION = "validation"
    TEST = "test"


class SectionName(str, Enum):
    """Report sections recognized by the parser, in canonical rendering order"""
    OTHER = "other"
    INDICATION = "indication"
    TECHNIQUE = "technique"
    COMPARISON = "comparison"
    FINDINGS = "findings"
    IMPRESSION = "impression"


# ================================
# CORPUS RECORDS
# ================================

class StudyRecord(BaseModel):
    """One study: an opaque id standing in for the image, and its free-text report"""
    model_config = ConfigDict(frozen=True)

    study_id: str = Field(..., min_length=1, description="Opaque study identifier")
    report_text: str = Field(..., description="Raw free-text report")
    split: Optional[Split] = Field(None, description="Assigned dataset split")
    patient_id: Optional[str] = Field(None, min_length=1, description="Patient identifier, used for patient-level splits")

    @field_validator("study_id")
    @classmethod
    def validate_study_id(cls, v):
        if not v.strip():
            raise ValueError("study_id must not be blank")
        return v

    @field_validator("report_text")
    @classmethod
    def validate_report_text(cls, v):
        if not v:
            raise ValueError("report_text must not be empty")
        return v

    def to_record(self) -> Dict[str, Any]:
        """Wire representation; patient_id appears only when set"""
        record: Dict[str, Any] = {
            "study_id": self.study_id,
            "report_text": self.report_text,
            "split": self.split.value if self.split else None,
        }
        if self.patient_id is not None:
            record["patient_id"] = self.patient_id
        return record


# ================================
# PARSED REPORTS
# ================================

class RadiologyReport(BaseModel):
    """A report split into named sections, each segmented into sentences"""
    model_config = ConfigDict(frozen=True)

    study_id: str
    sections: Dict[SectionName, str] = Field(default_factory=dict)
    sentence_lists: Dict[SectionName, List[str]] = Field(default_factory=dict)

    def section(self, name: SectionName) -> str:
        return self.sections.get(name, "")

    def sentences(self, name: SectionName) -> List[str]:
        return list(self.sentence_lists.get(name, []))

    @property
    def findings(self) -> str:
        return self.section(SectionName.FINDINGS)

    def to_record(self) -> Dict[str, Any]:
        # sections keep the order they appear in the report
        return {
            "study_id": self.study_id,
            "sections": {name.value: text for name, text in self.sections.items()},
            "sentence_lists": {name.value: self.sentence_lists.get(name, []) for name in self.sections},
        }
