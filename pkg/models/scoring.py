"""
Scoring models
ROUGE-L scores per study, corpus aggregates and comparison-table rows
"""

from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class RougeScore(BaseModel):
    model_config = ConfigDict(frozen=True)

    precision: float = Field(..., ge=0.0, le=1.0)
    recall: float = Field(..., ge=0.0, le=1.0)
    f: float = Field(..., ge=0.0, le=1.0)
    lcs_len: int = Field(..., ge=0)
    hyp_len: int = Field(..., ge=0)
    ref_len: int = Field(..., ge=0)

    @model_validator(mode="after")
    def validate_lcs_bound(self):
        if self.lcs_len > min(self.hyp_len, self.ref_len):
            raise ValueError("lcs_len cannot exceed either sequence length")
        return self


class CorpusScore(BaseModel):
    """Mean ROUGE-L over studies with a non-empty reference"""
    model_config = ConfigDict(frozen=True)

    mean_f: float
    mean_precision: float = 0.0
    mean_recall: float = 0.0
    per_study: Dict[str, RougeScore] = Field(default_factory=dict)
    n: int = Field(..., ge=0)
    empty_references: List[str] = Field(default_factory=list)
    beta: float = 1.0
    rule_set_version: str = ""
    prompt_options_version: str = ""

    @model_validator(mode="after")
    def validate_count(self):
        if self.n != len(self.per_study):
            raise ValueError("n must equal the number of scored studies")
        return self

    def summary(self) -> Dict[str, object]:
        return {
            "mean_f": self.mean_f,
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "n": self.n,
            "empty_references": len(self.empty_references),
            "beta": self.beta,
            "rule_set_version": self.rule_set_version,
            "prompt_options_version": self.prompt_options_version,
        }


class ComparisonRow(BaseModel):
    """One system in a ROUGE-L comparison table"""
    model_config = ConfigDict(frozen=True)

    system: str = Field(..., min_length=1)
    rouge_l: float = Field(..., ge=0.0, le=1.0)


# ================================
# API REQUEST / RESPONSE MODELS
# ================================

class RougeRequest(BaseModel):
    hypothesis: str
    reference: str
    beta: float = Field(1.0, gt=0)


class ComparisonRequest(BaseModel):
    rows: List[ComparisonRow] = Field(default_factory=list)
    include_baselines: bool = False


class ComparisonResponse(BaseModel):
    table: str
    rows: List[ComparisonRow]
