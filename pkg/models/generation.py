"""
Generation models
Requests to and results from a generation backend, plus the remote wire format
"""

from typing import Optional
from uuid import uuid4

from pydantic import BaseModel, ConfigDict, Field


class GenerationRequest(BaseModel):
    """Body of POST /generate and the input of every backend"""
    model_config = ConfigDict(frozen=True)

    prompt: str = Field(..., min_length=1)
    max_new_tokens: int = Field(128, ge=1)
    request_id: str = Field(default_factory=lambda: uuid4().hex)


class GenerationResponse(BaseModel):
    """Response body of POST /generate"""
    text: str
    request_id: Optional[str] = None


class GeneratedFindings(BaseModel):
    """Hypothesis Findings text for one study"""
    model_config = ConfigDict(frozen=True)

    study_id: str
    text: str
    backend: str
    token_count: int = Field(..., ge=0)
    prompt_options_version: Optional[str] = None

    def to_record(self):
        record = {
            "study_id": self.study_id,
            "text": self.text,
            "backend": self.backend,
            "token_count": self.token_count,
        }
        if self.prompt_options_version is not None:
            record["prompt_options_version"] = self.prompt_options_version
        return record
