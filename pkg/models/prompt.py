"""
Prompt models
Serialization options and the prompt text handed to a generation backend
"""

import re

from pydantic import BaseModel, ConfigDict, Field, field_validator

from detection.taxonomy import TAXONOMY

PROMPT_FORMAT = "prompt-1"
NO_ABNORMALITIES = "no abnormalities detected"

# Every word a prompt body can contain besides numbers and punctuation
PROMPT_WORDS = frozenset(
    word
    for text in [cls.label for cls in TAXONOMY] + [NO_ABNORMALITIES, "at"]
    for word in text.split()
)
_TERMINATOR_FORBIDDEN = re.compile(r"[\s\d.:,\[\]]")


class PromptOptions(BaseModel):
    """How a DetectionSet is rendered into a prompt"""
    model_config = ConfigDict(frozen=True)

    probability_decimals: int = Field(2, ge=1, description="Fixed decimals for probabilities")
    include_bbox: bool = Field(False, description="Append normalized box coordinates to each entry")
    include_undetected: bool = Field(
        False, description="List every reportable class, rendering those not detected with probability zero"
    )
    threshold: float = Field(0.0, ge=0.0, lt=1.0, description="Entries need probability strictly above this")
    terminator: str = Field("TL;DR", min_length=1)

    @field_validator("terminator")
    @classmethod
    def validate_terminator(cls, v):
        # The terminator must be unable to occur anywhere in a prompt body
        if _TERMINATOR_FORBIDDEN.search(v):
            raise ValueError("terminator must be one word without digits or any of . : , [ ]")
        clash = next((word for word in sorted(PROMPT_WORDS) if v in word), None)
        if clash is not None:
            raise ValueError(f"terminator {v!r} occurs in the prompt word {clash!r}")
        return v

    @property
    def version(self) -> str:
        """Stable identifier of the serialization, recorded in run manifests and scores"""
        return (
            f"{PROMPT_FORMAT}:decimals={self.probability_decimals},"
            f"bbox={str(self.include_bbox).lower()},undetected={str(self.include_undetected).lower()},"
            f"threshold={self.threshold},terminator={self.terminator}"
        )


class Prompt(BaseModel):
    model_config = ConfigDict(frozen=True)

    study_id: str
    text: str
    options: PromptOptions = PromptOptions()

    def to_record(self):
        return {"study_id": self.study_id, "prompt": self.text, "prompt_options_version": self.options.version}
