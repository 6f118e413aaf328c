"""
Ground-truth filtering models
Versioned regex rule sets and the per-sentence decisions they produce
"""

import re
from functools import lru_cache
from typing import Iterator, List, Optional, Pattern, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


@lru_cache(maxsize=1024)
def compile_pattern(pattern: str) -> Pattern[str]:
    """Compile a filter pattern; matching is always case-insensitive"""
    return re.compile(pattern, re.IGNORECASE)


class FilterRuleSet(BaseModel):
    """Negation and device patterns; a sentence matching any of them is removed"""
    model_config = ConfigDict(frozen=True)

    negation_patterns: List[str] = Field(default_factory=list)
    device_patterns: List[str] = Field(default_factory=list)
    version: str = Field(..., min_length=1)

    @field_validator("negation_patterns", "device_patterns")
    @classmethod
    def validate_patterns(cls, v):
        for pattern in v:
            try:
                compile_pattern(pattern)
            except re.error as e:
                raise ValueError(f"pattern {pattern!r} does not compile: {e}")
        return v

    @model_validator(mode="after")
    def validate_not_empty(self):
        if not self.negation_patterns and not self.device_patterns:
            raise ValueError("a rule set needs at least one pattern")
        return self

    @property
    def size(self) -> int:
        return len(self.negation_patterns) + len(self.device_patterns)

    def rules(self) -> Iterator[Tuple[str, Pattern[str]]]:
        """(rule_id, compiled pattern) in evaluation order: negation first, then device"""
        for pattern in self.negation_patterns:
            yield f"negation:{pattern}", compile_pattern(pattern)
        for pattern in self.device_patterns:
            yield f"device:{pattern}", compile_pattern(pattern)

    def extended(self, negation: List[str] = (), device: List[str] = (), version: Optional[str] = None) -> "FilterRuleSet":
        """A new rule set with extra patterns appended"""
        return FilterRuleSet(
            negation_patterns=[*self.negation_patterns, *negation],
            device_patterns=[*self.device_patterns, *device],
            version=version or f"{self.version}+{len(negation) + len(device)}",
        )


class FilterDecision(BaseModel):
    """Whether one Findings sentence survives filtering, and which rule removed it"""
    model_config = ConfigDict(frozen=True)

    sentence: str
    kept: bool
    matched_rule: Optional[str] = None

    @model_validator(mode="after")
    def validate_consistency(self):
        if self.kept == (self.matched_rule is not None):
            raise ValueError("kept must be False exactly when a rule matched")
        return self
