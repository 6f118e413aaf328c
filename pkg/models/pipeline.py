"""
Pipeline models
Run configuration and the manifest every run leaves behind
"""

from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from models.prompt import PromptOptions

BUILTIN_RULES = "builtin"


class PipelineConfig(BaseModel):
    """Everything needed to reproduce a run"""
    model_config = ConfigDict(frozen=True)

    # corpus
    corpus_path: Path
    split_seed: int = 0
    split_group: Literal["study", "patient"] = "study"

    # detections: exactly one source
    detections_path: Optional[Path] = None
    mock_seed: Optional[int] = None

    # filter
    rules: str = BUILTIN_RULES
    filter_enabled: bool = True

    # prompt
    prompt: PromptOptions = PromptOptions()

    # generation
    backend: Literal["template", "remote"] = "template"
    endpoint: Optional[str] = None
    max_new_tokens: int = Field(128, ge=1)
    timeout_seconds: float = Field(60.0, gt=0)
    retries: int = Field(2, ge=0)
    max_in_flight: int = Field(4, ge=1)

    # evaluation
    beta: float = Field(1.0, gt=0)
    eval_split: Literal["all", "train", "validation", "test"] = "all"
    baselines_path: Optional[Path] = None
    system_name: str = "this run"

    # output
    output_dir: Path
    workers: int = Field(4, ge=1)
    strict: bool = False

    @model_validator(mode="after")
    def validate_sources(self):
        if (self.detections_path is None) == (self.mock_seed is None):
            raise ValueError("configure exactly one detection source: detections.path or detections.mock_seed")
        if self.backend == "remote" and not self.endpoint:
            raise ValueError("generation.backend = remote requires generation.endpoint")
        return self

    @model_validator(mode="after")
    def validate_paths(self):
        referenced = {"corpus.path": self.corpus_path, "detections.path": self.detections_path,
                      "evaluation.baselines": self.baselines_path}
        if self.rules != BUILTIN_RULES:
            referenced["filter.rules"] = Path(self.rules)
        for key, path in referenced.items():
            if path is not None and not Path(path).exists():
                raise ValueError(f"{key} does not exist: {path}")
        return self

    def snapshot(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


class RunManifest(BaseModel):
    """Written once per run to <output_dir>/manifest.json"""

    tool_version: str
    config: Dict[str, Any]
    rule_set_version: str = ""
    prompt_options_version: str = ""
    backend: str = ""
    counts: Dict[str, int] = Field(default_factory=dict)
    skipped: Dict[str, int] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    corpus_score: Optional[Dict[str, Any]] = None
    status: Literal["running", "completed", "failed"] = "running"
    failure: Optional[Dict[str, Any]] = None
    started_at: datetime
    finished_at: Optional[datetime] = None
