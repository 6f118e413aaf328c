"""
Error types shared by every pipeline stage
Each error carries the process exit code the CLI reports for it
"""

from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_BACKEND = 3


class PipelineError(Exception):
    """Base class for all domain errors"""

    exit_code = EXIT_RUNTIME

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = {k: v for k, v in context.items() if v is not None}

    def to_record(self) -> Dict[str, Any]:
        """Machine-readable error record (written to stderr by the CLI)"""
        return {
            "error": type(self).__name__,
            "message": self.message,
            "exit_code": self.exit_code,
            **{k: str(v) if not isinstance(v, (int, float, bool)) else v for k, v in self.context.items()},
        }


# ================================
# VALIDATION ERRORS (exit 1)
# ================================

class ValidationFailure(PipelineError):
    exit_code = EXIT_VALIDATION


class ConfigError(ValidationFailure):
    """Pipeline configuration failed validation"""


class MalformedRecord(ValidationFailure):
    def __init__(self, line: int, detail: str, path: Optional[str] = None):
        super().__init__(f"Malformed record at line {line}: {detail}", line=line, path=path)
        self.line = line


class InvalidRule(ValidationFailure):
    def __init__(self, pattern: str, line: Optional[int] = None, detail: str = ""):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"Invalid filter pattern {pattern!r}{where}: {detail}", pattern=pattern, line=line)
        self.pattern = pattern
        self.line = line


class UnknownClass(ValidationFailure):
    def __init__(self, class_id: Any, line: Optional[int] = None):
        where = f" at line {line}" if line is not None else ""
        super().__init__(f"Unknown abnormality class {class_id!r}{where}", class_id=class_id, line=line)
        self.class_id = class_id
        self.line = line


class MalformedDetection(ValidationFailure):
    def __init__(self, line: int, detail: str):
        super().__init__(f"Malformed detection at line {line}: {detail}", line=line)
        self.line = line


class ProbabilityOutOfRange(ValidationFailure):
    def __init__(self, probability: Any, line: int):
        super().__init__(f"Probability {probability!r} outside [0, 1] at line {line}", probability=probability, line=line)
        self.line = line


class DuplicateStudy(ValidationFailure):
    def __init__(self, study_id: str):
        super().__init__(f"Duplicate study id: {study_id}", study_id=study_id)
        self.study_id = study_id


# ================================
# RUNTIME ERRORS (exit 2)
# ================================

class IoFailure(PipelineError):
    def __init__(self, path: Any, detail: str):
        super().__init__(f"I/O failure on {path}: {detail}", path=path)


class EmptyReport(PipelineError):
    def __init__(self, study_id: str):
        super().__init__(f"Report for study {study_id} is empty", study_id=study_id)
        self.study_id = study_id


class EmptyTarget(PipelineError):
    def __init__(self, study_id: str):
        super().__init__(f"Filtered Findings for study {study_id} are empty", study_id=study_id)
        self.study_id = study_id


class PromptParseError(PipelineError):
    def __init__(self, text: str, detail: str = "not a prompt produced by build_prompt"):
        super().__init__(f"Cannot parse prompt {text[:80]!r}: {detail}")
        self.text = text


class StageFailure(PipelineError):
    """A stage failed on a record; wraps the original error with stage context"""

    def __init__(self, stage: str, cause: Exception, study_id: Optional[str] = None):
        super().__init__(f"Stage '{stage}' failed: {cause}", stage=stage, study_id=study_id, cause=type(cause).__name__)
        self.stage = stage
        self.study_id = study_id
        self.cause = cause
        if isinstance(cause, PipelineError):
            self.exit_code = cause.exit_code


# ================================
# BACKEND ERRORS (exit 3)
# ================================

class BackendError(PipelineError):
    exit_code = EXIT_BACKEND


class BackendUnreachable(BackendError):
    def __init__(self, endpoint: str, detail: str = ""):
        super().__init__(f"Generation backend unreachable at {endpoint} {detail}".strip(), endpoint=endpoint)


class BackendProtocolError(BackendError):
    def __init__(self, detail: str, status_code: Optional[int] = None):
        super().__init__(f"Generation backend protocol error: {detail}", status_code=status_code)
        self.detail = detail
        self.status_code = status_code


class BackendTimeout(BackendError):
    def __init__(self, duration: float):
        super().__init__(f"Generation backend timed out after {duration:.1f}s", duration=duration)
        self.duration = duration
