"""
Prompting package - serialization of detections into instruction prompts
"""

from .builder import (
    NO_ABNORMALITIES,
    PromptEntry,
    build_prompt,
    format_fixed,
    parse_prompt,
    render_training_pair,
    split_training_pair,
)

__all__ = [
    "NO_ABNORMALITIES",
    "PromptEntry",
    "build_prompt",
    "format_fixed",
    "parse_prompt",
    "render_training_pair",
    "split_training_pair",
]
