"""
Generation package - backend contract, template baseline and remote inference client
"""

from .backends import GenerationBackend, TemplateBackend, create_backend, generate, generate_many
from .template import NORMAL_FINDINGS, template_generate
from .tokens import count_tokens, truncate_tokens

__all__ = [
    "GenerationBackend",
    "TemplateBackend",
    "create_backend",
    "generate",
    "generate_many",
    "NORMAL_FINDINGS",
    "template_generate",
    "count_tokens",
    "truncate_tokens",
]
