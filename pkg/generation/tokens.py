"""
Toolkit tokenizer: whitespace-delimited units

This is not the language model's tokenizer; it only enforces the
generation length cap consistently across backends.
"""


def count_tokens(text: str) -> int:
    return len(text.split())


def truncate_tokens(text: str, max_tokens: int) -> str:
    """Keep the first max_tokens units; text within the cap is returned trimmed but otherwise verbatim"""
    tokens = text.split()
    if len(tokens) <= max_tokens:
        return text.strip()
    return " ".join(tokens[:max_tokens])
