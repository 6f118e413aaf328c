"""
Generation backend contract

Every backend turns a GenerationRequest into raw text; generate() applies
the shared length cap and wraps the result, so pipeline records have the
same shape whichever backend produced them.
"""

import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

from config import settings
from generation.template import template_generate
from generation.tokens import count_tokens, truncate_tokens
from models.generation import GeneratedFindings, GenerationRequest
from prompting.builder import parse_prompt

logger = logging.getLogger(__name__)


class GenerationBackend(ABC):
    name: str = "backend"
    # None means unbounded
    max_concurrency: Optional[int] = None

    @abstractmethod
    def complete(self, request: GenerationRequest) -> str:
        """Raw generated text for one request"""

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


class TemplateBackend(GenerationBackend):
    """Deterministic, pure: parses the prompt and renders hedged template sentences"""

    name = "template"

    def __init__(self, terminator: str = "TL;DR"):
        self.terminator = terminator

    def complete(self, request: GenerationRequest) -> str:
        return template_generate(parse_prompt(request.prompt, self.terminator))


def generate(
    request: GenerationRequest,
    backend: GenerationBackend,
    study_id: Optional[str] = None,
    prompt_options_version: Optional[str] = None,
) -> GeneratedFindings:
    text = truncate_tokens(backend.complete(request), request.max_new_tokens)
    return GeneratedFindings(
        study_id=study_id if study_id is not None else request.request_id,
        text=text,
        backend=backend.name,
        token_count=count_tokens(text),
        prompt_options_version=prompt_options_version,
    )


def generate_many(
    items: Sequence[Tuple[str, GenerationRequest]],
    backend: GenerationBackend,
    workers: int = 4,
    prompt_options_version: Optional[str] = None,
) -> List[GeneratedFindings]:
    """Generate for (study_id, request) pairs with a bounded pool; output order matches input"""
    limit = workers if backend.max_concurrency is None else min(workers, backend.max_concurrency)
    if limit <= 1 or len(items) <= 1:
        return [generate(request, backend, study_id, prompt_options_version) for study_id, request in items]
    with ThreadPoolExecutor(max_workers=limit) as pool:
        return list(pool.map(lambda item: generate(item[1], backend, item[0], prompt_options_version), items))


def create_backend(
    kind: str,
    terminator: str = "TL;DR",
    endpoint: Optional[str] = None,
    timeout: float = 60.0,
    retries: int = 2,
    backoff_seconds: Optional[float] = None,
    max_in_flight: int = 4,
) -> GenerationBackend:
    """backoff_seconds defaults to settings.GENERATION_BACKOFF_SECONDS"""
    if kind == "template":
        return TemplateBackend(terminator=terminator)
    if kind == "remote":
        from generation.remote import RemoteBackend

        if not endpoint:
            raise ValueError("remote backend requires an endpoint")
        logger.info(f"🌐 Using remote generation backend at {endpoint}")
        return RemoteBackend(
            endpoint,
            timeout=timeout,
            retries=retries,
            backoff_seconds=settings.GENERATION_BACKOFF_SECONDS if backoff_seconds is None else backoff_seconds,
            max_in_flight=max_in_flight,
        )
    raise ValueError(f"Unknown generation backend: {kind}")
