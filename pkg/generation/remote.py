"""
Remote inference-service backend

Protocol: POST <endpoint> with {prompt, max_new_tokens, request_id};
a 2xx response carries {text} (optionally echoing request_id).
Connection failures, timeouts and 5xx responses are retried with
exponential backoff; other non-2xx responses fail immediately.
"""

import logging
import time
from typing import Callable, Optional

import httpx
from pydantic import ValidationError

from core.errors import BackendError, BackendProtocolError, BackendTimeout, BackendUnreachable
from generation.backends import GenerationBackend
from models.generation import GenerationRequest, GenerationResponse

logger = logging.getLogger(__name__)


class RemoteBackend(GenerationBackend):
    name = "remote"

    def __init__(
        self,
        endpoint: str,
        timeout: float = 60.0,
        retries: int = 2,
        backoff_seconds: float = 0.5,
        max_in_flight: int = 4,
        client: Optional[httpx.Client] = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        """
        Args:
            endpoint: full URL of the generation route
            timeout: per-request timeout in seconds
            retries: extra attempts after the first one
            backoff_seconds: first retry delay; doubles on every further retry
            max_in_flight: upper bound on concurrent requests from generate_many
            client: httpx client to reuse (a FastAPI TestClient works too)
        """
        self.endpoint = endpoint
        self.timeout = timeout
        self.retries = retries
        self.backoff_seconds = backoff_seconds
        self.max_concurrency = max_in_flight
        self._owns_client = client is None
        self.client = client or httpx.Client(timeout=timeout)
        self._sleep = sleep

    def complete(self, request: GenerationRequest) -> str:
        payload = request.model_dump()
        attempt = 0
        while True:
            failure: BackendError
            try:
                response = self.client.post(self.endpoint, json=payload, timeout=self.timeout)
            except httpx.TimeoutException:
                failure = BackendTimeout(self.timeout)
            except httpx.TransportError as e:
                failure = BackendUnreachable(self.endpoint, f"({e})")
            else:
                if response.is_success:
                    return self._parse(response, request)
                detail = f"HTTP {response.status_code}: {response.text[:200]}"
                if response.status_code < 500:
                    raise BackendProtocolError(detail, status_code=response.status_code)
                failure = BackendProtocolError(detail, status_code=response.status_code)

            if attempt >= self.retries:
                raise failure
            delay = self.backoff_seconds * (2 ** attempt)
            attempt += 1
            logger.warning(f"⚠️ Generation request {request.request_id} failed ({failure.message}); retry {attempt}/{self.retries} in {delay:.2f}s")
            self._sleep(delay)

    @staticmethod
    def _parse(response: httpx.Response, request: GenerationRequest) -> str:
        try:
            body = GenerationResponse.model_validate(response.json())
        except (ValueError, ValidationError) as e:
            raise BackendProtocolError(f"response is not {{text}} JSON: {e}")
        if body.request_id is not None and body.request_id != request.request_id:
            raise BackendProtocolError(
                f"response request_id {body.request_id!r} does not match {request.request_id!r}"
            )
        return body.text

    def close(self) -> None:
        if self._owns_client:
            self.client.close()
