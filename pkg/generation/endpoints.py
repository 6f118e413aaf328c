"""
Reference inference server for the remote generation protocol
Serves the template generator behind POST /api/v1/generate
"""

import logging

from fastapi import APIRouter, HTTPException, status

from config import settings
from core.errors import PromptParseError
from generation.backends import TemplateBackend
from generation.tokens import truncate_tokens
from models.generation import GenerationRequest, GenerationResponse

logger = logging.getLogger(__name__)

router = APIRouter(prefix=settings.API_V1_PREFIX, tags=["generation"])

_backend = TemplateBackend()


@router.post("/generate", response_model=GenerationResponse)
async def generate_findings(request: GenerationRequest):
    """Generate Findings text for one prompt"""
    try:
        text = _backend.complete(request)
    except PromptParseError as e:
        logger.warning(f"Rejected prompt for request {request.request_id}: {e.message}")
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail=e.message)
    return GenerationResponse(text=truncate_tokens(text, request.max_new_tokens), request_id=request.request_id)
