"""
Evaluation endpoints: single-pair ROUGE-L and comparison tables
"""

import logging

from fastapi import APIRouter, HTTPException, status

from config import settings
from evaluation.comparison import load_baselines, render_comparison
from evaluation.rouge import rouge_l
from models.scoring import ComparisonRequest, ComparisonResponse, RougeRequest, RougeScore

logger = logging.getLogger(__name__)

router = APIRouter(prefix=f"{settings.API_V1_PREFIX}/evaluation", tags=["evaluation"])


@router.post("/rouge", response_model=RougeScore)
async def score_pair(request: RougeRequest):
    return rouge_l(request.hypothesis, request.reference, request.beta)


@router.post("/comparison", response_model=ComparisonResponse)
async def comparison_table(request: ComparisonRequest):
    """Render a comparison table, optionally merged with the bundled literature rows"""
    rows = list(request.rows)
    if request.include_baselines:
        rows = load_baselines() + rows
    if not rows:
        raise HTTPException(status_code=status.HTTP_422_UNPROCESSABLE_ENTITY, detail="No rows to compare")
    ordered = sorted(rows, key=lambda r: (r.rouge_l, r.system))
    return ComparisonResponse(table=render_comparison(rows), rows=ordered)
