"""
Main FastAPI application
Reference inference server for the remote generation backend plus ROUGE-L scoring endpoints
"""

from contextlib import asynccontextmanager
import logging

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
import uvicorn

from config import settings
from core import __version__
from core.errors import EXIT_BACKEND, EXIT_VALIDATION, PipelineError
from detection.taxonomy import TAXONOMY
from filtering.rules import default_rules

# Import routers
from evaluation.endpoints import router as evaluation_router
from generation.endpoints import router as generation_router

# Configure logging
logging.basicConfig(level=settings.LOG_LEVEL)
logger = logging.getLogger(__name__)

# ================================
# APPLICATION LIFECYCLE
# ================================

@asynccontextmanager
async def lifespan(app: FastAPI):
    """Handle application startup and shutdown"""
    logger.info(f"🚀 Starting {settings.PROJECT_NAME} {__version__}...")
    logger.info(f"📏 Default filter rules: {default_rules().version}, {len(TAXONOMY)} abnormality classes")
    logger.info("✅ Application startup complete!")

    yield

    logger.info(f"🔄 Shutting down {settings.PROJECT_NAME}...")

# ================================
# CREATE FASTAPI APPLICATION
# ================================

app = FastAPI(
    title=f"{settings.PROJECT_NAME} API",
    description="Radiology Findings generation: reference generation server and ROUGE-L evaluation",
    version=__version__,
    docs_url="/docs",
    redoc_url="/redoc",
    lifespan=lifespan
)

# ================================
# GLOBAL EXCEPTION HANDLERS
# ================================

@app.exception_handler(PipelineError)
async def pipeline_exception_handler(request: Request, exc: PipelineError):
    """Domain errors keep their machine-readable record"""
    if exc.exit_code == EXIT_VALIDATION:
        status_code = 422
    elif exc.exit_code == EXIT_BACKEND:
        status_code = 502
    else:
        status_code = 500
    logger.warning(f"{type(exc).__name__} on {request.url.path}: {exc.message}")
    return JSONResponse(status_code=status_code, content=exc.to_record())


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Global exception handler for unhandled errors"""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content={
            "error": "Internal server error",
            "message": "An unexpected error occurred",
        }
    )

# ================================
# INCLUDE ROUTERS
# ================================

# Generation (remote backend protocol)
app.include_router(generation_router)

# ROUGE-L scoring and comparison tables
app.include_router(evaluation_router)

# ================================
# ROOT ENDPOINTS
# ================================

@app.get("/")
async def root():
    """Root endpoint with API information"""
    return {
        "message": f"Welcome to {settings.PROJECT_NAME} API",
        "version": __version__,
        "status": "running",
        "docs": "/docs",
        "redoc": "/redoc"
    }

@app.get("/health")
async def health_check():
    """Application health check"""
    return {
        "status": "healthy",
        "service": settings.PROJECT_NAME,
        "version": __version__,
        "components": {
            "generation": "operational",
            "evaluation": "operational"
        }
    }

@app.get(f"{settings.API_V1_PREFIX}/info")
async def api_info():
    """API information and available endpoints"""
    return {
        "api_version": "v1",
        "service": settings.PROJECT_NAME,
        "endpoints": {
            "generate": f"{settings.API_V1_PREFIX}/generate",
            "rouge": f"{settings.API_V1_PREFIX}/evaluation/rouge",
            "comparison": f"{settings.API_V1_PREFIX}/evaluation/comparison",
            "health": "/health",
            "docs": "/docs"
        },
        "generation": {
            "backend": "template",
            "max_new_tokens": settings.MAX_NEW_TOKENS
        },
        "filter_rules": default_rules().version,
        "abnormality_classes": len(TAXONOMY)
    }

# ================================
# RUN APPLICATION
# ================================

if __name__ == "__main__":
    logger.info(f"🚀 Starting server on {settings.HOST}:{settings.PORT}")

    uvicorn.run(
        "core.main:app",
        host=settings.HOST,
        port=settings.PORT,
        log_level=settings.LOG_LEVEL.lower()
    )
