"""
Configuration settings for the RadFindings two-step Findings pipeline
Loads environment variables and provides process-wide defaults
"""

import logging
from typing import Annotated, List

from dotenv import load_dotenv
from pydantic import field_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict

# Load environment variables from .env file
load_dotenv()

DEFAULT_ABBREVIATIONS = ["Dr", "Mr", "Mrs", "vs", "e.g", "i.e", "approx", "No", "cm", "mm"]


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Project
    PROJECT_NAME: str = "RadFindings Two-Step Findings Pipeline"
    LOG_LEVEL: str = "INFO"

    # API Settings
    API_V1_PREFIX: str = "/api/v1"
    HOST: str = "0.0.0.0"
    PORT: int = 8000

    # Generation backend
    GENERATION_ENDPOINT: str = "http://localhost:8000/api/v1/generate"
    GENERATION_TIMEOUT_SECONDS: float = 60.0
    GENERATION_RETRIES: int = 2
    GENERATION_BACKOFF_SECONDS: float = 0.5
    GENERATION_MAX_IN_FLIGHT: int = 4
    MAX_NEW_TOKENS: int = 128

    # Pipeline
    PIPELINE_WORKERS: int = 4
    SENTENCE_ABBREVIATIONS: Annotated[List[str], NoDecode] = DEFAULT_ABBREVIATIONS

    model_config = SettingsConfigDict(case_sensitive=True, env_file=".env", extra="ignore")

    @field_validator("SENTENCE_ABBREVIATIONS", mode="before")
    @classmethod
    def assemble_abbreviations(cls, v):
        """Parse abbreviations from a comma-separated environment variable"""
        if isinstance(v, str):
            return [i.strip() for i in v.split(",") if i.strip()]
        return v

    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v):
        """Ensure LOG_LEVEL names a logging level"""
        level = v.upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"Unknown LOG_LEVEL: {v}")
        return level

    @field_validator(
        "GENERATION_TIMEOUT_SECONDS",
        "GENERATION_MAX_IN_FLIGHT",
        "MAX_NEW_TOKENS",
        "PIPELINE_WORKERS",
    )
    @classmethod
    def validate_positive(cls, v):
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @field_validator("GENERATION_RETRIES")
    @classmethod
    def validate_retries(cls, v):
        if v < 0:
            raise ValueError("GENERATION_RETRIES cannot be negative")
        return v


# Create global settings instance
settings = Settings()

# Print configuration on import (for development)
if __name__ == "__main__":
    print("🔧 RadFindings Configuration:")
    print(f"   LOG_LEVEL: {settings.LOG_LEVEL}")
    print(f"   GENERATION_ENDPOINT: {settings.GENERATION_ENDPOINT}")
    print(f"   TIMEOUT: {settings.GENERATION_TIMEOUT_SECONDS}s, RETRIES: {settings.GENERATION_RETRIES}")
    print(f"   MAX_NEW_TOKENS: {settings.MAX_NEW_TOKENS}")
    print(f"   ABBREVIATIONS: {settings.SENTENCE_ABBREVIATIONS}")
    print("✅ Configuration loaded successfully!")
