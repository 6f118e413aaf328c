"""
Pipeline package - run configuration, end-to-end runner and command line
"""

from .config import load_pipeline_config
from .runner import run_pipeline

__all__ = ["load_pipeline_config", "run_pipeline"]
