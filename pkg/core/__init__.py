"""
Core package - shared error types, HTTP application and tool version
"""

__version__ = "1.0.0"
