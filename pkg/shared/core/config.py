"""
Hamming CS - Unified Configuration Settings

This module provides a single, unified configuration for the library, the
benchmark runner and the command-line entry point. It loads settings from
the environment and an optional .env file at the project root.
"""

import os
from pydantic import Field, field_validator, ConfigDict
from pydantic_settings import BaseSettings

_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


class Settings(BaseSettings):
    """
    Unified settings for all packages. Loads from the environment (and a .env
    file when present) using Pydantic's ConfigDict for cleaner setup.
    """
    model_config = ConfigDict(
        env_file='.env',
        env_file_encoding='utf-8',
        case_sensitive=False,
        extra='ignore'
    )

    # =============================================================================
    # GENERAL SETTINGS
    # =============================================================================
    LOG_LEVEL: str = "INFO"

    # =============================================================================
    # WORKER SETTINGS
    # =============================================================================
    HCS_THREADS: int = Field(default_factory=lambda: os.cpu_count() or 1)

    # =============================================================================
    # QUANTIZER & DEQUANTIZER DEFAULTS
    # =============================================================================
    DEFAULT_X_INF: float = -1.0
    DEFAULT_X_SUP: float = 1.0
    BIHT_MAX_ITERATIONS: int = 100

    # =============================================================================
    # BENCH OUTPUT SETTINGS
    # =============================================================================
    CSV_FLOAT_DIGITS: int = 17
    BENCH_MAX_FAILURES_LOGGED: int = 20

    # =============================================================================
    # FIELD VALIDATORS
    # =============================================================================
    @field_validator("LOG_LEVEL")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Validate that LOG_LEVEL names a standard logging level."""
        v = v.strip().upper()
        if v not in _LOG_LEVELS:
            raise ValueError(f"LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}")
        return v

    @field_validator("HCS_THREADS", "BIHT_MAX_ITERATIONS", "CSV_FLOAT_DIGITS")
    @classmethod
    def validate_positive(cls, v: int, info) -> int:
        """Validate that counts are at least one."""
        if v < 1:
            raise ValueError(f"{info.field_name} must be >= 1")
        return v

    @field_validator("DEFAULT_X_INF", "DEFAULT_X_SUP")
    @classmethod
    def validate_range_bound(cls, v: float, info) -> float:
        """Validate that default signal range bounds lie in [-1, 1]."""
        if not -1.0 <= v <= 1.0:
            raise ValueError(f"{info.field_name} must lie in [-1, 1]")
        return v

    # =============================================================================
    # COMPUTED PROPERTIES
    # =============================================================================
    @property
    def CSV_FLOAT_FORMAT(self) -> str:
        """Format spec used for every float written by the bench CSV writer."""
        return f".{self.CSV_FLOAT_DIGITS}g"


settings = Settings()


def worker_count(requested: int = 0) -> int:
    """
    Resolve the number of bench workers.

    Args:
        requested: Explicit worker count, or 0 to use HCS_THREADS

    Returns:
        int: Worker count, capped by HCS_THREADS
    """
    if requested <= 0:
        return settings.HCS_THREADS
    return min(requested, settings.HCS_THREADS)
