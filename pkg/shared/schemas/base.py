"""
Shared base schemas for common patterns across all packages.

This module provides base Pydantic models and mixins that are commonly used
by the library payloads, the bench records and the CLI reports.
"""
from typing import List

from pydantic import BaseModel, ConfigDict, Field


class FrozenModel(BaseModel):
    """Immutable model that rejects unknown fields."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class ConfigModel(FrozenModel):
    """Base class for user-facing configuration objects loaded from JSON or flags."""

    model_config = ConfigDict(frozen=True, extra="forbid", validate_default=True)


class EnsembleRefMixin(BaseModel):
    """Mixin for payloads that refer to a measurement ensemble by its (n, m, seed) triple."""

    n: int = Field(..., ge=1, description="Signal dimension (ensemble column count)")
    m: int = Field(..., ge=1, description="Measurement count (ensemble row count)")
    seed: int = Field(..., ge=0, lt=2**64, description="64-bit ensemble seed")


class TimingMixin(BaseModel):
    """Mixin for results that carry a wall-time duration."""

    elapsed: float = Field(..., ge=0.0, description="Wall-time duration in seconds")


class VectorPayload(BaseModel):
    """Common structure for a real vector serialized as IEEE-754 doubles."""

    values: List[float] = Field(..., min_length=1, description="Vector entries")

