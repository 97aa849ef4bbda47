# Shared schemas for Hamming CS packages

from .base import (
    FrozenModel,
    ConfigModel,
    EnsembleRefMixin,
    TimingMixin,
    VectorPayload,
)
from .enums import ExperimentFamily, DequantizeMode, RecoveryMethod, BoundInterpretation

__all__ = [
    # Base schemas
    "FrozenModel",
    "ConfigModel",
    "EnsembleRefMixin",
    "TimingMixin",
    "VectorPayload",
    # Enums
    "ExperimentFamily",
    "DequantizeMode",
    "RecoveryMethod",
    "BoundInterpretation",
]
