"""
Pydantic schemas for the hcs library.

Configuration objects, reports and the documented JSON forms of the
array-bearing domain objects live here. The domain objects themselves
(Signal, MeasurementEnsemble, HcsQuantizer, ...) are plain classes in their
modules and convert to and from these payloads.
"""
import math
from typing import Dict, List, Optional, Union

from pydantic import Field, field_validator, model_validator

from shared.core.config import settings
from shared.schemas import (
    ConfigModel,
    EnsembleRefMixin,
    FrozenModel,
    TimingMixin,
    VectorPayload,
    BoundInterpretation,
    RecoveryMethod,
)


# --- Configuration Schemas ---

class QuantizerConfig(ConfigModel):
    """
    Parameters of a k-bit HCS quantizer.

    Attributes:
        k (int): Number of intervals (and Bernoulli-domain boundaries), at least 2
        x_inf (float): Lower end of the signal range, in [-1, 1)
        x_sup (float): Upper end of the signal range, in (x_inf, 1]
    """

    k: int = Field(..., ge=2, description="Interval count (bits of the quantized recovery)")
    x_inf: float = Field(default_factory=lambda: settings.DEFAULT_X_INF, description="Lower range bound")
    x_sup: float = Field(default_factory=lambda: settings.DEFAULT_X_SUP, description="Upper range bound")

    @model_validator(mode='after')
    def validate_range(self) -> 'QuantizerConfig':
        if not (-1.0 <= self.x_inf < self.x_sup <= 1.0):
            raise ValueError(
                f"quantizer range must satisfy -1 <= x_inf < x_sup <= 1, got [{self.x_inf}, {self.x_sup}]"
            )
        return self


class DequantizerConfig(ConfigModel):
    """
    Parameters of binary iterative hard thresholding.

    Attributes:
        max_iterations (int): Iteration cap
        step_size (Optional[float]): Gradient step tau; None means 1/m
        sparsity (Optional[int]): K kept by hard thresholding; None skips thresholding
        tolerance (float): Stop once the Hamming error is at or below this value
    """

    max_iterations: int = Field(default_factory=lambda: settings.BIHT_MAX_ITERATIONS, ge=1,
                                description="Iteration cap")
    step_size: Optional[float] = Field(None, gt=0.0, description="Gradient step tau (default 1/m)")
    sparsity: Optional[int] = Field(None, ge=1, description="Hard-thresholding sparsity K")
    tolerance: float = Field(0.0, ge=0.0, le=1.0, description="Hamming error stop level")


# --- Measurement & Bound Reports ---

class BernoulliEstimate(FrozenModel):
    """
    Empirical distribution of the sign-agreement variable of one dimension.

    Attributes:
        p_minus (float): Estimated Pr(s_i = -1), a multiple of 1/sample_count
        sample_count (int): Number of measurements m
    """

    p_minus: float = Field(..., ge=0.0, le=1.0, description="Estimated Pr(s_i = -1)")
    sample_count: int = Field(..., ge=1, description="Measurement count m")

    @property
    def p_plus(self) -> float:
        """Estimated Pr(s_i = +1)."""
        return 1.0 - self.p_minus

    @property
    def minus_count(self) -> int:
        """Number of measurements with s_i = -1."""
        return int(round(self.p_minus * self.sample_count))


class BoundReport(FrozenModel):
    """
    Evaluated closed-form bound.

    Attributes:
        name (str): Bound identifier
        inputs (Dict[str, Union[float, int]]): Parameters the bound was evaluated at
        value (float): Bound value
        interpretation (BoundInterpretation): probability, count or distance
    """

    name: str = Field(..., min_length=1, description="Bound identifier")
    inputs: Dict[str, Union[int, float]] = Field(default_factory=dict, description="Evaluation parameters")
    value: float = Field(..., description="Bound value")
    interpretation: BoundInterpretation = Field(..., description="Meaning of the value")

    @model_validator(mode='after')
    def validate_value(self) -> 'BoundReport':
        if self.interpretation == BoundInterpretation.PROBABILITY and not 0.0 <= self.value <= 1.0:
            raise ValueError(f"probability bound {self.name} out of [0, 1]: {self.value}")
        if self.interpretation == BoundInterpretation.COUNT:
            if self.value < 1 or not float(self.value).is_integer():
                raise ValueError(f"count bound {self.name} must be a positive integer: {self.value}")
        if self.interpretation == BoundInterpretation.DISTANCE and (math.isnan(self.value) or self.value < 0):
            raise ValueError(f"distance bound {self.name} must be non-negative: {self.value}")
        return self


# --- JSON Payloads ---

class EnsembleRef(EnsembleRefMixin, FrozenModel):
    """Stored form of a measurement ensemble; matrices are regenerated from the seed."""
    pass


class SignalPayload(VectorPayload, FrozenModel):
    """
    JSON form of a unit-norm signal.

    Attributes:
        values (List[float]): Entries as IEEE-754 doubles
        sparsity_hint (Optional[int]): Maximum number of nonzero entries
    """

    sparsity_hint: Optional[int] = Field(None, ge=0, description="Sparsity K")

    @field_validator('values', mode='before')
    @classmethod
    def parse_decimal_strings(cls, v):
        # Entries may be given as decimal strings.
        if isinstance(v, list):
            return [float(item) if isinstance(item, str) else item for item in v]
        return v


class MeasurementsPayload(FrozenModel):
    """
    JSON form of 1-bit measurements.

    Attributes:
        bits (List[int]): Signs as -1/+1 integers
        ensemble (Optional[EnsembleRef]): Ensemble that produced the bits
    """

    bits: List[int] = Field(..., min_length=1, description="Signs as -1/+1 integers")
    ensemble: Optional[EnsembleRef] = Field(None, description="Ensemble (n, m, seed) triple")

    @field_validator('bits')
    @classmethod
    def validate_bits(cls, v: List[int]) -> List[int]:
        if any(b not in (-1, 1) for b in v):
            raise ValueError("measurement bits must be -1 or +1")
        return v

    @model_validator(mode='after')
    def validate_length(self) -> 'MeasurementsPayload':
        if self.ensemble is not None and self.ensemble.m != len(self.bits):
            raise ValueError(f"ensemble has m={self.ensemble.m} rows but {len(self.bits)} bits were given")
        return self


class QuantizerPayload(FrozenModel):
    """JSON form of an HCS quantizer."""

    k: int = Field(..., ge=2, description="Interval count")
    x_inf: float = Field(..., description="Lower range bound")
    x_sup: float = Field(..., description="Upper range bound")
    delta: float = Field(..., gt=0.0, description="Bernoulli-domain interval")
    p_boundaries: List[float] = Field(..., description="P_0^- .. P_{k-1}^-")
    s_boundaries: List[float] = Field(..., description="S_0 .. S_k")


class QuantizedSignalPayload(FrozenModel):
    """JSON form of a quantized signal: a flat index array plus the quantizer hash."""

    indices: List[int] = Field(..., min_length=1, description="Interval indices in 1..k")
    quantizer_id: str = Field(..., description="SHA-256 of the quantizer payload")


class DequantizedPayload(VectorPayload, FrozenModel):
    """JSON form of a dequantized signal with its BIHT trace."""

    iterations_used: int = Field(..., ge=0, description="Iterations performed")
    hamming_error_trace: List[float] = Field(default_factory=list, description="D_H per iteration")


class RecoveryPayload(TimingMixin, FrozenModel):
    """JSON form of a quantized recovery result."""

    q_star: QuantizedSignalPayload = Field(..., description="Recovered quantization")
    kl_evaluations: int = Field(..., ge=0, description="KL divergences evaluated")
    method: RecoveryMethod = Field(RecoveryMethod.SCAN, description="Argmin strategy")


# --- Bound Parameter Schemas ---

class ConsistencyParams(ConfigModel):
    """Parameters of the expected measurement Hamming error bound g(sigma, ||x||)."""

    sigma: float = Field(..., ge=0.0, description="l2 norm of the signal perturbation")
    x_norm: float = Field(1.0, gt=0.0, description="l2 norm of the signal")


class ConsistencyTailParams(ConfigModel):
    """Parameters of the Hamming error tail exp(-2 m gamma^2)."""

    g: float = Field(0.0, ge=0.0, le=0.5, description="Expected Hamming error the tail is measured from")
    gamma: float = Field(..., gt=0.0, description="Excess over g")
    m: int = Field(..., ge=1, description="Measurement count")


class QuantizerBoundParams(ConfigModel):
    """Coordinate value plus the quantizer it is measured against."""

    x_i: float = Field(..., ge=-1.0, le=1.0, description="Coordinate value")
    k: int = Field(..., ge=2, description="Interval count")
    x_inf: float = Field(default_factory=lambda: settings.DEFAULT_X_INF, ge=-1.0, le=1.0)
    x_sup: float = Field(default_factory=lambda: settings.DEFAULT_X_SUP, ge=-1.0, le=1.0)


class FailureProbabilityParams(QuantizerBoundParams):
    """Parameters of the per-dimension misrecovery bound."""

    q_star: int = Field(..., ge=1, description="Wrong candidate interval (1-based)")
    m: int = Field(..., ge=1, description="Measurement count")


class RecoveryMeasurementsParams(QuantizerBoundParams):
    """Parameters of the per-dimension measurement count."""

    eta: float = Field(..., gt=0.0, lt=1.0, description="Allowed failure probability")


class EmbeddingMeasurementsParams(ConfigModel):
    """Parameters of the binary epsilon-stable embedding measurement count."""

    K: int = Field(..., ge=0, description="Sparsity")
    n: int = Field(..., ge=1, description="Signal dimension")
    epsilon: float = Field(..., gt=0.0, lt=1.0, description="Embedding distortion")
    mu: float = Field(..., gt=0.0, lt=1.0, description="Allowed failure probability")


class DequantizerErrorParams(ConfigModel):
    """Parameters of the angular error bound after dequantization."""

    sigma: float = Field(..., ge=0.0, description="l2 norm of err_H + err_D")
    x_norm: float = Field(1.0, gt=0.0, description="l2 norm of the signal")
    gamma: float = Field(0.0, ge=0.0, description="Hamming error tail excess")
    epsilon: float = Field(0.0, ge=0.0, description="Embedding distortion")
