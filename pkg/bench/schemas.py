"""
Pydantic schemas for the bench package.

An ExperimentSpec is loaded from a JSON config file and validated here; the
runner only ever sees valid specs. TrialRecord is one result row and
CsvSummary describes a written CSV file.
"""
import math
from typing import List, Optional, Tuple, Union

from pydantic import Field, model_validator

from hcs.schemas import DequantizerConfig, QuantizerConfig
from shared.core.config import settings
from shared.schemas import (
    ConfigModel,
    DequantizeMode,
    ExperimentFamily,
    FrozenModel,
    RecoveryMethod,
)

GRID_KEY_SCALE = 1_000_000


# --- Spec Schemas ---

class GridAxes(ConfigModel):
    """Phase-grid axes expanded to their cartesian product."""

    k_over_n: List[float] = Field(..., min_length=1, description="Sparsity ratios K/n")
    m_over_n: List[float] = Field(..., min_length=1, description="Measurement ratios m/n")


class GridCell(FrozenModel):
    """
    One resolved grid cell.

    Attributes:
        coordinates: K/n and m/n for the phase grid, (m,) otherwise
        key: Integer spawn key derived from the coordinates
        m: Measurement count
        sparsity: K, or None for dense signals
    """

    coordinates: Tuple[float, ...] = Field(..., description="Grid coordinates as configured")
    key: Tuple[int, ...] = Field(..., description="Integer spawn key of the cell")
    m: int = Field(..., ge=1, description="Measurement count")
    sparsity: Optional[int] = Field(None, ge=1, description="Nonzero count K")


class ExperimentSpec(ConfigModel):
    """
    Experiment configuration.

    Attributes:
        family: phase-grid, error-vs-m or consistency
        n: Signal dimension
        k: Interval count of the HCS quantizer
        grid: (K/n, m/n) pairs for the phase grid, m values otherwise
        axes: Alternative to grid for the phase grid
        sparsity: K for error-vs-m and consistency; None draws dense signals
        trials_per_cell: Trials per grid cell
        snr: Optional input SNR in decibels (noisy case)
        master_seed: 64-bit seed every trial seed is derived from
        dequantizer: BIHT settings; enables the baseline (required for consistency)
        recovery_method: Argmin strategy of the HCS recovery
    """

    family: ExperimentFamily = Field(..., description="Experiment family")
    n: int = Field(..., ge=1, description="Signal dimension")
    k: int = Field(..., ge=2, description="Interval count")
    grid: List[Union[int, Tuple[float, float]]] = Field(default_factory=list, description="Grid cells")
    axes: Optional[GridAxes] = Field(None, description="Phase-grid axes")
    sparsity: Optional[int] = Field(None, ge=1, description="Sparsity K (m-sweeps)")
    x_inf: float = Field(default_factory=lambda: settings.DEFAULT_X_INF, description="Lower range bound")
    x_sup: float = Field(default_factory=lambda: settings.DEFAULT_X_SUP, description="Upper range bound")
    trials_per_cell: int = Field(5, ge=1, description="Trials per cell")
    snr: Optional[float] = Field(None, description="Input SNR in dB")
    master_seed: int = Field(0, ge=0, lt=2**64, description="Master seed")
    dequantizer: Optional[DequantizerConfig] = Field(None, description="BIHT settings")
    recovery_method: RecoveryMethod = Field(RecoveryMethod.SCAN, description="Argmin strategy")

    @model_validator(mode='after')
    def validate_spec(self) -> 'ExperimentSpec':
        QuantizerConfig(k=self.k, x_inf=self.x_inf, x_sup=self.x_sup)

        if self.family == ExperimentFamily.PHASE_GRID:
            if self.axes is not None and self.grid:
                raise ValueError("give either grid or axes, not both")
            if self.sparsity is not None:
                raise ValueError("phase-grid takes its sparsity from K/n; do not set sparsity")
            for cell in self.resolved_grid:
                if not isinstance(cell, tuple):
                    raise ValueError(f"phase-grid cells must be [K/n, m/n] pairs, got {cell!r}")
                k_ratio, m_ratio = cell
                if not 0.0 < k_ratio <= 1.0 or not m_ratio > 0.0:
                    raise ValueError(f"phase-grid cell {cell!r} needs 0 < K/n <= 1 and m/n > 0")
        else:
            if self.axes is not None:
                raise ValueError(f"axes are only valid for the {ExperimentFamily.PHASE_GRID.value} family")
            for cell in self.grid:
                if not isinstance(cell, int) or cell < 1:
                    raise ValueError(f"{self.family.value} cells must be positive measurement counts, got {cell!r}")
            if self.sparsity is not None and self.sparsity > self.n:
                raise ValueError(f"sparsity {self.sparsity} exceeds n={self.n}")

        if not self.resolved_grid:
            raise ValueError("grid must not be empty")
        if self.family == ExperimentFamily.CONSISTENCY and self.dequantizer is None:
            raise ValueError("the consistency family needs a dequantizer config")
        if self.snr is not None and not math.isfinite(self.snr):
            raise ValueError("snr must be finite")
        return self

    @property
    def resolved_grid(self) -> List[Union[int, Tuple[float, float]]]:
        """Grid cells, with axes expanded to their cartesian product."""
        if self.axes is not None:
            return [(a, b) for a in self.axes.k_over_n for b in self.axes.m_over_n]
        return list(self.grid)

    @property
    def quantizer_config(self) -> QuantizerConfig:
        return QuantizerConfig(k=self.k, x_inf=self.x_inf, x_sup=self.x_sup)

    def cells(self) -> List[GridCell]:
        """Resolve the grid into cells in configured order."""
        if self.family == ExperimentFamily.PHASE_GRID:
            return [
                GridCell(
                    coordinates=(k_ratio, m_ratio),
                    key=(round(k_ratio * GRID_KEY_SCALE), round(m_ratio * GRID_KEY_SCALE)),
                    m=max(1, round(m_ratio * self.n)),
                    sparsity=min(self.n, max(1, round(k_ratio * self.n))),
                )
                for k_ratio, m_ratio in self.resolved_grid
            ]
        return [
            GridCell(coordinates=(float(m),), key=(m,), m=m, sparsity=self.sparsity)
            for m in self.grid
        ]


# --- Result Schemas ---

class TrialRecord(FrozenModel):
    """
    One bench result row.

    Failed trials keep their coordinates and seed, carry the failure message
    and leave the metrics empty.
    """

    family: ExperimentFamily = Field(..., description="Experiment family")
    cell: Tuple[float, ...] = Field(..., description="Grid coordinates")
    trial_index: int = Field(..., ge=0, description="Trial index within the cell")
    m: int = Field(..., ge=1, description="Measurement count")
    sparsity: Optional[int] = Field(None, description="Nonzero count K (None for dense)")
    seed: int = Field(..., ge=0, lt=2**64, description="Derived trial seed")
    quantized_error: Optional[float] = Field(None, ge=0.0, lt=1.0, description="HCS quantized recovery error")
    elapsed_recovery: Optional[float] = Field(None, ge=0.0, description="HCS recovery wall time (s)")
    elapsed_baseline: Optional[float] = Field(None, ge=0.0, description="BIHT baseline wall time (s)")
    baseline_quantized_error: Optional[float] = Field(None, ge=0.0, lt=1.0,
                                                      description="BIHT + HCS quantizer error")
    hamming_error: Optional[float] = Field(None, ge=0.0, le=1.0, description="D_H(A(x), A(x*))")
    angular_error: Optional[float] = Field(None, ge=0.0, le=1.0, description="D_S(x, x*)")
    method: Optional[DequantizeMode] = Field(None, description="Dequantizer (consistency family)")
    realized_snr: Optional[float] = Field(None, description="Realized input SNR in dB")
    failure: Optional[str] = Field(None, description="Failure message of a recorded per-trial error")
    baseline_failure: Optional[str] = Field(None, description="Failure message of the BIHT baseline alone")

    @property
    def failed(self) -> bool:
        return self.failure is not None


class CsvSummary(FrozenModel):
    """Summary of a written CSV file."""

    path: str = Field(..., description="Destination path")
    row_count: int = Field(..., ge=0, description="Data rows (header excluded)")
    checksum: str = Field(..., description="SHA-256 of the file bytes")
    failed_trials: int = Field(0, ge=0, description="Rows recording a per-trial failure")
