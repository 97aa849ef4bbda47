"""
Dequantizers: real-valued unit-norm signals from quantized recoveries.

Three paths are provided. The midpoint rule takes the center of each
recovered interval. BIHT (binary iterative hard thresholding) recovers x from
the signs alone. Box-constrained BIHT additionally clamps every iterate into
the recovered intervals. All of them normalize exactly once, at the end.
"""
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from hcs.exceptions import (
    DimensionMismatchError,
    InvalidConfigError,
    LengthMismatchError,
    MismatchedQuantizerError,
    ZeroVectorError,
)
from hcs.measurement import MeasurementEnsemble, OneBitMeasurements, Signal, signs
from hcs.quantizer import HcsQuantizer, QuantizedSignal
from hcs.schemas import DequantizedPayload, DequantizerConfig
from shared.utils.logger import get_logger

logger = get_logger(__name__)

ZERO_NORM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BoxConstraint:
    """
    Per-coordinate intervals [low_i, high_i] taken from a quantized recovery.
    """

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self):
        if self.low.shape != self.high.shape or self.low.ndim != 1:
            raise DimensionMismatchError(
                f"box bounds must be vectors of equal length, got {self.low.shape} and {self.high.shape}"
            )
        if not np.all(self.low < self.high):
            raise InvalidConfigError("box constraint needs low_i < high_i in every coordinate")

    @property
    def n(self) -> int:
        return int(self.low.size)

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.all((x >= self.low) & (x <= self.high)))


@dataclass(frozen=True)
class DequantizedSignal:
    """
    Unit-norm dequantized signal.

    Attributes:
        values: Unit-norm entries
        iterations_used: BIHT rounds performed (0 for the midpoint rule)
        hamming_error_trace: D_H of the initial iterate followed by one value per round
    """

    values: np.ndarray
    iterations_used: int = 0
    hamming_error_trace: Tuple[float, ...] = ()

    @property
    def n(self) -> int:
        return int(self.values.size)

    def as_signal(self) -> Signal:
        return Signal(self.values)

    def to_payload(self) -> DequantizedPayload:
        return DequantizedPayload(
            values=self.values.tolist(),
            iterations_used=self.iterations_used,
            hamming_error_trace=list(self.hamming_error_trace),
        )


def dequantizer_config(**params) -> DequantizerConfig:
    """
    Validate BIHT parameters.

    Raises:
        InvalidConfigError: If a parameter is out of range
    """
    try:
        return DequantizerConfig(**params)
    except ValidationError as e:
        raise InvalidConfigError(f"invalid dequantizer config: {e.errors()[0]['msg']}") from e


def _normalized(values: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(values))
    if norm < ZERO_NORM_TOLERANCE:
        raise ZeroVectorError()
    return values / norm


def _check_quantizer(q_star: QuantizedSignal, quantizer: HcsQuantizer) -> None:
    if q_star.quantizer_id != quantizer.quantizer_id:
        raise MismatchedQuantizerError("quantized signal was produced by a different quantizer")


def midpoint_dequantize(q_star: QuantizedSignal, quantizer: HcsQuantizer) -> DequantizedSignal:
    """
    Replace each interval index by its interval midpoint and normalize.

    Raises:
        ZeroVectorError: If every midpoint is zero
    """
    _check_quantizer(q_star, quantizer)
    midpoints = quantizer.midpoints()[q_star.indices - 1]
    return DequantizedSignal(values=_normalized(midpoints))


def box_from_recovery(q_star: QuantizedSignal, quantizer: HcsQuantizer) -> BoxConstraint:
    """Box with low_i = S_{q*_i - 1} and high_i = S_{q*_i}."""
    _check_quantizer(q_star, quantizer)
    s = quantizer.s_boundaries
    return BoxConstraint(low=s[q_star.indices - 1], high=s[q_star.indices])


def project_box(x: np.ndarray, box: BoxConstraint) -> np.ndarray:
    """Clamp every coordinate into its interval (median of low_i, x_i, high_i)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != box.low.shape:
        raise DimensionMismatchError(f"vector of length {x.size} projected on a box of dimension {box.n}")
    return np.clip(x, box.low, box.high)


def hard_threshold(x: np.ndarray, sparsity: Optional[int]) -> np.ndarray:
    """
    Keep the K largest-magnitude entries and zero the rest.

    Ties on magnitude go to the smaller index. None keeps everything.
    """
    if sparsity is None or sparsity >= x.size:
        return x.copy()
    order = np.argsort(-np.abs(x), kind="stable")
    result = np.zeros_like(x)
    keep = order[:sparsity]
    result[keep] = x[keep]
    return result


def iterate_biht(y: OneBitMeasurements, ensemble: MeasurementEnsemble, config: DequantizerConfig,
                 box: Optional[BoxConstraint] = None,
                 initial: Optional[np.ndarray] = None) -> Iterator[Tuple[np.ndarray, float]]:
    """
    Yield BIHT iterates with their normalized Hamming error.

    The first item is the initial iterate (Phi^T y normalized unless given);
    each following item is one round
    x <- H_K(x + (tau/2) Phi^T (y - sign(Phi x))). With a box, every item
    including the first is projected on it.
    Iterates are not normalized. The generator is infinite.

    Raises:
        DimensionMismatchError: If y, the ensemble, the box or the initial iterate disagree
    """
    if y.m != ensemble.m:
        raise DimensionMismatchError(f"{y.m} measurements given for an ensemble with m={ensemble.m} rows")
    if box is not None and box.n != ensemble.n:
        raise DimensionMismatchError(f"box of dimension {box.n} for an ensemble with n={ensemble.n}")

    phi = ensemble.matrix
    bits = y.bits.astype(np.float64)
    tau = config.step_size if config.step_size is not None else 1.0 / ensemble.m

    if initial is None:
        x = _normalized(phi.T @ bits)
    else:
        x = np.array(initial, dtype=np.float64)
        if x.shape != (ensemble.n,):
            raise DimensionMismatchError(f"initial iterate has shape {x.shape}, expected ({ensemble.n},)")
    if box is not None:
        x = project_box(x, box)

    while True:
        residual = bits - signs(phi @ x)
        yield x, float(np.count_nonzero(residual)) / ensemble.m
        x = hard_threshold(x + (tau / 2.0) * (phi.T @ residual), config.sparsity)
        if box is not None:
            x = project_box(x, box)


def biht(y: OneBitMeasurements, ensemble: MeasurementEnsemble, config: DequantizerConfig,
         box: Optional[BoxConstraint] = None, initial: Optional[np.ndarray] = None) -> DequantizedSignal:
    """
    Binary iterative hard thresholding, optionally box-constrained.

    Runs until the Hamming error reaches config.tolerance or max_iterations
    rounds are done; running out of rounds is not an error.

    Args:
        y: Measurements to be consistent with
        ensemble: Ensemble that produced y
        config: Iteration cap, step size, sparsity and stop level
        box: Optional per-coordinate intervals from a quantized recovery
        initial: Optional initial iterate

    Returns:
        DequantizedSignal: Final iterate normalized, with the Hamming error trace

    Raises:
        ZeroVectorError: If the final iterate is zero
    """
    trace = []
    x = None
    for t, (x, hamming) in enumerate(iterate_biht(y, ensemble, config, box=box, initial=initial)):
        trace.append(hamming)
        if hamming <= config.tolerance or t >= config.max_iterations:
            break

    iterations = len(trace) - 1
    reason = "consistent" if trace[-1] <= config.tolerance else "iteration cap"
    logger.debug(
        f"BIHT{' (box)' if box is not None else ''} stopped after {iterations} rounds "
        f"({reason}), D_H {trace[0]:.4f} -> {trace[-1]:.4f}"
    )
    return DequantizedSignal(values=_normalized(x), iterations_used=iterations,
                             hamming_error_trace=tuple(trace))


def _unit_values(x: Union[Signal, DequantizedSignal, np.ndarray]) -> np.ndarray:
    if isinstance(x, (Signal, DequantizedSignal)):
        return x.values
    return np.asarray(x, dtype=np.float64)


def angular_error(x: Union[Signal, np.ndarray], x_star: Union[DequantizedSignal, Signal, np.ndarray]) -> float:
    """Angular distance arccos(<x, x*>)/pi with the inner product clamped to [-1, 1]."""
    u = _unit_values(x)
    v = _unit_values(x_star)
    if u.shape != v.shape:
        raise DimensionMismatchError(f"vectors have lengths {u.size} and {v.size}")
    return float(np.arccos(np.clip(np.dot(u, v), -1.0, 1.0)) / np.pi)


def hamming_distance(u: OneBitMeasurements, v: OneBitMeasurements) -> float:
    """
    Fraction of positions where two sign vectors disagree.

    Raises:
        LengthMismatchError: If the lengths differ
    """
    if u.m != v.m:
        raise LengthMismatchError(f"measurement vectors have lengths {u.m} and {v.m}")
    return float(np.count_nonzero(u.bits != v.bits)) / u.m
