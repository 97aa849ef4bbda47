"""
HCS quantizer construction and quantization.

The quantizer spaces k boundaries P_0 > ... > P_{k-1} uniformly in the
Bernoulli domain, between arccos(x_inf)/pi and arccos(x_sup)/pi. Each
interior signal-domain boundary S_j is the image, under the inverse of the
bijection x -> arccos(x)/pi, of the point between P_j and P_{j-1} where the
KL divergences to both are equal.
"""
import hashlib
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError
from scipy.special import expit, xlogy

from hcs.exceptions import (
    DomainError,
    IndexOutOfRangeError,
    InvalidConfigError,
    NumericFailureError,
    OutOfRangeError,
)
from hcs.measurement import Signal
from hcs.schemas import QuantizedSignalPayload, QuantizerConfig, QuantizerPayload
from shared.utils.logger import get_logger

logger = get_logger(__name__)

BOUNDARY_TOLERANCE = 1e-12


def bijection(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Map a coordinate value in [-1, 1] to Pr(s_i = -1) = arccos(x)/pi."""
    result = np.arccos(np.clip(x, -1.0, 1.0)) / np.pi
    return float(result) if np.ndim(result) == 0 else result


def _neg_entropy(t: np.ndarray) -> np.ndarray:
    # t log t + (1-t) log(1-t) with 0 log 0 = 0
    return xlogy(t, t) + xlogy(1.0 - t, 1.0 - t)


def log_f_ratio(p_minus: Union[float, np.ndarray], delta: float) -> Union[float, np.ndarray]:
    """
    Natural logarithm of f(p, delta).

    Raises:
        DomainError: If delta <= 0, p < 0 or p + delta > 1 beyond tolerance
    """
    if not delta > 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    p = np.asarray(p_minus, dtype=np.float64)
    if np.any(p < -BOUNDARY_TOLERANCE) or np.any(p + delta > 1.0 + BOUNDARY_TOLERANCE):
        raise DomainError(f"f is defined for 0 <= p and p + delta <= 1, got p={p_minus}, delta={delta}")
    p = np.clip(p, 0.0, 1.0)
    upper = np.clip(p + delta, 0.0, 1.0)
    result = (_neg_entropy(p) - _neg_entropy(upper)) / delta
    return float(result) if result.ndim == 0 else result


def f_ratio(p_minus: Union[float, np.ndarray], delta: float) -> Union[float, np.ndarray]:
    """
    Evaluate f(p, delta) = (p^p (1-p)^(1-p) / ((p+delta)^(p+delta) (1-p-delta)^(1-p-delta)))^(1/delta).

    Computed in log space with the convention 0^0 = 1.

    Args:
        p_minus: Lower Bernoulli boundary p, scalar or array
        delta: Bernoulli-domain interval

    Returns:
        Positive value(s) of f, strictly decreasing in p
    """
    result = np.exp(log_f_ratio(p_minus, delta))
    return float(result) if np.ndim(result) == 0 else result


def decision_point(p_minus: Union[float, np.ndarray], delta: float) -> Union[float, np.ndarray]:
    """
    Bernoulli-domain point 1/(1 + f(p, delta)) between p and p + delta.

    It is the p at which KL(p || .) and KL(p + delta || .) agree.
    """
    result = expit(-np.asarray(log_f_ratio(p_minus, delta)))
    return float(result) if np.ndim(result) == 0 else result


def quantizer_config(k: int, x_inf: Optional[float] = None, x_sup: Optional[float] = None) -> QuantizerConfig:
    """
    Validate quantizer parameters.

    Raises:
        InvalidConfigError: If k < 2 or the range violates -1 <= x_inf < x_sup <= 1
    """
    params = {"k": k}
    if x_inf is not None:
        params["x_inf"] = x_inf
    if x_sup is not None:
        params["x_sup"] = x_sup
    try:
        return QuantizerConfig(**params)
    except ValidationError as e:
        raise InvalidConfigError(f"invalid quantizer config: {e.errors()[0]['msg']}") from e


class HcsQuantizer:
    """
    k-bit HCS quantizer.

    Attributes:
        config (QuantizerConfig): Parameters the quantizer was built from
        delta (float): Bernoulli-domain interval
        p_boundaries (np.ndarray): P_0 .. P_{k-1}, strictly decreasing in [0, 1]
        s_boundaries (np.ndarray): S_0 .. S_k, strictly increasing in [x_inf, x_sup]
        bernoulli_boundaries (np.ndarray): k-1 decision points, the images of S_1 .. S_{k-1}
    """

    def __init__(self, config: QuantizerConfig, delta: float, p_boundaries: np.ndarray,
                 s_boundaries: np.ndarray, bernoulli_boundaries: np.ndarray):
        self.config = config
        self.delta = float(delta)
        for arr in (p_boundaries, s_boundaries, bernoulli_boundaries):
            arr.setflags(write=False)
        self.p_boundaries = p_boundaries
        self.s_boundaries = s_boundaries
        self.bernoulli_boundaries = bernoulli_boundaries

    @property
    def k(self) -> int:
        return self.config.k

    @property
    def x_inf(self) -> float:
        return self.config.x_inf

    @property
    def x_sup(self) -> float:
        return self.config.x_sup

    def midpoints(self) -> np.ndarray:
        """Midpoints of the k signal-domain intervals."""
        return (self.s_boundaries[:-1] + self.s_boundaries[1:]) / 2.0

    def to_payload(self) -> QuantizerPayload:
        return QuantizerPayload(
            k=self.k,
            x_inf=self.x_inf,
            x_sup=self.x_sup,
            delta=self.delta,
            p_boundaries=self.p_boundaries.tolist(),
            s_boundaries=self.s_boundaries.tolist(),
        )

    @cached_property
    def quantizer_id(self) -> str:
        """SHA-256 of the serialized quantizer."""
        return hashlib.sha256(self.to_payload().model_dump_json().encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"HcsQuantizer(k={self.k}, x_inf={self.x_inf}, x_sup={self.x_sup})"


class QuantizedSignal:
    """
    Vector of interval indices in 1..k.

    Attributes:
        indices (np.ndarray): Read-only int64 vector
        quantizer (HcsQuantizer): Quantizer the indices refer to
    """

    def __init__(self, indices: Union[np.ndarray, Sequence[int]], quantizer: HcsQuantizer):
        arr = np.array(indices, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise IndexOutOfRangeError(f"quantized signal must be a nonempty vector, got shape {arr.shape}")
        if np.any(arr < 1) or np.any(arr > quantizer.k):
            raise IndexOutOfRangeError(f"interval indices must lie in [1, {quantizer.k}]")
        arr.setflags(write=False)
        self.indices = arr
        self.quantizer = quantizer

    @property
    def n(self) -> int:
        return int(self.indices.size)

    @property
    def quantizer_id(self) -> str:
        return self.quantizer.quantizer_id

    def to_payload(self) -> QuantizedSignalPayload:
        return QuantizedSignalPayload(indices=self.indices.tolist(), quantizer_id=self.quantizer_id)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QuantizedSignal):
            return NotImplemented
        return self.quantizer_id == other.quantizer_id and bool(np.array_equal(self.indices, other.indices))

    def __repr__(self) -> str:
        return f"QuantizedSignal(n={self.n}, k={self.quantizer.k})"


def build_quantizer(config: QuantizerConfig) -> HcsQuantizer:
    """
    Construct the quantizer boundaries.

    Args:
        config: Validated quantizer parameters

    Returns:
        HcsQuantizer: delta, P_0..P_{k-1} and S_0..S_k

    Raises:
        NumericFailureError: If a boundary leaves its admissible range or S is not strictly increasing
    """
    k = config.k
    p_first = bijection(config.x_inf)
    p_last = bijection(config.x_sup)
    delta = (p_first - p_last) / (k - 1)
    p_boundaries = np.linspace(p_first, p_last, k)
    if np.any(p_boundaries < -BOUNDARY_TOLERANCE) or np.any(p_boundaries > 1.0 + BOUNDARY_TOLERANCE):
        raise NumericFailureError(f"Bernoulli boundaries left [0, 1] for {config}")
    p_boundaries = np.clip(p_boundaries, 0.0, 1.0)

    # Decision point j lies between P_j and P_{j-1} = P_j + delta.
    bernoulli_boundaries = np.atleast_1d(decision_point(p_boundaries[1:], delta))
    s_boundaries = np.empty(k + 1, dtype=np.float64)
    s_boundaries[0] = config.x_inf
    s_boundaries[-1] = config.x_sup
    s_boundaries[1:-1] = np.cos(np.pi * bernoulli_boundaries)
    if not np.all(np.diff(s_boundaries) > 0):
        raise NumericFailureError(f"signal-domain boundaries are not strictly increasing for {config}")

    logger.debug(f"Built quantizer k={k} on [{config.x_inf}, {config.x_sup}], delta={delta:.6g}")
    return HcsQuantizer(config, delta, p_boundaries, s_boundaries, bernoulli_boundaries)


def quantize(x: Union[Signal, np.ndarray, Sequence[float]], quantizer: HcsQuantizer) -> QuantizedSignal:
    """
    Quantize every coordinate to the interval [S_{j-1}, S_j) containing it.

    The last interval is closed, so x_i = x_sup maps to k.

    Raises:
        OutOfRangeError: If an entry lies outside [x_inf, x_sup]; names the 1-based index
    """
    values = x.values if isinstance(x, Signal) else np.atleast_1d(np.asarray(x, dtype=np.float64))
    outside = (values < quantizer.x_inf) | (values > quantizer.x_sup) | np.isnan(values)
    if np.any(outside):
        index = int(np.flatnonzero(outside)[0]) + 1
        raise OutOfRangeError(
            f"entry {index} = {values[index - 1]!r} is outside the quantizer range "
            f"[{quantizer.x_inf}, {quantizer.x_sup}]",
            index=index,
        )
    indices = np.searchsorted(quantizer.s_boundaries[1:-1], values, side="right") + 1
    return QuantizedSignal(indices, quantizer)


def interval_bounds(quantizer: HcsQuantizer, q: int) -> Tuple[float, float]:
    """
    Return (S_{q-1}, S_q) for a 1-based interval index.

    Raises:
        IndexOutOfRangeError: If q is outside [1, k]
    """
    if not 1 <= q <= quantizer.k:
        raise IndexOutOfRangeError(f"interval index must be in [1, {quantizer.k}], got {q}")
    return float(quantizer.s_boundaries[q - 1]), float(quantizer.s_boundaries[q])


def max_interval_width(quantizer: HcsQuantizer) -> float:
    """Largest distance between neighboring signal-domain boundaries."""
    return float(np.max(np.diff(quantizer.s_boundaries)))
