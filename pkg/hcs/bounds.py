"""
Closed-form bounds for experiment design and verification.

All logarithms are natural; counts are ceilings with a floor of 1. The
decision points and the bijection come from hcs.quantizer so that bounds and
recovery share one implementation of f.
"""
import math
from typing import Callable, Dict, NamedTuple, Type

import numpy as np
from pydantic import BaseModel, ValidationError

from hcs.exceptions import (
    DegeneratePositionError,
    DomainError,
    IndexOutOfRangeError,
    InvalidCandidateError,
    InvalidConfigError,
    OutOfRangeError,
)
from hcs.quantizer import (
    BOUNDARY_TOLERANCE,
    HcsQuantizer,
    bijection,
    build_quantizer,
    quantize,
    quantizer_config,
)
from hcs.schemas import (
    BoundReport,
    ConsistencyParams,
    ConsistencyTailParams,
    DequantizerErrorParams,
    EmbeddingMeasurementsParams,
    FailureProbabilityParams,
    QuantizerBoundParams,
    RecoveryMeasurementsParams,
)
from shared.schemas import BoundInterpretation
from shared.utils.logger import get_logger

logger = get_logger(__name__)


# --- Consistency ---

def consistency_bound(sigma: float, x_norm: float) -> float:
    """
    Expected normalized Hamming error g = sigma / (2 sqrt(||x||^2 + sigma^2)).

    Args:
        sigma: l2 norm of the perturbation of x
        x_norm: l2 norm of x

    Raises:
        DomainError: If x_norm <= 0 or sigma < 0
    """
    if not x_norm > 0:
        raise DomainError(f"x_norm must be positive, got {x_norm}")
    if sigma < 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    if math.isinf(sigma):
        return 0.5
    return sigma / (2.0 * math.hypot(x_norm, sigma))


def consistency_bound_loose(sigma: float, x_norm: float) -> float:
    """Looser form sigma / (2 ||x||) of consistency_bound."""
    if not x_norm > 0:
        raise DomainError(f"x_norm must be positive, got {x_norm}")
    return sigma / (2.0 * x_norm)


def consistency_tail(g: float, gamma: float, m: int) -> float:
    """
    Probability bound exp(-2 m gamma^2) on the Hamming error exceeding g + gamma.

    g does not enter the value; it names the level the tail is measured from.
    """
    if not gamma > 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    return math.exp(-2.0 * m * gamma * gamma)


# --- Quantized recovery ---

def _true_interval(x_i: float, quantizer: HcsQuantizer) -> int:
    return int(quantize(np.array([x_i]), quantizer).indices[0])


def failure_probability_bound(x_i: float, quantizer: HcsQuantizer, q_star_candidate: int, m: int) -> float:
    """
    Bound on recovering the wrong interval q* for a coordinate in interval q.

    Uses the decision point on the edge of interval q* facing x_i: S_{q*} when
    q > q*, S_{q*-1} when q < q*. The value is
    (1/2) exp(-2 m (b - arccos(x_i)/pi)^2) with b that edge's Bernoulli image.

    Args:
        x_i: Coordinate value inside the quantizer range
        quantizer: Quantizer defining the intervals
        q_star_candidate: Wrong interval index (1-based)
        m: Measurement count

    Raises:
        InvalidCandidateError: If q_star_candidate is the true interval
        IndexOutOfRangeError: If q_star_candidate is outside [1, k]
        OutOfRangeError: If x_i is outside the quantizer range
    """
    if not 1 <= q_star_candidate <= quantizer.k:
        raise IndexOutOfRangeError(f"candidate interval must be in [1, {quantizer.k}], got {q_star_candidate}")
    if m < 1:
        raise DomainError(f"m must be at least 1, got {m}")
    q = _true_interval(x_i, quantizer)
    if q == q_star_candidate:
        raise InvalidCandidateError(f"candidate {q_star_candidate} is the true interval of x_i={x_i}")
    # bernoulli_boundaries[j - 1] is the image of S_j
    edge = q_star_candidate if q > q_star_candidate else q_star_candidate - 1
    gap = quantizer.bernoulli_boundaries[edge - 1] - bijection(x_i)
    return 0.5 * math.exp(-2.0 * m * gap * gap)


def failure_probability_total(x_i: float, quantizer: HcsQuantizer, m: int) -> float:
    """Sum of failure_probability_bound over every wrong candidate, capped at 1."""
    q = _true_interval(x_i, quantizer)
    total = sum(
        failure_probability_bound(x_i, quantizer, candidate, m)
        for candidate in range(1, quantizer.k + 1)
        if candidate != q
    )
    return min(1.0, total)


def recovery_gaps(values: np.ndarray, quantizer: HcsQuantizer) -> np.ndarray:
    """
    Squared Bernoulli-domain distance of each coordinate to its nearest decision point.

    Only the decision points bounding the coordinate's own interval count;
    the extreme intervals have a single neighbor.

    Raises:
        DegeneratePositionError: If a coordinate sits on a decision point
    """
    values = np.atleast_1d(np.asarray(values, dtype=np.float64))
    q = quantize(values, quantizer).indices
    p = np.atleast_1d(bijection(values))
    b = quantizer.bernoulli_boundaries
    k = quantizer.k

    gaps = np.full(values.size, np.inf)
    lower = q >= 2
    gaps[lower] = (b[q[lower] - 2] - p[lower]) ** 2
    upper = q <= k - 1
    gaps[upper] = np.minimum(gaps[upper], (b[q[upper] - 1] - p[upper]) ** 2)

    degenerate = np.flatnonzero(np.sqrt(gaps) <= BOUNDARY_TOLERANCE)
    if degenerate.size:
        index = int(degenerate[0])
        raise DegeneratePositionError(
            f"entry {index + 1} = {values[index]!r} lies on a decision boundary; no measurement count suffices"
        )
    return gaps


def measurements_for_gap(delta: float, eta: float, n: int = 1) -> int:
    """
    Smallest m with n * (1/2) exp(-2 m delta) <= eta, at least 1.

    Args:
        delta: Squared Bernoulli-domain gap
        eta: Allowed failure probability in (0, 1)
        n: Number of dimensions sharing the failure budget
    """
    if not delta > 0:
        raise DegeneratePositionError(f"gap must be positive, got {delta}")
    if not 0 < eta < 1:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    return max(1, math.ceil(math.log(n / (2.0 * eta)) / (2.0 * delta)))


def recovery_measurements(x_i: float, quantizer: HcsQuantizer, eta: float) -> int:
    """
    Measurements that recover the interval of x_i with probability at least 1 - eta.

    Raises:
        DegeneratePositionError: If x_i sits on a decision boundary
    """
    delta = float(recovery_gaps(np.array([x_i]), quantizer)[0])
    return measurements_for_gap(delta, eta)


def recovery_measurements_for_signal(x: np.ndarray, quantizer: HcsQuantizer, eta: float) -> int:
    """Measurements that recover every interval of x with probability at least 1 - eta."""
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    gaps = recovery_gaps(values, quantizer)
    return measurements_for_gap(float(gaps.min()), eta, n=values.size)


# --- Embedding & dequantization ---

def embedding_measurements(K: int, n: int, epsilon: float, mu: float) -> int:
    """
    Measurements for a binary epsilon-stable embedding of K-sparse signals.

    ceil((4 / epsilon^2) (K ln n + 2 K ln(50 / epsilon) + ln(2 / mu)))
    """
    if K < 0 or n < 1:
        raise DomainError(f"need K >= 0 and n >= 1, got K={K}, n={n}")
    if not 0 < epsilon < 1 or not 0 < mu < 1:
        raise DomainError(f"epsilon and mu must lie in (0, 1), got {epsilon}, {mu}")
    total = K * math.log(n) + 2 * K * math.log(50.0 / epsilon) + math.log(2.0 / mu)
    return max(1, math.ceil(4.0 / (epsilon * epsilon) * total))


def dequantizer_error_bound(sigma: float, x_norm: float, gamma: float, epsilon: float) -> float:
    """Upper bound sigma / (2 ||x||) + gamma + epsilon on the angular error of x*."""
    if not x_norm > 0:
        raise DomainError(f"x_norm must be positive, got {x_norm}")
    if min(sigma, gamma, epsilon) < 0:
        raise DomainError("sigma, gamma and epsilon must be non-negative")
    return sigma / (2.0 * x_norm) + gamma + epsilon


# --- Registry ---

def _quantizer_for(params: QuantizerBoundParams) -> HcsQuantizer:
    return build_quantizer(quantizer_config(params.k, params.x_inf, params.x_sup))


class BoundEntry(NamedTuple):
    params: Type[BaseModel]
    evaluate: Callable[[BaseModel], float]
    interpretation: BoundInterpretation


# Bound registry mapping names to parameter schemas and evaluators
BOUND_REGISTRY: Dict[str, BoundEntry] = {
    "consistency": BoundEntry(
        ConsistencyParams,
        lambda p: consistency_bound(p.sigma, p.x_norm),
        BoundInterpretation.PROBABILITY,
    ),
    "consistency-tail": BoundEntry(
        ConsistencyTailParams,
        lambda p: consistency_tail(p.g, p.gamma, p.m),
        BoundInterpretation.PROBABILITY,
    ),
    "failure-probability": BoundEntry(
        FailureProbabilityParams,
        lambda p: failure_probability_bound(p.x_i, _quantizer_for(p), p.q_star, p.m),
        BoundInterpretation.PROBABILITY,
    ),
    "recovery-measurements": BoundEntry(
        RecoveryMeasurementsParams,
        lambda p: recovery_measurements(p.x_i, _quantizer_for(p), p.eta),
        BoundInterpretation.COUNT,
    ),
    "embedding-measurements": BoundEntry(
        EmbeddingMeasurementsParams,
        lambda p: embedding_measurements(p.K, p.n, p.epsilon, p.mu),
        BoundInterpretation.COUNT,
    ),
    "dequantizer-error": BoundEntry(
        DequantizerErrorParams,
        lambda p: dequantizer_error_bound(p.sigma, p.x_norm, p.gamma, p.epsilon),
        BoundInterpretation.DISTANCE,
    ),
}


def evaluate_bound(name: str, **params) -> BoundReport:
    """
    Evaluate a registered bound by name.

    Args:
        name: Key of BOUND_REGISTRY
        **params: Parameters validated against the bound's schema

    Returns:
        BoundReport: name, validated inputs, value and interpretation

    Raises:
        InvalidConfigError: If the name is unknown or a parameter is out of range
    """
    entry = BOUND_REGISTRY.get(name)
    if entry is None:
        raise InvalidConfigError(f"unknown bound '{name}'; expected one of {', '.join(BOUND_REGISTRY)}")
    try:
        validated = entry.params(**params)
    except ValidationError as e:
        raise InvalidConfigError(f"invalid parameters for bound '{name}': {e.errors()[0]['msg']}") from e

    try:
        value = entry.evaluate(validated)
    except OutOfRangeError as e:
        raise InvalidConfigError(f"invalid parameters for bound '{name}': {e.message}") from e
    logger.debug(f"Evaluated bound {name} = {value!r}")
    return BoundReport(
        name=name,
        inputs=validated.model_dump(),
        value=float(value),
        interpretation=entry.interpretation,
    )
