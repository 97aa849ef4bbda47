"""
Quantized recovery by KL-divergence nearest neighbor.

For each dimension the estimated Bernoulli distribution is compared with the
k boundary distributions P_0..P_{k-1}; the recovered interval is one plus the
index of the nearest boundary. The reference path scans all n*k divergences.
The descent path walks j upward while the divergence keeps dropping, which
finds the same argmin because D(P_j || q) is unimodal in j.
"""
import time
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import rel_entr

from hcs.exceptions import DimensionMismatchError, MismatchedQuantizerError
from hcs.measurement import MeasurementEnsemble, OneBitMeasurements, estimate_minus_counts
from hcs.quantizer import HcsQuantizer, QuantizedSignal, max_interval_width
from hcs.schemas import BernoulliEstimate, RecoveryPayload
from shared.schemas import RecoveryMethod
from shared.utils.logger import get_logger

logger = get_logger(__name__)

BernoulliLike = Union[float, BernoulliEstimate]


def _p_minus(value: BernoulliLike) -> float:
    return value.p_minus if isinstance(value, BernoulliEstimate) else float(value)


def _bernoulli_kl(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    # rel_entr gives 0 log(0/q) = 0 and t log(t/0) = inf for t > 0
    return rel_entr(p, q) + rel_entr(1.0 - p, 1.0 - q)


def kl_divergence(p: BernoulliLike, q_hat: BernoulliLike) -> float:
    """
    KL divergence D(p || q_hat) between two Bernoulli distributions, natural log.

    Args:
        p: Boundary distribution, given by its p_minus
        q_hat: Estimated distribution, given by its p_minus

    Returns:
        float: Non-negative divergence, possibly +inf
    """
    return float(_bernoulli_kl(np.float64(_p_minus(p)), np.float64(_p_minus(q_hat))))


def kl_table(p_boundaries: np.ndarray, q_minus: np.ndarray) -> np.ndarray:
    """
    Divergences D(P_j || q_i) for every dimension i and boundary j.

    Returns:
        np.ndarray: n x k matrix
    """
    q = np.asarray(q_minus, dtype=np.float64)[:, None]
    return _bernoulli_kl(np.asarray(p_boundaries, dtype=np.float64)[None, :], q)


@dataclass(frozen=True)
class RecoveryResult:
    """
    Output of recover.

    Attributes:
        q_star: Recovered quantization
        kl_evaluations: Number of KL divergences evaluated (n*k for the scan)
        elapsed: Wall time of estimation plus argmin, in seconds
        method: Argmin strategy used
    """

    q_star: QuantizedSignal
    kl_evaluations: int
    elapsed: float
    method: RecoveryMethod = RecoveryMethod.SCAN

    def to_payload(self) -> RecoveryPayload:
        return RecoveryPayload(
            q_star=self.q_star.to_payload(),
            kl_evaluations=self.kl_evaluations,
            elapsed=self.elapsed,
            method=self.method,
        )


def _scan_argmin(p_boundaries: np.ndarray, q_minus: np.ndarray) -> Tuple[np.ndarray, int]:
    table = kl_table(p_boundaries, q_minus)
    # np.argmin returns the first minimum, so the smallest j wins ties
    return np.argmin(table, axis=1), int(table.size)


def _descent_argmin(p_boundaries: np.ndarray, q_minus: np.ndarray) -> Tuple[np.ndarray, int]:
    k = p_boundaries.size
    n = q_minus.size
    idx = np.zeros(n, dtype=np.int64)
    current = _bernoulli_kl(np.full(n, p_boundaries[0]), q_minus)
    evaluations = n

    # D(P_0 || q) is infinite only for q = 0 (or q = 1 with P_0 < 1); then the
    # last boundary is the only one that can be finite.
    blocked = np.flatnonzero(np.isinf(current))
    if blocked.size:
        last = _bernoulli_kl(np.full(blocked.size, p_boundaries[-1]), q_minus[blocked])
        evaluations += blocked.size
        finite = np.isfinite(last)
        idx[blocked[finite]] = k - 1
        current[blocked[finite]] = last[finite]

    active = np.flatnonzero(np.isfinite(current) & (idx < k - 1))
    while active.size:
        following = _bernoulli_kl(p_boundaries[idx[active] + 1], q_minus[active])
        evaluations += active.size
        better = following < current[active]
        moved = active[better]
        idx[moved] += 1
        current[moved] = following[better]
        active = moved[idx[moved] < k - 1]
    return idx, evaluations


_ARGMIN_STRATEGIES = {
    RecoveryMethod.SCAN: _scan_argmin,
    RecoveryMethod.DESCENT: _descent_argmin,
}


def recover(y: OneBitMeasurements, ensemble: MeasurementEnsemble, quantizer: HcsQuantizer,
            method: RecoveryMethod = RecoveryMethod.SCAN) -> RecoveryResult:
    """
    Recover the k-bit quantization of x from its 1-bit measurements.

    q*_i = 1 + argmin_j D(P_j || P_hat_i), ties broken toward the smallest j.

    Args:
        y: Measurements A(x)
        ensemble: Ensemble that produced y
        quantizer: Quantizer whose boundaries define the candidates
        method: SCAN evaluates all n*k divergences, DESCENT stops at the first increase

    Returns:
        RecoveryResult: q*, KL evaluation count and elapsed time

    Raises:
        DimensionMismatchError: If y and the ensemble disagree on m
    """
    method = RecoveryMethod(method)
    start = time.perf_counter()
    q_minus = estimate_minus_counts(y, ensemble) / y.m
    idx, evaluations = _ARGMIN_STRATEGIES[method](quantizer.p_boundaries, q_minus)
    q_star = QuantizedSignal(idx + 1, quantizer)
    elapsed = time.perf_counter() - start
    logger.debug(
        f"Recovered n={ensemble.n} dims from m={y.m} bits with {method.value}: "
        f"{evaluations} KL evaluations in {elapsed:.4f}s"
    )
    return RecoveryResult(q_star=q_star, kl_evaluations=evaluations, elapsed=elapsed, method=method)


def _check_comparable(q: QuantizedSignal, q_star: QuantizedSignal) -> None:
    if q.quantizer_id != q_star.quantizer_id:
        raise MismatchedQuantizerError("quantized signals were produced by different quantizers")
    if q.n != q_star.n:
        raise DimensionMismatchError(f"quantized signals have lengths {q.n} and {q_star.n}")


def quantized_error(q: QuantizedSignal, q_star: QuantizedSignal) -> float:
    """
    Average quantized recovery error sum_i |q_i - q*_i| / (n k).

    Raises:
        MismatchedQuantizerError: If the two signals use different quantizers
        DimensionMismatchError: If their lengths differ
    """
    _check_comparable(q, q_star)
    total = int(np.abs(q.indices - q_star.indices).sum())
    return total / (q.n * q.quantizer.k)


def err_h_bound(q: QuantizedSignal, q_star: QuantizedSignal, quantizer: HcsQuantizer) -> np.ndarray:
    """
    Per-dimension bound on the signal-domain error caused by misrecovery.

    Zero for q_i = q*_i and for adjacent intervals, (|q_i - q*_i| - 1) * max width otherwise.
    """
    _check_comparable(q, q_star)
    if q.quantizer_id != quantizer.quantizer_id:
        raise MismatchedQuantizerError("quantized signals were produced by a different quantizer")
    gaps = np.abs(q.indices - q_star.indices)
    return np.where(gaps == 0, 0.0, (gaps - 1) * max_interval_width(quantizer))
