"""
1-bit measurement operator and per-dimension Bernoulli estimation.

An ensemble is an m x n matrix of i.i.d. standard-normal entries drawn
row-major from a Philox generator seeded with a 64-bit integer, so the
(n, m, seed) triple regenerates it bit-exactly on any platform and the first
m' rows of an ensemble equal the ensemble generated with m' rows.

Rows are left unnormalized: sign(<x, phi>) does not depend on the scale of
phi. Zero projections and exactly-zero matrix entries both map to +1.
"""
from typing import List, Optional, Sequence, Union

import numpy as np

from hcs.exceptions import (
    DimensionMismatchError,
    IndexOutOfRangeError,
    InvalidConfigError,
    InvalidDimensionError,
    InvalidSignalError,
)
from hcs.schemas import BernoulliEstimate, EnsembleRef, MeasurementsPayload, SignalPayload
from shared.utils.logger import get_logger

logger = get_logger(__name__)

UNIT_NORM_TOLERANCE = 1e-9

ArrayLike = Union[np.ndarray, Sequence[float]]


def signs(values: np.ndarray) -> np.ndarray:
    """Element-wise sign over {-1, +1} with zero mapped to +1."""
    return np.where(values >= 0, 1, -1).astype(np.int8)


class Signal:
    """
    Real vector on the unit l2 sphere.

    Attributes:
        values (np.ndarray): Read-only float64 entries
        sparsity_hint (Optional[int]): Maximum number of nonzero entries
    """

    def __init__(self, values: ArrayLike, sparsity_hint: Optional[int] = None):
        arr = np.array(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDimensionError(f"signal must be a nonempty vector, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidSignalError("signal entries must be finite")
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > UNIT_NORM_TOLERANCE:
            raise InvalidSignalError(f"signal must have unit l2 norm, got {norm!r}")
        if sparsity_hint is not None:
            if sparsity_hint < 0:
                raise InvalidSignalError(f"sparsity hint must be non-negative, got {sparsity_hint}")
            nonzero = int(np.count_nonzero(arr))
            if nonzero > sparsity_hint:
                raise InvalidSignalError(
                    f"signal has {nonzero} nonzero entries, more than its sparsity hint {sparsity_hint}"
                )
        arr.setflags(write=False)
        self.values = arr
        self.sparsity_hint = sparsity_hint

    @classmethod
    def from_values(cls, values: ArrayLike, sparsity_hint: Optional[int] = None,
                    normalize: bool = True) -> "Signal":
        """
        Build a signal, optionally scaling the values to unit norm first.

        Raises:
            InvalidSignalError: If normalization is requested for a zero vector
        """
        arr = np.asarray(values, dtype=np.float64)
        if normalize:
            norm = np.linalg.norm(arr)
            if norm == 0.0:
                raise InvalidSignalError("cannot normalize a zero vector")
            arr = arr / norm
        return cls(arr, sparsity_hint=sparsity_hint)

    @classmethod
    def from_payload(cls, payload: SignalPayload) -> "Signal":
        return cls(payload.values, sparsity_hint=payload.sparsity_hint)

    @property
    def n(self) -> int:
        return int(self.values.size)

    def to_payload(self) -> SignalPayload:
        return SignalPayload(values=self.values.tolist(), sparsity_hint=self.sparsity_hint)

    def __repr__(self) -> str:
        return f"Signal(n={self.n}, sparsity_hint={self.sparsity_hint})"


class MeasurementEnsemble:
    """
    Gaussian projection matrix with its column-sign cache.

    The ensemble is immutable after construction and safe to share between
    threads.

    Attributes:
        matrix (np.ndarray): Read-only m x n standard-normal matrix
        sign_cache (np.ndarray): Read-only int8 matrix of sign(matrix) over {-1, +1}
        seed (int): Generator seed
    """

    def __init__(self, matrix: np.ndarray, seed: int):
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise InvalidDimensionError(f"ensemble matrix must be m x n with m, n >= 1, got {matrix.shape}")
        matrix.setflags(write=False)
        self.matrix = matrix
        self.seed = seed
        self.sign_cache = signs(matrix)
        self.sign_cache.setflags(write=False)

    @property
    def m(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def n(self) -> int:
        return int(self.matrix.shape[1])

    def prefix(self, m: int) -> "MeasurementEnsemble":
        """
        Return the ensemble made of the first m rows.

        Raises:
            InvalidDimensionError: If m is not in [1, self.m]
        """
        if not 1 <= m <= self.m:
            raise InvalidDimensionError(f"prefix length must be in [1, {self.m}], got {m}")
        return MeasurementEnsemble(self.matrix[:m], self.seed)

    def to_ref(self) -> EnsembleRef:
        return EnsembleRef(n=self.n, m=self.m, seed=self.seed)

    def __repr__(self) -> str:
        return f"MeasurementEnsemble(n={self.n}, m={self.m}, seed={self.seed})"


class OneBitMeasurements:
    """
    Length-m vector of signs over {-1, +1}.

    Attributes:
        bits (np.ndarray): Read-only int8 vector
    """

    def __init__(self, bits: ArrayLike):
        arr = np.array(bits)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDimensionError(f"measurements must be a nonempty vector, got shape {arr.shape}")
        if not np.all((arr == 1) | (arr == -1)):
            raise InvalidSignalError("measurement bits must be -1 or +1")
        arr = arr.astype(np.int8)
        arr.setflags(write=False)
        self.bits = arr

    @classmethod
    def from_payload(cls, payload: MeasurementsPayload) -> "OneBitMeasurements":
        return cls(payload.bits)

    @property
    def m(self) -> int:
        return int(self.bits.size)

    def prefix(self, m: int) -> "OneBitMeasurements":
        if not 1 <= m <= self.m:
            raise InvalidDimensionError(f"prefix length must be in [1, {self.m}], got {m}")
        return OneBitMeasurements(self.bits[:m])

    def to_payload(self, ensemble: Optional[MeasurementEnsemble] = None) -> MeasurementsPayload:
        return MeasurementsPayload(
            bits=self.bits.tolist(),
            ensemble=ensemble.to_ref() if ensemble is not None else None,
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OneBitMeasurements):
            return NotImplemented
        return bool(np.array_equal(self.bits, other.bits))

    def __repr__(self) -> str:
        return f"OneBitMeasurements(m={self.m})"


def generate_ensemble(n: int, m: int, seed: int) -> MeasurementEnsemble:
    """
    Draw an m x n matrix of i.i.d. standard-normal entries.

    Args:
        n: Signal dimension
        m: Measurement count
        seed: 64-bit seed of the Philox generator

    Returns:
        MeasurementEnsemble: Deterministic in (n, m, seed)

    Raises:
        InvalidDimensionError: If n or m is below 1
        InvalidConfigError: If the seed does not fit in 64 bits
    """
    if n < 1 or m < 1:
        raise InvalidDimensionError(f"ensemble needs n >= 1 and m >= 1, got n={n}, m={m}")
    if not 0 <= seed < 2**64:
        raise InvalidConfigError(f"seed must be a 64-bit unsigned integer, got {seed}")
    rng = np.random.Generator(np.random.Philox(int(seed)))
    matrix = rng.standard_normal((m, n))
    logger.debug(f"Generated ensemble n={n}, m={m}, seed={seed}")
    return MeasurementEnsemble(matrix, int(seed))


def _as_vector(x: Union[Signal, ArrayLike]) -> np.ndarray:
    if isinstance(x, Signal):
        return x.values
    return np.asarray(x, dtype=np.float64)


def measure(ensemble: MeasurementEnsemble, x: Union[Signal, ArrayLike]) -> OneBitMeasurements:
    """
    Apply the 1-bit measurement operator y = sign(Phi x).

    Unnormalized vectors are accepted as well; the sign does not depend on
    the scale of x.

    Raises:
        DimensionMismatchError: If the signal length differs from ensemble.n
    """
    values = _as_vector(x)
    if values.ndim != 1 or values.size != ensemble.n:
        raise DimensionMismatchError(
            f"signal has length {values.size} but the ensemble has n={ensemble.n} columns"
        )
    return OneBitMeasurements(signs(ensemble.matrix @ values))


def _check_lengths(y: OneBitMeasurements, ensemble: MeasurementEnsemble) -> None:
    if y.m != ensemble.m:
        raise DimensionMismatchError(f"{y.m} measurements given for an ensemble with m={ensemble.m} rows")


def estimate_minus_counts(y: OneBitMeasurements, ensemble: MeasurementEnsemble) -> np.ndarray:
    """
    Count, per dimension, the measurements with y_j * sign(Phi_ji) = -1.

    Returns:
        np.ndarray: int64 vector of length n
    """
    _check_lengths(y, ensemble)
    return np.count_nonzero(ensemble.sign_cache != y.bits[:, None], axis=0).astype(np.int64)


def estimate_bernoulli(y: OneBitMeasurements, ensemble: MeasurementEnsemble, i: int) -> BernoulliEstimate:
    """
    Estimate Pr(s_i = -1) for one dimension.

    Args:
        y: Measurements of the signal
        ensemble: Ensemble that produced y
        i: 1-based dimension index

    Returns:
        BernoulliEstimate: p_minus as a multiple of 1/m

    Raises:
        IndexOutOfRangeError: If i is outside [1, n]
        DimensionMismatchError: If y and the ensemble disagree on m
    """
    if not 1 <= i <= ensemble.n:
        raise IndexOutOfRangeError(f"dimension index must be in [1, {ensemble.n}], got {i}")
    _check_lengths(y, ensemble)
    count = int(np.count_nonzero(ensemble.sign_cache[:, i - 1] != y.bits))
    return BernoulliEstimate(p_minus=count / y.m, sample_count=y.m)


def estimate_all(y: OneBitMeasurements, ensemble: MeasurementEnsemble) -> List[BernoulliEstimate]:
    """Estimate every dimension in one pass over the sign cache."""
    counts = estimate_minus_counts(y, ensemble)
    return [BernoulliEstimate(p_minus=int(c) / y.m, sample_count=y.m) for c in counts]
