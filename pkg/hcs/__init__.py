"""
HCS Module

This module provides Hamming compressed sensing: 1-bit measurements, the
k-bit HCS quantizer, KL nearest-neighbor quantized recovery, dequantizers
and the closed-form bounds.
"""

from .measurement import (
    Signal,
    MeasurementEnsemble,
    OneBitMeasurements,
    generate_ensemble,
    measure,
    estimate_bernoulli,
    estimate_all,
)
from .quantizer import (
    HcsQuantizer,
    QuantizedSignal,
    build_quantizer,
    f_ratio,
    quantize,
    interval_bounds,
    max_interval_width,
)
from .recovery import RecoveryResult, kl_divergence, recover, quantized_error, err_h_bound
from .dequantizer import (
    BoxConstraint,
    DequantizedSignal,
    midpoint_dequantize,
    box_from_recovery,
    project_box,
    biht,
    angular_error,
    hamming_distance,
)
from .schemas import QuantizerConfig, DequantizerConfig, BernoulliEstimate, BoundReport
from .exceptions import HcsError

__all__ = [
    "Signal",
    "MeasurementEnsemble",
    "OneBitMeasurements",
    "generate_ensemble",
    "measure",
    "estimate_bernoulli",
    "estimate_all",
    "HcsQuantizer",
    "QuantizedSignal",
    "build_quantizer",
    "f_ratio",
    "quantize",
    "interval_bounds",
    "max_interval_width",
    "RecoveryResult",
    "kl_divergence",
    "recover",
    "quantized_error",
    "err_h_bound",
    "BoxConstraint",
    "DequantizedSignal",
    "midpoint_dequantize",
    "box_from_recovery",
    "project_box",
    "biht",
    "angular_error",
    "hamming_distance",
    "QuantizerConfig",
    "DequantizerConfig",
    "BernoulliEstimate",
    "BoundReport",
    "HcsError",
]
