"""
Pydantic schemas for CLI reports.
"""
from typing import Dict, Optional

from pydantic import Field

from hcs.schemas import DequantizedPayload, EnsembleRef, QuantizedSignalPayload, QuantizerPayload
from shared.schemas import DequantizeMode, FrozenModel, RecoveryMethod


class RecoverReport(FrozenModel):
    """
    JSON report of the recover subcommand.

    Timings are only present when requested so that identical invocations
    print identical reports.
    """

    ensemble: EnsembleRef = Field(..., description="Ensemble (n, m, seed) triple")
    quantizer: QuantizerPayload = Field(..., description="Quantizer used for recovery")
    method: RecoveryMethod = Field(..., description="Argmin strategy")
    q_star: QuantizedSignalPayload = Field(..., description="Recovered quantization")
    kl_evaluations: int = Field(..., ge=0, description="KL divergences evaluated")
    reference: Optional[QuantizedSignalPayload] = Field(None, description="Q(x) of the measured signal")
    quantized_error: Optional[float] = Field(None, ge=0.0, lt=1.0, description="Error of q* against Q(x)")
    realized_snr: Optional[float] = Field(None, description="Realized input SNR in dB (with --snr)")
    dequantize: Optional[DequantizeMode] = Field(None, description="Dequantizer used for x*")
    x_star: Optional[DequantizedPayload] = Field(None, description="Dequantized signal")
    angular_error: Optional[float] = Field(None, ge=0.0, le=1.0, description="D_S(x, x*)")
    hamming_error: Optional[float] = Field(None, ge=0.0, le=1.0, description="D_H(A(x*), y)")
    timings: Optional[Dict[str, float]] = Field(None, description="Wall times in seconds (with --timing)")
