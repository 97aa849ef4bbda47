from enum import Enum


class ExperimentFamily(str, Enum):
    """Experiment families reproduced by the bench runner."""
    PHASE_GRID = "phase-grid"
    ERROR_VS_M = "error-vs-m"
    CONSISTENCY = "consistency"


class DequantizeMode(str, Enum):
    """Ways of turning a quantized recovery back into a real unit-norm signal."""
    MIDPOINT = "midpoint"
    BIHT = "biht"
    BIHT_BOX = "biht-box"


class RecoveryMethod(str, Enum):
    """Argmin strategies for KL nearest-neighbor recovery."""
    SCAN = "scan"
    DESCENT = "descent"


class BoundInterpretation(str, Enum):
    """What the value of a bound report means."""
    PROBABILITY = "probability"
    COUNT = "count"
    DISTANCE = "distance"
