"""
Shared fixtures for the hcs test suite.
"""
import numpy as np
import pytest

from hcs.measurement import Signal
from hcs.quantizer import build_quantizer, quantizer_config


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20120701)


@pytest.fixture
def quantizer2():
    return build_quantizer(quantizer_config(2))


@pytest.fixture
def quantizer8():
    return build_quantizer(quantizer_config(8))


@pytest.fixture
def sparse_unit_signal(rng) -> Signal:
    """5-sparse unit-norm signal in R^128."""
    values = np.zeros(128)
    support = rng.choice(128, size=5, replace=False)
    values[support] = rng.standard_normal(5)
    return Signal.from_values(values, sparsity_hint=5)

