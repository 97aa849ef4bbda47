"""
Seed derivation and synthetic signal generation for the bench.

Every trial seed is a pure function of (master_seed, cell key, trial index)
through numpy's SeedSequence, so reordering or parallelizing trials never
changes a record.
"""
from typing import Optional, Sequence, Tuple

import numpy as np

from hcs.measurement import Signal

SIGNAL_STREAM = 0
ENSEMBLE_STREAM = 1


def trial_seed(master_seed: int, cell_key: Sequence[int], trial_index: int) -> int:
    """Derive the 64-bit seed of one trial."""
    sequence = np.random.SeedSequence(master_seed, spawn_key=(*cell_key, trial_index))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def signal_rng(seed: int) -> np.random.Generator:
    """Generator for the signal and noise draws of a trial."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(SIGNAL_STREAM,))))


def ensemble_seed(seed: int) -> int:
    """Seed of the measurement ensemble of a trial."""
    sequence = np.random.SeedSequence(seed, spawn_key=(ENSEMBLE_STREAM,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def sparse_signal(n: int, sparsity: Optional[int], rng: np.random.Generator) -> Signal:
    """
    Draw a K-sparse unit-norm signal.

    The support is uniform without replacement and the nonzero values are
    i.i.d. standard normal before normalization, which makes them uniform on
    the unit sphere of the support. None (or K >= n) draws a dense signal.
    """
    if sparsity is None or sparsity >= n:
        return Signal.from_values(rng.standard_normal(n))
    support = rng.choice(n, size=sparsity, replace=False)
    values = np.zeros(n)
    values[support] = rng.standard_normal(sparsity)
    return Signal.from_values(values, sparsity_hint=sparsity)


def add_noise(x: Signal, snr_db: float, rng: np.random.Generator) -> Tuple[Signal, float]:
    """
    Add i.i.d. Gaussian noise at the target SNR, then renormalize.

    Returns:
        Tuple[Signal, float]: Noisy unit-norm signal and the realized SNR in dB
    """
    n = x.n
    signal_power = float(np.dot(x.values, x.values)) / n
    sigma = np.sqrt(signal_power / 10.0 ** (snr_db / 10.0))
    noise = rng.normal(0.0, sigma, n)
    realized = 10.0 * np.log10(float(np.dot(x.values, x.values)) / float(np.dot(noise, noise)))
    return Signal.from_values(x.values + noise), float(realized)
