"""
Tests for KL nearest-neighbor quantized recovery.
"""
import math

import numpy as np
import pytest
from scipy.optimize import brentq

from hcs.exceptions import DimensionMismatchError, MismatchedQuantizerError
from hcs.measurement import MeasurementEnsemble, OneBitMeasurements, Signal, generate_ensemble, measure
from hcs.quantizer import QuantizedSignal, build_quantizer, max_interval_width, quantize, quantizer_config
from hcs.recovery import (
    _descent_argmin,
    _scan_argmin,
    err_h_bound,
    kl_divergence,
    kl_table,
    quantized_error,
    recover,
)
from hcs.schemas import BernoulliEstimate
from shared.schemas import RecoveryMethod


def _neighbor_dominant(divergences: np.ndarray) -> list:
    """Indices whose divergence beats the previous boundary and does not exceed the next one."""
    k = divergences.size
    return [
        j for j in range(k)
        if (j == 0 or divergences[j] < divergences[j - 1]) and (j == k - 1 or divergences[j] <= divergences[j + 1])
    ]


def _sparse(n: int, sparsity: int, rng: np.random.Generator) -> Signal:
    values = np.zeros(n)
    values[rng.choice(n, size=sparsity, replace=False)] = rng.standard_normal(sparsity)
    return Signal.from_values(values)


class TestKlDivergence:
    def test_identical_distributions(self):
        assert kl_divergence(0.3, 0.3) == 0.0

    def test_known_value(self):
        assert kl_divergence(0.5, 0.25) == pytest.approx(0.5 * math.log(4.0 / 3.0), abs=1e-12)
        assert kl_divergence(0.5, 0.25) == pytest.approx(0.143841, abs=1e-6)

    def test_absolute_continuity_failure(self):
        assert kl_divergence(0.5, 0.0) == math.inf
        assert kl_divergence(0.0, 0.0) == 0.0

    def test_accepts_estimates(self):
        estimate = BernoulliEstimate(p_minus=0.25, sample_count=4)
        assert kl_divergence(0.5, estimate) == kl_divergence(0.5, 0.25)

    def test_table_shape(self, quantizer8):
        table = kl_table(quantizer8.p_boundaries, np.array([0.1, 0.5, 0.9]))
        assert table.shape == (3, 8)
        assert table[1, 0] == pytest.approx(kl_divergence(quantizer8.p_boundaries[0], 0.5))


class TestRecover:
    def test_estimate_on_a_boundary_selects_it(self):
        # k=3 boundaries are 1, 1/2, 0; columns disagree with y twice, once, never
        quantizer = build_quantizer(quantizer_config(3))
        ensemble = MeasurementEnsemble(np.array([[-1.0, -1.0, 1.0], [-1.0, 1.0, 1.0]]), seed=0)
        result = recover(OneBitMeasurements([1, 1]), ensemble, quantizer)
        assert result.q_star.indices.tolist() == [1, 2, 3]

    @pytest.mark.parametrize("method", list(RecoveryMethod))
    def test_single_measurement_picks_extreme_intervals(self, quantizer8, method):
        ensemble = MeasurementEnsemble(np.array([[1.0, -1.0]]), seed=0)
        result = recover(OneBitMeasurements([1]), ensemble, quantizer8, method=method)
        assert result.q_star.indices.tolist() == [8, 1]

    def test_scan_counts_every_divergence(self, quantizer8, sparse_unit_signal):
        ensemble = generate_ensemble(128, 300, 1)
        result = recover(measure(ensemble, sparse_unit_signal), ensemble, quantizer8)
        assert result.kl_evaluations == 128 * 8
        assert result.method == RecoveryMethod.SCAN
        assert result.elapsed >= 0.0

    def test_descent_matches_scan(self, quantizer8, rng):
        for seed in range(5):
            x = _sparse(96, 12, rng)
            ensemble = generate_ensemble(96, 400, seed)
            y = measure(ensemble, x)
            scan = recover(y, ensemble, quantizer8, method=RecoveryMethod.SCAN)
            descent = recover(y, ensemble, quantizer8, method=RecoveryMethod.DESCENT)
            assert scan.q_star == descent.q_star
            assert descent.kl_evaluations <= scan.kl_evaluations

    def test_midpoint_signal_is_recovered(self):
        k, n = 8, 64

        def excess_norm(a: float) -> float:
            mids = build_quantizer(quantizer_config(k, -a, a)).midpoints()
            return (n // k) * float(np.sum(mids ** 2)) - 1.0

        a = brentq(excess_norm, 0.01, 1.0)
        quantizer = build_quantizer(quantizer_config(k, -a, a))
        x = Signal.from_values(np.tile(quantizer.midpoints(), n // k))
        ensemble = generate_ensemble(n, 50_000, 2012)
        result = recover(measure(ensemble, x), ensemble, quantizer)
        q = quantize(x, quantizer)
        assert q.indices.tolist() == np.tile(np.arange(1, k + 1), n // k).tolist()
        assert np.mean(q.indices == result.q_star.indices) >= 0.99

    def test_error_drops_along_nested_prefixes(self, rng):
        quantizer = build_quantizer(quantizer_config(7))
        prefixes = (16, 512, 2048, 8192)
        errors = {m: [] for m in prefixes}
        for seed in range(30):
            x = _sparse(64, 8, rng)
            ensemble = generate_ensemble(64, 8192, seed)
            y = measure(ensemble, x)
            q = quantize(x, quantizer)
            for m in prefixes:
                result = recover(y.prefix(m), ensemble.prefix(m), quantizer)
                errors[m].append(quantized_error(q, result.q_star))
        medians = {m: float(np.median(errors[m])) for m in prefixes}
        assert medians[16] > medians[8192]
        assert medians[2048] <= medians[512]
        assert medians[8192] <= medians[2048]

    def test_length_mismatch(self, quantizer8):
        ensemble = generate_ensemble(4, 10, 0)
        with pytest.raises(DimensionMismatchError):
            recover(OneBitMeasurements([1] * 9), ensemble, quantizer8)

    def test_recovery_time_is_linear_in_n(self, quantizer8, rng):
        medians = {}
        for n in (256, 512):
            ensemble = generate_ensemble(n, 8192, n)
            y = measure(ensemble, _sparse(n, 16, rng))
            medians[n] = np.median([recover(y, ensemble, quantizer8).elapsed for _ in range(10)])
        assert 1.5 <= medians[512] / medians[256] <= 3.0

    def test_payload(self, quantizer8):
        ensemble = MeasurementEnsemble(np.array([[1.0, -1.0]]), seed=0)
        payload = recover(OneBitMeasurements([1]), ensemble, quantizer8).to_payload()
        assert payload.q_star.indices == [8, 1]
        assert payload.kl_evaluations == 16


class TestNeighborDominance:
    def test_scan_and_descent_agree_with_neighbor_check(self):
        rng = np.random.default_rng(2)
        pairs = 0
        for _ in range(100):
            k = int(rng.integers(2, 33))
            x_inf = float(rng.choice([-1.0, rng.uniform(-1.0, 0.0)]))
            x_sup = float(rng.choice([1.0, rng.uniform(0.1, 1.0)]))
            quantizer = build_quantizer(quantizer_config(k, x_inf, x_sup))
            m = int(rng.integers(2, 500))
            q_minus = np.concatenate([rng.uniform(0.0, 1.0, 50), rng.integers(1, m, 50) / m])

            table = kl_table(quantizer.p_boundaries, q_minus)
            scan, _ = _scan_argmin(quantizer.p_boundaries, q_minus)
            descent, _ = _descent_argmin(quantizer.p_boundaries, q_minus)
            for i in range(q_minus.size):
                assert _neighbor_dominant(table[i]) == [scan[i]]
            assert np.array_equal(scan, descent)
            pairs += q_minus.size
        assert pairs == 10_000

    def test_descent_handles_certain_estimates(self):
        # q = 0 and q = 1 make most divergences infinite
        for x_inf, x_sup in [(-1.0, 1.0), (-0.5, 0.5), (-1.0, 0.3), (-0.2, 1.0)]:
            quantizer = build_quantizer(quantizer_config(6, x_inf, x_sup))
            q_minus = np.array([0.0, 1.0, 0.5, 0.25])
            scan, _ = _scan_argmin(quantizer.p_boundaries, q_minus)
            descent, _ = _descent_argmin(quantizer.p_boundaries, q_minus)
            assert np.array_equal(scan, descent)

    def test_log_base_does_not_change_argmin(self, quantizer8, rng):
        q_minus = rng.uniform(0.0, 1.0, 200)
        table = kl_table(quantizer8.p_boundaries, q_minus)
        assert np.array_equal(np.argmin(table, axis=1), np.argmin(table / math.log(2.0), axis=1))


class TestQuantizedError:
    def test_identical(self, quantizer8):
        q = QuantizedSignal([1, 5, 8], quantizer8)
        assert quantized_error(q, q) == 0.0

    def test_example(self):
        quantizer = build_quantizer(quantizer_config(4))
        error = quantized_error(QuantizedSignal([1, 4], quantizer), QuantizedSignal([2, 4], quantizer))
        assert error == pytest.approx(1.0 / 8.0)

    def test_below_one(self, quantizer8):
        error = quantized_error(QuantizedSignal([1, 1], quantizer8), QuantizedSignal([8, 8], quantizer8))
        assert error == pytest.approx(7.0 / 8.0)
        assert error < 1.0

    def test_mismatched_quantizer(self, quantizer8, quantizer2):
        with pytest.raises(MismatchedQuantizerError):
            quantized_error(QuantizedSignal([1], quantizer8), QuantizedSignal([1], quantizer2))

    def test_length_mismatch(self, quantizer8):
        with pytest.raises(DimensionMismatchError):
            quantized_error(QuantizedSignal([1], quantizer8), QuantizedSignal([1, 2], quantizer8))


class TestErrHBound:
    def test_cases(self, quantizer8):
        q = QuantizedSignal([1, 2, 3, 5], quantizer8)
        q_star = QuantizedSignal([1, 3, 3, 2], quantizer8)
        width = max_interval_width(quantizer8)
        np.testing.assert_allclose(err_h_bound(q, q_star, quantizer8), [0.0, 0.0, 0.0, 2.0 * width])

    def test_other_quantizer(self, quantizer8, quantizer2):
        q = QuantizedSignal([1], quantizer2)
        with pytest.raises(MismatchedQuantizerError):
            err_h_bound(q, q, quantizer8)
