"""
Tests for the bench runner, signal generation, seeds and CSV output.
"""
import json
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError
from scipy.stats import pearsonr, spearmanr

import bench.runner
from bench.runner import consistency_scatter, run_experiment
from bench.schemas import ExperimentSpec, TrialRecord
from bench.signals import add_noise, ensemble_seed, signal_rng, sparse_signal, trial_seed
from bench.writer import CSV_HEADERS, emit_csv
from hcs.bounds import embedding_measurements
from hcs.exceptions import NumericFailureError, OutputWriteError, SpecInvalidError
from shared.schemas import DequantizeMode, ExperimentFamily

TIMING_FIELDS = {"elapsed_recovery", "elapsed_baseline"}
CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _spec(**overrides) -> ExperimentSpec:
    params = {
        "family": "error-vs-m",
        "n": 32,
        "k": 4,
        "sparsity": 4,
        "grid": [16, 64],
        "trials_per_cell": 3,
        "master_seed": 11,
    }
    params.update(overrides)
    return ExperimentSpec.model_validate(params)


def _load_config(name: str, **overrides) -> ExperimentSpec:
    raw = json.loads((CONFIG_DIR / name).read_text())
    raw.update(overrides)
    return ExperimentSpec.model_validate(raw)


def _untimed(records) -> list:
    return [record.model_dump(exclude=TIMING_FIELDS) for record in records]


class TestSeeds:
    def test_trial_seed_is_pure(self):
        assert trial_seed(5, (128,), 3) == trial_seed(5, (128,), 3)
        seeds = {trial_seed(5, (m,), t) for m in (16, 32) for t in range(10)}
        assert len(seeds) == 20
        assert trial_seed(5, (16,), 0) != trial_seed(6, (16,), 0)

    def test_streams_differ(self):
        assert ensemble_seed(123) != ensemble_seed(124)
        assert 0 <= ensemble_seed(2**64 - 1) < 2**64


class TestSignals:
    def test_sparse_signal(self):
        x = sparse_signal(64, 6, signal_rng(1))
        assert np.count_nonzero(x.values) == 6
        assert x.sparsity_hint == 6
        assert abs(np.linalg.norm(x.values) - 1.0) <= 1e-12

    def test_dense_when_sparsity_missing(self):
        x = sparse_signal(16, None, signal_rng(2))
        assert np.count_nonzero(x.values) == 16

    def test_realized_snr_averages_to_target(self):
        rng = signal_rng(3)
        realized = []
        for _ in range(200):
            x = sparse_signal(128, 10, rng)
            noisy, snr = add_noise(x, 20.0, rng)
            assert abs(np.linalg.norm(noisy.values) - 1.0) <= 1e-9
            realized.append(snr)
        assert abs(np.mean(realized) - 20.0) <= 0.5


class TestExperimentSpec:
    def test_loads_demo_configs(self):
        assert len(_load_config("phase_grid_demo.json").cells()) == 400
        assert len(_load_config("error_vs_m.json").cells()) == 20
        assert _load_config("consistency.json").dequantizer is not None

    def test_phase_grid_cells(self):
        spec = ExperimentSpec.model_validate(
            {"family": "phase-grid", "n": 100, "k": 4, "grid": [[0.05, 0.5], [1.0, 2.0]]}
        )
        first, second = spec.cells()
        assert (first.sparsity, first.m) == (5, 50)
        assert (second.sparsity, second.m) == (100, 200)
        assert first.key == (50_000, 500_000)

    @pytest.mark.parametrize("overrides", [
        {"grid": []},
        {"trials_per_cell": 0},
        {"grid": [0]},
        {"k": 1},
        {"x_inf": 0.5, "x_sup": 0.2},
        {"sparsity": 64},
        {"axes": {"k_over_n": [0.1], "m_over_n": [1.0]}},
        {"family": "consistency"},
        {"family": "phase-grid", "sparsity": None, "grid": [[1.5, 1.0]]},
        {"family": "phase-grid", "sparsity": 3, "grid": [[0.1, 1.0]]},
        {"master_seed": 2**64},
        {"unknown": 1},
    ])
    def test_rejects_invalid(self, overrides):
        with pytest.raises(ValidationError):
            _spec(**overrides)


class TestRunExperiment:
    def test_deterministic(self):
        spec = _spec(trials_per_cell=1, grid=[64])
        assert _untimed(run_experiment(spec)) == _untimed(run_experiment(spec))

    def test_order_and_content_ignore_worker_count(self):
        spec = _spec(dequantizer={"max_iterations": 10})
        serial = list(run_experiment(spec, workers=1))
        parallel = list(run_experiment(spec, workers=4))
        assert _untimed(serial) == _untimed(parallel)
        assert [(r.m, r.trial_index) for r in serial] == [(m, t) for m in (16, 64) for t in range(3)]
        assert all(r.baseline_quantized_error is not None for r in serial)

    def test_records_are_valid(self):
        records = list(run_experiment(_spec()))
        assert len(records) == 6
        for record in records:
            assert 0.0 <= record.quantized_error < 1.0
            assert record.elapsed_recovery >= 0.0
            assert record.elapsed_baseline is None
            assert not record.failed

    def test_failures_are_recorded(self, monkeypatch):
        def failing_recover(*args, **kwargs):
            raise NumericFailureError("boom")

        monkeypatch.setattr(bench.runner, "recover", failing_recover)
        records = list(run_experiment(_spec()))
        assert len(records) == 6
        assert all(r.failed and "boom" in r.failure for r in records)
        assert all(r.quantized_error is None for r in records)

    def test_baseline_failure_keeps_hcs_result(self, monkeypatch, tmp_path):
        def failing_biht(*args, **kwargs):
            raise NumericFailureError("baseline diverged")

        monkeypatch.setattr(bench.runner, "biht", failing_biht)
        spec = _spec(dequantizer={"max_iterations": 5})
        records = list(run_experiment(spec))
        assert len(records) == 6
        for record in records:
            assert not record.failed
            assert 0.0 <= record.quantized_error < 1.0
            assert record.baseline_quantized_error is None
            assert "baseline diverged" in record.baseline_failure
        summary = emit_csv(records, tmp_path / "out.csv", spec.family)
        assert summary.failed_trials == 0
        row = (tmp_path / "out.csv").read_text().splitlines()[1].split(",")
        assert row[2] != "" and row[5] == ""

    def test_noisy_records_carry_snr(self):
        records = list(run_experiment(_spec(snr=10.0)))
        assert all(r.realized_snr is not None for r in records)

    def test_phase_grid(self):
        spec = ExperimentSpec.model_validate({
            "family": "phase-grid", "n": 32, "k": 4, "trials_per_cell": 2, "master_seed": 1,
            "axes": {"k_over_n": [0.1, 0.5], "m_over_n": [1.0, 2.0]},
            "dequantizer": {"max_iterations": 5},
        })
        records = list(run_experiment(spec))
        assert len(records) == 8
        assert records[0].cell == (0.1, 1.0)
        assert records[0].sparsity == 3

    def test_error_drops_with_measurements(self):
        spec = _load_config("error_vs_m.json", dequantizer=None)
        by_m = {}
        for record in run_experiment(spec):
            by_m.setdefault(record.m, []).append(record.quantized_error)
        ms = sorted(by_m)
        medians = [float(np.median(by_m[m])) for m in ms]
        assert len(ms) == 20 and max(ms) == 16 * spec.n
        rho, p_value = spearmanr(ms, medians)
        assert rho < -0.8
        assert p_value < 0.01
        # even k puts a decision point at 0, so the zero entries keep a floor near (n-K)/(2nk)
        assert medians[-1] <= 0.07


class TestConsistencyScatter:
    def test_exact_recovery_is_origin(self):
        spec = ExperimentSpec.model_validate({
            "family": "consistency", "n": 1, "k": 8, "grid": [64], "trials_per_cell": 3,
            "dequantizer": {"max_iterations": 10},
        })
        points = list(consistency_scatter(spec))
        assert len(points) == 9
        assert {p.method for p in points} == set(DequantizeMode)
        for point in points:
            assert point.hamming_error == 0.0
            assert point.angular_error == pytest.approx(0.0, abs=1e-7)

    def test_hamming_and_angular_errors_correlate(self):
        points = list(consistency_scatter(_load_config("consistency.json")))
        assert len(points) >= 200
        r, _ = pearsonr([p.hamming_error for p in points], [p.angular_error for p in points])
        assert r > 0.5

    @pytest.mark.slow
    def test_stable_embedding_at_sufficient_m(self):
        # 2000 trials as in the consistency scatter protocol; three points each
        epsilon, mu, trials = 0.3, 0.1, 2000
        m = embedding_measurements(5, 128, epsilon, mu)
        spec = ExperimentSpec.model_validate({
            "family": "consistency", "n": 128, "k": 8, "sparsity": 5, "grid": [m],
            "trials_per_cell": trials, "master_seed": 9, "dequantizer": {"max_iterations": 30, "sparsity": 5},
        })
        points = list(consistency_scatter(spec))
        violations = np.mean([abs(p.hamming_error - p.angular_error) > epsilon for p in points])
        assert violations <= mu + 3.0 * np.sqrt(mu * (1.0 - mu) / len(points))

    def test_needs_consistency_family(self):
        with pytest.raises(SpecInvalidError):
            list(consistency_scatter(_spec()))


class TestEmitCsv:
    def test_header_only(self, tmp_path):
        summary = emit_csv([], tmp_path / "empty.csv", ExperimentFamily.ERROR_VS_M)
        lines = (tmp_path / "empty.csv").read_text().splitlines()
        assert lines == [",".join(CSV_HEADERS[ExperimentFamily.ERROR_VS_M])]
        assert summary.row_count == 0

    def test_line_count(self, tmp_path):
        records = list(run_experiment(_spec(grid=[16, 32], trials_per_cell=5)))
        summary = emit_csv(records, tmp_path / "out.csv", ExperimentFamily.ERROR_VS_M)
        assert summary.row_count == 10
        assert len((tmp_path / "out.csv").read_text().splitlines()) == 11

    def test_reruns_are_byte_identical(self, tmp_path):
        spec = _spec(dequantizer={"max_iterations": 10}, snr=15.0)
        first = emit_csv(run_experiment(spec), tmp_path / "a.csv", spec.family)
        second = emit_csv(run_experiment(spec, workers=2), tmp_path / "b.csv", spec.family)
        assert first.checksum == second.checksum
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_timing_columns(self, tmp_path):
        records = list(run_experiment(_spec(grid=[16], trials_per_cell=1)))
        emit_csv(records, tmp_path / "plain.csv", ExperimentFamily.ERROR_VS_M)
        emit_csv(records, tmp_path / "timed.csv", ExperimentFamily.ERROR_VS_M, include_timing=True)
        header = CSV_HEADERS[ExperimentFamily.ERROR_VS_M]
        plain = dict(zip(header, (tmp_path / "plain.csv").read_text().splitlines()[1].split(",")))
        timed = dict(zip(header, (tmp_path / "timed.csv").read_text().splitlines()[1].split(",")))
        assert plain["time_hcs"] == ""
        assert float(timed["time_hcs"]) >= 0.0
        assert plain["err"] == timed["err"]

    def test_failed_trials_are_counted(self, tmp_path):
        record = TrialRecord(family="error-vs-m", cell=(16.0,), trial_index=0, m=16, seed=1, failure="x")
        summary = emit_csv([record], tmp_path / "f.csv", ExperimentFamily.ERROR_VS_M)
        assert summary.failed_trials == 1

    def test_unwritable_destination(self, tmp_path):
        with pytest.raises(OutputWriteError) as info:
            emit_csv([], tmp_path, ExperimentFamily.ERROR_VS_M)
        assert info.value.path == str(tmp_path)

    def test_rejects_other_family(self, tmp_path):
        record = TrialRecord(family="phase-grid", cell=(0.1, 1.0), trial_index=0, m=16, seed=1)
        with pytest.raises(ValueError):
            emit_csv([record], tmp_path / "x.csv", ExperimentFamily.ERROR_VS_M)
