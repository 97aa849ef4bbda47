"""
Experiment runner.

Runs every (cell, trial) of an ExperimentSpec on a thread pool and yields
TrialRecords in deterministic (cell, trial) order. A failing trial becomes a
record with its failure message; it never aborts the sweep.
"""
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Iterator, List, NamedTuple, Optional, Tuple

import numpy as np

from bench.schemas import ExperimentSpec, GridCell, TrialRecord
from bench.signals import add_noise, ensemble_seed, signal_rng, sparse_signal, trial_seed
from hcs.dequantizer import (
    angular_error,
    biht,
    box_from_recovery,
    hamming_distance,
    midpoint_dequantize,
)
from hcs.exceptions import HcsError, SpecInvalidError
from hcs.measurement import Signal, generate_ensemble, measure
from hcs.quantizer import HcsQuantizer, build_quantizer, quantize
from hcs.recovery import quantized_error, recover
from hcs.schemas import DequantizerConfig
from shared.core.config import settings, worker_count
from shared.schemas import DequantizeMode, ExperimentFamily
from shared.utils.logger import get_logger

logger = get_logger(__name__)


class ScatterPoint(NamedTuple):
    hamming_error: float
    angular_error: float
    method: DequantizeMode


class _Trial(NamedTuple):
    cell: GridCell
    trial_index: int
    seed: int


def _baseline_config(spec: ExperimentSpec, cell: GridCell) -> DequantizerConfig:
    # Thresholding uses the trial's K unless the config fixes one
    config = spec.dequantizer
    if config.sparsity is None and cell.sparsity is not None and cell.sparsity < spec.n:
        return config.model_copy(update={"sparsity": cell.sparsity})
    return config


def _draw_signal(spec: ExperimentSpec, cell: GridCell, seed: int) -> Tuple[Signal, Optional[float]]:
    rng = signal_rng(seed)
    x = sparse_signal(spec.n, cell.sparsity, rng)
    realized_snr = None
    if spec.snr is not None:
        x, realized_snr = add_noise(x, spec.snr, rng)
    return x, realized_snr


def _recovery_trial(spec: ExperimentSpec, quantizer: HcsQuantizer, trial: _Trial) -> List[TrialRecord]:
    cell = trial.cell
    x, realized_snr = _draw_signal(spec, cell, trial.seed)
    ensemble = generate_ensemble(spec.n, cell.m, ensemble_seed(trial.seed))
    y = measure(ensemble, x)
    q = quantize(x, quantizer)
    result = recover(y, ensemble, quantizer, method=spec.recovery_method)

    elapsed_baseline = None
    baseline_error = None
    baseline_failure = None
    if spec.dequantizer is not None:
        start = time.perf_counter()
        try:
            x_biht = biht(y, ensemble, _baseline_config(spec, cell))
            q_biht = quantize(np.clip(x_biht.values, quantizer.x_inf, quantizer.x_sup), quantizer)
            elapsed_baseline = time.perf_counter() - start
            baseline_error = quantized_error(q, q_biht)
        except (HcsError, ValueError, FloatingPointError) as e:
            # the HCS result stands; only the baseline columns stay empty
            baseline_failure = f"{type(e).__name__}: {e}"

    return [TrialRecord(
        family=spec.family,
        cell=cell.coordinates,
        trial_index=trial.trial_index,
        m=cell.m,
        sparsity=cell.sparsity,
        seed=trial.seed,
        quantized_error=quantized_error(q, result.q_star),
        elapsed_recovery=result.elapsed,
        elapsed_baseline=elapsed_baseline,
        baseline_quantized_error=baseline_error,
        realized_snr=realized_snr,
        baseline_failure=baseline_failure,
    )]


def _consistency_trial(spec: ExperimentSpec, quantizer: HcsQuantizer, trial: _Trial) -> List[TrialRecord]:
    cell = trial.cell
    x, realized_snr = _draw_signal(spec, cell, trial.seed)
    ensemble = generate_ensemble(spec.n, cell.m, ensemble_seed(trial.seed))
    y = measure(ensemble, x)
    q = quantize(x, quantizer)
    result = recover(y, ensemble, quantizer, method=spec.recovery_method)
    error = quantized_error(q, result.q_star)
    config = _baseline_config(spec, cell)

    dequantizers = {
        DequantizeMode.MIDPOINT: lambda: midpoint_dequantize(result.q_star, quantizer),
        DequantizeMode.BIHT_BOX: lambda: biht(y, ensemble, config, box=box_from_recovery(result.q_star, quantizer)),
        DequantizeMode.BIHT: lambda: biht(y, ensemble, config),
    }
    records = []
    for method, dequantize in dequantizers.items():
        start = time.perf_counter()
        x_star = dequantize()
        elapsed = time.perf_counter() - start
        records.append(TrialRecord(
            family=spec.family,
            cell=cell.coordinates,
            trial_index=trial.trial_index,
            m=cell.m,
            sparsity=cell.sparsity,
            seed=trial.seed,
            quantized_error=error,
            elapsed_recovery=result.elapsed,
            elapsed_baseline=elapsed,
            hamming_error=hamming_distance(measure(ensemble, x_star.values), y),
            angular_error=angular_error(x, x_star),
            method=method,
            realized_snr=realized_snr,
        ))
    return records


def _failure_record(spec: ExperimentSpec, trial: _Trial, error: Exception) -> TrialRecord:
    return TrialRecord(
        family=spec.family,
        cell=trial.cell.coordinates,
        trial_index=trial.trial_index,
        m=trial.cell.m,
        sparsity=trial.cell.sparsity,
        seed=trial.seed,
        failure=f"{type(error).__name__}: {error}",
    )


def _trials(spec: ExperimentSpec) -> List[_Trial]:
    return [
        _Trial(cell, index, trial_seed(spec.master_seed, cell.key, index))
        for cell in spec.cells()
        for index in range(spec.trials_per_cell)
    ]


def run_experiment(spec: ExperimentSpec, workers: int = 0) -> Iterator[TrialRecord]:
    """
    Run every trial of an experiment.

    Args:
        spec: Validated experiment specification
        workers: Thread count, 0 for HCS_THREADS (always capped by it)

    Yields:
        TrialRecord: One per trial (one per dequantizer for the consistency
        family), in (cell, trial) order

    Raises:
        SpecInvalidError: If the quantizer cannot be built for the spec
    """
    try:
        quantizer = build_quantizer(spec.quantizer_config)
    except HcsError as e:
        raise SpecInvalidError(f"cannot build quantizer: {e.message}") from e

    run_trial = _consistency_trial if spec.family == ExperimentFamily.CONSISTENCY else _recovery_trial
    trials = _trials(spec)
    failures = 0

    def execute(trial: _Trial) -> List[TrialRecord]:
        try:
            return run_trial(spec, quantizer, trial)
        except (HcsError, ValueError, FloatingPointError) as e:
            return [_failure_record(spec, trial, e)]

    threads = worker_count(workers)
    logger.info(
        f"Running {spec.family.value}: {len(trials)} trials over {len(spec.cells())} cells "
        f"(n={spec.n}, k={spec.k}) on {threads} threads"
    )
    # executor.map yields results in submission order
    with ThreadPoolExecutor(max_workers=threads) as executor:
        for records in executor.map(execute, trials):
            for record in records:
                if record.failed:
                    failures += 1
                    if failures <= settings.BENCH_MAX_FAILURES_LOGGED:
                        logger.warning(
                            f"Trial {record.trial_index} of cell {record.cell} failed: {record.failure}"
                        )
                elif record.baseline_failure is not None:
                    logger.warning(
                        f"Baseline of trial {record.trial_index} in cell {record.cell} failed: {record.baseline_failure}"
                    )
                yield record

    if failures:
        logger.warning(f"{failures} trials failed")
    logger.info(f"Finished {spec.family.value}")


def consistency_scatter(spec: ExperimentSpec, workers: int = 0) -> Iterator[ScatterPoint]:
    """
    Yield (hamming_error, angular_error) pairs of the full x -> y -> q* -> x* pipeline.

    Raises:
        SpecInvalidError: If the spec is not of the consistency family
    """
    if spec.family != ExperimentFamily.CONSISTENCY:
        raise SpecInvalidError(f"consistency scatter needs the consistency family, got {spec.family.value}")
    for record in run_experiment(spec, workers=workers):
        if not record.failed:
            yield ScatterPoint(record.hamming_error, record.angular_error, record.method)
