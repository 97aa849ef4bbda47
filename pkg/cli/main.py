"""
Hamming CS command-line entry point.

Subcommands:
    quantizer  print the boundary table of a quantizer as CSV
    recover    run measure -> recover (-> dequantize) on one signal, print JSON
    bounds     evaluate a closed-form bound, print JSON
    bench      run an experiment config, write CSV, print a JSON summary

Standard output carries only JSON or CSV; logs go to standard error.
Exit codes: 0 success, 1 bench finished with failed trials, 2 usage or
validation error, 3 data or dimension error.
"""
import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path
from typing import List, Optional

from pydantic import ValidationError

from bench.runner import run_experiment
from bench.schemas import ExperimentSpec
from bench.signals import add_noise, signal_rng
from bench.writer import emit_csv, format_float
from cli.schemas import RecoverReport
from hcs.bounds import BOUND_REGISTRY, evaluate_bound
from hcs.dequantizer import (
    angular_error,
    biht,
    box_from_recovery,
    dequantizer_config,
    hamming_distance,
    midpoint_dequantize,
)
from hcs.exceptions import (
    USAGE_EXIT_CODE,
    DimensionMismatchError,
    HcsError,
    InvalidConfigError,
    OutputWriteError,
)
from hcs.measurement import OneBitMeasurements, Signal, generate_ensemble, measure
from hcs.quantizer import build_quantizer, quantize, quantizer_config
from hcs.recovery import quantized_error, recover
from hcs.schemas import MeasurementsPayload, SignalPayload
from shared.schemas import DequantizeMode, RecoveryMethod
from shared.utils.logger import get_logger

logger = get_logger(__name__)

FAILED_TRIALS_EXIT_CODE = 1


def _emit(text: str, out: Optional[str]) -> None:
    """Write machine-readable output to --out or standard output."""
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise OutputWriteError(f"cannot write {out}: {e.strerror or e}", path=out) from e
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _read_json(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InvalidConfigError(f"cannot read {path}: {e.strerror or e}") from e


# =============================================================================
# SUBCOMMANDS
# =============================================================================

def cmd_quantizer(args: argparse.Namespace) -> int:
    """Print S_0..S_k and P_0..P_{k-1} as CSV rows index,s_boundary,p_boundary."""
    quantizer = build_quantizer(quantizer_config(args.k, args.x_inf, args.x_sup))
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index", "s_boundary", "p_boundary"])
    for j, s in enumerate(quantizer.s_boundaries):
        p = quantizer.p_boundaries[j] if j < quantizer.k else None
        writer.writerow([j, format_float(float(s)), format_float(None if p is None else float(p))])
    _emit(buffer.getvalue(), args.out)
    return 0


def cmd_recover(args: argparse.Namespace) -> int:
    """Run the full pipeline on one signal (or on stored measurements) and print a JSON report."""
    if args.seed is not None and not 0 <= args.seed < 2**64:
        raise InvalidConfigError(f"--seed must be a 64-bit unsigned integer, got {args.seed}")
    seed = 0 if args.seed is None else args.seed
    quantizer = build_quantizer(quantizer_config(args.k, args.x_inf, args.x_sup))
    timings = {}
    x = None
    realized_snr = None

    if args.signal:
        x = Signal.from_payload(SignalPayload.model_validate_json(_read_json(args.signal)))
        if args.n is not None and args.n != x.n:
            raise DimensionMismatchError(f"--n {args.n} does not match the signal length {x.n}")
        if args.m is None:
            raise InvalidConfigError("--m is required with --signal")
        if args.snr is not None:
            x, realized_snr = add_noise(x, args.snr, signal_rng(seed))
        start = time.perf_counter()
        ensemble = generate_ensemble(x.n, args.m, seed)
        y = measure(ensemble, x)
        timings["measure"] = time.perf_counter() - start
    else:
        payload = MeasurementsPayload.model_validate_json(_read_json(args.measurements))
        y = OneBitMeasurements.from_payload(payload)
        if payload.ensemble is not None:
            # the stored triple is authoritative; flags may only repeat it
            if args.seed is not None and args.seed != payload.ensemble.seed:
                raise InvalidConfigError(
                    f"--seed {args.seed} disagrees with the stored ensemble seed {payload.ensemble.seed}"
                )
            if args.n is not None and args.n != payload.ensemble.n:
                raise DimensionMismatchError(f"--n {args.n} does not match the stored ensemble n={payload.ensemble.n}")
            n, seed = payload.ensemble.n, payload.ensemble.seed
        elif args.n is not None:
            n = args.n
        else:
            raise InvalidConfigError("measurements without an ensemble triple need --n (and --seed)")
        if args.m is not None and args.m != y.m:
            raise DimensionMismatchError(f"--m {args.m} does not match the {y.m} stored measurements")
        start = time.perf_counter()
        ensemble = generate_ensemble(n, y.m, seed)
        timings["ensemble"] = time.perf_counter() - start

    result = recover(y, ensemble, quantizer, method=args.method)
    timings["recover"] = result.elapsed

    report = {
        "ensemble": ensemble.to_ref(),
        "quantizer": quantizer.to_payload(),
        "method": result.method,
        "q_star": result.q_star.to_payload(),
        "kl_evaluations": result.kl_evaluations,
        "realized_snr": realized_snr,
    }
    if x is not None:
        q = quantize(x, quantizer)
        report["reference"] = q.to_payload()
        report["quantized_error"] = quantized_error(q, result.q_star)

    if args.dequantize:
        mode = DequantizeMode(args.dequantize)
        start = time.perf_counter()
        if mode == DequantizeMode.MIDPOINT:
            x_star = midpoint_dequantize(result.q_star, quantizer)
        else:
            options = {
                "max_iterations": args.max_iterations,
                "sparsity": args.sparsity,
                "step_size": args.step_size,
            }
            config = dequantizer_config(**{key: value for key, value in options.items() if value is not None})
            box = box_from_recovery(result.q_star, quantizer) if mode == DequantizeMode.BIHT_BOX else None
            x_star = biht(y, ensemble, config, box=box)
        timings["dequantize"] = time.perf_counter() - start
        report["dequantize"] = mode
        report["x_star"] = x_star.to_payload()
        report["hamming_error"] = hamming_distance(measure(ensemble, x_star.values), y)
        if x is not None:
            report["angular_error"] = angular_error(x, x_star)

    if args.timing:
        report["timings"] = timings
    _emit(RecoverReport(**report).model_dump_json(indent=2) + "\n", args.out)
    return 0


_BOUND_FLAGS = ("sigma", "x_norm", "g", "gamma", "m", "x_i", "k", "x_inf", "x_sup",
                "q_star", "eta", "K", "n", "epsilon", "mu")


def cmd_bounds(args: argparse.Namespace) -> int:
    """Evaluate a bound from BOUND_REGISTRY and print its JSON report."""
    params = {flag: getattr(args, flag) for flag in _BOUND_FLAGS if getattr(args, flag) is not None}
    report = evaluate_bound(args.name, **params)
    _emit(report.model_dump_json(indent=2) + "\n", args.out)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    """Run an experiment config, write the CSV and print the summary."""
    raw = json.loads(_read_json(args.config))
    if not isinstance(raw, dict):
        raise InvalidConfigError(f"{args.config} must contain a JSON object")
    if args.seed is not None:
        raw["master_seed"] = args.seed
    if args.snr is not None:
        raw["snr"] = args.snr
    spec = ExperimentSpec.model_validate(raw)

    summary = emit_csv(
        run_experiment(spec, workers=args.workers),
        args.out,
        spec.family,
        include_timing=args.timing,
    )
    sys.stdout.write(summary.model_dump_json() + "\n")
    if summary.failed_trials:
        logger.error(f"{summary.failed_trials} of {summary.row_count} rows record failed trials")
        return FAILED_TRIALS_EXIT_CODE
    return 0


# =============================================================================
# PARSER
# =============================================================================

def _add_quantizer_flags(parser: argparse.ArgumentParser, k_required: bool = True) -> None:
    parser.add_argument("--k", type=int, required=k_required, help="Number of quantization intervals")
    parser.add_argument("--x-inf", dest="x_inf", type=float, default=None, help="Lower signal range bound")
    parser.add_argument("--x-sup", dest="x_sup", type=float, default=None, help="Upper signal range bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hcs", description="Hamming compressed sensing toolkit")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)

    quantizer = subparsers.add_parser("quantizer", help="Print the boundary table of a quantizer")
    _add_quantizer_flags(quantizer)
    quantizer.add_argument("--out", help="Write the CSV here instead of standard output")
    quantizer.set_defaults(handler=cmd_quantizer)

    rec = subparsers.add_parser("recover", help="Recover the quantization of one signal")
    source = rec.add_mutually_exclusive_group(required=True)
    source.add_argument("--signal", help="JSON signal file (true x, measured in-process)")
    source.add_argument("--measurements", help="JSON measurements file (bits plus ensemble triple)")
    _add_quantizer_flags(rec)
    rec.add_argument("--n", type=int, help="Signal dimension")
    rec.add_argument("--m", type=int, help="Number of 1-bit measurements")
    rec.add_argument("--seed", type=int, help="Ensemble seed (default: 0, or the stored one with --measurements)")
    rec.add_argument("--snr", type=float, help="Add Gaussian noise at this SNR (dB) before measuring")
    rec.add_argument("--method", choices=[m.value for m in RecoveryMethod], default=RecoveryMethod.SCAN.value,
                     help="Argmin strategy (default: scan)")
    rec.add_argument("--dequantize", choices=[m.value for m in DequantizeMode], help="Also dequantize q*")
    rec.add_argument("--sparsity", type=int, help="BIHT hard-thresholding sparsity K")
    rec.add_argument("--max-iterations", dest="max_iterations", type=int, default=None,
                     help="BIHT iteration cap")
    rec.add_argument("--step-size", dest="step_size", type=float, help="BIHT step size (default: 1/m)")
    rec.add_argument("--timing", action="store_true", help="Include wall times in the report")
    rec.add_argument("--out", help="Write the JSON report here instead of standard output")
    rec.set_defaults(handler=cmd_recover)

    bounds = subparsers.add_parser("bounds", help="Evaluate a closed-form bound")
    bounds.add_argument("name", help=f"Bound name: {', '.join(BOUND_REGISTRY)}")
    bounds.add_argument("--sigma", type=float, help="Perturbation norm")
    bounds.add_argument("--x-norm", dest="x_norm", type=float, help="Signal norm")
    bounds.add_argument("--g", type=float, help="Expected Hamming error level")
    bounds.add_argument("--gamma", type=float, help="Hamming error excess")
    bounds.add_argument("--m", type=int, help="Measurement count")
    bounds.add_argument("--x-i", dest="x_i", type=float, help="Coordinate value")
    _add_quantizer_flags(bounds, k_required=False)
    bounds.add_argument("--q-star", dest="q_star", type=int, help="Wrong candidate interval")
    bounds.add_argument("--eta", type=float, help="Allowed failure probability")
    bounds.add_argument("--K", dest="K", type=int, help="Sparsity")
    bounds.add_argument("--n", type=int, help="Signal dimension")
    bounds.add_argument("--epsilon", type=float, help="Embedding distortion")
    bounds.add_argument("--mu", type=float, help="Embedding failure probability")
    bounds.add_argument("--out", help="Write the JSON report here instead of standard output")
    bounds.set_defaults(handler=cmd_bounds)

    bench = subparsers.add_parser("bench", help="Run an experiment sweep")
    bench.add_argument("--config", required=True, help="JSON experiment config")
    bench.add_argument("--out", required=True, help="CSV destination")
    bench.add_argument("--seed", type=int, help="Override the master seed")
    bench.add_argument("--snr", type=float, help="Override the input SNR (dB)")
    bench.add_argument("--workers", type=int, default=0, help="Thread count (capped by HCS_THREADS)")
    bench.add_argument("--timing", action="store_true", help="Fill the timing columns")
    bench.set_defaults(handler=cmd_bench)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors and 0 on --help
        return int(e.code) if isinstance(e.code, int) else USAGE_EXIT_CODE

    try:
        return args.handler(args)
    except HcsError as e:
        logger.error(f"{e.code}: {e.message}")
        return e.exit_code
    except ValidationError as e:
        logger.error(f"validation failed: {e}")
        return USAGE_EXIT_CODE
    except json.JSONDecodeError as e:
        logger.error(f"invalid JSON: {e}")
        return USAGE_EXIT_CODE


if __name__ == "__main__":
    sys.exit(main())
