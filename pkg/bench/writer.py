"""
CSV output for bench sweeps.

Column order is fixed per family and documented in docs/csv_schemas.md.
Floats are written with CSV_FLOAT_DIGITS significant digits. Timing columns
stay empty unless requested, which keeps reruns byte-identical.
"""
import csv
import hashlib
import io
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Optional, Union

from bench.schemas import CsvSummary, TrialRecord
from hcs.exceptions import OutputWriteError
from shared.core.config import settings
from shared.schemas import ExperimentFamily
from shared.utils.logger import get_logger

logger = get_logger(__name__)

CSV_HEADERS: Dict[ExperimentFamily, List[str]] = {
    ExperimentFamily.PHASE_GRID: [
        "K_over_n", "m_over_n", "trial", "err", "time_hcs", "time_baseline", "err_baseline", "seed",
    ],
    ExperimentFamily.ERROR_VS_M: [
        "m", "trial", "err", "time_hcs", "time_baseline", "err_baseline", "seed",
    ],
    ExperimentFamily.CONSISTENCY: [
        "trial", "m", "hamming", "angular", "method", "seed",
    ],
}


def format_float(value: Optional[float]) -> str:
    """Format a float for CSV output; None becomes an empty field."""
    if value is None:
        return ""
    return format(value, settings.CSV_FLOAT_FORMAT)


def _row(record: TrialRecord, include_timing: bool) -> List[str]:
    timing: Callable[[Optional[float]], str] = format_float if include_timing else (lambda _: "")
    family = record.family
    if family == ExperimentFamily.PHASE_GRID:
        k_ratio, m_ratio = record.cell
        return [
            format_float(k_ratio), format_float(m_ratio), str(record.trial_index),
            format_float(record.quantized_error), timing(record.elapsed_recovery),
            timing(record.elapsed_baseline), format_float(record.baseline_quantized_error), str(record.seed),
        ]
    if family == ExperimentFamily.ERROR_VS_M:
        return [
            str(record.m), str(record.trial_index), format_float(record.quantized_error),
            timing(record.elapsed_recovery), timing(record.elapsed_baseline),
            format_float(record.baseline_quantized_error), str(record.seed),
        ]
    return [
        str(record.trial_index), str(record.m), format_float(record.hamming_error),
        format_float(record.angular_error), record.method.value if record.method else "", str(record.seed),
    ]


def emit_csv(records: Iterable[TrialRecord], destination: Union[str, Path], family: ExperimentFamily,
             include_timing: bool = False) -> CsvSummary:
    """
    Write trial records to a CSV file.

    Args:
        records: Records of one experiment family, in output order
        destination: File path
        family: Family selecting the header
        include_timing: Fill the time_hcs and time_baseline columns

    Returns:
        CsvSummary: Path, data row count, SHA-256 checksum and failed trial count

    Raises:
        OutputWriteError: If the file cannot be written
    """
    family = ExperimentFamily(family)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADERS[family])

    row_count = 0
    failed = 0
    for record in records:
        if record.family != family:
            raise ValueError(f"record of family {record.family.value} in a {family.value} CSV")
        writer.writerow(_row(record, include_timing))
        row_count += 1
        failed += int(record.failed)

    data = buffer.getvalue().encode("utf-8")
    path = Path(destination)
    try:
        path.write_bytes(data)
    except OSError as e:
        raise OutputWriteError(f"cannot write CSV to {path}: {e.strerror or e}", path=str(path)) from e

    checksum = hashlib.sha256(data).hexdigest()
    logger.info(f"Wrote {row_count} rows to {path} (sha256 {checksum[:12]}...)")
    return CsvSummary(path=str(path), row_count=row_count, checksum=checksum, failed_trials=failed)
