"""
Bench Module

This module runs the seeded experiment sweeps (phase grids, error versus
measurement count, consistency scatter) and writes their CSV output.
"""

from .runner import run_experiment, consistency_scatter, ScatterPoint
from .schemas import ExperimentSpec, TrialRecord, CsvSummary
from .writer import emit_csv, CSV_HEADERS

__all__ = [
    "run_experiment",
    "consistency_scatter",
    "ScatterPoint",
    "ExperimentSpec",
    "TrialRecord",
    "CsvSummary",
    "emit_csv",
    "CSV_HEADERS",
]
