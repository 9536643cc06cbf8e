"""Experiment specs, multi-trial runner, CSV/SVG reporting and the CLI."""

from .plot import emit_plot
from .report import ExperimentReport, TraceRow, emit_csv, emit_summary_csv, read_csv
from .runner import run_experiment, run_trial
from .spec import ExperimentSpec, load_spec

__all__ = [
    "ExperimentReport",
    "ExperimentSpec",
    "TraceRow",
    "emit_csv",
    "emit_plot",
    "emit_summary_csv",
    "load_spec",
    "read_csv",
    "run_experiment",
    "run_trial",
]
