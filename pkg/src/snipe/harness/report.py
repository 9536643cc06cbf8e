"""Per-block error traces and their CSV serialization."""

import csv
from collections import defaultdict
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

TRACE_HEADER = ("estimator", "axis_name", "axis_value", "trial", "block_k", "t", "error")
SUMMARY_HEADER = (
    "estimator", "axis_name", "axis_value", "block_k", "t", "mean", "median", "std", "trials",
)


class TraceRow(NamedTuple):
    estimator: str
    axis_name: str
    axis_value: object
    trial: int
    block_k: int
    t: int
    error: float


class SummaryRow(NamedTuple):
    estimator: str
    axis_name: str
    axis_value: object
    block_k: int
    t: int
    mean: float
    median: float
    std: float
    trials: int


def format_value(v):
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


@dataclass
class ExperimentReport:
    """Errors for every (estimator, axis value, trial, block); rows kept in that order."""

    name: str
    axis_name: str
    rows: list = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def _groups(self):
        groups = defaultdict(list)
        for row in self.rows:
            groups[(row.estimator, row.axis_value, row.block_k, row.t)].append(row.error)
        return groups

    def summary(self):
        """Mean, median and population std over trials for each block."""
        out = []
        for (est, value, k, t), errs in self._groups().items():
            errs = np.asarray(errs)
            out.append(
                SummaryRow(est, self.axis_name, value, k, t,
                           float(np.mean(errs)), float(np.median(errs)), float(np.std(errs)),
                           len(errs))
            )
        return out

    def estimators(self):
        return list(dict.fromkeys(row.estimator for row in self.rows))

    def axis_values(self):
        return list(dict.fromkeys(row.axis_value for row in self.rows))

    def final_errors(self, estimator, axis_value):
        """Error after the last block for each trial, ordered by trial."""
        last = {}
        for row in self.rows:
            if row.estimator == estimator and row.axis_value == axis_value:
                if row.trial not in last or row.block_k > last[row.trial][0]:
                    last[row.trial] = (row.block_k, row.error)
        return np.array([last[i][1] for i in sorted(last)])

    def trace(self, estimator, axis_value):
        """``(t, errors)`` with ``errors`` shaped ``(trials, K)``."""
        by_trial = defaultdict(list)
        ts = {}
        for row in self.rows:
            if row.estimator == estimator and row.axis_value == axis_value:
                by_trial[row.trial].append(row.error)
                ts[row.block_k] = row.t
        t = np.array([ts[k] for k in sorted(ts)])
        return t, np.array([by_trial[i] for i in sorted(by_trial)])


def emit_csv(report, path):
    """Write the per-trial trace with the fixed header, 17 significant digits and LF endings."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in report.rows:
            writer.writerow([format_value(v) for v in row])


def emit_summary_csv(report, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SUMMARY_HEADER)
        for row in report.summary():
            writer.writerow([format_value(v) for v in row])


def read_csv(path):
    """Load a trace CSV back into an :class:`ExperimentReport`; axis values stay strings."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != TRACE_HEADER:
            raise ValueError(f"unexpected header {header}")
        rows = [
            TraceRow(est, axis, value, int(trial), int(k), int(t), float(err))
            for est, axis, value, trial, k, t, err in reader
        ]
    axis = rows[0].axis_name if rows else ""
    return ExperimentReport(name="", axis_name=axis, rows=rows)
