"""Relative-percent-error metric and surrogate evaluation reports.

The error metric runs on descaled values (original units), matching how a
surrogate is compared against raw simulator output.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mlp import Network, forward_batch
from .pipeline import Dataset, ScaleParams, apply_scale, invert_scale

__all__ = [
    "ErrorReport",
    "relative_percent_error",
    "evaluate_surrogate",
    "REPORT_HEADER",
    "report_row",
    "write_report_csv",
    "read_report_csv",
]

REPORT_HEADER = "function,error_percent,seconds"


@dataclass(frozen=True)
class ErrorReport:
    function_name: str
    e_percent: float
    mse: float
    n: int
    seconds: float

    def __post_init__(self):
        if self.e_percent < 0:
            raise ValueError("error percent cannot be negative")
        if self.n < 1:
            raise ValueError("a report needs at least one sample")


def relative_percent_error(actual, simulated) -> float:
    """Mean of |(actual - simulated) / actual| * 100 over all entries.

    Every actual value must be nonzero; a zero makes the metric undefined
    and raises with the offending index.
    """
    a = np.asarray(actual, dtype=float).ravel()
    s = np.asarray(simulated, dtype=float).ravel()
    if a.size == 0:
        raise ValueError("empty sequences")
    if a.shape != s.shape:
        raise ValueError(f"length mismatch: {a.size} actual vs {s.size} simulated")
    zeros = np.flatnonzero(a == 0.0)
    if zeros.size:
        raise ValueError(
            f"actual value at index {zeros[0]} is exactly 0; relative error undefined"
        )
    return float(np.mean(np.abs((a - s) / a)) * 100.0)


def evaluate_surrogate(
    net: Network,
    sp: ScaleParams,
    test: Dataset,
    function_name: str = "",
    seconds: float = 0.0,
) -> ErrorReport:
    """Score a trained surrogate on raw test rows.

    Inputs are scaled with the training-set parameters, predictions are
    descaled, and both E and MSE are computed in original units.
    """
    predictions = invert_scale(sp.targets, forward_batch(net, apply_scale(sp.inputs, test.inputs)))
    e = relative_percent_error(test.targets, predictions)
    mse = float(np.mean((predictions - test.targets) ** 2))
    return ErrorReport(
        function_name=function_name,
        e_percent=e,
        mse=mse,
        n=test.n,
        seconds=seconds,
    )


def report_row(report: ErrorReport) -> str:
    return f"{report.function_name},{report.e_percent:.17g},{report.seconds:.3f}"


def write_report_csv(rows: list[dict], path: str | Path) -> None:
    """Write table rows of {'function', 'error_percent', 'seconds'} dicts.

    error_percent may be an error marker string for failed runs.
    """
    lines = [REPORT_HEADER]
    for row in rows:
        err = row["error_percent"]
        err_s = f"{err:.17g}" if isinstance(err, float) else str(err)
        sec = row["seconds"]
        sec_s = f"{sec:.3f}" if isinstance(sec, float) else str(sec)
        lines.append(f"{row['function']},{err_s},{sec_s}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_report_csv(path: str | Path) -> list[dict]:
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines or lines[0] != REPORT_HEADER:
        raise ValueError(f"{path} is not a report CSV")
    rows = []
    for ln in lines[1:]:
        name, err, sec = ln.split(",")
        try:
            err_v: float | str = float(err)
        except ValueError:
            err_v = err
        rows.append(
            {
                "function": name,
                "error_percent": err_v,
                "seconds": float(sec) if sec else "",
            }
        )
    return rows
