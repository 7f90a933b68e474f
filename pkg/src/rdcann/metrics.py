"""Performance indices: percentage error, mean squared error, and relative-error summary.

Rows are exemplars and columns are output elements. %Error and relative errors
take denormalized (engineering-unit) values; MSE takes normalized values.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np


def _pair(a, b, names: str) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"{names}: shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        raise ValueError(f"{names}: need at least one exemplar and one element")
    return a, b


def _check_denominator(dd: np.ndarray):
    zero = np.argwhere(dd == 0)
    if zero.size:
        i, j = zero[0]
        raise ZeroDivisionError(f"desired output is zero at exemplar {i}, element {j}")


def percent_error(dy, dd) -> float:
    """``100 / (N'P) * sum_ij |dy_ij - dd_ij| / dd_ij`` on denormalized values.

    The denominator keeps its sign, as in the defining formula.
    """
    dy, dd = _pair(dy, dd, "percent_error")
    _check_denominator(dd)
    n, p = dd.shape
    return float(100.0 / (n * p) * np.sum(np.abs(dy - dd) / dd))


def mse(y, d) -> float:
    """``sum_ij (d_ij - y_ij)^2 / (N'P)``."""
    y, d = _pair(y, d, "mse")
    n, p = d.shape
    return float(np.sum((d - y) ** 2) / (n * p))


def relative_errors(dy, dd) -> tuple[float, float]:
    """Average and maximum per-exemplar relative error in percent.

    For several output elements the per-exemplar error is the mean over elements.
    """
    dy, dd = _pair(dy, dd, "relative_errors")
    _check_denominator(dd)
    per_exemplar = (100.0 * np.abs(dy - dd) / dd).mean(axis=1)
    return float(per_exemplar.mean()), float(per_exemplar.max())


@dataclass(frozen=True)
class PredictionSet:
    denormalized_outputs: np.ndarray
    denormalized_desired: np.ndarray
    normalized_outputs: np.ndarray
    normalized_desired: np.ndarray

    def __post_init__(self):
        shapes = {np.shape(np.atleast_1d(getattr(self, f))) for f in self.__dataclass_fields__}
        if len(shapes) != 1:
            raise ValueError(f"all prediction matrices must share one shape, got {shapes}")

    def report(self, label: str = "") -> "MetricsReport":
        avg, worst = relative_errors(self.denormalized_outputs, self.denormalized_desired)
        return MetricsReport(
            label=label,
            n_exemplars=len(np.atleast_1d(self.denormalized_desired)),
            mse=mse(self.normalized_outputs, self.normalized_desired),
            percent_error=percent_error(self.denormalized_outputs, self.denormalized_desired),
            average_relative_error=avg,
            maximum_relative_error=worst,
        )


@dataclass(frozen=True)
class MetricsReport:
    label: str
    n_exemplars: int
    mse: float
    percent_error: float
    average_relative_error: float
    maximum_relative_error: float

    _KEYS = ("n_exemplars", "mse", "percent_error", "average_relative_error_pct", "maximum_relative_error_pct")

    def _values(self):
        return (self.n_exemplars, self.mse, self.percent_error,
                self.average_relative_error, self.maximum_relative_error)

    def to_text(self) -> str:
        prefix = f"{self.label}." if self.label else ""
        return "".join(f"{prefix}{k} = {_fmt(v)}\n" for k, v in zip(self._KEYS, self._values()))


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else f"{v:.10g}"


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("set",) + MetricsReport._KEYS)
    for r in reports:
        writer.writerow((r.label,) + tuple(_fmt(v) for v in r._values()))
    return buf.getvalue()
