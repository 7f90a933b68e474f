"""One-factor-at-a-time sweeps through a trained model, trend classification, and actual-vs-predicted export.

The model's only output is product flow, so trends are read in terms of product
flow; they are a proxy for extraction performance, not a direct measurement of it.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data import INPUT_FIELDS, Dataset
from .model import FlowModel

FLAT_TOLERANCE = 1e-9  # m3/hr

INCREASING = "increasing"
DECREASING = "decreasing"
NON_MONOTONE = "non-monotone"


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    grid: tuple[float, ...]
    baseline: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.variable not in INPUT_FIELDS:
            raise ValueError(f"unknown variable {self.variable!r}; choose one of {', '.join(INPUT_FIELDS)}")
        grid = tuple(float(v) for v in self.grid)
        if len(grid) < 2:
            raise ValueError("sweep grid needs at least 2 points")
        if not np.isfinite(grid).all() or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("sweep grid must be finite and strictly increasing")
        object.__setattr__(self, "grid", grid)
        missing = [f for f in INPUT_FIELDS if f != self.variable and f not in self.baseline]
        if missing:
            raise ValueError(f"baseline is missing {', '.join(missing)}")
        unknown = set(self.baseline) - set(INPUT_FIELDS)
        if unknown:
            raise ValueError(f"unknown baseline keys: {sorted(unknown)}")
        if not all(np.isfinite(v) for v in self.baseline.values()):
            raise ValueError("baseline values must be finite")

    def input_matrix(self) -> np.ndarray:
        rows = np.empty((len(self.grid), len(INPUT_FIELDS)))
        for k, name in enumerate(INPUT_FIELDS):
            rows[:, k] = self.grid if name == self.variable else float(self.baseline[name])
        return rows


@dataclass(frozen=True)
class TrendSummary:
    direction: str
    violations: tuple[tuple[int, float], ...]  # (grid index, magnitude)

    @property
    def violation_count(self) -> int:
        return len(self.violations)

    @property
    def max_violation(self) -> float:
        return max((m for _, m in self.violations), default=0.0)


@dataclass(frozen=True)
class SweepResult:
    variable: str
    values: tuple[float, ...]
    predicted_flow: tuple[float, ...]
    extrapolated: tuple[bool, ...]
    trend: TrendSummary

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([self.variable, "predicted_flow_m3hr"])
        for v, f in zip(self.values, self.predicted_flow):
            writer.writerow([repr(v), repr(f)])
        buf.write(f"# trend: {self.trend.direction}, violations: {self.trend.violation_count}\n")
        return buf.getvalue()


def monotonicity_report(flows: Sequence[float], tol: float = FLAT_TOLERANCE) -> TrendSummary:
    """Classify a sequence by its consecutive differences.

    Steps within ``tol`` are flat. A sequence with no downward step is
    increasing (so an all-flat one is increasing too); one with no upward step
    is decreasing. Otherwise it is non-monotone and the violations listed are
    the steps against whichever direction has fewer of them (ties: increasing).
    A violation is reported at the index of the point that ends the bad step.
    """
    if isinstance(flows, SweepResult):
        flows = flows.predicted_flow
    flows = np.asarray(flows, dtype=np.float64)
    if flows.size == 0:
        raise ValueError("cannot classify an empty sequence")
    diffs = np.diff(flows)
    down = [(i + 1, float(-d)) for i, d in enumerate(diffs) if d < -tol]
    up = [(i + 1, float(d)) for i, d in enumerate(diffs) if d > tol]
    if not down:
        return TrendSummary(INCREASING, ())
    if not up:
        return TrendSummary(DECREASING, ())
    return TrendSummary(NON_MONOTONE, tuple(down if len(down) <= len(up) else up))


def sweep(model: FlowModel, spec: SweepSpec) -> SweepResult:
    """Predict product flow along ``spec.grid`` with the other inputs held at the baseline."""
    inputs = spec.input_matrix()
    flows = model.predict(inputs)
    return SweepResult(
        variable=spec.variable,
        values=spec.grid,
        predicted_flow=tuple(float(f) for f in flows),
        extrapolated=tuple(bool(x) for x in ~model.normalizer.in_range(inputs)),
        trend=monotonicity_report(flows),
    )


def scatter_export(model: FlowModel, validation: Dataset) -> list[tuple[float, float]]:
    """``(actual, predicted)`` flow pairs in input order."""
    if len(validation) == 0:
        raise ValueError("validation set is empty")
    predicted = model.predict(validation.inputs)
    return [(float(a), float(p)) for a, p in zip(validation.targets, predicted)]


def scatter_csv(pairs) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["actual", "predicted"])
    for a, p in pairs:
        writer.writerow([repr(a), repr(p)])
    return buf.getvalue()
