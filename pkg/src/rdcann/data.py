"""Column-flow dataset: schema, CSV I/O, min-max scaling, train/validation split, synthetic generator.

Synthetic surrogate
-------------------
The generator stands in for plant measurements. Its noiseless product flow
(m3/hr) is::

    flow = 12.0 * (1 - exp(-0.8 * sf_ratio))
                * (0.7 + 0.3 * (1 - exp(-rotation / 25)))
                * exp(0.004 * (feed_temp - 85) - 1.5e-4 * (solvent_temp - 90) ** 2)

It is strictly increasing in ``sf_ratio`` and ``rotation`` for every input,
mildly nonlinear in both temperatures and always positive. It makes no claim
about any real extraction column.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

INPUT_FIELDS = ("sf_ratio", "feed_temp", "solvent_temp", "rotation")
TARGET_FIELD = "product_flow"
INPUT_COLUMNS = ("sf_ratio", "feed_temp_c", "solvent_temp_c", "rotation_rpm")
TARGET_COLUMN = "product_flow_m3hr"
CSV_HEADER = INPUT_COLUMNS + (TARGET_COLUMN,)
FIELD_TO_COLUMN = dict(zip(INPUT_FIELDS + (TARGET_FIELD,), CSV_HEADER))

NORM_RANGE = (0.1, 0.9)

DEFAULT_RANGES = {
    "sf_ratio": (1.0, 3.0),
    "feed_temp": (60.0, 110.0),
    "solvent_temp": (60.0, 110.0),
    "rotation": (10.0, 60.0),
}


class SchemaError(ValueError):
    """Input data does not match the expected columns, types or value constraints."""


@dataclass(frozen=True)
class Sample:
    sf_ratio: float
    feed_temp: float
    solvent_temp: float
    rotation: float
    product_flow: float

    def __post_init__(self):
        for name in INPUT_FIELDS + (TARGET_FIELD,):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.product_flow <= 0:
            raise ValueError(f"product_flow must be > 0, got {self.product_flow}")
        if self.rotation < 0:
            raise ValueError(f"rotation must be >= 0, got {self.rotation}")
        if self.sf_ratio <= 0:
            raise ValueError(f"sf_ratio must be > 0, got {self.sf_ratio}")

    @property
    def inputs(self) -> tuple[float, float, float, float]:
        return self.sf_ratio, self.feed_temp, self.solvent_temp, self.rotation


@dataclass(frozen=True)
class Dataset:
    samples: tuple[Sample, ...]
    provenance: str = ""
    row_numbers: tuple[int, ...] = field(default=(), compare=False)

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        object.__setattr__(self, "row_numbers", tuple(self.row_numbers))

    def __len__(self):
        return len(self.samples)

    @property
    def inputs(self) -> np.ndarray:
        return np.array([s.inputs for s in self.samples], dtype=np.float64).reshape(-1, len(INPUT_FIELDS))

    @property
    def targets(self) -> np.ndarray:
        return np.array([s.product_flow for s in self.samples], dtype=np.float64)

    def subset(self, indices: Sequence[int], provenance: str | None = None) -> "Dataset":
        rows = tuple(self.row_numbers[i] for i in indices) if self.row_numbers else ()
        return Dataset(tuple(self.samples[i] for i in indices), provenance or self.provenance, rows)

    def column_means(self) -> dict[str, float]:
        if not self.samples:
            raise ValueError("empty dataset")
        return dict(zip(INPUT_FIELDS, map(float, self.inputs.mean(axis=0))))

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_HEADER)
            for s in self.samples:
                writer.writerow([repr(v) for v in s.inputs + (s.product_flow,)])

    @classmethod
    def from_arrays(cls, inputs, targets, provenance: str = "") -> "Dataset":
        inputs = np.asarray(inputs, dtype=np.float64)
        targets = np.asarray(targets, dtype=np.float64).ravel()
        return cls(tuple(Sample(*map(float, row), float(t)) for row, t in zip(inputs, targets)), provenance)


def load_csv(path) -> Dataset:
    """Read a dataset; line numbers of data rows are kept for diagnostics."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: empty dataset") from None
        if tuple(header) != CSV_HEADER:
            missing = [c for c in CSV_HEADER if c not in header]
            detail = f"missing columns {missing}" if missing else f"columns out of order or extra: {header}"
            raise SchemaError(f"{path}: header must be {','.join(CSV_HEADER)} ({detail})")
        samples, rows = [], []
        for cells in reader:
            line = reader.line_num
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(CSV_HEADER):
                raise SchemaError(f"{path}: row {line}: expected {len(CSV_HEADER)} cells, got {len(cells)}")
            values = []
            for col, cell in zip(CSV_HEADER, cells):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise SchemaError(f"{path}: row {line}, column {col}: not a number: {cell!r}") from None
            try:
                samples.append(Sample(*values))
            except ValueError as exc:
                raise SchemaError(f"{path}: row {line}: {exc}") from None
            rows.append(line)
    if not samples:
        raise SchemaError(f"{path}: empty dataset")
    return Dataset(tuple(samples), str(path), tuple(rows))


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-column affine map from [min, max] onto [lo, hi].

    Columns are the four inputs followed by the target, in CSV column order.
    Values outside the fitted range map outside [lo, hi]; nothing is clamped.
    """

    mins: tuple[float, ...]
    maxs: tuple[float, ...]
    lo: float = NORM_RANGE[0]
    hi: float = NORM_RANGE[1]
    columns: tuple[str, ...] = CSV_HEADER

    def __post_init__(self):
        object.__setattr__(self, "mins", tuple(map(float, self.mins)))
        object.__setattr__(self, "maxs", tuple(map(float, self.maxs)))
        if not len(self.mins) == len(self.maxs) == len(self.columns):
            raise ValueError("mins, maxs and columns must have equal length")
        for col, a, b in zip(self.columns, self.mins, self.maxs):
            if not (math.isfinite(a) and math.isfinite(b)) or b <= a:
                raise ValueError(f"column {col}: max must exceed min (got min={a}, max={b})")
        if not self.hi > self.lo:
            raise ValueError("normalization range must have hi > lo")

    def _scale(self, values, sl):
        lo = np.asarray(self.mins[sl])
        span = np.asarray(self.maxs[sl]) - lo
        return self.lo + (np.asarray(values, dtype=np.float64) - lo) / span * (self.hi - self.lo)

    def _unscale(self, values, sl):
        lo = np.asarray(self.mins[sl])
        span = np.asarray(self.maxs[sl]) - lo
        return lo + (np.asarray(values, dtype=np.float64) - self.lo) / (self.hi - self.lo) * span

    def normalize_inputs(self, inputs) -> np.ndarray:
        return self._scale(inputs, slice(0, -1))

    def denormalize_inputs(self, values) -> np.ndarray:
        return self._unscale(values, slice(0, -1))

    def normalize_target(self, flows) -> np.ndarray:
        return self._scale(flows, -1)

    def denormalize_target(self, values) -> np.ndarray:
        return self._unscale(values, -1)

    def denormalize_output(self, value) -> float:
        """Network output on the normalized scale -> product flow in m3/hr."""
        return float(self.denormalize_target(value))

    def in_range(self, inputs) -> np.ndarray:
        """Boolean mask of input rows lying inside the fitted min/max box."""
        inputs = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
        return ((inputs >= np.asarray(self.mins[:-1])) & (inputs <= np.asarray(self.maxs[:-1]))).all(axis=1)


class NormalizedData(NamedTuple):
    inputs: np.ndarray
    targets: np.ndarray


def fit_normalizer(ds: Dataset, lo: float = NORM_RANGE[0], hi: float = NORM_RANGE[1]) -> NormalizationSpec:
    """Fit per-column min/max. Pass the training split only."""
    if len(ds) == 0:
        raise ValueError("cannot fit a normalizer on an empty dataset")
    table = np.column_stack([ds.inputs, ds.targets])
    mins, maxs = table.min(axis=0), table.max(axis=0)
    for col, a, b in zip(CSV_HEADER, mins, maxs):
        if b == a:
            raise ValueError(f"column {col} is constant ({a}); cannot normalize")
    return NormalizationSpec(tuple(mins), tuple(maxs), lo, hi)


def normalize(ds: Dataset, spec: NormalizationSpec) -> NormalizedData:
    return NormalizedData(
        np.ascontiguousarray(spec.normalize_inputs(ds.inputs)),
        np.ascontiguousarray(spec.normalize_target(ds.targets).reshape(-1, 1)),
    )


def denormalize_output(value, spec: NormalizationSpec) -> float:
    return spec.denormalize_output(value)


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then the first floor(n * train_fraction) rows train and the rest validate."""
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    n = len(ds)
    if n < 2:
        raise ValueError(f"need at least 2 samples to split, got {n}")
    n_train = math.floor(n * train_fraction + 1e-9)
    if not 0 < n_train < n:
        raise ValueError(f"train_fraction {train_fraction} leaves an empty side for {n} samples")
    order = np.random.default_rng(seed).permutation(n)
    return (
        ds.subset(order[:n_train].tolist(), f"{ds.provenance} [train seed={seed}]"),
        ds.subset(order[n_train:].tolist(), f"{ds.provenance} [validation seed={seed}]"),
    )


def surrogate_flow(sf_ratio, feed_temp, solvent_temp, rotation):
    """Noiseless synthetic product flow in m3/hr (see module docstring)."""
    sf_ratio, feed_temp, solvent_temp, rotation = (
        np.asarray(v, dtype=np.float64) for v in (sf_ratio, feed_temp, solvent_temp, rotation)
    )
    solvent_term = 1.0 - np.exp(-0.8 * sf_ratio)
    mixing_term = 0.7 + 0.3 * (1.0 - np.exp(-rotation / 25.0))
    thermal_term = np.exp(0.004 * (feed_temp - 85.0) - 1.5e-4 * (solvent_temp - 90.0) ** 2)
    return 12.0 * solvent_term * mixing_term * thermal_term


def generate_synthetic(n: int, seed: int, noise_sd: float = 0.0, ranges: dict | None = None) -> Dataset:
    """Draw ``n`` operating points uniformly from ``ranges`` and label them with :func:`surrogate_flow`.

    Noise is Gaussian with standard deviation ``noise_sd * flow``. Draws that
    would make the flow non-positive are redrawn from the same stream.
    """
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not (noise_sd >= 0 and math.isfinite(noise_sd)):
        raise ValueError(f"noise_sd must be >= 0, got {noise_sd}")
    bounds = {**DEFAULT_RANGES, **(ranges or {})}
    unknown = set(bounds) - set(INPUT_FIELDS)
    if unknown:
        raise ValueError(f"unknown range keys: {sorted(unknown)}")
    lows = np.array([bounds[f][0] for f in INPUT_FIELDS], dtype=np.float64)
    highs = np.array([bounds[f][1] for f in INPUT_FIELDS], dtype=np.float64)
    if (highs <= lows).any():
        raise ValueError("every range must have high > low")
    if lows[0] <= 0 or lows[3] < 0:
        raise ValueError("sf_ratio range must be positive and rotation range non-negative")

    rng = np.random.default_rng(seed)
    inputs = rng.uniform(lows, highs, size=(n, len(INPUT_FIELDS)))
    flows = surrogate_flow(*inputs.T)
    if noise_sd > 0:
        noisy = flows + noise_sd * flows * rng.standard_normal(n)
        bad = noisy <= 0
        while bad.any():
            noisy[bad] = flows[bad] + noise_sd * flows[bad] * rng.standard_normal(int(bad.sum()))
            bad = noisy <= 0
        flows = noisy
    samples = tuple(Sample(*map(float, row), float(f)) for row, f in zip(inputs, flows))
    return Dataset(samples, f"synthetic n={n} seed={seed} noise_sd={noise_sd!r}")
