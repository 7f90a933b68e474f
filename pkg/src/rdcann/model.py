"""A trained network bundled with its normalizer, and the ``rdcann-model v1`` text format.

Layout::

    rdcann-model v1
    dims 4 7 1
    activation hidden=sigmoid output=linear
    hidden_weights
    <one row per hidden node>
    hidden_biases
    <one line>
    output_weights
    <one row per output>
    output_biases
    <one line>
    norm_range 0.1 0.9
    norm <column> <min> <max>          (one line per CSV column)
    baseline <input> <value>           (optional; training-set means of the inputs)

Floats are written with 17 significant digits, which round-trips float64 exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import CSV_HEADER, INPUT_FIELDS, Dataset, NormalizationSpec
from .metrics import MetricsReport, PredictionSet
from .network import Network, forward

MAGIC = "rdcann-model v1"
_SECTIONS = ("hidden_weights", "hidden_biases", "output_weights", "output_biases")


class ModelFormatError(ValueError):
    """A model file is malformed or does not match the expected schema."""


def _f(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(eq=False)
class FlowModel:
    network: Network
    normalizer: NormalizationSpec
    baseline: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.network.input_dim != len(self.normalizer.columns) - 1 or self.network.output_dim != 1:
            raise ModelFormatError(
                f"network dims {self.network.dims} do not match a "
                f"{len(self.normalizer.columns) - 1}-input, 1-output normalizer"
            )

    def predict(self, inputs) -> np.ndarray:
        """Raw operating conditions (rows of 4) -> product flow in m3/hr."""
        inputs = np.asarray(inputs, dtype=np.float64)
        single = inputs.ndim == 1
        out = forward(self.network, self.normalizer.normalize_inputs(np.atleast_2d(inputs)))
        flows = self.normalizer.denormalize_target(out[:, 0])
        return flows[0] if single else flows

    def prediction_set(self, ds: Dataset) -> PredictionSet:
        y = forward(self.network, self.normalizer.normalize_inputs(ds.inputs))
        d = self.normalizer.normalize_target(ds.targets).reshape(-1, 1)
        return PredictionSet(
            denormalized_outputs=self.normalizer.denormalize_target(y),
            denormalized_desired=ds.targets.reshape(-1, 1),
            normalized_outputs=y,
            normalized_desired=d,
        )

    def evaluate(self, ds: Dataset, label: str = "") -> MetricsReport:
        return self.prediction_set(ds).report(label)

    def to_text(self) -> str:
        net = self.network
        lines = [MAGIC, "dims {} {} {}".format(*net.dims), "activation hidden=sigmoid output=linear"]
        for name, arr in zip(_SECTIONS, net.parameters()):
            lines.append(name)
            for row in np.atleast_2d(arr):
                lines.append(" ".join(_f(v) for v in row))
        lines.append(f"norm_range {_f(self.normalizer.lo)} {_f(self.normalizer.hi)}")
        for col, a, b in zip(self.normalizer.columns, self.normalizer.mins, self.normalizer.maxs):
            lines.append(f"norm {col} {_f(a)} {_f(b)}")
        for name in INPUT_FIELDS:
            if name in self.baseline:
                lines.append(f"baseline {name} {_f(self.baseline[name])}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_text())

    @classmethod
    def from_text(cls, text: str) -> "FlowModel":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        pos = 0

        def take() -> str:
            nonlocal pos
            if pos >= len(lines):
                raise ModelFormatError("unexpected end of model file")
            pos += 1
            return lines[pos - 1]

        def floats(line: str, count: int) -> list[float]:
            parts = line.split()
            if len(parts) != count:
                raise ModelFormatError(f"expected {count} numbers, got {len(parts)}: {line!r}")
            try:
                return [float(p) for p in parts]
            except ValueError:
                raise ModelFormatError(f"non-numeric value in {line!r}") from None

        if take() != MAGIC:
            raise ModelFormatError(f"not a model file (first line must be {MAGIC!r})")
        dims = take().split()
        if len(dims) != 4 or dims[0] != "dims":
            raise ModelFormatError("expected 'dims <in> <hidden> <out>'")
        try:
            n_in, n_hidden, n_out = (int(v) for v in dims[1:])
        except ValueError:
            raise ModelFormatError("dims must be integers") from None
        if take() != "activation hidden=sigmoid output=linear":
            raise ModelFormatError("unsupported activation line")
        shapes = ((n_hidden, n_in), (1, n_hidden), (n_out, n_hidden), (1, n_out))
        arrays = []
        for name, (rows, cols) in zip(_SECTIONS, shapes):
            if take() != name:
                raise ModelFormatError(f"expected section {name!r}")
            arrays.append(np.array([floats(take(), cols) for _ in range(rows)]))
        try:
            net = Network(arrays[0], arrays[1][0], arrays[2], arrays[3][0])
        except ValueError as exc:
            raise ModelFormatError(str(exc)) from None

        head, *rest = take().split()
        if head != "norm_range":
            raise ModelFormatError("expected 'norm_range <lo> <hi>'")
        lo, hi = floats(" ".join(rest), 2)
        mins, maxs = [], []
        for col in CSV_HEADER:
            parts = take().split()
            if len(parts) != 4 or parts[0] != "norm" or parts[1] != col:
                raise ModelFormatError(f"expected 'norm {col} <min> <max>'")
            a, b = floats(" ".join(parts[2:]), 2)
            mins.append(a)
            maxs.append(b)
        baseline = {}
        while pos < len(lines):
            parts = take().split()
            if len(parts) != 3 or parts[0] != "baseline" or parts[1] not in INPUT_FIELDS:
                raise ModelFormatError(f"unexpected line {' '.join(parts)!r}")
            baseline[parts[1]] = floats(parts[2], 1)[0]
        try:
            spec = NormalizationSpec(tuple(mins), tuple(maxs), lo, hi)
        except ValueError as exc:
            raise ModelFormatError(str(exc)) from None
        return cls(net, spec, baseline)

    @classmethod
    def load(cls, path) -> "FlowModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())
