"""Hidden-layer size selection: train one network per candidate size on a shared split."""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable

from .data import Dataset, split
from .estimator import fit_flow_model
from .training import TrainConfig, TrainingDivergedError

DEFAULT_CANDIDATES = range(2, 13)
CSV_COLUMNS = ("hidden_nodes", "train_mse", "val_mse", "val_pct_error")


@dataclass(frozen=True)
class CandidateResult:
    hidden_nodes: int
    train_mse: float
    validation_mse: float
    validation_percent_error: float
    seed: int
    failed: bool = False

    @property
    def sort_key(self):
        return (self.failed, self.validation_mse, self.validation_percent_error, self.hidden_nodes)


@dataclass(frozen=True)
class ArchSearchReport:
    rows: tuple[CandidateResult, ...]
    selected: int

    @property
    def selected_row(self) -> CandidateResult:
        return next(r for r in self.rows if r.hidden_nodes == self.selected)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in self.rows:
            writer.writerow([r.hidden_nodes, repr(r.train_mse), repr(r.validation_mse),
                             repr(r.validation_percent_error)])
        return buf.getvalue()

    def to_table(self) -> str:
        head = f"{'Hidden nodes':>12}  {'Train MSE':>12}  {'Val MSE':>12}  {'Val % Error':>12}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            mark = "  <- selected" if r.hidden_nodes == self.selected else ""
            note = "  (diverged)" if r.failed else ""
            lines.append(f"{r.hidden_nodes:>12d}  {r.train_mse:>12.6g}  {r.validation_mse:>12.6g}  "
                         f"{r.validation_percent_error:>12.6g}{mark}{note}")
        return "\n".join(lines) + "\n"


Trainer = Callable[[int, int, Dataset, Dataset, TrainConfig], CandidateResult]


def train_candidate(hidden_nodes: int, seed: int, train_set: Dataset, validation: Dataset,
                    config: TrainConfig) -> CandidateResult:
    cfg = TrainConfig(config.learning_rate, config.momentum, config.iterations, seed,
                      config.shuffle_each_epoch, config.record_every)
    try:
        model, _ = fit_flow_model(train_set, hidden_nodes, cfg)
    except TrainingDivergedError:
        return CandidateResult(hidden_nodes, math.inf, math.inf, math.inf, seed, failed=True)
    tr = model.evaluate(train_set)
    va = model.evaluate(validation)
    return CandidateResult(hidden_nodes, tr.mse, va.mse, va.percent_error, seed)


def select(rows: Iterable[CandidateResult]) -> int:
    """Lowest validation MSE, then lowest %Error, then fewest hidden nodes; diverged rows last."""
    return min(rows, key=lambda r: r.sort_key).hidden_nodes


def search(
    ds: Dataset,
    candidates: Iterable[int] = DEFAULT_CANDIDATES,
    config: TrainConfig = TrainConfig(),
    split_seed: int = 0,
    train_fraction: float = 0.8,
    trainer: Trainer = train_candidate,
    n_jobs: int = 1,
) -> ArchSearchReport:
    """Train each candidate hidden size on one fixed split and pick the best.

    Candidate ``H`` is initialized and shuffled with seed ``config.seed + H``.
    Rows are ordered by hidden size regardless of enumeration order or ``n_jobs``.
    """
    sizes = sorted(set(int(h) for h in candidates))
    if not sizes:
        raise ValueError("no candidate hidden sizes given")
    if sizes[0] < 1:
        raise ValueError(f"hidden sizes must be >= 1, got {sizes[0]}")
    train_set, validation = split(ds, train_fraction, split_seed)

    def run(h: int) -> CandidateResult:
        return trainer(h, config.seed + h, train_set, validation, config)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, sizes))
    else:
        results = [run(h) for h in sizes]
    rows = tuple(sorted(results, key=lambda r: r.hidden_nodes))
    return ArchSearchReport(rows, select(rows))
