"""Backpropagation, SGD-with-momentum training, and a finite-difference gradient check."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels
from .network import Network, forward


class TrainingDivergedError(ArithmeticError):
    """Training produced a non-finite loss or parameter."""

    def __init__(self, epoch: int, learning_rate: float):
        self.epoch = epoch
        self.learning_rate = learning_rate
        super().__init__(
            f"loss became non-finite at epoch {epoch} (learning_rate={learning_rate}); "
            "try a smaller learning rate or momentum"
        )


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings. One iteration is one full pass over the training set.

    The default learning rate and momentum are not taken from any published run;
    they were chosen so the synthetic acceptance checks converge.
    """

    learning_rate: float = 0.05
    momentum: float = 0.9
    iterations: int = 100_000
    seed: int = 0
    shuffle_each_epoch: bool = True
    record_every: int = 100

    def __post_init__(self):
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be >= 1, got {self.record_every}")


@dataclass
class TrainHistory:
    epochs: list[int] = field(default_factory=list)
    mse: list[float] = field(default_factory=list)

    def record(self, epoch: int, value: float):
        if self.epochs and epoch <= self.epochs[-1]:
            raise ValueError("epoch indices must be strictly increasing")
        self.epochs.append(int(epoch))
        self.mse.append(float(value))

    def __len__(self):
        return len(self.epochs)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "mse"])
            for e, m in zip(self.epochs, self.mse):
                writer.writerow([e, repr(m)])


class Gradients(NamedTuple):
    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_biases: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([g.ravel() for g in self])


def _as_sample(net: Network, x, d) -> tuple[np.ndarray, np.ndarray]:
    x = np.ascontiguousarray(x, dtype=np.float64)
    d = np.ascontiguousarray(np.atleast_1d(d), dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(f"expected input of length {net.input_dim}, got {x.shape[-1] if x.ndim else x.shape}")
    if d.shape != (net.output_dim,):
        raise ValueError(f"expected target of length {net.output_dim}, got {d.shape[-1] if d.ndim else d.shape}")
    return x, d


def sample_loss(net: Network, x, d) -> float:
    """Half squared error of one sample, evaluated through the plain forward pass."""
    x, d = _as_sample(net, x, d)
    e = forward(net, x) - d
    return 0.5 * float(e @ e)


def _loss_extended(theta: np.ndarray, net: Network, x: np.ndarray, d: np.ndarray) -> np.longdouble:
    # Extended precision keeps finite-difference roundoff well below the check threshold.
    theta = theta.astype(np.longdouble)
    h, i, o = net.hidden_dim, net.input_dim, net.output_dim
    w1 = theta[: h * i].reshape(h, i)
    b1 = theta[h * i: h * i + h]
    w2 = theta[h * i + h: h * i + h + o * h].reshape(o, h)
    b2 = theta[h * i + h + o * h:]
    hidden = 1 / (1 + np.exp(-(w1 @ x.astype(np.longdouble) + b1)))
    e = w2 @ hidden + b2 - d
    return np.longdouble(0.5) * (e @ e)


def backprop_gradients(net: Network, x, d) -> Gradients:
    """Analytic gradient of ``0.5 * ||forward(x) - d||^2`` w.r.t. every parameter."""
    x, d = _as_sample(net, x, d)
    grads = Gradients(*(np.empty_like(p) for p in net.parameters()))
    _kernels.sample_gradients(
        *net.parameters(), x, d, *grads,
        np.empty(net.hidden_dim), np.empty(net.output_dim),
    )
    return grads


def gradient_check(
    net: Network,
    x,
    d,
    epsilon: float = 1e-5,
    grad_fn: Callable[[Network, np.ndarray, np.ndarray], Gradients] = backprop_gradients,
) -> float:
    """Worst discrepancy between ``grad_fn`` and central differences of the half squared error.

    Relative discrepancy ``|a - n| / max(|a|, |n|)`` per parameter; the absolute
    difference is used where both magnitudes are below 1e-10.
    """
    if not 0 < epsilon <= 1e-3:
        raise ValueError(f"epsilon must be in (0, 1e-3], got {epsilon}")
    x, d = _as_sample(net, x, d)
    analytic = np.concatenate([np.ravel(g) for g in grad_fn(net, x, d)])
    theta = net.flat()
    worst = 0.0
    for i in range(theta.size):
        plus, minus = theta.copy(), theta.copy()
        plus[i] += epsilon
        minus[i] -= epsilon
        numeric = float((_loss_extended(plus, net, x, d) - _loss_extended(minus, net, x, d)) / (plus[i] - minus[i]))
        a = analytic[i]
        scale = max(abs(a), abs(numeric))
        diff = abs(a - numeric)
        worst = max(worst, diff if scale < 1e-10 else diff / scale)
    return worst


def _targets_2d(targets, n_out: int) -> np.ndarray:
    t = np.asarray(targets, dtype=np.float64)
    if t.ndim == 1:
        t = t.reshape(-1, 1) if n_out == 1 else t.reshape(1, -1)
    return np.ascontiguousarray(t)


def training_mse(net: Network, inputs, targets) -> float:
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    return float(_kernels.dataset_mse(*net.parameters(), inputs, _targets_2d(targets, net.output_dim)))


def train(net: Network, inputs, targets, config: TrainConfig = TrainConfig()) -> tuple[Network, TrainHistory]:
    """Train a copy of ``net`` on normalized ``inputs``/``targets`` by per-sample SGD with momentum.

    Each step applies ``v <- momentum * v - learning_rate * grad`` then ``theta <- theta + v``.
    History holds the training MSE at epoch 0, every ``record_every`` epochs, and the last epoch.
    Raises :class:`TrainingDivergedError` as soon as an epoch ends with a non-finite loss.
    """
    inputs = np.ascontiguousarray(inputs, dtype=np.float64)
    targets = _targets_2d(targets, net.output_dim)
    if inputs.ndim != 2 or inputs.shape[0] == 0:
        raise ValueError("training set is empty")
    if inputs.shape[1] != net.input_dim:
        raise ValueError(f"expected inputs with {net.input_dim} columns, got {inputs.shape[1]}")
    if targets.shape != (inputs.shape[0], net.output_dim):
        raise ValueError(f"targets shape {targets.shape} does not match {(inputs.shape[0], net.output_dim)}")
    if not (np.isfinite(inputs).all() and np.isfinite(targets).all()):
        raise ValueError("training data contains non-finite values")

    trained = net.copy()
    params = trained.parameters()
    velocity = tuple(np.zeros_like(p) for p in params)
    # Shuffle stream is kept apart from the init stream that uses the same seed.
    rng = np.random.default_rng((config.seed, 1))
    n = inputs.shape[0]
    order = np.arange(n)

    history = TrainHistory()
    history.record(0, _kernels.dataset_mse(*params, inputs, targets))
    for epoch in range(1, config.iterations + 1):
        if config.shuffle_each_epoch:
            order = rng.permutation(n)
        loss = _kernels.sgd_momentum_epoch(
            *params, *velocity, inputs, targets, order, config.learning_rate, config.momentum
        )
        if not math.isfinite(loss) or not trained.is_finite():
            raise TrainingDivergedError(epoch, config.learning_rate)
        if epoch % config.record_every == 0 or epoch == config.iterations:
            history.record(epoch, _kernels.dataset_mse(*params, inputs, targets))
    return trained, history
