"""Single-hidden-layer feed-forward perceptron: topology, activation, init and forward pass."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

INIT_HALF_WIDTH = 0.5


class Activation(enum.Enum):
    SIGMOID = "sigmoid"
    LINEAR = "linear"


def sigmoid(x, bias=0.0):
    """Logistic activation with an additive bias, ``1 / (1 + exp(-x - bias))``.

    Works on scalars and arrays. The exponent is split by sign so that large
    magnitudes saturate cleanly instead of overflowing.
    """
    z = np.asarray(x, dtype=np.float64) + bias
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(eq=False)
class Network:
    """Weights and biases of an ``input_dim``-``hidden_dim``-``output_dim`` perceptron.

    ``hidden_biases`` is the learnable bias inside the hidden sigmoid. The
    hidden layer is always sigmoid and the output layer is always linear.
    """

    hidden_weights: np.ndarray
    hidden_biases: np.ndarray
    output_weights: np.ndarray
    output_biases: np.ndarray
    hidden_activation: Activation = field(default=Activation.SIGMOID)
    output_activation: Activation = field(default=Activation.LINEAR)

    def __post_init__(self):
        self.hidden_weights = np.array(self.hidden_weights, dtype=np.float64, ndmin=2)
        self.hidden_biases = np.array(self.hidden_biases, dtype=np.float64, ndmin=1)
        self.output_weights = np.array(self.output_weights, dtype=np.float64, ndmin=2)
        self.output_biases = np.array(self.output_biases, dtype=np.float64, ndmin=1)
        if self.hidden_activation is not Activation.SIGMOID:
            raise ValueError("hidden layer activation must be sigmoid")
        if self.output_activation is not Activation.LINEAR:
            raise ValueError("output layer activation must be linear")
        h, i = self.hidden_weights.shape
        o = self.output_weights.shape[0]
        if min(h, i, o) < 1:
            raise ValueError(f"all layer sizes must be >= 1, got {i}-{h}-{o}")
        if self.hidden_biases.shape != (h,):
            raise ValueError(f"hidden_biases must have shape ({h},), got {self.hidden_biases.shape}")
        if self.output_weights.shape != (o, h):
            raise ValueError(f"output_weights must have shape ({o}, {h}), got {self.output_weights.shape}")
        if self.output_biases.shape != (o,):
            raise ValueError(f"output_biases must have shape ({o},), got {self.output_biases.shape}")
        if not self.is_finite():
            raise ValueError("network parameters must be finite")

    @property
    def input_dim(self) -> int:
        return self.hidden_weights.shape[1]

    @property
    def hidden_dim(self) -> int:
        return self.hidden_weights.shape[0]

    @property
    def output_dim(self) -> int:
        return self.output_weights.shape[0]

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.input_dim, self.hidden_dim, self.output_dim

    @property
    def n_parameters(self) -> int:
        return sum(a.size for a in self.parameters())

    def parameters(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        return self.hidden_weights, self.hidden_biases, self.output_weights, self.output_biases

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.parameters())

    def copy(self) -> "Network":
        return Network(*(a.copy() for a in self.parameters()))

    def flat(self) -> np.ndarray:
        """All parameters concatenated in (hidden_weights, hidden_biases, output_weights, output_biases) order."""
        return np.concatenate([a.ravel() for a in self.parameters()])

    def with_flat(self, theta) -> "Network":
        theta = np.asarray(theta, dtype=np.float64)
        if theta.shape != (self.n_parameters,):
            raise ValueError(f"expected {self.n_parameters} parameters, got {theta.shape}")
        parts, start = [], 0
        for a in self.parameters():
            parts.append(theta[start:start + a.size].reshape(a.shape).copy())
            start += a.size
        return Network(*parts)

    def equals(self, other: "Network") -> bool:
        """Bit-for-bit parameter equality."""
        return self.dims == other.dims and all(
            np.array_equal(a, b) for a, b in zip(self.parameters(), other.parameters())
        )


def init_network(input_dim: int, hidden_dim: int, output_dim: int, seed: int) -> Network:
    """Draw every weight and bias i.i.d. from U[-0.5, 0.5] using a seeded PCG64 stream."""
    for name, n in (("input_dim", input_dim), ("hidden_dim", hidden_dim), ("output_dim", output_dim)):
        if int(n) != n or n < 1:
            raise ValueError(f"{name} must be a positive integer, got {n!r}")
    rng = np.random.default_rng(seed)
    u = lambda *shape: rng.uniform(-INIT_HALF_WIDTH, INIT_HALF_WIDTH, size=shape)
    return Network(
        hidden_weights=u(hidden_dim, input_dim),
        hidden_biases=u(hidden_dim),
        output_weights=u(output_dim, hidden_dim),
        output_biases=u(output_dim),
    )


def _check_input(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim not in (1, 2) or x.shape[-1] != net.input_dim:
        got = x.shape[-1] if x.ndim in (1, 2) else x.shape
        raise ValueError(f"expected input of length {net.input_dim}, got {got}")
    if not np.isfinite(x).all():
        raise ValueError("input contains non-finite values")
    return x


def forward_with_hidden(net: Network, x) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(hidden_activations, output)`` for one input vector or a batch of rows."""
    x = _check_input(net, x)
    hidden = sigmoid(x @ net.hidden_weights.T, net.hidden_biases)
    hidden = np.asarray(hidden)
    out = hidden @ net.output_weights.T + net.output_biases
    return hidden, out


def forward(net: Network, x) -> np.ndarray:
    """Network output on normalized inputs; shape ``(output_dim,)`` or ``(n, output_dim)``."""
    return forward_with_hidden(net, x)[1]


def lipschitz_bound(net: Network) -> float:
    """Upper bound on how fast the output can move per unit change of any single input.

    Uses sigmoid' <= 1/4.
    """
    per_hidden = 0.25 * np.abs(net.hidden_weights).max(axis=1)
    return float(np.abs(net.output_weights).sum(axis=0) @ per_hidden) if net.hidden_dim else 0.0

