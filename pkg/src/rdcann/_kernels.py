"""Compiled per-sample inner loops. All arrays are float64 and C-contiguous."""
import math

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def _sig(z):
    if z >= 0.0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


@njit(cache=True, nogil=True)
def sample_gradients(w1, b1, w2, b2, x, d, gw1, gb1, gw2, gb2, hidden, err):
    """Fill the gradient buffers with dL/dtheta for L = 0.5 * ||y - d||^2 and return L."""
    n_hidden, n_in = w1.shape
    n_out = w2.shape[0]
    for j in range(n_hidden):
        z = b1[j]
        for k in range(n_in):
            z += w1[j, k] * x[k]
        hidden[j] = _sig(z)
    loss = 0.0
    for o in range(n_out):
        y = b2[o]
        for j in range(n_hidden):
            y += w2[o, j] * hidden[j]
        e = y - d[o]
        err[o] = e
        loss += 0.5 * e * e
        gb2[o] = e
        for j in range(n_hidden):
            gw2[o, j] = e * hidden[j]
    for j in range(n_hidden):
        back = 0.0
        for o in range(n_out):
            back += err[o] * w2[o, j]
        delta = back * hidden[j] * (1.0 - hidden[j])
        gb1[j] = delta
        for k in range(n_in):
            gw1[j, k] = delta * x[k]
    return loss


@njit(cache=True, nogil=True)
def sgd_momentum_epoch(w1, b1, w2, b2, v1, vb1, v2, vb2, inputs, targets, order, lr, momentum):
    """One pass of per-sample SGD with classical momentum, in the given sample order.

    Updates parameters and velocities in place; returns the summed per-sample loss
    (each evaluated before that sample's update).
    """
    gw1 = np.empty_like(w1)
    gb1 = np.empty_like(b1)
    gw2 = np.empty_like(w2)
    gb2 = np.empty_like(b2)
    hidden = np.empty(w1.shape[0])
    err = np.empty(w2.shape[0])
    total = 0.0
    for idx in order:
        total += sample_gradients(w1, b1, w2, b2, inputs[idx], targets[idx],
                                  gw1, gb1, gw2, gb2, hidden, err)
        for j in range(w1.shape[0]):
            for k in range(w1.shape[1]):
                v1[j, k] = momentum * v1[j, k] - lr * gw1[j, k]
                w1[j, k] += v1[j, k]
            vb1[j] = momentum * vb1[j] - lr * gb1[j]
            b1[j] += vb1[j]
        for o in range(w2.shape[0]):
            for j in range(w2.shape[1]):
                v2[o, j] = momentum * v2[o, j] - lr * gw2[o, j]
                w2[o, j] += v2[o, j]
            vb2[o] = momentum * vb2[o] - lr * gb2[o]
            b2[o] += vb2[o]
    return total


@njit(cache=True, nogil=True)
def dataset_mse(w1, b1, w2, b2, inputs, targets):
    """Mean of (d - y)^2 over all exemplars and output elements."""
    n_hidden, n_in = w1.shape
    n_out = w2.shape[0]
    hidden = np.empty(n_hidden)
    total = 0.0
    for i in range(inputs.shape[0]):
        for j in range(n_hidden):
            z = b1[j]
            for k in range(n_in):
                z += w1[j, k] * inputs[i, k]
            hidden[j] = _sig(z)
        for o in range(n_out):
            y = b2[o]
            for j in range(n_hidden):
                y += w2[o, j] * hidden[j]
            e = targets[i, o] - y
            total += e * e
    return total / (inputs.shape[0] * n_out)
