"""Central finite differences against the tape's gradients."""

import numpy as np

from .tensor import backward


def numeric_gradient(fn, tensor, step=1e-5):
    grad = np.zeros_like(tensor.data, dtype=np.float64)
    data = tensor.data
    for idx in np.ndindex(data.shape):
        old = data[idx]
        data[idx] = old + step
        up = float(fn().data)
        data[idx] = old - step
        down = float(fn().data)
        data[idx] = old
        grad[idx] = (up - down) / (2 * step)
    return grad


def relative_error(a, b, floor=1e-6):
    """``|a - b| / (|a| + |b|)``; the floor keeps gradients that are zero
    up to rounding (both norms tiny) from reading as a 100% error."""
    a, b = np.asarray(a, np.float64), np.asarray(b, np.float64)
    scale = np.linalg.norm(a) + np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / max(scale, floor))


def gradient_errors(fn, tensors, step=1e-5):
    """``{name: relative error}`` of backward() vs central differences.

    ``fn()`` rebuilds the scalar loss from the current tensor data; the
    tensors should hold float64 data for the comparison to be meaningful.
    """
    for t in tensors.values():
        t.grad = None
    backward(fn())
    out = {}
    for name, t in tensors.items():
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        out[name] = relative_error(analytic, numeric_gradient(fn, t, step))
    return out
