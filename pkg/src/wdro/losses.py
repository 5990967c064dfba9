"""Pluggable differentiable point losses and the empirical-risk objective.

A loss exposes its value together with analytic gradients in the model
parameters and in the feature vector. The two built-ins (squared error and
logistic) additionally provide vectorized batch paths and a ``code`` used to
select fused compiled kernels; user-supplied losses go through the generic
per-point path.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .core import Dataset, LabeledSample, ModelParams
from .errors import DimensionMismatch


def _check_dims(params: ModelParams, x: np.ndarray) -> None:
    if x.shape[-1] != params.dim:
        raise DimensionMismatch(
            f"feature dimension {x.shape[-1]} does not match model dimension {params.dim}"
        )


class Loss:
    """Point loss interface.

    Subclasses (or :class:`CustomLoss`) must supply ``value``, ``grad_theta``
    and ``grad_features``; batch methods default to a per-point loop and may
    be overridden with vectorized versions. ``code`` identifies a built-in
    for the compiled kernel path (None means generic).
    """

    code: int | None = None
    name: str = "loss"

    def value(self, params: ModelParams, x: np.ndarray, y: float) -> float:
        raise NotImplementedError

    def grad_theta(self, params: ModelParams, x: np.ndarray, y: float):
        """Gradient of value w.r.t. (weights, bias)."""
        raise NotImplementedError

    def grad_features(self, params: ModelParams, x: np.ndarray, y: float) -> np.ndarray:
        """Gradient of value w.r.t. the feature vector."""
        raise NotImplementedError

    # -- batch paths over a (k, d) matrix; y may be a scalar or a (k,) vector

    def batch_values(self, params: ModelParams, X: np.ndarray, y) -> np.ndarray:
        ys = np.broadcast_to(np.asarray(y, dtype=np.float64), (X.shape[0],))
        return np.array([self.value(params, X[j], float(ys[j])) for j in range(X.shape[0])])

    def batch_grad_theta(self, params: ModelParams, X: np.ndarray, y):
        ys = np.broadcast_to(np.asarray(y, dtype=np.float64), (X.shape[0],))
        k = X.shape[0]
        gw = np.empty((k, params.dim))
        gb = np.empty(k)
        for j in range(k):
            gw[j], gb[j] = self.grad_theta(params, X[j], float(ys[j]))
        return gw, gb


def _margin(params: ModelParams, x: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    _check_dims(params, x)
    return float(x @ params.weights + params.bias)


def _batch_margins(params: ModelParams, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    _check_dims(params, X)
    return X @ params.weights + params.bias


class SquaredError(Loss):
    """0.5 * (w.x + b - y)^2; the half makes the gradient the plain residual."""

    code = 0
    name = "squared_error"

    def value(self, params, x, y):
        r = _margin(params, x) - y
        return 0.5 * r * r

    def grad_theta(self, params, x, y):
        r = _margin(params, x) - y
        return r * np.asarray(x, dtype=np.float64), r

    def grad_features(self, params, x, y):
        r = _margin(params, x) - y
        return r * params.weights

    def batch_values(self, params, X, y):
        r = _batch_margins(params, X) - y
        return 0.5 * r * r

    def batch_grad_theta(self, params, X, y):
        r = _batch_margins(params, X) - y
        return r[:, None] * np.asarray(X, dtype=np.float64), r


def _softplus_arr(t):
    # log(1 + exp(t)) elementwise, stable
    return np.logaddexp(0.0, t)


def _expit_arr(t):
    t = np.asarray(t, dtype=np.float64)
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


class Logistic(Loss):
    """log(1 + exp(-y * (w.x + b))) for labels y in {-1, +1}, computed in the
    overflow-safe softplus form."""

    code = 1
    name = "logistic"

    def value(self, params, x, y):
        t = y * _margin(params, x)
        # softplus(-t)
        if t > 0.0:
            return math.log1p(math.exp(-t))
        return -t + math.log1p(math.exp(t))

    def _dmargin(self, t: float, y: float) -> float:
        # d/dm softplus(-y*m) = -y * sigmoid(-y*m)
        if t >= 0.0:
            e = math.exp(-t)
            return -y * (e / (1.0 + e))
        return -y / (1.0 + math.exp(t))

    def grad_theta(self, params, x, y):
        t = y * _margin(params, x)
        s = self._dmargin(t, y)
        return s * np.asarray(x, dtype=np.float64), s

    def grad_features(self, params, x, y):
        t = y * _margin(params, x)
        return self._dmargin(t, y) * params.weights

    def batch_values(self, params, X, y):
        t = np.asarray(y, dtype=np.float64) * _batch_margins(params, X)
        return _softplus_arr(-t)

    def batch_grad_theta(self, params, X, y):
        y = np.asarray(y, dtype=np.float64)
        t = y * _batch_margins(params, X)
        s = -y * _expit_arr(-t)
        return s[:, None] * np.asarray(X, dtype=np.float64), s


class CustomLoss(Loss):
    """User-supplied loss defined by three callbacks, each taking
    ``(params, features, label)``. There is no automatic differentiation:
    the caller provides both gradients explicitly."""

    code = None

    def __init__(
        self,
        value: Callable[[ModelParams, np.ndarray, float], float],
        grad_theta: Callable[[ModelParams, np.ndarray, float], tuple],
        grad_features: Callable[[ModelParams, np.ndarray, float], np.ndarray],
        name: str = "custom",
    ):
        self._value = value
        self._grad_theta = grad_theta
        self._grad_features = grad_features
        self.name = name

    def value(self, params, x, y):
        return float(self._value(params, np.asarray(x, dtype=np.float64), y))

    def grad_theta(self, params, x, y):
        gw, gb = self._grad_theta(params, np.asarray(x, dtype=np.float64), y)
        return np.asarray(gw, dtype=np.float64), float(gb)

    def grad_features(self, params, x, y):
        return np.asarray(
            self._grad_features(params, np.asarray(x, dtype=np.float64), y),
            dtype=np.float64,
        )


def loss_value(loss: Loss, params: ModelParams, sample: LabeledSample) -> float:
    return loss.value(params, sample.features, sample.label)


def grad_theta(loss: Loss, params: ModelParams, sample: LabeledSample):
    return loss.grad_theta(params, sample.features, sample.label)


def grad_features(loss: Loss, params: ModelParams, sample: LabeledSample) -> np.ndarray:
    return loss.grad_features(params, sample.features, sample.label)


def erm_objective(loss: Loss, params: ModelParams, dataset: Dataset) -> float:
    """Mean loss over the dataset."""
    return float(loss.batch_values(params, dataset.features, dataset.labels).mean())


def erm_value_and_grad(loss: Loss, params: ModelParams, dataset: Dataset):
    """Mean loss and its (weights, bias) gradient."""
    vals = loss.batch_values(params, dataset.features, dataset.labels)
    gw, gb = loss.batch_grad_theta(params, dataset.features, dataset.labels)
    return float(vals.mean()), gw.mean(axis=0), float(gb.mean())
