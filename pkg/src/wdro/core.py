"""Domain types, input validation, and splittable deterministic random streams.

All types are immutable value objects backed by read-only float64 arrays, so
they can be shared freely between threads. Randomness is only ever obtained
through :func:`derive_stream`, which maps a ``(seed, index)`` pair to an
independent generator; this is what makes parallel and serial Monte-Carlo
evaluation bit-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyDataset,
    InvalidConfig,
    NonFiniteValue,
)

# Stream indices below this belong to per-anchor clouds (iteration * n + i);
# auxiliary consumers (data splits, minibatch selection) start here.
AUX_STREAM_BASE = 2**48

_MAX_SEED = 2**64


def softplus(alpha: float) -> float:
    """log(1 + exp(alpha)), stable for large |alpha|."""
    return float(np.logaddexp(0.0, alpha))


def softplus_inv(lam: float) -> float:
    """Inverse of softplus; requires lam > 0."""
    if not lam > 0.0:
        raise InvalidConfig(f"softplus_inv requires a positive argument, got {lam}")
    if lam > 40.0:
        # exp(-lam) underflows the correction term
        return float(lam)
    return float(lam + math.log(-math.expm1(-lam)))


def sigmoid(x: float) -> float:
    """Logistic function, stable on both tails."""
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class LabeledSample:
    """One data point: a feature vector and a scalar label (+-1 for
    classification, arbitrary real for regression)."""

    features: np.ndarray
    label: float

    def __post_init__(self):
        x = np.asarray(self.features, dtype=np.float64)
        if x.ndim != 1 or x.size < 1:
            raise DimensionMismatch(f"features must be a nonempty vector, got shape {x.shape}")
        if not np.all(np.isfinite(x)):
            raise NonFiniteValue("non-finite feature value")
        y = float(self.label)
        if not math.isfinite(y):
            raise NonFiniteValue("non-finite label")
        object.__setattr__(self, "features", _readonly(x))
        object.__setattr__(self, "label", y)

    @property
    def dim(self) -> int:
        return self.features.shape[0]


@dataclass(frozen=True)
class Dataset:
    """An ordered sample collection, i.e. the empirical distribution.

    Stored as a read-only (n, d) feature matrix plus an (n,) label vector.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels, dtype=np.float64)
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise DimensionMismatch(
                f"features {X.shape} and labels {y.shape} do not form an (n, d) / (n,) pair"
            )
        if X.shape[0] == 0:
            raise EmptyDataset("dataset must contain at least one sample")
        if X.shape[1] < 1:
            raise DimensionMismatch("feature dimension must be >= 1")
        if not np.all(np.isfinite(X)):
            raise NonFiniteValue("non-finite feature value")
        if not np.all(np.isfinite(y)):
            raise NonFiniteValue("non-finite label")
        object.__setattr__(self, "features", _readonly(X))
        object.__setattr__(self, "labels", _readonly(y))

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def __len__(self) -> int:
        return self.n

    def sample(self, i: int) -> LabeledSample:
        return LabeledSample(self.features[i], float(self.labels[i]))

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        return Dataset(self.features[idx], self.labels[idx])


def validate_dataset(rows) -> Dataset:
    """Build a Dataset from (feature-sequence, label) pairs.

    Rejects empty input, ragged rows, and non-finite values; error objects
    carry the offending row index.
    """
    rows = list(rows)
    if not rows:
        raise EmptyDataset("no rows")
    first = np.asarray(rows[0][0], dtype=np.float64)
    if first.ndim != 1 or first.size < 1:
        raise DimensionMismatch("row 0 features must be a nonempty vector", index=0)
    dim = first.size
    X = np.empty((len(rows), dim))
    y = np.empty(len(rows))
    for i, (feats, label) in enumerate(rows):
        f = np.asarray(feats, dtype=np.float64)
        if f.ndim != 1 or f.size != dim:
            raise DimensionMismatch(
                f"row {i} has {f.size} features, expected {dim}", index=i
            )
        if not np.all(np.isfinite(f)):
            raise NonFiniteValue(f"row {i} contains a non-finite feature", index=i)
        lab = float(label)
        if not math.isfinite(lab):
            raise NonFiniteValue(f"row {i} label is not finite", index=i)
        X[i] = f
        y[i] = lab
    return Dataset(X, y)


@dataclass(frozen=True)
class ModelParams:
    """Weights and bias of a linear-in-features model."""

    weights: np.ndarray
    bias: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise DimensionMismatch(f"weights must be a nonempty vector, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or not math.isfinite(float(self.bias)):
            raise NonFiniteValue("non-finite model parameter")
        object.__setattr__(self, "weights", _readonly(w))
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    @staticmethod
    def zeros(dim: int) -> "ModelParams":
        return ModelParams(np.zeros(dim), 0.0)


@dataclass(frozen=True)
class RobustConfig:
    """Full robustification configuration.

    ``sigma`` and ``epsilon`` may be left as None and filled in later by the
    automatic calibration; every other field is validated immediately.
    """

    rho: float
    epsilon: float | None = None
    sigma: float | None = None
    m_samples: int = 16
    cost_power: int = 2
    seed: int = 0

    def __post_init__(self):
        if not (math.isfinite(self.rho) and self.rho >= 0.0):
            raise InvalidConfig("rho must be nonnegative")
        if self.epsilon is not None and not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise InvalidConfig("epsilon must be positive")
        if self.sigma is not None and not (math.isfinite(self.sigma) and self.sigma >= 0.0):
            raise InvalidConfig("sigma must be nonnegative")
        if int(self.m_samples) < 1:
            raise InvalidConfig("m_samples must be >= 1")
        if int(self.cost_power) not in (1, 2):
            raise InvalidConfig("cost_power must be 1 or 2")
        if not (0 <= int(self.seed) < _MAX_SEED):
            raise InvalidConfig("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "m_samples", int(self.m_samples))
        object.__setattr__(self, "cost_power", int(self.cost_power))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def resolved(self) -> bool:
        return self.epsilon is not None and self.sigma is not None

    def require_resolved(self) -> None:
        if not self.resolved:
            raise InvalidConfig("config has unresolved sigma/epsilon; calibrate first")


@dataclass(frozen=True)
class DualState:
    """Unconstrained parametrization of the nonnegative dual multiplier:
    lambda = softplus(alpha) stays positive and smooth for all finite alpha."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not math.isfinite(a):
            raise NonFiniteValue("alpha must be finite")
        object.__setattr__(self, "alpha", a)

    @property
    def lam(self) -> float:
        return softplus(self.alpha)

    @staticmethod
    def from_lambda(lam: float) -> "DualState":
        return DualState(softplus_inv(lam))


def derive_stream(seed: int, index: int) -> np.random.Generator:
    """Deterministic, independent random stream for a ``(seed, index)`` pair.

    The same pair always yields the same draw sequence, and distinct indices
    yield streams that can be consumed in any order or concurrently.
    """
    seed = int(seed)
    index = int(index)
    if not (0 <= seed < _MAX_SEED):
        raise InvalidConfig("seed must fit in an unsigned 64-bit integer")
    if index < 0:
        raise InvalidConfig("stream index must be nonnegative")
    return np.random.default_rng(np.random.SeedSequence(entropy=(seed, index)))
