"""Entropic-smoothed dual objective over Monte-Carlo sample clouds.

Each anchor point gets a cloud of m Gaussian perturbations, optionally mean
shifted by exponential tilting with importance-sampling log-weight
corrections. The objective is

    J(theta, lambda) = lambda * rho + mean_i eps * (logsumexp_j u_ij - log m)
    u_ij = (L_theta(zeta_ij) - lambda * c(xi_i, zeta_ij)) / eps + lw_ij

and its gradients treat the realized cloud locations as constants, so the
analytic gradient is exact for the estimator actually evaluated (score-free).
Per-anchor work is independent and may run on a thread pool; results are
assembled by anchor index and reduced in a fixed order, so parallel output is
bit-identical to serial.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .backend import resolve_backend, resolve_workers
from .core import (
    Dataset,
    DualState,
    LabeledSample,
    ModelParams,
    RobustConfig,
    _readonly,
    derive_stream,
    sigmoid,
)
from .errors import DimensionMismatch, NonFiniteObjective, NonFiniteValue
from .kernels import anchor_terms_numpy
from .losses import Loss

_compiled = None


def _compiled_kernel():
    global _compiled
    if _compiled is None:
        from . import _kernels_numba

        _compiled = _kernels_numba.anchor_terms_compiled
    return _compiled


@dataclass(frozen=True)
class SampleCloud:
    """Perturbed copies of one anchor, all carrying the anchor's label.

    ``points`` has shape (m, d); ``log_weights`` holds the importance
    log-corrections (all zero when the proposal equals the target)."""

    anchor_index: int
    label: float
    points: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self):
        Z = _readonly(self.points)
        lw = _readonly(self.log_weights)
        if Z.ndim != 2 or lw.shape != (Z.shape[0],):
            raise DimensionMismatch(
                f"cloud points {Z.shape} and log_weights {lw.shape} disagree"
            )
        if not np.all(np.isfinite(lw)):
            raise NonFiniteValue("non-finite log-weight")
        object.__setattr__(self, "points", Z)
        object.__setattr__(self, "log_weights", lw)
        object.__setattr__(self, "label", float(self.label))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def sample(self, j: int) -> LabeledSample:
        return LabeledSample(self.points[j], self.label)


class ObjectiveValue(NamedTuple):
    """Estimator value plus its per-anchor terms and softmax rows."""

    total: float
    per_anchor: np.ndarray
    softmax: np.ndarray


class DualGradient(NamedTuple):
    grad_weights: np.ndarray
    grad_bias: float
    grad_alpha: float


def sample_cloud(
    xi: LabeledSample,
    i: int,
    config: RobustConfig,
    shift: np.ndarray | None = None,
    *,
    stream_index: int | None = None,
) -> SampleCloud:
    """Draw the m-point cloud for anchor i from its dedicated stream.

    Points are x + shift + sigma * g with g standard normal; the log-weight
    of each point is the log density ratio of the target N(x, sigma^2 I) over
    the proposal N(x + shift, sigma^2 I). With sigma = 0 the cloud collapses
    onto the anchor and every log-weight is 0 regardless of shift.

    ``stream_index`` overrides the stream derivation index (the trainer salts
    it with the iteration counter to resample); it defaults to i.
    """
    config.require_resolved()
    x = xi.features
    d = x.shape[0]
    m = config.m_samples
    sigma = config.sigma
    if shift is not None:
        shift = np.asarray(shift, dtype=np.float64)
        if shift.shape != (d,):
            raise DimensionMismatch(
                f"shift has shape {shift.shape}, expected ({d},)"
            )
    if sigma == 0.0:
        return SampleCloud(i, xi.label, np.tile(x, (m, 1)), np.zeros(m))
    stream = derive_stream(config.seed, i if stream_index is None else stream_index)
    g = stream.standard_normal((m, d))
    if shift is None or not np.any(shift):
        return SampleCloud(i, xi.label, x + sigma * g, np.zeros(m))
    Z = x + shift + sigma * g
    to_target = Z - x
    lw = (sigma * sigma * np.einsum("jk,jk->j", g, g)
          - np.einsum("jk,jk->j", to_target, to_target)) / (2.0 * sigma * sigma)
    return SampleCloud(i, xi.label, Z, lw)


def importance_shift(
    loss: Loss, params: ModelParams, xi: LabeledSample, config: RobustConfig
) -> np.ndarray:
    """Exponential-tilting mean shift (sigma^2/eps) * dL/dx, clipped to 3 sigma.

    The clip keeps the proposal overlapping the target so the weights stay
    well conditioned. Only the loss gradient drives the shift; the transport
    term is left out of the tilt."""
    config.require_resolved()
    g = loss.grad_features(params, xi.features, xi.label)
    s = (config.sigma * config.sigma / config.epsilon) * g
    norm = float(np.linalg.norm(s))
    cap = 3.0 * config.sigma
    if norm > cap:
        s = s * (cap / norm)
    return s


def build_clouds(
    loss: Loss,
    params: ModelParams,
    dataset: Dataset,
    config: RobustConfig,
    use_importance_sampling: bool = False,
    *,
    salt: int = 0,
    indices: np.ndarray | None = None,
) -> list[SampleCloud]:
    """Clouds for every anchor, streams derived from salt + global index."""
    config.require_resolved()
    if indices is None:
        indices = np.arange(dataset.n)
    clouds = []
    for pos in range(dataset.n):
        xi = dataset.sample(pos)
        shift = None
        if use_importance_sampling and config.sigma > 0.0:
            shift = importance_shift(loss, params, xi, config)
        clouds.append(
            sample_cloud(xi, pos, config, shift,
                         stream_index=salt + int(indices[pos]))
        )
    return clouds


def _anchor_terms(loss, params, lam, eps, power, x, y, Z, lw, backend, want_grad):
    if backend == "numba" and loss.code is not None:
        return _compiled_kernel()(
            Z, lw, x, y, params.weights, params.bias, lam, eps, power, loss.code
        )
    return anchor_terms_numpy(loss, params, lam, eps, power, x, y, Z, lw, want_grad)


def _evaluate(
    loss: Loss,
    params: ModelParams,
    dual: DualState,
    dataset: Dataset,
    config: RobustConfig,
    use_importance_sampling: bool,
    clouds: Sequence[SampleCloud] | None,
    salt: int,
    indices: np.ndarray | None,
    backend: str | None,
    workers: int | None,
    want_grad: bool,
):
    config.require_resolved()
    if params.dim != dataset.dim:
        raise DimensionMismatch(
            f"model dim {params.dim} does not match data dim {dataset.dim}"
        )
    if clouds is None:
        clouds = build_clouds(
            loss, params, dataset, config, use_importance_sampling,
            salt=salt, indices=indices,
        )
    elif len(clouds) != dataset.n:
        raise DimensionMismatch(
            f"{len(clouds)} clouds for {dataset.n} anchors"
        )
    backend = resolve_backend(backend)
    if loss.code is None:
        backend = "numpy"
    workers = resolve_workers(workers)
    n, m = dataset.n, clouds[0].m
    lam, eps, power = dual.lam, config.epsilon, config.cost_power
    per_anchor = np.empty(n)
    softmax = np.empty((n, m))
    gw = np.empty((n, params.dim)) if want_grad else None
    gb = np.empty(n) if want_grad else None
    cbar = np.empty(n)

    def run(i: int) -> None:
        val, p, gwi, gbi, ci = _anchor_terms(
            loss, params, lam, eps, power,
            dataset.features[i], float(dataset.labels[i]),
            clouds[i].points, clouds[i].log_weights,
            backend, want_grad,
        )
        per_anchor[i] = val
        softmax[i] = p
        cbar[i] = ci
        if want_grad:
            gw[i] = gwi
            gb[i] = gbi

    if workers > 1 and n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, range(n)))
    else:
        for i in range(n):
            run(i)

    total = lam * config.rho + float(np.mean(per_anchor))
    if not (np.isfinite(total) and np.all(np.isfinite(per_anchor))):
        raise NonFiniteObjective("non-finite objective term")
    value = ObjectiveValue(total, per_anchor, softmax)
    if not want_grad:
        return value, None
    grad_w = gw.mean(axis=0)
    grad_b = float(np.mean(gb))
    grad_lambda = config.rho - float(np.mean(cbar))
    grad_alpha = grad_lambda * sigmoid(dual.alpha)
    if not (np.all(np.isfinite(grad_w)) and np.isfinite(grad_b) and np.isfinite(grad_alpha)):
        raise NonFiniteObjective("non-finite gradient")
    return value, DualGradient(grad_w, grad_b, grad_alpha)


def dual_objective(
    loss: Loss,
    params: ModelParams,
    dual: DualState,
    dataset: Dataset,
    config: RobustConfig,
    use_importance_sampling: bool = False,
    *,
    clouds: Sequence[SampleCloud] | None = None,
    salt: int = 0,
    indices: np.ndarray | None = None,
    backend: str | None = None,
    workers: int | None = None,
) -> ObjectiveValue:
    """Value of the smoothed dual estimator (see module docstring)."""
    value, _ = _evaluate(
        loss, params, dual, dataset, config, use_importance_sampling,
        clouds, salt, indices, backend, workers, want_grad=False,
    )
    return value


def dual_gradient(
    loss: Loss,
    params: ModelParams,
    dual: DualState,
    dataset: Dataset,
    config: RobustConfig,
    use_importance_sampling: bool = False,
    *,
    clouds: Sequence[SampleCloud] | None = None,
    salt: int = 0,
    indices: np.ndarray | None = None,
    backend: str | None = None,
    workers: int | None = None,
) -> DualGradient:
    """Analytic gradient in (weights, bias, alpha) on the same clouds.

    d/d theta is the softmax-weighted loss gradient, d/d lambda is
    rho - softmax-weighted transport cost, and the alpha component applies
    the softplus chain rule."""
    _, grad = _evaluate(
        loss, params, dual, dataset, config, use_importance_sampling,
        clouds, salt, indices, backend, workers, want_grad=True,
    )
    return grad


def dual_value_and_grad(
    loss: Loss,
    params: ModelParams,
    dual: DualState,
    dataset: Dataset,
    config: RobustConfig,
    use_importance_sampling: bool = False,
    *,
    clouds: Sequence[SampleCloud] | None = None,
    salt: int = 0,
    indices: np.ndarray | None = None,
    backend: str | None = None,
    workers: int | None = None,
):
    """One pass computing both; guarantees value and gradient share clouds."""
    return _evaluate(
        loss, params, dual, dataset, config, use_importance_sampling,
        clouds, salt, indices, backend, workers, want_grad=True,
    )
