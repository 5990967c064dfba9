"""Training workflows: ERM baseline, entropic WDRO, and the convex oracle.

All loops are single-threaded state machines; the objective/gradient calls
they make may parallelize internally across anchors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calibrate import calibrate, resolve_config
from .core import (
    AUX_STREAM_BASE,
    Dataset,
    DualState,
    ModelParams,
    RobustConfig,
    derive_stream,
    softplus,
    softplus_inv,
)
from .entropic import dual_value_and_grad
from .errors import (
    DimensionMismatch,
    InvalidConfig,
    InvalidLabels,
    NonFiniteObjective,
)
from .losses import Logistic, Loss, SquaredError, erm_value_and_grad

OPTIMIZERS = ("plain-sgd", "adaptive-moment")


@dataclass(frozen=True)
class TrainSettings:
    """Optimizer knobs shared by the ERM and WDRO fitters.

    ``resample_each_iter`` draws fresh clouds every iteration by salting the
    stream index with the iteration counter; turning it off fixes the clouds,
    making the objective a deterministic smooth function. ``batch_size`` of
    None means full batch. ``backend``/``workers`` pass through to the
    objective evaluations (None defers to the environment)."""

    max_iters: int = 500
    learning_rate: float = 0.01
    grad_tol: float = 1e-6
    optimizer: str = "adaptive-moment"
    batch_size: int | None = None
    resample_each_iter: bool = True
    use_importance_sampling: bool = True
    backend: str | None = None
    workers: int | None = None

    def __post_init__(self):
        if int(self.max_iters) < 1:
            raise InvalidConfig("max_iters must be >= 1")
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0.0):
            raise InvalidConfig("learning_rate must be positive")
        if not (math.isfinite(self.grad_tol) and self.grad_tol > 0.0):
            raise InvalidConfig("grad_tol must be positive")
        if self.optimizer not in OPTIMIZERS:
            raise InvalidConfig(f"optimizer must be one of {OPTIMIZERS}")
        if self.batch_size is not None and int(self.batch_size) < 1:
            raise InvalidConfig("batch_size must be >= 1")


@dataclass(frozen=True)
class FitReport:
    final_params: ModelParams
    final_lambda: float
    objective_trace: tuple
    iterations_run: int
    converged: bool

    def __post_init__(self):
        if len(self.objective_trace) != self.iterations_run + 1:
            raise InvalidConfig("trace length must be iterations_run + 1")


def _descend(value_and_grad, x0: np.ndarray, settings: TrainSettings):
    """Shared loop. trace[k] is the objective at the iterate before update k;
    on early convergence no update is made at the final evaluation, on
    exhaustion one extra evaluation appends the post-update value."""
    x = np.array(x0, dtype=np.float64)
    adaptive = settings.optimizer == "adaptive-moment"
    lr = settings.learning_rate
    b1, b2, off = 0.9, 0.999, 1e-8
    m1 = np.zeros_like(x)
    m2 = np.zeros_like(x)
    trace = []
    for it in range(settings.max_iters):
        val, g = value_and_grad(x, it)
        trace.append(float(val))
        if float(np.linalg.norm(g)) <= settings.grad_tol:
            return x, tuple(trace), it, True
        if adaptive:
            m1 = b1 * m1 + (1.0 - b1) * g
            m2 = b2 * m2 + (1.0 - b2) * g * g
            t = it + 1
            step = (m1 / (1.0 - b1**t)) / (np.sqrt(m2 / (1.0 - b2**t)) + off)
            x = x - lr * step
        else:
            x = x - lr * g
        if not np.all(np.isfinite(x)):
            raise NonFiniteObjective("parameters diverged during training")
    val, g = value_and_grad(x, settings.max_iters)
    trace.append(float(val))
    done = float(np.linalg.norm(g)) <= settings.grad_tol
    return x, tuple(trace), settings.max_iters, done


def _batch_indices(n: int, batch: int | None, seed: int, it: int) -> np.ndarray:
    if batch is None or batch >= n:
        return np.arange(n)
    rng = derive_stream(seed, AUX_STREAM_BASE + it)
    return np.sort(rng.choice(n, size=batch, replace=False))


def fit_erm(loss: Loss, dataset: Dataset, settings: TrainSettings | None = None) -> FitReport:
    """Minimize the empirical mean loss from theta = 0."""
    settings = settings or TrainSettings()
    d = dataset.dim

    def value_and_grad(x, it):
        params = ModelParams(x[:d], x[d])
        idx = _batch_indices(dataset.n, settings.batch_size, 0, it)
        sub = dataset if idx.size == dataset.n else dataset.subset(idx)
        val, gw, gb = erm_value_and_grad(loss, params, sub)
        if not np.isfinite(val):
            raise NonFiniteObjective("non-finite training objective")
        return val, np.concatenate([gw, [gb]])

    x, trace, iters, done = _descend(value_and_grad, np.zeros(d + 1), settings)
    return FitReport(ModelParams(x[:d], x[d]), 0.0, trace, iters, done)


def fit_wdro(
    loss: Loss,
    dataset: Dataset,
    config: RobustConfig,
    settings: TrainSettings | None = None,
) -> FitReport:
    """Jointly minimize the smoothed dual over (theta, alpha).

    Starts at theta = 0, alpha = softplus_inv(lambda0); unresolved
    sigma/epsilon are calibrated from rho first."""
    settings = settings or TrainSettings()
    config = resolve_config(config, dataset)
    d = dataset.dim
    n = dataset.n
    alpha0 = softplus_inv(calibrate(config.rho, dataset).lambda0)

    def value_and_grad(x, it):
        params = ModelParams(x[:d], x[d])
        dual = DualState(x[d + 1])
        idx = _batch_indices(n, settings.batch_size, config.seed, it)
        sub = dataset if idx.size == n else dataset.subset(idx)
        salt = it * n if settings.resample_each_iter else 0
        value, grad = dual_value_and_grad(
            loss, params, dual, sub, config,
            settings.use_importance_sampling,
            salt=salt, indices=idx,
            backend=settings.backend, workers=settings.workers,
        )
        g = np.concatenate([grad.grad_weights, [grad.grad_bias, grad.grad_alpha]])
        return value.total, g

    x0 = np.concatenate([np.zeros(d + 1), [alpha0]])
    x, trace, iters, done = _descend(value_and_grad, x0, settings)
    lam = softplus(float(x[d + 1]))
    return FitReport(ModelParams(x[:d], x[d]), lam, trace, iters, done)


def fit_oracle_logistic(
    dataset: Dataset,
    rho: float,
    *,
    max_iters: int = 20000,
    grad_tol: float = 1e-8,
) -> FitReport:
    """Convex reference: logistic loss plus rho times the weight norm.

    Full-batch descent with the subgradient rho * w / |w| (zero at w = 0) and
    Armijo backtracking, bias unpenalized. For Lipschitz losses with a norm
    ground cost this program is the exact robust counterpart, which is what
    makes it usable as an oracle for the entropic solver."""
    labels = np.unique(dataset.labels)
    if not np.all(np.isin(labels, (-1.0, 1.0))):
        raise InvalidLabels(f"labels must be in {{-1, +1}}, got {labels}")
    if rho < 0.0:
        raise InvalidConfig("rho must be nonnegative")
    loss = Logistic()
    d = dataset.dim

    def objective(x):
        """Value, step subgradient, and the minimal-norm subgradient.

        The step direction uses rho * w / |w| with the zero convention at
        w = 0; optimality is measured by the smallest subgradient instead,
        which at w = 0 shrinks the data gradient by the rho-ball (so the
        kink can be recognized as stationary)."""
        params = ModelParams(x[:d], x[d])
        val, gw, gb = erm_value_and_grad(loss, params, dataset)
        wn = float(np.linalg.norm(x[:d]))
        if wn == 0.0:
            g_step = gw
            shrink = max(0.0, 1.0 - rho / max(float(np.linalg.norm(gw)), 1e-300))
            g_opt = gw * shrink
        else:
            g_step = gw + (rho / wn) * x[:d]
            g_opt = g_step
        return (
            val + rho * wn,
            np.concatenate([g_step, [gb]]),
            np.concatenate([g_opt, [gb]]),
        )

    # curvature bound of the data term: hessian <= 0.25 * mean(|x|^2 + 1)
    lip = 0.25 * float(np.mean(np.sum(dataset.features**2, axis=1) + 1.0))
    step0 = 1.0 / max(lip, 1e-12)
    x = np.zeros(d + 1)
    val, g, g_opt = objective(x)
    trace = [float(val)]
    iters = 0
    done = float(np.linalg.norm(g_opt)) <= grad_tol
    t_prev = step0
    while iters < max_iters and not done:
        # grow the trial step from the last accepted one so badly scaled
        # directions (weights vs bias) are not stuck at the global 1/L
        t = min(4.0 * t_prev, 1e8 * step0)
        gn2 = float(g @ g)
        accepted = False
        while t >= 1e-20:
            cand = x - t * g
            cval, cg, cg_opt = objective(cand)
            if cval < val and cval <= val - 1e-4 * t * gn2:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            break  # no representable descent left
        x, val, g, g_opt = cand, cval, cg, cg_opt
        t_prev = t
        iters += 1
        trace.append(float(val))
        done = float(np.linalg.norm(g_opt)) <= grad_tol
    return FitReport(ModelParams(x[:d], x[d]), 0.0, tuple(trace), iters, done)


def margin(params: ModelParams, features) -> float:
    """Decision value theta . x + b."""
    x = np.asarray(features, dtype=np.float64)
    if x.shape != (params.dim,):
        raise DimensionMismatch(
            f"features have shape {x.shape}, expected ({params.dim},)"
        )
    return float(params.weights @ x + params.bias)


def predict(loss: Loss, params: ModelParams, features) -> float:
    """Point prediction: the margin for regression, its sign (ties to +1)
    for classification."""
    m = margin(params, features)
    if isinstance(loss, Logistic):
        return 1.0 if m >= 0.0 else -1.0
    return m


def evaluate(loss: Loss, params: ModelParams, dataset: Dataset) -> dict:
    """Mean loss plus accuracy (logistic) or rmse (squared error)."""
    vals = loss.batch_values(params, dataset.features, dataset.labels)
    out = {"mean_loss": float(np.mean(vals))}
    margins = dataset.features @ params.weights + params.bias
    if isinstance(loss, Logistic):
        preds = np.where(margins >= 0.0, 1.0, -1.0)
        out["accuracy"] = float(np.mean(preds == dataset.labels))
    elif isinstance(loss, SquaredError):
        out["rmse"] = float(np.sqrt(np.mean((margins - dataset.labels) ** 2)))
    return out
