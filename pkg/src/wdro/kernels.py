"""Pure-numpy reference kernels for the per-anchor objective terms.

These are the fallback twins of the numba kernels in ``_kernels_numba``; both
compute, for one anchor and its sample cloud, the smoothed inner term

    eps * ( logsumexp_j[(L_j - lam * c_j) / eps + lw_j] - log m ),

its softmax weights, and the softmax-weighted parameter-gradient and cost
aggregates. Sample locations are treated as constants, so these gradients are
exact for the realized estimator.
"""

from __future__ import annotations

import numpy as np

from .core import ModelParams
from .losses import Loss


def logsumexp(u: np.ndarray) -> float:
    """Max-shifted log(sum(exp(u)))."""
    m = float(np.max(u))
    return m + float(np.log(np.sum(np.exp(u - m))))


def anchor_terms_numpy(
    loss: Loss,
    params: ModelParams,
    lam: float,
    eps: float,
    power: int,
    x: np.ndarray,
    y: float,
    Z: np.ndarray,
    lw: np.ndarray,
    want_grad: bool = True,
):
    """Smoothed term, softmax row, and gradient aggregates for one anchor.

    Returns ``(value, p, grad_w, grad_b, cost_bar)`` where ``p`` has shape
    (m,), ``grad_w = sum_j p_j * dL_j/dw``, ``grad_b = sum_j p_j * dL_j/db``
    and ``cost_bar = sum_j p_j * c_j``. Works for any loss via its batch
    methods (vectorized for the built-ins, per-point loop otherwise).
    """
    m = Z.shape[0]
    L = loss.batch_values(params, Z, y)
    diff = Z - x
    sq = np.einsum("jk,jk->j", diff, diff)
    c = sq if power == 2 else np.sqrt(sq)
    u = (L - lam * c) / eps + lw
    hi = float(np.max(u))
    e = np.exp(u - hi)
    s = float(e.sum())
    p = e / s
    value = eps * (hi + np.log(s) - np.log(m))
    if not want_grad:
        return float(value), p, None, 0.0, float(p @ c)
    gw_rows, gb_rows = loss.batch_grad_theta(params, Z, y)
    grad_w = p @ gw_rows
    grad_b = float(p @ gb_rows)
    return float(value), p, grad_w, grad_b, float(p @ c)
