"""Compiled per-anchor kernels. Import only when numba is installed.

``anchor_terms_compiled`` mirrors ``kernels.anchor_terms_numpy`` for the
built-in losses (loss_code 0 squared error, 1 logistic). Custom losses have no
code and always take the numpy path.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def anchor_terms_compiled(Z, lw, x, y, w, b, lam, eps, cost_power, loss_code):
    m, d = Z.shape
    L = np.empty(m)
    dm = np.empty(m)
    c = np.empty(m)
    for j in range(m):
        margin = b
        sq = 0.0
        for k in range(d):
            margin += w[k] * Z[j, k]
            dk = Z[j, k] - x[k]
            sq += dk * dk
        c[j] = sq if cost_power == 2 else np.sqrt(sq)
        if loss_code == 0:
            r = margin - y
            L[j] = 0.5 * r * r
            dm[j] = r
        else:
            t = y * margin
            # softplus(-t) and -y*sigmoid(-t), stable in both tails
            if t > 0.0:
                et = np.exp(-t)
                L[j] = np.log1p(et)
                dm[j] = -y * et / (1.0 + et)
            else:
                et = np.exp(t)
                L[j] = -t + np.log1p(et)
                dm[j] = -y / (1.0 + et)

    hi = -np.inf
    u = np.empty(m)
    for j in range(m):
        u[j] = (L[j] - lam * c[j]) / eps + lw[j]
        if u[j] > hi:
            hi = u[j]
    s = 0.0
    for j in range(m):
        u[j] = np.exp(u[j] - hi)
        s += u[j]
    value = eps * (hi + np.log(s) - np.log(m))

    gw = np.zeros(d)
    gb = 0.0
    cbar = 0.0
    for j in range(m):
        p = u[j] / s
        u[j] = p
        gb += p * dm[j]
        cbar += p * c[j]
        for k in range(d):
            gw[k] += p * dm[j] * Z[j, k]
    return value, u, gw, gb, cbar
