"""Seeded synthetic datasets shared across tests."""

import numpy as np

from wdro import Dataset, derive_stream


def logistic_blobs(n, d, scale, seed, beta=3.0):
    """Gaussian features at the given scale, labels flipped by a logistic
    rule along the normalized all-ones direction. Smaller beta means more
    label noise near the boundary."""
    rng = derive_stream(seed, 0)
    X = scale * rng.standard_normal((n, d))
    wstar = np.ones(d) / np.sqrt(d)
    t = X @ wstar / scale
    y = np.where(rng.random(n) < 1.0 / (1.0 + np.exp(-beta * t)), 1.0, -1.0)
    return Dataset(X, y)


def regression_blobs(n, d, seed, noise=0.1):
    rng = derive_stream(seed, 0)
    X = rng.standard_normal((n, d))
    wstar = rng.standard_normal(d)
    y = X @ wstar + 0.5 + noise * rng.standard_normal(n)
    return Dataset(X, y)


def write_csv(ds, path, header=None):
    cols = header or [f"x{i}" for i in range(ds.dim)] + ["y"]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for i in range(ds.n):
            cells = [repr(float(v)) for v in ds.features[i]]
            cells.append(repr(float(ds.labels[i])))
            fh.write(",".join(cells) + "\n")
