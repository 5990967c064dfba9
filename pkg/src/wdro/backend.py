"""Kernel backend selection.

Hot per-anchor kernels exist in two interchangeable flavors: a numba-compiled
one and a pure-numpy one. The flavor is picked by the ``WDRO_BACKEND``
environment variable ("numba" or "numpy"), by an explicit argument, or by
auto-detection (numba when importable, numpy otherwise). Custom losses have
no compiled form and always run on the numpy path.
"""

from __future__ import annotations

import os

from .errors import InvalidConfig

BACKEND_ENV = "WDRO_BACKEND"
WORKERS_ENV = "WDRO_WORKERS"

try:
    import numba  # noqa: F401

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAS_NUMBA = False


def available_backends() -> tuple[str, ...]:
    return ("numba", "numpy") if HAS_NUMBA else ("numpy",)


def resolve_backend(backend: str | None = None) -> str:
    """Normalize an explicit choice or fall back to env var / auto."""
    choice = backend or os.environ.get(BACKEND_ENV) or ("numba" if HAS_NUMBA else "numpy")
    choice = choice.lower()
    if choice not in ("numba", "numpy"):
        raise InvalidConfig(f"unknown backend {choice!r}; expected 'numba' or 'numpy'")
    if choice == "numba" and not HAS_NUMBA:
        raise InvalidConfig("numba backend requested but numba is not importable")
    return choice


def resolve_workers(workers: int | None = None) -> int:
    """Number of threads for per-anchor evaluation; 1 means serial."""
    if workers is None:
        raw = os.environ.get(WORKERS_ENV)
        workers = int(raw) if raw else 1
    if workers < 1:
        raise InvalidConfig("workers must be >= 1")
    return int(workers)


def warm_up() -> None:
    """Trigger numba JIT compilation ahead of timed sections."""
    if not HAS_NUMBA:
        return
    import numpy as np

    from . import _kernels_numba

    Z = np.zeros((2, 2))
    lw = np.zeros(2)
    x = np.zeros(2)
    w = np.zeros(2)
    for code in (0, 1):
        for power in (1, 2):
            _kernels_numba.anchor_terms_compiled(
                Z, lw, x, 1.0, w, 0.0, 1.0, 1.0, power, code
            )
