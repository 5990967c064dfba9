"""Default (sigma, epsilon, lambda0) selection from the radius.

The perturbation scale follows the radius and the smoothing strength sits one
order below it; both are floored to keep configs valid at rho = 0. These are
simple overridable defaults, not fitted rules.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import Dataset, RobustConfig
from .errors import InvalidConfig

SIGMA_FLOOR = 1e-8
EPSILON_FLOOR = 1e-6


class Calibration(NamedTuple):
    sigma: float
    epsilon: float
    lambda0: float


def calibrate(rho: float, dataset: Dataset) -> Calibration:
    """sigma = max(rho, 1e-8), epsilon = max(rho/10, 1e-6), lambda0 = 1."""
    if rho < 0.0:
        raise InvalidConfig("rho must be nonnegative")
    return Calibration(max(float(rho), SIGMA_FLOOR),
                       max(float(rho) / 10.0, EPSILON_FLOOR), 1.0)


def resolve_config(config: RobustConfig, dataset: Dataset) -> RobustConfig:
    """Fill any unset sigma/epsilon with calibrated defaults."""
    if config.resolved:
        return config
    cal = calibrate(config.rho, dataset)
    return RobustConfig(
        rho=config.rho,
        epsilon=config.epsilon if config.epsilon is not None else cal.epsilon,
        sigma=config.sigma if config.sigma is not None else cal.sigma,
        m_samples=config.m_samples,
        cost_power=config.cost_power,
        seed=config.seed,
    )
