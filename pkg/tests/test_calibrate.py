import numpy as np
import pytest

from wdro import (
    EPSILON_FLOOR,
    SIGMA_FLOOR,
    Dataset,
    InvalidConfig,
    RobustConfig,
    calibrate,
    resolve_config,
)


def _ds():
    rng = np.random.default_rng(0)
    return Dataset(rng.normal(size=(10, 2)), np.ones(10))


def test_calibrate_examples():
    ds = _ds()
    cal = calibrate(0.5, ds)
    assert cal.sigma == 0.5
    assert cal.epsilon == 0.05
    assert cal.lambda0 == 1.0
    cal = calibrate(1e-6, ds)
    assert cal.sigma == 1e-6
    assert cal.epsilon == EPSILON_FLOOR
    cal = calibrate(0.0, ds)
    assert cal.sigma == SIGMA_FLOOR
    assert cal.epsilon == EPSILON_FLOOR
    assert cal.lambda0 == 1.0


def test_calibrate_monotone_in_rho():
    ds = _ds()
    rhos = [0.0, 1e-4, 0.01, 0.1, 1.0, 10.0]
    sigmas = [calibrate(r, ds).sigma for r in rhos]
    epsilons = [calibrate(r, ds).epsilon for r in rhos]
    assert sigmas == sorted(sigmas)
    assert epsilons == sorted(epsilons)
    assert all(s > 0 for s in sigmas)
    assert all(e > 0 for e in epsilons)


def test_calibrate_rejects_negative_rho():
    with pytest.raises(InvalidConfig):
        calibrate(-0.1, _ds())


def test_resolve_config_fills_only_unset_fields():
    ds = _ds()
    cfg = RobustConfig(rho=0.5, m_samples=32, cost_power=1, seed=7)
    out = resolve_config(cfg, ds)
    assert out.sigma == 0.5 and out.epsilon == 0.05
    assert (out.m_samples, out.cost_power, out.seed) == (32, 1, 7)
    # explicit values win over the defaults
    half = RobustConfig(rho=0.5, sigma=0.123)
    out = resolve_config(half, ds)
    assert out.sigma == 0.123 and out.epsilon == 0.05
    full = RobustConfig(rho=0.5, epsilon=0.9, sigma=0.8)
    assert resolve_config(full, ds) is full
