import numpy as np
import pytest

from wdro import (
    DegeneratePoint,
    DimensionMismatch,
    GroundCost,
    InvalidConfig,
    LabelMismatch,
    LabeledSample,
    cost_features,
)


def test_cost_hand_values():
    xi = LabeledSample(np.array([1.0, 2.0]), 1.0)
    zeta = LabeledSample(np.array([4.0, 6.0]), 1.0)
    # distance 5
    assert GroundCost(power=2).cost(xi, zeta) == pytest.approx(25.0, abs=1e-12)
    assert GroundCost(power=1).cost(xi, zeta) == pytest.approx(5.0, abs=1e-12)
    assert GroundCost().power == 2
    assert cost_features(xi.features, zeta.features, 1) == pytest.approx(5.0)


def test_cost_is_zero_at_anchor():
    xi = LabeledSample(np.array([0.3, -0.7]), -1.0)
    for p in (1, 2):
        assert GroundCost(power=p).cost(xi, xi) == 0.0


def test_invalid_power_rejected():
    for p in (0, 3, -1):
        with pytest.raises(InvalidConfig):
            GroundCost(power=p)


def test_label_and_dim_checks():
    xi = LabeledSample(np.array([1.0]), 1.0)
    with pytest.raises(LabelMismatch):
        GroundCost().cost(xi, LabeledSample(np.array([2.0]), -1.0))
    with pytest.raises(DimensionMismatch):
        GroundCost().cost(xi, LabeledSample(np.array([1.0, 2.0]), 1.0))


def test_grad_zeta_matches_finite_differences():
    rng = np.random.default_rng(7)
    h = 1e-6
    tol = 1e-5
    for p in (1, 2):
        cost = GroundCost(power=p)
        for _ in range(20):
            d = int(rng.integers(1, 5))
            x = rng.normal(size=d)
            z = x + rng.normal(size=d)  # generic offset, no coincidence
            xi = LabeledSample(x, 1.0)
            g = cost.grad_zeta(xi, LabeledSample(z, 1.0))
            fd = np.zeros(d)
            for k in range(d):
                e = np.zeros(d)
                e[k] = h
                up = cost.cost(xi, LabeledSample(z + e, 1.0))
                dn = cost.cost(xi, LabeledSample(z - e, 1.0))
                fd[k] = (up - dn) / (2 * h)
            assert np.allclose(g, fd, rtol=tol, atol=tol)


def test_grad_zeta_p1_unit_norm():
    xi = LabeledSample(np.array([0.0, 0.0]), 1.0)
    zeta = LabeledSample(np.array([3.0, 4.0]), 1.0)
    g = GroundCost(power=1).grad_zeta(xi, zeta)
    assert np.allclose(g, [0.6, 0.8], atol=1e-15)
    assert np.linalg.norm(g) == pytest.approx(1.0, abs=1e-15)


def test_grad_zeta_p1_degenerate_at_anchor():
    xi = LabeledSample(np.array([1.0, 1.0]), 1.0)
    with pytest.raises(DegeneratePoint):
        GroundCost(power=1).grad_zeta(xi, xi)
    # p=2 gradient is fine there
    assert np.allclose(GroundCost(power=2).grad_zeta(xi, xi), [0.0, 0.0])
