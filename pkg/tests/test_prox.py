import numpy as np
import pytest

from pldc.utils.prox import (
    loss_value,
    prox_absolute,
    prox_hinge,
    prox_squared,
    proxoperator,
    soft_thresholding,
)

LOSS_FUNCS = {
    "squared": lambda u, y: (u - y) ** 2,
    "absolute": lambda u, y: np.abs(u - y),
    "hinge": lambda u, y: np.maximum(1.0 - y * u, 0.0),
}


def test_soft_thresholding():
    np.testing.assert_allclose(soft_thresholding(np.array([3.0, -3.0, 0.5]), 1.0), [2.0, -2.0, 0.0])


def test_absolute_prox_fixed_point():
    assert prox_absolute(np.array([2.5]), np.array([2.5]), 0.3)[0] == 2.5


def test_hinge_prox_identity_when_margin_met():
    v = np.array([1.0, 3.0, -2.0])
    y = np.array([1.0, 1.0, -1.0])
    np.testing.assert_array_equal(prox_hinge(v, y, 0.7), v)


def test_hinge_prox_three_regions():
    y = np.ones(3)
    np.testing.assert_allclose(prox_hinge(np.array([0.0, 0.8, 1.2]), y, 0.5), [0.5, 1.0, 1.2])


@pytest.mark.parametrize("kind", ["squared", "absolute", "hinge"])
def test_prox_matches_brute_force(kind, rng):
    prox = proxoperator(kind)
    grid = np.linspace(-6.0, 6.0, 120001)
    for _ in range(10):
        v = rng.uniform(-3, 3)
        y = rng.choice([-1.0, 1.0]) if kind == "hinge" else rng.uniform(-2, 2)
        tau = rng.uniform(0.1, 2.0)
        objective = LOSS_FUNCS[kind](grid, y) + (grid - v) ** 2 / (2 * tau)
        expected = grid[np.argmin(objective)]
        got = prox(np.array([v]), np.array([y]), tau)[0]
        assert got == pytest.approx(expected, abs=2e-4)


def test_squared_prox_formula():
    assert prox_squared(np.array([1.0]), np.array([3.0]), 0.5)[0] == pytest.approx(2.0)


def test_loss_value_sums():
    yhat, y = np.array([0.0, 2.0]), np.array([1.0, 1.0])
    assert loss_value("squared", yhat, y) == 2.0
    assert loss_value("absolute", yhat, y) == 2.0
    assert loss_value("hinge", np.array([0.5, -2.0]), np.array([1.0, -1.0])) == 0.5


def test_unknown_loss():
    with pytest.raises(ValueError):
        proxoperator("huber")
    with pytest.raises(ValueError):
        loss_value("huber", np.zeros(1), np.zeros(1))
