import logging

import numpy as np
import pytest

from pldc.discrepancy import discrepancy, lambda_grid, rate_bound, theoretical_lambda
from pldc.models import Dataset


def test_two_point_value():
    result = discrepancy(np.array([[0.0], [1.0]]), L=1.0)
    assert result.value == pytest.approx(2.0, abs=1e-6)
    assert result.status == "optimal"
    assert result.witness["a"].shape == (2, 1)


def test_identical_points_give_zero():
    assert discrepancy(np.ones((4, 2)), L=1.0).value == 0.0


def test_zero_budget_gives_zero(rng):
    assert discrepancy(rng.standard_normal((6, 2)), L=0.0).value == 0.0


def test_value_scales_linearly_in_budget(rng):
    for _ in range(10):
        x = rng.standard_normal((8, 2))
        base = discrepancy(x, L=1.0, tol=1e-10).value
        assert base > 0
        for L in (0.5, 2.0, 10.0):
            assert discrepancy(x, L=L, tol=1e-10).value == pytest.approx(L * base, rel=1e-8)


def test_translation_invariance(rng):
    x = rng.standard_normal((6, 2))
    shifted = x + np.array([3.0, -7.0])
    assert discrepancy(shifted).value == pytest.approx(discrepancy(x).value, rel=1e-8)


def test_swapping_halves_keeps_value(rng):
    x = rng.standard_normal((6, 1))
    swapped = discrepancy(x, split=[3, 4, 5, 0, 1, 2]).value
    assert swapped == pytest.approx(discrepancy(x).value, rel=1e-7)


def test_seeded_split_is_reproducible(rng):
    x = rng.standard_normal((6, 2))
    first, second = discrepancy(x, seed=3), discrepancy(x, seed=3)
    np.testing.assert_array_equal(first.order, second.order)
    assert first.value == second.value


def test_odd_count_drops_last_row(rng, caplog):
    x = rng.standard_normal((5, 1))
    with caplog.at_level(logging.WARNING, logger="pldc.discrepancy"):
        result = discrepancy(x)
    assert result.dropped == 4
    assert result.order.tolist() == [0, 1, 2, 3]
    assert "dropping row 4" in caplog.text


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        discrepancy(np.zeros((1, 2)))
    with pytest.raises(ValueError):
        discrepancy(np.zeros((4, 1)), L=-1.0)
    with pytest.raises(ValueError):
        discrepancy(np.arange(4.0)[:, None], split=[0, 1, 1, 2])


def test_lambda_grid_from_known_discrepancy():
    grid = lambda_grid(None, d_hat=2.0)
    assert grid == [512.0, 256.0, 128.0, 64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0]


def test_zero_scale_grid_warns(caplog):
    with caplog.at_level(logging.WARNING, logger="pldc.discrepancy"):
        grid = lambda_grid(None, m_scale=0.0, d_hat=2.0)
    assert grid == [0.0] * 10
    assert "all zero" in caplog.text


def test_lambda_grid_computes_discrepancy():
    data = Dataset.from_arrays([[0.0], [1.0]], [0.0, 1.0], standardize=False)
    grid = lambda_grid(data)
    assert grid[-1] == pytest.approx(1.0, abs=1e-6)
    assert len(grid) == 10


def test_theoretical_lambda():
    assert theoretical_lambda(2.0, m_bound=1.0) == 48.0
    assert theoretical_lambda(2.0) == pytest.approx(4.0)


def test_rate_bound():
    assert rate_bound(1.0, 1.0, 1, 1) == pytest.approx(60.0)
    assert rate_bound(2.0, 1.0, 2, 200) < rate_bound(2.0, 1.0, 2, 20)
    with pytest.raises(ValueError):
        rate_bound(1.0, 1.0, 3, 2)
