"""Empirical maximum discrepancy of the DC_L class and the lambda grid built on it."""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pldc.errors import DimensionMismatchError
from pldc.lp_oracle import build_discrepancy_program, solve

logger = logging.getLogger(__name__)

GRID_EXPONENTS = range(-8, 2)
DEFAULT_M_BOUND = 1.0 / 12.0


@dataclass(frozen=True)
class DiscrepancyResult:
    value: float
    L: float
    witness: dict = field(default_factory=dict)
    order: Optional[np.ndarray] = None
    dropped: Optional[int] = None
    status: str = "optimal"


def _split_order(n, split, seed):
    if split is not None:
        order = np.asarray(split, dtype=int).reshape(-1)
        if order.shape[0] != n or not np.array_equal(np.sort(order), np.arange(n)):
            raise ValueError(f"split must be a permutation of 0..{n - 1}")
        return order
    if seed is not None:
        return np.random.default_rng(seed).permutation(n)
    return np.arange(n)


def discrepancy(x, L=1.0, split=None, seed=None, tol=None):
    """D_n(DC_L): the largest half-sample mean difference over DC functions
    with seminorm at most L.

    The first half of the (optionally permuted) rows counts positively, the
    second half negatively. With an odd number of rows the last one in
    split order is dropped.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise DimensionMismatchError(f"inputs must be a matrix, got shape {x.shape}")
    n = x.shape[0]
    if n < 2:
        raise ValueError("the discrepancy needs at least two points")
    L = float(L)
    if L < 0:
        raise ValueError("L must be nonnegative")

    order = _split_order(n, split, seed)
    dropped = None
    if n % 2:
        dropped = int(order[-1])
        order = order[:-1]
        logger.warning(f"Odd number of points ({n}); dropping row {dropped}")
    m = order.shape[0]
    signs = np.where(np.arange(m) < m // 2, 1.0, -1.0)

    # identical inputs collapse into one node carrying their signed count
    points, inverse = np.unique(x[order], axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    weights = np.bincount(inverse, weights=signs, minlength=points.shape[0])

    d = x.shape[1]
    if L == 0 or points.shape[0] < 2:
        witness = {"yhat": np.zeros(m), "z": np.zeros(m), "a": np.zeros((m, d)), "b": np.zeros((m, d))}
        return DiscrepancyResult(value=0.0, L=L, witness=witness, order=order, dropped=dropped)

    prog = build_discrepancy_program(points, weights, m, L)
    result = solve(prog, tol=tol)
    value = max(result.objective, 0.0)
    a = prog.block(result.w, "a_pos") - prog.block(result.w, "a_neg")
    b = prog.block(result.w, "b_pos") - prog.block(result.w, "b_neg")
    witness = {
        "yhat": prog.block(result.w, "yhat")[inverse],
        "z": prog.block(result.w, "z")[inverse],
        "a": a[inverse],
        "b": b[inverse],
    }
    logger.info(f"Discrepancy: n={m}, d={d}, L={L:g}, value={value:.10g}")
    return DiscrepancyResult(value=value, L=L, witness=witness, order=order,
                             dropped=dropped, status=result.status)


def lambda_grid(data, m_scale=1.0, d_hat=None):
    """Cross-validation grid {2^-j * m_scale * D_n(DC_1) : j = -8..1}, descending."""
    if d_hat is None:
        d_hat = discrepancy(data.x, 1.0).value
    grid = [2.0 ** (-j) * m_scale * d_hat for j in GRID_EXPONENTS]
    if not any(grid):
        logger.warning("Lambda grid is all zero (m_scale or discrepancy is 0)")
    return grid


def theoretical_lambda(d_hat, m_bound=DEFAULT_M_BOUND):
    """lambda = 24 * M * D_n(DC_1)."""
    return 24.0 * m_bound * d_hat


def rate_bound(L, R, d, n):
    """Worst-case bound on D_n(DC_L) for inputs in the sup-norm ball of radius R."""
    if n < d:
        raise ValueError("the bound needs n >= d")
    exponent = 2.0 / (d + 4)
    return 60.0 * L * R * (d / n) ** exponent * (1.0 + 2.0 * math.log(n / d) / (d + 4))
