"""Useful proximal functions for the per-sample losses.

Every prox here solves  argmin_u  loss(u, y) + (u - v)^2 / (2 tau)
elementwise, with y the target (or +-1 label for the hinge).
"""
import numpy as np

LOSSES = ("squared", "absolute", "hinge")


def soft_thresholding(a, lamda):
    """Soft-thresholding."""
    return np.sign(a) * np.maximum(np.abs(a) - lamda, 0)


def prox_squared(v, y, tau):
    return (v + 2.0 * tau * y) / (1.0 + 2.0 * tau)


def prox_absolute(v, y, tau):
    """Soft-threshold v toward y."""
    return y + soft_thresholding(v - y, tau)


def prox_hinge(v, y, tau):
    """Prox of max(1 - y u, 0) for y in {-1, +1}."""
    margin = y * v
    return np.where(margin >= 1.0, v, np.where(margin <= 1.0 - tau, v + tau * y, y))


prox_operators = {
    "squared": prox_squared,
    "absolute": prox_absolute,
    "hinge": prox_hinge,
}


def loss_value(kind, yhat, y):
    """Summed empirical loss."""
    if kind == "squared":
        return float(np.sum((yhat - y) ** 2))
    if kind == "absolute":
        return float(np.sum(np.abs(yhat - y)))
    if kind == "hinge":
        return float(np.sum(np.maximum(1.0 - y * yhat, 0.0)))
    raise ValueError(f"unknown loss {kind!r}; expected one of {LOSSES}")


def proxoperator(kind):
    try:
        return prox_operators[kind]
    except KeyError:
        raise ValueError(f"unknown loss {kind!r}; expected one of {LOSSES}") from None
