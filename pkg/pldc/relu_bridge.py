"""Conversions between bias-free ReLU networks and PLDC models."""
import logging

import numpy as np
import scipy.linalg

from pldc import config
from pldc.core import fold_standardizer
from pldc.errors import DimensionMismatchError, PlaneLimitError
from pldc.models import MaxAffine, PLDCModel, ReluNet

logger = logging.getLogger(__name__)


# ---------------- Helper ----------------

def _dedupe(slopes, offsets):
    """Drop exact duplicate planes (the value is unchanged)."""
    stacked = np.unique(np.column_stack([slopes, offsets]), axis=0)
    return stacked[:, :-1], stacked[:, -1]


def _plane_sum(p, q, cap):
    """Planes of max(p) + max(q): all pairwise sums."""
    count = p[0].shape[0] * q[0].shape[0]
    if count > cap:
        raise PlaneLimitError(f"a unit would need {count} planes (cap {cap})")
    slopes = (p[0][:, None, :] + q[0][None, :, :]).reshape(-1, p[0].shape[1])
    offsets = (p[1][:, None] + q[1][None, :]).reshape(-1)
    return _dedupe(slopes, offsets)


def _plane_union(p, q):
    """Planes of max(max(p), max(q))."""
    return _dedupe(np.vstack([p[0], q[0]]), np.concatenate([p[1], q[1]]))


def _combine(units, row, dim, cap):
    """DC parts of sum_j row_j * (G_j - H_j)."""
    zero = (np.zeros((1, dim)), np.zeros(1))
    G, H = zero, zero
    for weight, (Gj, Hj) in zip(row, units):
        if weight > 0:
            G = _plane_sum(G, (weight * Gj[0], weight * Gj[1]), cap)
            H = _plane_sum(H, (weight * Hj[0], weight * Hj[1]), cap)
        elif weight < 0:
            G = _plane_sum(G, (-weight * Hj[0], -weight * Hj[1]), cap)
            H = _plane_sum(H, (-weight * Gj[0], -weight * Gj[1]), cap)
    return G, H


# ---------------- ReLU net -> PLDC ----------------

def relu_to_pldc(net, max_planes=None):
    """Exact PLDC form of a ReLU network.

    Every unit is tracked as G - H with G, H max-affine. A linear layer adds
    the parts (max(a,b) + max(c,d) = max(a+c, a+d, b+c, b+d)) with negative
    weights swapping them; the activation uses max(G - H, 0) = max(G, H) - H.
    Redundant planes are kept apart from exact duplicates.
    """
    cap = config.MAX_PLANES if max_planes is None else int(max_planes)
    d = net.input_dim
    W1 = net.weights[0]
    zero = (np.zeros((1, d)), np.zeros(1))

    units = []
    for row in W1:
        slope = row[:d]
        offset = row[d] if net.augmented else 0.0
        G = (slope[None, :], np.array([offset]))
        units.append((_plane_union(G, zero), zero))

    for W in net.weights[1:]:
        layer = []
        for row in W:
            G, H = _combine(units, row, d, cap)
            layer.append((_plane_union(G, H), H))
        units = layer

    G, H = _combine(units, net.output, d, cap)
    logger.debug(f"ReLU net -> PLDC: K1={G[0].shape[0]}, K2={H[0].shape[0]}")
    return PLDCModel(MaxAffine(*G), MaxAffine(*H), meta={"construction": "relu_to_pldc"})


def seminorm_certificate(net):
    """|w_out|^T |W^D| ... |W^1| 1, summed over the real inputs only."""
    weights = np.abs(net.output)
    for W in reversed(net.weights):
        weights = weights @ np.abs(W)
    if net.augmented:
        weights = weights[:-1]
    return float(weights.sum())


# ---------------- PLDC -> ReLU net ----------------

def _pad_planes(phi, K):
    """Augmented plane rows (slope, offset), padded to K by repeating plane 0."""
    rows = np.column_stack([phi.slopes, phi.offsets])
    if rows.shape[0] < K:
        rows = np.vstack([rows, np.repeat(rows[:1], K - rows.shape[0], axis=0)])
    return rows


def _max_tower(planes):
    """Hidden layers computing max_k <planes_k, (x, 1)> as a (+, -) pair.

    Each merge stage has two layers: nodes (j,0), (j,1), (j,2) hold
    relu(v_2j - v_2j+1), relu(v_2j+1), relu(-v_2j+1), then (l,+), (l,-) hold
    relu(+-(h_0 + h_1 - h_2)), since max(a, b) = relu(a - b) + relu(b) - relu(-b).
    """
    K = planes.shape[0]
    if K == 1:
        return [np.vstack([planes[0], -planes[0]])]

    layers = []
    forms = planes
    while forms.shape[0] > 1:
        half = forms.shape[0] // 2
        first, second = forms[0::2], forms[1::2]
        layer_a = np.empty((3 * half, forms.shape[1]))
        layer_a[0::3] = first - second
        layer_a[1::3] = second
        layer_a[2::3] = -second
        layers.append(layer_a)

        layer_b = np.zeros((2 * half, 3 * half))
        for ell in range(half):
            merge = np.zeros(3 * half)
            merge[3 * ell:3 * ell + 3] = (1.0, 1.0, -1.0)
            layer_b[2 * ell] = merge
            layer_b[2 * ell + 1] = -merge
        layers.append(layer_b)

        # v_l = h_(l,+) - h_(l,-) as forms over the pair layer
        forms = np.zeros((half, 2 * half))
        forms[np.arange(half), 2 * np.arange(half)] = 1.0
        forms[np.arange(half), 2 * np.arange(half) + 1] = -1.0
    return layers


def pldc_to_relu(model):
    """ReLU network (input augmented with a constant 1) with the same values.

    Both parts are padded to K = 2^ceil(log2 max(K1, K2)) planes. For K >= 2
    the depth is 2 log2 K and the width at most 3K; K = 1 uses one layer.
    """
    raw = fold_standardizer(model)
    K_needed = max(raw.phi1.n_planes, raw.phi2.n_planes)
    if K_needed < 1:
        raise DimensionMismatchError("cannot convert a model without planes")
    K = 1 << (K_needed - 1).bit_length()

    tower1 = _max_tower(_pad_planes(raw.phi1, K))
    tower2 = _max_tower(_pad_planes(raw.phi2, K))
    weights = [np.vstack([tower1[0], tower2[0]])]
    for W1, W2 in zip(tower1[1:], tower2[1:]):
        weights.append(scipy.linalg.block_diag(W1, W2))
    output = np.array([1.0, -1.0, -1.0, 1.0])

    net = ReluNet(tuple(weights), output, augmented=True)
    logger.debug(f"PLDC -> ReLU net: K={K}, depth={net.depth}, width={max(net.widths)}")
    return net
