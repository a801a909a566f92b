"""Model construction and algebra for piecewise-linear DC functions.

A model is f = phi1 - phi2 with phi1, phi2 max-affine. Everything here works
on the plane lists directly; evaluation is a linear scan over all planes.
"""
import logging

import numpy as np

from pldc import config
from pldc.errors import DimensionMismatchError, DuplicateInputError, PlaneLimitError
from pldc.models import MaxAffine, PLDCModel

logger = logging.getLogger(__name__)


# ---------------- Evaluation ----------------

def evaluate(model, x):
    """f(x) for a single input vector (raw coordinates)."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.dim:
        raise DimensionMismatchError(f"model expects a vector of length {model.dim}, got shape {x.shape}")
    return model(x)


def local_gradient(model, x):
    """Gradient of f at x in raw coordinates: active slope of phi1 minus
    active slope of phi2. At a kink this is one element of the Clarke set."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != model.dim:
        raise DimensionMismatchError(f"model expects a vector of length {model.dim}, got shape {x.shape}")
    z = model.to_model_coordinates(x)
    k1 = model.phi1.active_plane(z)
    k2 = model.phi2.active_plane(z)
    grad = model.phi1.slopes[k1] - model.phi2.slopes[k2]
    if model.standardizer is not None:
        grad = grad / model.standardizer.scale
    return grad


# ---------------- Construction ----------------

def witness_residuals(x, yhat, z, a, b):
    """Slack of the two interpolation constraint families for a witness (yhat, z, a, b).

    r1[i, j] = yhat_i - yhat_j + z_i - z_j - <a_j, x_i - x_j>
    r2[i, j] = z_i - z_j - <b_j, x_i - x_j>
    The witness is feasible when every entry is >= 0.
    """
    x, yhat, z, a, b = _check_witness(x, yhat, z, a, b)
    w = yhat + z
    # <a_j, x_i - x_j> = (x a^T)_{ij} - <a_j, x_j>
    ax = x @ a.T - np.einsum("jd,jd->j", a, x)[None, :]
    bx = x @ b.T - np.einsum("jd,jd->j", b, x)[None, :]
    r1 = w[:, None] - w[None, :] - ax
    r2 = z[:, None] - z[None, :] - bx
    return r1, r2


def _check_witness(x, yhat, z, a, b):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    n, d = x.shape
    yhat = np.asarray(yhat, dtype=float).reshape(-1)
    z = np.asarray(z, dtype=float).reshape(-1)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if yhat.shape != (n,) or z.shape != (n,) or a.shape != (n, d) or b.shape != (n, d):
        raise DimensionMismatchError(
            f"witness shapes disagree: x {x.shape}, yhat {yhat.shape}, z {z.shape}, "
            f"a {a.shape}, b {b.shape}"
        )
    return x, yhat, z, a, b


def build_from_witness(x, yhat, z, a, b, standardizer=None, meta=None):
    """Witness interpolant with the offsets folded into the planes.

    phi1 planes: (a_i, yhat_i + z_i - <a_i, x_i>)
    phi2 planes: (b_i, z_i - <b_i, x_i>)

    When the witness satisfies both constraint families the model reproduces
    yhat at every x_i; feasibility is the caller's responsibility, an
    infeasible witness still yields a (non-interpolating) model.
    """
    x, yhat, z, a, b = _check_witness(x, yhat, z, a, b)
    phi1 = MaxAffine(a, yhat + z - np.einsum("id,id->i", a, x))
    phi2 = MaxAffine(b, z - np.einsum("id,id->i", b, x))
    meta = dict(meta or {})
    meta.setdefault("witness", {"yhat": yhat, "z": z, "a": a, "b": b})
    return PLDCModel(phi1, phi2, standardizer=standardizer, meta=meta)


def interpolate_quadratic_shift(data):
    """Exact interpolant obtained by adding and subtracting C/2 ||x||^2.

    C = max_{i != j} |y_i - y_j| / ||x_i - x_j||^2 (0 for a single point or
    constant responses, which yields the constant model y_1).
    """
    x, y = data.x, data.y
    n = x.shape[0]
    if n == 0:
        raise ValueError("cannot interpolate an empty dataset")

    sq_norms = np.einsum("id,id->i", x, x)
    dist2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * (x @ x.T)
    dist2 = np.maximum(dist2, 0.0)
    gaps = np.abs(y[:, None] - y[None, :])
    off_diag = ~np.eye(n, dtype=bool)

    same_x = off_diag & (dist2 == 0.0) & np.all(x[:, None, :] == x[None, :, :], axis=2)
    if np.any(same_x & (gaps > 0)):
        i, j = np.argwhere(same_x & (gaps > 0))[0]
        raise DuplicateInputError(f"rows {i} and {j} share inputs but have different responses")

    usable = off_diag & ~same_x
    C = float(np.max(gaps[usable] / dist2[usable])) if np.any(usable) else 0.0

    slopes = C * x
    phi1 = MaxAffine(slopes, -0.5 * C * sq_norms + 0.5 * y)
    phi2 = MaxAffine(slopes, -0.5 * C * sq_norms - 0.5 * y)
    logger.debug(f"Quadratic-shift interpolant: n={n}, C={C:.6g}")
    return PLDCModel(phi1, phi2, standardizer=data.standardizer,
                     meta={"construction": "quadratic_shift", "C": C})


def linear_spline(x, yhat, standardizer=None, meta=None):
    """Piecewise-linear interpolant of (x_i, yhat_i) for one-dimensional inputs,
    with kinks only at the x_i and the end pieces extended linearly.

    Upward slope changes go to phi1 and downward ones to phi2; each part is
    the max of its pieces, phi1(x_(1)) = yhat_(1) and phi2(x_(1)) = 0.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    yhat = np.asarray(yhat, dtype=float).reshape(-1)
    if x.shape[1] != 1:
        raise DimensionMismatchError(f"a linear spline needs one-dimensional inputs, got {x.shape[1]}")
    if x.shape[0] != yhat.size or yhat.size == 0:
        raise DimensionMismatchError(f"spline knots disagree: x {x.shape}, yhat {yhat.shape}")
    order = np.argsort(x[:, 0], kind="stable")
    knots, values = x[order, 0], yhat[order]
    if np.any(np.diff(knots) <= 0):
        raise DuplicateInputError("spline knots must be distinct")

    if knots.size == 1:
        phi1 = MaxAffine(np.zeros((1, 1)), values[:1])
        phi2 = MaxAffine.constant(0.0, 1)
    else:
        widths = np.diff(knots)
        piece_slopes = np.diff(values) / widths
        jumps = np.diff(piece_slopes)
        up = np.concatenate([[piece_slopes[0]], piece_slopes[0] + np.cumsum(np.maximum(jumps, 0.0))])
        down = np.concatenate([[0.0], np.cumsum(np.maximum(-jumps, 0.0))])
        # part values at the left end of each piece
        left1 = values[0] + np.concatenate([[0.0], np.cumsum(up[:-1] * widths[:-1])])
        left2 = np.concatenate([[0.0], np.cumsum(down[:-1] * widths[:-1])])
        starts = knots[:-1]
        phi1 = MaxAffine(up[:, None], left1 - up * starts)
        phi2 = MaxAffine(down[:, None], left2 - down * starts)

    meta = dict(meta or {})
    meta.setdefault("construction", "linear_spline")
    return PLDCModel(phi1, phi2, standardizer=standardizer, meta=meta)


# ---------------- Seminorm bound and algebra ----------------

def seminorm_bound(model):
    """max_k ||slope1_k||_1 + max_k ||slope2_k||_1 in model coordinates.

    An upper bound on the DC seminorm of this representation, not the
    seminorm itself (which is an infimum over all decompositions).
    """
    return model.phi1.max_slope_l1() + model.phi2.max_slope_l1()


def scale(model, c):
    """Model of c * f. Negative factors swap the two convex parts."""
    c = float(c)
    if c >= 0:
        phi1, phi2 = model.phi1.scaled(c), model.phi2.scaled(c)
    else:
        phi1, phi2 = model.phi2.scaled(-c), model.phi1.scaled(-c)
    return PLDCModel(phi1, phi2, standardizer=model.standardizer,
                     meta={"construction": "scale", "factor": c})


def fold_standardizer(model):
    """Equivalent model acting directly on raw inputs."""
    st = model.standardizer
    if st is None:
        return model

    def fold(phi):
        slopes = phi.slopes / st.scale[None, :]
        return MaxAffine(slopes, phi.offsets - slopes @ st.mean)

    meta = {k: v for k, v in model.meta.items() if k != "witness"}
    return PLDCModel(fold(model.phi1), fold(model.phi2), standardizer=None, meta=meta)


def add(m1, m2, max_planes=None):
    """Model of f + g; each part becomes the K1*K2 pairwise plane sums."""
    if max_planes is None:
        max_planes = config.MAX_PLANES
    if m1.dim != m2.dim:
        raise DimensionMismatchError(f"cannot add models of dimension {m1.dim} and {m2.dim}")
    for part in ("phi1", "phi2"):
        count = getattr(m1, part).n_planes * getattr(m2, part).n_planes
        if count > max_planes:
            raise PlaneLimitError(f"{part} of the sum would have {count} planes (cap {max_planes})")

    standardizer = m1.standardizer
    if m1.standardizer is None and m2.standardizer is None:
        pass
    elif m1.standardizer is None or not m1.standardizer.same_as(m2.standardizer):
        m1, m2 = fold_standardizer(m1), fold_standardizer(m2)
        standardizer = None

    return PLDCModel(
        m1.phi1.minkowski_sum(m2.phi1),
        m1.phi2.minkowski_sum(m2.phi2),
        standardizer=standardizer,
        meta={"construction": "add"},
    )


# ---------------- One-dimensional structure ----------------

def _envelope_breaks(slopes, offsets):
    """Breakpoints of the upper envelope of lines a*x + c (convex hull trick)."""
    order = np.lexsort((offsets, slopes))
    hull = []
    for k in order:
        a, c = slopes[k], offsets[k]
        if hull and hull[-1][0] == a:
            hull.pop()
        while len(hull) >= 2:
            (a1, c1), (a2, c2) = hull[-2], hull[-1]
            # middle line never on top once the outer two cross left of it
            if (c1 - c2) * (a - a2) >= (c2 - c) * (a2 - a1):
                hull.pop()
            else:
                break
        hull.append((a, c))
    return [(c1 - c2) / (a2 - a1) for (a1, c1), (a2, c2) in zip(hull, hull[1:])]


def kink_abscissae(model):
    """Sorted candidate kinks of a one-dimensional model in raw coordinates.
    For a fitted model these are a subset of the training inputs."""
    if model.dim != 1:
        raise DimensionMismatchError("kinks are only enumerated for one-dimensional models")
    raw = fold_standardizer(model)
    breaks = []
    for phi in (raw.phi1, raw.phi2):
        breaks.extend(_envelope_breaks(phi.slopes[:, 0], phi.offsets))
    return np.unique(np.asarray(breaks, dtype=float))
