"""Parallel ADMM for the structural-risk-minimisation fit, plus the oracle route.

The program is split as

    s_ij + yhat_i - yhat_j + z_i - z_j - <a_i, x_i - x_j> = 0     (dual alpha)
    t_ij + z_i - z_j - <b_i, x_i - x_j> = 0                       (dual beta)
    u_id + |p_id| + |q_id| - L_d = 0                              (dual gamma)
    a = p,  b = q                                                 (duals eta, zeta)

with s, t, u >= 0 and the per-coordinate penalty lambda * sum_d L_d.  All
duals are scaled by 1/rho.  One sweep updates the blocks in the order
A, B, (yhat, z), a, b, L, p, q, u, s, t, then the five duals; every block is
vectorised over its indices.

(yhat, z) block.  Write w = yhat + z, let A~_k and B_k be the pair sums of
`_pair_term` and g_k a subgradient of loss_k at yhat_k.  Stationarity of the
augmented Lagrangian in yhat_k and z_k reads

    g_k + rho (2n w_k - 2 sum(w) - A~_k) = 0
    g_k = rho (2n z_k - 2 sum(z) - B_k)

z is only defined up to a constant; the gauge sum(z) = 0 pins it.  Summing
the first line gives sum(g) = 0, and eliminating z leaves
yhat_k = prox_{loss_k / (n rho)}(c_k + m) with c_k = (A~_k - B_k) / (2n) and
the scalar m fixed by mean(yhat) = m.  Then g_k = n rho (c_k + m - yhat_k)
and z_k = (g_k + rho B_k) / (2 n rho).  For the squared loss m = mean(y),
which is the closed form with the "+ 2 sum y" term folded into A; the
absolute loss soft-thresholds toward y_k with threshold 1/(n rho) and the
hinge prox has three regions.
"""
import dataclasses
import logging
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from pldc import config
from pldc.core import build_from_witness, linear_spline, witness_residuals
from pldc.errors import DivergenceError, LabelError
from pldc.lp_oracle import build_srm_program, solve, srm_witness
from pldc.utils.prox import LOSSES, loss_value, proxoperator

logger = logging.getLogger(__name__)

OFFSET_VARIANTS = ("printed", "fitted")
SOLVERS = ("admm", "lp")


@dataclass(frozen=True)
class FitConfig:
    lam: float
    rho: float = config.DEFAULT_RHO
    max_iters: int = config.DEFAULT_MAX_ITERS
    tol_primal: float = config.DEFAULT_TOL
    tol_dual: float = config.DEFAULT_TOL
    loss: str = "squared"
    offset_variant: str = "printed"
    solver: str = "admm"
    record_history: bool = True
    log_every: int = 1000

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError(f"lambda must be nonnegative, got {self.lam}")
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not (self.tol_primal > 0 and self.tol_dual > 0):
            raise ValueError("tolerances must be positive")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}; expected one of {LOSSES}")
        if self.offset_variant not in OFFSET_VARIANTS:
            raise ValueError(f"offset_variant must be one of {OFFSET_VARIANTS}")
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


@dataclass
class FitReport:
    solver: str
    loss: str
    lam: float
    rho: float
    offset_variant: str
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float
    constraint_violation: float
    objective: float
    training_loss: float
    budget: float
    wall_time: float
    history: list = field(default_factory=list)

    def as_dict(self, include_history=False):
        out = dataclasses.asdict(self)
        if not include_history:
            out.pop("history")
        return out


# ---------------- State ----------------

def precision_matrices(x):
    """Lambda_i = (sum_j (x_i - x_j)(x_i - x_j)^T + I)^-1 for every i."""
    n, d = x.shape
    total = x.sum(axis=0)
    second = x.T @ x
    M = (n * np.einsum("ik,il->ikl", x, x)
         - np.einsum("ik,l->ikl", x, total)
         - np.einsum("k,il->ikl", total, x)
         + second[None, :, :]
         + np.eye(d)[None, :, :])
    # cholesky doubles as the positive-definiteness check
    chol = np.linalg.cholesky(M)
    inv_chol = np.linalg.inv(chol)
    # M^-1 = C^-T C^-1
    return np.einsum("ijk,ijl->ikl", inv_chol, inv_chol)


@dataclass
class AdmmState:
    """Every variable of the sweep. Owned by one solver at a time."""

    yhat: np.ndarray
    z: np.ndarray
    a: np.ndarray
    b: np.ndarray
    p: np.ndarray
    q: np.ndarray
    eta: np.ndarray
    zeta: np.ndarray
    s: np.ndarray
    t: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    u: np.ndarray
    gamma: np.ndarray
    L: np.ndarray
    Lambda: np.ndarray
    rho: float
    lam: float
    previous: Optional[tuple] = None

    @classmethod
    def zeros(cls, data, rho, lam):
        n, d = data.n, data.d
        return cls(
            yhat=np.zeros(n), z=np.zeros(n),
            a=np.zeros((n, d)), b=np.zeros((n, d)),
            p=np.zeros((n, d)), q=np.zeros((n, d)),
            eta=np.zeros((n, d)), zeta=np.zeros((n, d)),
            s=np.zeros((n, n)), t=np.zeros((n, n)),
            alpha=np.zeros((n, n)), beta=np.zeros((n, n)),
            u=np.zeros((n, d)), gamma=np.zeros((n, d)),
            L=np.zeros(d), Lambda=precision_matrices(data.x),
            rho=float(rho), lam=float(lam),
        )

    @classmethod
    def from_witness(cls, data, yhat, z, a, b, rho, lam):
        """State whose slacks and copies are set from a witness (yhat, z, a, b);
        the duals start at zero."""
        state = cls.zeros(data, rho, lam)
        x = data.x
        state.yhat = np.array(yhat, dtype=float)
        state.z = np.array(z, dtype=float)
        state.a = np.array(a, dtype=float).reshape(data.n, data.d)
        state.b = np.array(b, dtype=float).reshape(data.n, data.d)
        w = state.yhat + state.z
        state.s = np.maximum(-(w[:, None] - w[None, :] - _inner(state.a, x)), 0.0)
        state.t = np.maximum(-(state.z[:, None] - state.z[None, :] - _inner(state.b, x)), 0.0)
        state.p = state.a.copy()
        state.q = state.b.copy()
        state.L = np.max(np.abs(state.p) + np.abs(state.q), axis=0)
        state.u = state.L[None, :] - np.abs(state.p) - np.abs(state.q)
        return state

    def snapshot(self):
        self.previous = tuple(v.copy() for v in (self.yhat, self.z, self.a, self.b, self.L))


def _inner(slopes, x):
    """Matrix of <slopes_i, x_i - x_j>."""
    sx = np.einsum("id,id->i", slopes, x)
    return sx[:, None] - slopes @ x.T


def constraint_blocks(state, x):
    """Left-hand sides of the five equality families, in dual order
    (alpha, beta, gamma, eta, zeta)."""
    w = state.yhat + state.z
    return (
        state.s + w[:, None] - w[None, :] - _inner(state.a, x),
        state.t + state.z[:, None] - state.z[None, :] - _inner(state.b, x),
        state.u + np.abs(state.p) + np.abs(state.q) - state.L[None, :],
        state.a - state.p,
        state.b - state.q,
    )


def residuals(state, data):
    """(primal, dual): largest equality violation of the split program, and
    the largest change of (yhat, z, a, b, L) since the last snapshot."""
    blocks = constraint_blocks(state, data.x)
    primal = max(float(np.max(np.abs(r), initial=0.0)) for r in blocks)
    if state.previous is None:
        return primal, float("inf")
    current = (state.yhat, state.z, state.a, state.b, state.L)
    dual = max(float(np.max(np.abs(c - p), initial=0.0)) for c, p in zip(current, state.previous))
    return primal, dual


# ---------------- Solver ----------------

class AdmmSolver:
    """Runs the sweep on one dataset; not shareable across threads while running."""

    def __init__(self, data, fit_config):
        self.data = data
        self.config = fit_config
        self.x = data.x
        self.y = data.y
        self.n, self.d = data.n, data.d
        self._xsum = self.x.sum(axis=0)
        self._prox = None if fit_config.loss == "squared" else proxoperator(fit_config.loss)
        self.state = AdmmState.zeros(data, fit_config.rho, fit_config.lam)

    # ---------------- Helper ----------------

    def _pair_term(self, M, slopes):
        """sum_j (M_ji - M_ij + <c_i + c_j, x_i - x_j>) for slopes c."""
        x, n = self.x, self.n
        sx = np.einsum("id,id->i", slopes, x)
        return (M.sum(axis=0) - M.sum(axis=1)
                + n * sx - slopes @ self._xsum + x @ slopes.sum(axis=0) - sx.sum())

    def _weighted_differences(self, C):
        """sum_j C_ij (x_i - x_j)."""
        return self.x * C.sum(axis=1)[:, None] - C @ self.x

    def _mean_shift(self, c, tau):
        """Root of  mean(prox(c + m)) = m; the left side minus m is nonincreasing."""
        prox, y = self._prox, self.y

        def gap(m):
            return float(np.mean(prox(c + m, y, tau))) - m

        lo = float(np.min(y - c)) - tau - 1.0
        hi = float(np.max(y - c)) + tau + 1.0
        g_lo, g_hi = gap(lo), gap(hi)
        if g_lo <= 0:
            return lo
        if g_hi >= 0:
            return hi
        return brentq(gap, lo, hi, xtol=1e-14)

    def _update_yhat_z(self, A, B):
        st, n, rho = self.state, self.n, self.state.rho
        if self._prox is None:
            y = self.y
            total = y.sum() if self.config.offset_variant == "printed" else st.yhat.sum()
            A_full = A + 2.0 * total
            denom = 2.0 + n * rho
            st.yhat = 2.0 * y / denom + rho * (A_full - B) / (2.0 * denom)
            st.z = -y / denom + A_full / (2.0 * n * denom) + (1.0 + n * rho) * B / (2.0 * n * denom)
            return
        tau = 1.0 / (n * rho)
        c = (A - B) / (2.0 * n)
        v = c + self._mean_shift(c, tau)
        st.yhat = self._prox(v, self.y, tau)
        grad = n * rho * (v - st.yhat)
        st.z = (grad + rho * B) / (2.0 * n * rho)

    def step(self):
        """One full sweep."""
        st = self.state
        rho, lam, n = st.rho, st.lam, self.n

        A = self._pair_term(st.alpha + st.s, st.a)
        B = self._pair_term(st.beta + st.t, st.b)
        self._update_yhat_z(A, B)

        w = st.yhat + st.z
        dw = w[:, None] - w[None, :]
        dz = st.z[:, None] - st.z[None, :]
        rhs_a = st.p - st.eta + self._weighted_differences(st.alpha + st.s + dw)
        st.a = np.einsum("ikl,il->ik", st.Lambda, rhs_a)
        rhs_b = st.q - st.zeta + self._weighted_differences(st.beta + st.t + dz)
        st.b = np.einsum("ikl,il->ik", st.Lambda, rhs_b)

        st.L = (-lam / rho + np.sum(st.gamma + np.abs(st.p) + np.abs(st.q) + st.u, axis=0)) / n

        v = st.eta + st.a
        st.p = 0.5 * np.sign(v) * np.maximum(np.abs(v) + st.L - st.u - np.abs(st.q) - st.gamma, 0.0)
        v = st.zeta + st.b
        st.q = 0.5 * np.sign(v) * np.maximum(np.abs(v) + st.L - st.u - np.abs(st.p) - st.gamma, 0.0)
        st.u = np.maximum(-st.gamma - np.abs(st.p) - np.abs(st.q) + st.L, 0.0)

        inner_a = _inner(st.a, self.x)
        inner_b = _inner(st.b, self.x)
        st.s = np.maximum(-st.alpha - dw + inner_a, 0.0)
        st.t = np.maximum(-st.beta - dz + inner_b, 0.0)

        st.alpha = st.alpha + st.s + dw - inner_a
        st.beta = st.beta + st.t + dz - inner_b
        st.gamma = st.gamma + st.u + np.abs(st.p) + np.abs(st.q) - st.L
        st.eta = st.eta + st.a - st.p
        st.zeta = st.zeta + st.b - st.q

    def objective(self):
        st = self.state
        return loss_value(self.config.loss, st.yhat, self.y) + st.lam * float(np.sum(st.L))

    def augmented_lagrangian(self):
        """Objective plus rho/2 (||r + dual||^2 - ||dual||^2) over every family."""
        st = self.state
        duals = (st.alpha, st.beta, st.gamma, st.eta, st.zeta)
        penalty = sum(float(np.sum((r + u) ** 2 - u ** 2))
                      for r, u in zip(constraint_blocks(st, self.x), duals))
        return self.objective() + 0.5 * st.rho * penalty

    def run(self, callback=None):
        cfg, st = self.config, self.state
        started = time.perf_counter()
        history = []
        converged = False
        primal = dual = float("inf")
        iteration = 0
        logger.info(
            f"ADMM fit: n={self.n}, d={self.d}, loss={cfg.loss}, lambda={cfg.lam:g}, "
            f"rho={cfg.rho:g}, variant={cfg.offset_variant}"
        )
        for iteration in range(1, cfg.max_iters + 1):
            st.snapshot()
            self.step()
            if not (np.all(np.isfinite(st.yhat)) and np.all(np.isfinite(st.a))
                    and np.all(np.isfinite(st.b)) and np.all(np.isfinite(st.L))):
                raise DivergenceError(f"non-finite iterate at ADMM iteration {iteration}")
            primal, dual = residuals(st, self.data)
            if cfg.record_history:
                history.append(self.augmented_lagrangian())
            if callback is not None:
                callback(iteration, st)
            if iteration % cfg.log_every == 0:
                logger.debug(f"iter {iteration}: primal={primal:.3e} dual={dual:.3e}")
            if primal <= cfg.tol_primal and dual <= cfg.tol_dual:
                converged = True
                break

        if not converged:
            logger.warning(
                f"ADMM stopped at the iteration cap ({cfg.max_iters}) with "
                f"primal={primal:.3e}, dual={dual:.3e}"
            )
        report = self._report(iteration, converged, primal, dual, history,
                              time.perf_counter() - started)
        model = assemble_model(self.data, st.yhat, st.z, st.a, st.b, _model_meta(report))
        logger.info(
            f"ADMM done: iterations={iteration}, converged={converged}, "
            f"objective={report.objective:.8g}"
        )
        return model, report

    def _report(self, iterations, converged, primal, dual, history, wall_time):
        st = self.state
        return FitReport(
            solver="admm",
            loss=self.config.loss,
            lam=st.lam,
            rho=st.rho,
            offset_variant=self.config.offset_variant,
            iterations=iterations,
            converged=converged,
            primal_residual=primal,
            dual_residual=dual,
            constraint_violation=_violation(self.x, st.yhat, st.z, st.a, st.b),
            objective=self.objective(),
            training_loss=loss_value(self.config.loss, st.yhat, self.y),
            budget=float(np.sum(st.L)),
            wall_time=wall_time,
            history=history,
        )


def _violation(x, yhat, z, a, b):
    r1, r2 = witness_residuals(x, yhat, z, a, b)
    return max(0.0, -float(min(r1.min(), r2.min())))


def _model_meta(report):
    return {
        "solver": report.solver,
        "loss": report.loss,
        "lambda": report.lam,
        "rho": report.rho,
        "offset_variant": report.offset_variant,
        "iterations": report.iterations,
        "converged": report.converged,
        "primal_residual": report.primal_residual,
        "dual_residual": report.dual_residual,
    }


def assemble_model(data, yhat, z, a, b, meta):
    """Model for a fitted witness. One-dimensional fits become the linear
    spline through (x_i, yhat_i); wider ones use the witness planes."""
    if data.d == 1:
        meta = {**meta, "witness": {"yhat": yhat, "z": z, "a": a, "b": b}}
        return linear_spline(data.x, yhat, standardizer=data.standardizer, meta=meta)
    return build_from_witness(data.x, yhat, z, a, b, standardizer=data.standardizer, meta=meta)


# ---------------- Entry points ----------------

def _check_labels(y):
    bad = ~np.isin(y, (-1.0, 1.0))
    if np.any(bad):
        raise LabelError(f"hinge labels must be -1 or +1; found {sorted(set(y[bad].tolist()))[:5]}")


def fit(data, fit_config, callback=None):
    """Fit a PLDC model; dispatches on fit_config.loss and fit_config.solver."""
    if data.n < 2:
        raise ValueError("fitting needs at least two samples")
    if fit_config.loss == "hinge":
        _check_labels(data.y)
    if fit_config.solver == "lp":
        return fit_lp(data, fit_config)
    return AdmmSolver(data, fit_config).run(callback)


def fit_absolute(data, fit_config, callback=None):
    return fit(data, fit_config.replace(loss="absolute"), callback)


def fit_hinge_binary(data, fit_config, callback=None):
    """Binary classifier on labels in {-1, +1}; decide by the sign of the model."""
    _check_labels(data.y)
    return fit(data, fit_config.replace(loss="hinge"), callback)


def fit_lp(data, fit_config, l_mode="per_coordinate"):
    """Same program solved by the interior point oracle (lambda must be > 0)."""
    if data.n < 2:
        raise ValueError("fitting needs at least two samples")
    started = time.perf_counter()
    prog = build_srm_program(data, fit_config.lam, loss=fit_config.loss, l_mode=l_mode)
    result = solve(prog)
    yhat, z, a, b, L = srm_witness(prog, result.w)
    report = FitReport(
        solver="lp",
        loss=fit_config.loss,
        lam=fit_config.lam,
        rho=fit_config.rho,
        offset_variant=fit_config.offset_variant,
        iterations=result.newton_steps,
        converged=result.status == "optimal",
        primal_residual=_violation(data.x, yhat, z, a, b),
        dual_residual=result.gap,
        constraint_violation=_violation(data.x, yhat, z, a, b),
        objective=result.objective,
        training_loss=loss_value(fit_config.loss, yhat, data.y),
        budget=float(np.sum(L)),
        wall_time=time.perf_counter() - started,
    )
    model = assemble_model(data, yhat, z, a, b, _model_meta(report))
    return model, report
