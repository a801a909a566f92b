"""Dense log-barrier interior-point solver for linearly constrained LPs/QPs.

Programs are  min (or max) of a quadratic/linear objective subject to
G w <= h.  The barrier method follows the textbook scheme: centre with
damped Newton steps, multiply t by mu, stop once the duality-gap bound m/t
falls below the tolerance.  Everything is dense; intended for the small
instances used as a reference for the ADMM fits and for the discrepancy
program.
"""
import logging
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import scipy.linalg

from pldc import config
from pldc.errors import (
    DimensionMismatchError,
    InfeasibleProgramError,
    NumericalFailureError,
    UnboundedProgramError,
)
from pldc.utils.prox import LOSSES

logger = logging.getLogger(__name__)

SENSES = ("minimize", "maximize")
L_MODES = ("scalar", "per_coordinate")

ARMIJO_ALPHA = 0.01
BACKTRACK_BETA = 0.5
STEP_TO_BOUNDARY = 0.99
MAX_BACKTRACKS = 80
MAX_OUTER = 200
RIDGE = 1e-12
DIVERGENCE_NORM = 1e12


# ---------------- Program and result records ----------------

@dataclass
class ConvexProgram:
    """Dense program over w:  minimize 1/2 w'Qw + c'w + const  s.t.  G w <= h.

    With sense="maximize" the objective is c'w - 1/2 w'Qw + const.  `start`
    is an optional strictly feasible point; `layout` maps block names to
    (offset, shape) so builders can pull their variables back out.
    """

    linear: np.ndarray
    ineq_matrix: np.ndarray
    ineq_rhs: np.ndarray
    quadratic: Optional[np.ndarray] = None
    sense: str = "minimize"
    constant: float = 0.0
    start: Optional[np.ndarray] = None
    layout: dict = field(default_factory=dict)

    def __post_init__(self):
        self.linear = np.asarray(self.linear, dtype=float).reshape(-1)
        n_vars = self.linear.shape[0]
        G = np.asarray(self.ineq_matrix, dtype=float)
        if G.size == 0:
            G = G.reshape(0, n_vars)
        self.ineq_matrix = np.atleast_2d(G)
        self.ineq_rhs = np.asarray(self.ineq_rhs, dtype=float).reshape(-1)
        if self.ineq_matrix.shape[1] != n_vars:
            raise DimensionMismatchError(
                f"constraint matrix has {self.ineq_matrix.shape[1]} columns for {n_vars} variables"
            )
        if self.ineq_rhs.shape[0] != self.ineq_matrix.shape[0]:
            raise DimensionMismatchError(
                f"{self.ineq_matrix.shape[0]} constraint rows but {self.ineq_rhs.shape[0]} right-hand sides"
            )
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}, got {self.sense!r}")

        if self.quadratic is None:
            self.quadratic = np.zeros((n_vars, n_vars))
        else:
            Q = np.asarray(self.quadratic, dtype=float)
            if Q.shape != (n_vars, n_vars):
                raise DimensionMismatchError(f"quadratic term has shape {Q.shape}, expected {(n_vars, n_vars)}")
            scale_q = 1.0 + float(np.max(np.abs(Q), initial=0.0))
            if not np.allclose(Q, Q.T, rtol=0.0, atol=1e-12 * scale_q):
                raise ValueError("quadratic term must be symmetric")
            try:
                np.linalg.cholesky(Q + 1e-10 * scale_q * np.eye(n_vars))
            except np.linalg.LinAlgError:
                raise ValueError("quadratic term is not positive semidefinite") from None
            self.quadratic = Q

        if self.start is not None:
            self.start = np.asarray(self.start, dtype=float).reshape(-1)
            if self.start.shape[0] != n_vars:
                raise DimensionMismatchError("start point has the wrong length")

    @property
    def n_vars(self):
        return self.linear.shape[0]

    @property
    def n_constraints(self):
        return self.ineq_matrix.shape[0]

    def objective_value(self, w):
        """Objective in the program's own sense."""
        quad = 0.5 * float(w @ (self.quadratic @ w))
        lin = float(self.linear @ w)
        if self.sense == "maximize":
            return lin - quad + self.constant
        return quad + lin + self.constant

    def is_strictly_feasible(self, w):
        return bool(np.all(self.ineq_rhs - self.ineq_matrix @ w > 0))

    def block(self, w, name):
        offset, shape = self.layout[name]
        size = int(np.prod(shape))
        return np.asarray(w[offset:offset + size]).reshape(shape)


@dataclass
class SolveResult:
    w: np.ndarray
    objective: float
    status: str
    duals: np.ndarray
    gap: float
    newton_steps: int


# ---------------- Barrier method ----------------

class BarrierMethod:
    """Log-barrier method for  min 1/2 w'Qw + c'w  s.t.  G w <= h."""

    def __init__(self, quadratic, linear, ineq_matrix, ineq_rhs, max_newton=None):
        self.Q = quadratic
        self.c = linear
        self.G = ineq_matrix
        self.h = ineq_rhs
        self.max_newton = config.ORACLE_MAX_NEWTON if max_newton is None else int(max_newton)
        self.newton_steps = 0

    def objective(self, w):
        return 0.5 * float(w @ (self.Q @ w)) + float(self.c @ w)

    def slack(self, w):
        return self.h - self.G @ w

    def barrier_value(self, w, t):
        r = self.slack(w)
        if np.any(r <= 0):
            return np.inf
        return t * self.objective(w) - float(np.sum(np.log(r)))

    def newton_step(self, w, t):
        inv_r = 1.0 / self.slack(w)
        grad = t * (self.Q @ w + self.c) + self.G.T @ inv_r
        hess = t * self.Q + (self.G.T * inv_r ** 2) @ self.G
        # relative ridge; keeps lineality directions (e.g. z + const) solvable
        diag = np.diag(hess).copy()
        hess[np.diag_indices_from(hess)] += RIDGE * np.where(diag > 0, diag, 1.0)
        try:
            # near the end of the path the barrier Hessian is ill-conditioned
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
                step = scipy.linalg.solve(hess, -grad, assume_a="pos", check_finite=False)
        except np.linalg.LinAlgError:
            step = scipy.linalg.lstsq(hess, -grad)[0]
        return step, float(-grad @ step), grad

    def line_search(self, w, step, grad, t):
        """Backtracking on the barrier value; the first trial stays inside the domain."""
        r = self.slack(w)
        growth = self.G @ step
        size = 1.0
        leaving = growth > 0
        if np.any(leaving):
            size = min(1.0, STEP_TO_BOUNDARY * float(np.min(r[leaving] / growth[leaving])))
        current = self.barrier_value(w, t)
        slope = float(grad @ step)
        for _ in range(MAX_BACKTRACKS):
            if self.barrier_value(w + size * step, t) <= current + ARMIJO_ALPHA * size * slope:
                return size
            size *= BACKTRACK_BETA
        return 0.0

    def centre(self, w, t, stop=None):
        """Newton iterations on t*f0 + barrier. Returns (w, centred)."""
        for _ in range(self.max_newton):
            step, decrement2, grad = self.newton_step(w, t)
            if decrement2 / 2.0 <= config.NEWTON_TOL:
                return w, True
            size = self.line_search(w, step, grad, t)
            if size == 0.0:
                # no decrease representable in floating point
                return w, True
            w = w + size * step
            self.newton_steps += 1
            if not np.all(np.isfinite(w)):
                raise NumericalFailureError("non-finite iterate in the barrier method")
            if np.max(np.abs(w)) > DIVERGENCE_NORM:
                raise UnboundedProgramError("barrier iterates diverge; the program looks unbounded")
            if stop is not None and stop(w):
                return w, True
        logger.warning(f"Centering hit the Newton cap ({self.max_newton}) at t={t:.3g}")
        return w, False

    def run(self, w0, tol, stop=None):
        m = self.G.shape[0]
        t = m / max(1.0, abs(self.objective(w0)))
        w = w0
        centred_all = True
        for _ in range(MAX_OUTER):
            w, centred = self.centre(w, t, stop)
            centred_all = centred_all and centred
            if stop is not None and stop(w):
                break
            if m / t <= tol:
                break
            t *= config.BARRIER_MU
        return w, t, centred_all


def _phase_one(G, h, w0, tol):
    """Strictly feasible point of G w < h via  min s  s.t.  G w - s <= h, s >= -1."""
    m, n_vars = G.shape
    G1 = np.zeros((m + 1, n_vars + 1))
    G1[:m, :n_vars] = G
    G1[:m, n_vars] = -1.0
    G1[m, n_vars] = -1.0
    h1 = np.append(h, 1.0)
    c1 = np.zeros(n_vars + 1)
    c1[-1] = 1.0
    s0 = max(float(np.max(G @ w0 - h)), 0.0) + 1.0

    method = BarrierMethod(np.zeros((n_vars + 1, n_vars + 1)), c1, G1, h1)
    w, _, _ = method.run(np.append(w0, s0), tol, stop=lambda v: v[-1] < 0)
    if w[-1] >= 0:
        raise InfeasibleProgramError(
            f"no strictly feasible point: phase I stopped at max violation {w[-1]:.3g} >= 0"
        )
    logger.debug(f"Phase I found a strictly feasible point after {method.newton_steps} Newton steps")
    return w[:-1]


def solve(prog, tol=None, max_newton=None):
    """Solve a ConvexProgram to duality-gap bound `tol`."""
    tol = config.ORACLE_TOL if tol is None else float(tol)
    if tol <= 0:
        raise ValueError("tol must be positive")

    sign = 1.0 if prog.sense == "minimize" else -1.0
    linear = sign * prog.linear
    # a maximised quadratic is concave; minimise its negation
    G, h = prog.ineq_matrix, prog.ineq_rhs
    m = prog.n_constraints

    if m == 0:
        return _solve_unconstrained(prog, linear)

    start = prog.start
    if start is None or not prog.is_strictly_feasible(start):
        logger.info("No strictly feasible start supplied; running phase I")
        w0 = np.zeros(prog.n_vars) if start is None else start
        start = _phase_one(G, h, w0, tol)

    method = BarrierMethod(prog.quadratic, linear, G, h, max_newton)
    w, t, centred = method.run(start, tol)
    r = method.slack(w)
    duals = 1.0 / (t * r)
    gap = m / t
    status = "optimal" if centred and gap <= tol else "inaccurate"
    objective = prog.objective_value(w)
    logger.info(
        f"Barrier solve: {prog.n_vars} vars, {m} rows, status={status}, "
        f"objective={objective:.10g}, gap={gap:.2e}, newton={method.newton_steps}"
    )
    return SolveResult(w=w, objective=objective, status=status, duals=duals,
                       gap=gap, newton_steps=method.newton_steps)


def _solve_unconstrained(prog, linear):
    w, *_ = scipy.linalg.lstsq(prog.quadratic, -linear)
    residual = prog.quadratic @ w + linear
    if np.max(np.abs(residual)) > 1e-9 * (1.0 + np.max(np.abs(linear))):
        raise UnboundedProgramError("objective is unbounded without constraints")
    return SolveResult(w=w, objective=prog.objective_value(w), status="optimal",
                       duals=np.zeros(0), gap=0.0, newton_steps=0)


def kkt_residuals(prog, result):
    """(stationarity, complementarity) residuals, both as infinity norms."""
    sign = 1.0 if prog.sense == "minimize" else -1.0
    w, lam = result.w, result.duals
    grad = prog.quadratic @ w + sign * prog.linear
    stationarity = grad + prog.ineq_matrix.T @ lam
    complementarity = lam * (prog.ineq_rhs - prog.ineq_matrix @ w)
    return (float(np.max(np.abs(stationarity), initial=0.0)),
            float(np.max(np.abs(complementarity), initial=0.0)))


def dump_program(prog, path):
    """Plain-text dump: `# objective`, `# quadratic`, `# G`, `# h` sections,
    one whitespace-separated row per line, floats at repr precision."""

    def row(values):
        return " ".join(repr(float(v)) for v in values)

    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# objective {prog.sense} constant={prog.constant!r}\n")
        fh.write(row(prog.linear) + "\n")
        fh.write("# quadratic\n")
        for q in prog.quadratic:
            fh.write(row(q) + "\n")
        fh.write("# G\n")
        for g in prog.ineq_matrix:
            fh.write(row(g) + "\n")
        fh.write("# h\n")
        fh.write(row(prog.ineq_rhs) + "\n")


# ---------------- Program builders ----------------

class _Layout:
    """Sequential variable allocator."""

    def __init__(self):
        self.blocks = {}
        self.size = 0

    def add(self, name, shape):
        shape = tuple(shape)
        self.blocks[name] = (self.size, shape)
        self.size += int(np.prod(shape))

    def index(self, name, flat):
        return self.blocks[name][0] + np.asarray(flat)


def _pair_rows(x):
    """Ordered pairs (i, j), i != j, with the differences x_i - x_j."""
    n = x.shape[0]
    I, J = np.nonzero(~np.eye(n, dtype=bool))
    return I, J, x[I] - x[J]


def _interpolation_rows(layout, x, include_yhat=True):
    """Rows of the two interpolation constraint families in  G w <= 0  form.

    (i)   -(yhat_i - yhat_j + z_i - z_j) + <a_j, x_i - x_j> <= 0
    (ii)  -(z_i - z_j) + <b_j, x_i - x_j> <= 0
    """
    n, d = x.shape
    I, J, diff = _pair_rows(x)
    pairs = I.shape[0]
    rows = np.arange(pairs)
    coords = np.arange(d)
    slope_cols = J[:, None] * d + coords[None, :]

    fam1 = np.zeros((pairs, layout.size))
    if include_yhat:
        fam1[rows, layout.index("yhat", I)] = -1.0
        fam1[rows, layout.index("yhat", J)] = 1.0
    fam1[rows, layout.index("z", I)] = -1.0
    fam1[rows, layout.index("z", J)] = 1.0
    fam1[rows[:, None], layout.index("a_pos", slope_cols)] = diff
    fam1[rows[:, None], layout.index("a_neg", slope_cols)] = -diff

    fam2 = np.zeros((pairs, layout.size))
    fam2[rows, layout.index("z", I)] = -1.0
    fam2[rows, layout.index("z", J)] = 1.0
    fam2[rows[:, None], layout.index("b_pos", slope_cols)] = diff
    fam2[rows[:, None], layout.index("b_neg", slope_cols)] = -diff
    return np.vstack([fam1, fam2])


def _norm_rows(layout, n, d, l_mode):
    """sum of split parts <= L (scalar) or <= L_d per coordinate."""
    parts = ("a_pos", "a_neg", "b_pos", "b_neg")
    if l_mode == "scalar":
        G = np.zeros((n, layout.size))
        for i in range(n):
            for part in parts:
                G[i, layout.index(part, i * d + np.arange(d))] = 1.0
            G[i, layout.index("L", 0)] = -1.0
        return G
    G = np.zeros((n * d, layout.size))
    for i in range(n):
        for k in range(d):
            row = i * d + k
            for part in parts:
                G[row, layout.index(part, row)] = 1.0
            G[row, layout.index("L", k)] = -1.0
    return G


def _nonnegativity_rows(layout, names):
    blocks = []
    for name in names:
        offset, shape = layout.blocks[name]
        size = int(np.prod(shape))
        G = np.zeros((size, layout.size))
        G[np.arange(size), offset + np.arange(size)] = -1.0
        blocks.append(G)
    return np.vstack(blocks)


def _split(values, eps):
    """Strictly positive parts with values = pos - neg."""
    return np.maximum(values, 0.0) + eps, np.maximum(-values, 0.0) + eps


def build_srm_program(data, lam, loss="squared", l_mode="scalar"):
    """Structural-risk-minimisation fit as a dense program.

    Variables: yhat, z, a+, a-, b+, b-, L (1 or d entries) and, for the
    absolute and hinge losses, one epigraph slack per sample.
    """
    if loss not in LOSSES:
        raise ValueError(f"unknown loss {loss!r}; expected one of {LOSSES}")
    if l_mode not in L_MODES:
        raise ValueError(f"l_mode must be one of {L_MODES}, got {l_mode!r}")
    lam = float(lam)
    if not lam > 0:
        raise ValueError("the barrier formulation needs lambda > 0")
    x, y = data.x, data.y
    n, d = x.shape
    if n < 2:
        raise ValueError("need at least two samples")

    layout = _Layout()
    layout.add("yhat", (n,))
    layout.add("z", (n,))
    for part in ("a_pos", "a_neg", "b_pos", "b_neg"):
        layout.add(part, (n, d))
    n_budget = 1 if l_mode == "scalar" else d
    layout.add("L", (n_budget,))
    if loss != "squared":
        layout.add("slack", (n,))

    blocks = [
        _interpolation_rows(layout, x),
        _norm_rows(layout, n, d, l_mode),
        _nonnegativity_rows(layout, ("a_pos", "a_neg", "b_pos", "b_neg")),
    ]
    rhs = [np.zeros(2 * n * (n - 1)), np.zeros(n * n_budget), np.zeros(4 * n * d)]

    linear = np.zeros(layout.size)
    linear[layout.index("L", np.arange(n_budget))] = lam
    quadratic = None
    constant = 0.0
    yhat_cols = layout.index("yhat", np.arange(n))
    if loss == "squared":
        quadratic = np.zeros((layout.size, layout.size))
        quadratic[yhat_cols, yhat_cols] = 2.0
        linear[yhat_cols] = -2.0 * y
        constant = float(y @ y)
    else:
        slack_cols = layout.index("slack", np.arange(n))
        linear[slack_cols] = 1.0
        G_loss = np.zeros((2 * n, layout.size))
        rows = np.arange(n)
        if loss == "absolute":
            # |yhat_i - y_i| <= e_i
            G_loss[rows, yhat_cols] = 1.0
            G_loss[rows, slack_cols] = -1.0
            G_loss[n + rows, yhat_cols] = -1.0
            G_loss[n + rows, slack_cols] = -1.0
            rhs_loss = np.concatenate([y, -y])
        else:
            # 1 - y_i yhat_i <= e_i,  e_i >= 0
            G_loss[rows, yhat_cols] = -y
            G_loss[rows, slack_cols] = -1.0
            G_loss[n + rows, slack_cols] = -1.0
            rhs_loss = np.concatenate([-np.ones(n), np.zeros(n)])
        blocks.append(G_loss)
        rhs.append(rhs_loss)

    start = _srm_start(layout, x, y, loss, l_mode)
    logger.debug(f"SRM program: loss={loss}, l_mode={l_mode}, {layout.size} vars")
    return ConvexProgram(
        linear=linear,
        ineq_matrix=np.vstack(blocks),
        ineq_rhs=np.concatenate(rhs),
        quadratic=quadratic,
        sense="minimize",
        constant=constant,
        start=start,
        layout=dict(layout.blocks),
    )


def _srm_start(layout, x, y, loss, l_mode):
    """Quadratic lift: z_i = |x_i|^2 / 2 with slopes x_i is strictly feasible
    for distinct inputs, whatever yhat (here 0)."""
    n, d = x.shape
    w = np.zeros(layout.size)
    w[layout.index("z", np.arange(n))] = 0.5 * np.einsum("id,id->i", x, x)
    a_pos, a_neg = _split(x, 1.0)
    for name, values in (("a_pos", a_pos), ("a_neg", a_neg), ("b_pos", a_pos), ("b_neg", a_neg)):
        w[layout.index(name, np.arange(n * d))] = values.reshape(-1)
    per_coord = 2.0 * (a_pos + a_neg)
    if l_mode == "scalar":
        w[layout.index("L", 0)] = float(np.max(per_coord.sum(axis=1))) + 1.0
    else:
        w[layout.index("L", np.arange(d))] = per_coord.max(axis=0) + 1.0
    if loss == "absolute":
        w[layout.index("slack", np.arange(n))] = np.abs(y) + 1.0
    elif loss == "hinge":
        w[layout.index("slack", np.arange(n))] = 2.0
    return w


def srm_witness(prog, w):
    """(yhat, z, a, b, L) of an SRM program solution."""
    yhat = prog.block(w, "yhat")
    z = prog.block(w, "z")
    a = prog.block(w, "a_pos") - prog.block(w, "a_neg")
    b = prog.block(w, "b_pos") - prog.block(w, "b_neg")
    return yhat, z, a, b, prog.block(w, "L")


def build_discrepancy_program(points, weights, n_total, L):
    """Discrepancy maximisation over distinct points with signed multiplicities.

    maximise (2/n) sum_i weights_i * yhat_i  subject to both interpolation
    families and |a_i|_1 + |b_i|_1 <= L.  Requires L > 0 and at least two
    points (the interior is empty otherwise).
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weights = np.asarray(weights, dtype=float).reshape(-1)
    g, d = points.shape
    if weights.shape[0] != g:
        raise DimensionMismatchError("one weight per point is required")
    if g < 2:
        raise ValueError("need at least two distinct points")
    L = float(L)
    if not L > 0:
        raise ValueError("the barrier formulation needs L > 0")

    # constraints only see differences; centring keeps the start well scaled
    x = points - points.mean(axis=0)

    layout = _Layout()
    layout.add("yhat", (g,))
    layout.add("z", (g,))
    for part in ("a_pos", "a_neg", "b_pos", "b_neg"):
        layout.add(part, (g, d))

    G = np.vstack([
        _interpolation_rows(layout, x),
        _norm_rows_budget(layout, g, d),
        _nonnegativity_rows(layout, ("a_pos", "a_neg", "b_pos", "b_neg")),
    ])
    h = np.concatenate([np.zeros(2 * g * (g - 1)), np.full(g, L), np.zeros(4 * g * d)])

    linear = np.zeros(layout.size)
    linear[layout.index("yhat", np.arange(g))] = 2.0 * weights / n_total

    # curvature c and margin eps keep |a_i|_1 + |b_i|_1 <= 3L/4
    c = L / (4.0 * (float(np.max(np.abs(x).sum(axis=1))) + 1.0))
    eps = L / (16.0 * d)
    start = np.zeros(layout.size)
    start[layout.index("z", np.arange(g))] = 0.5 * c * np.einsum("id,id->i", x, x)
    pos, neg = _split(c * x, eps)
    for name, values in (("a_pos", pos), ("a_neg", neg), ("b_pos", pos), ("b_neg", neg)):
        start[layout.index(name, np.arange(g * d))] = values.reshape(-1)

    return ConvexProgram(linear=linear, ineq_matrix=G, ineq_rhs=h, sense="maximize",
                         start=start, layout=dict(layout.blocks))


def _norm_rows_budget(layout, g, d):
    G = np.zeros((g, layout.size))
    for i in range(g):
        for part in ("a_pos", "a_neg", "b_pos", "b_neg"):
            G[i, layout.index(part, i * d + np.arange(d))] = 1.0
    return G
