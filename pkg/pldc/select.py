"""Lambda selection by cross-validation, one-vs-rest classification and the
synthetic benchmark data."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pldc import config
from pldc.admm import FitConfig, fit, fit_hinge_binary
from pldc.errors import DimensionMismatchError, LabelError
from pldc.models import Dataset

logger = logging.getLogger(__name__)

METRICS = ("mse", "mae", "misclassification")
DEFAULT_METRIC = {"squared": "mse", "absolute": "mae", "hinge": "misclassification"}
# relative slack under which two CV means count as tied
TIE_TOL = 1e-9


# ---------------- Metrics ----------------

def decide(scores):
    """Binary decision rule: sign of the score, zero counted as +1."""
    return np.where(np.asarray(scores) >= 0, 1.0, -1.0)


def metric_value(metric, predictions, y):
    predictions = np.asarray(predictions, dtype=float)
    y = np.asarray(y, dtype=float)
    if metric == "mse":
        return float(np.mean((predictions - y) ** 2))
    if metric == "mae":
        return float(np.mean(np.abs(predictions - y)))
    if metric == "misclassification":
        return float(np.mean(decide(predictions) != y))
    raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")


def _inputs(data):
    return data.raw_x if data.raw_x is not None else data.x


def evaluate_nmse(model, test):
    """100 * MSE / Var(y_test)."""
    if test.n == 0:
        raise ValueError("test set is empty")
    variance = float(np.var(test.y))
    if variance <= 0:
        raise ValueError("test responses have zero variance; NMSE is undefined")
    mse = float(np.mean((model.predict(_inputs(test)) - test.y) ** 2))
    return 100.0 * mse / variance


# ---------------- Cross validation ----------------

@dataclass(frozen=True)
class CvPlan:
    grid: tuple
    folds: int = config.CV_FOLDS
    loss: str = "squared"
    seed: int = 0
    metric: Optional[str] = None
    workers: int = config.CV_WORKERS
    fit_config: Optional[FitConfig] = None

    def __post_init__(self):
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ValueError("the lambda grid is empty")
        if self.folds < 2:
            raise ValueError("cross-validation needs at least two folds")
        metric = self.metric or DEFAULT_METRIC.get(self.loss)
        if metric not in METRICS:
            raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "metric", metric)

    def config_for(self, lam):
        base = self.fit_config or FitConfig(lam=lam)
        return base.replace(lam=lam, loss=self.loss)


@dataclass
class CvRow:
    lam: float
    mean: float
    stderr: float
    scores: list = field(default_factory=list)


def assign_folds(n, folds, seed):
    """Seeded fold index per sample; fold sizes differ by at most one."""
    if folds > n:
        raise ValueError(f"{folds} folds requested for {n} samples")
    order = np.random.default_rng(seed).permutation(n)
    fold_of = np.empty(n, dtype=int)
    fold_of[order] = np.arange(n) % folds
    return fold_of


def _fold_score(data, plan, lam, train, test):
    model, _ = fit(data.take(train), plan.config_for(lam))
    predictions = model.predict(_inputs(data)[test])
    return metric_value(plan.metric, predictions, data.y[test])


def cross_validate(data, plan):
    """Mean/stderr of the held-out metric for every lambda; returns
    (best_lambda, rows). Ties go to the larger lambda."""
    fold_of = assign_folds(data.n, plan.folds, plan.seed)
    splits = []
    for k in range(plan.folds):
        train = np.flatnonzero(fold_of != k)
        test = np.flatnonzero(fold_of == k)
        if train.size < 2:
            raise ValueError(f"fold {k} leaves only {train.size} training points")
        splits.append((train, test))

    jobs = [(lam, train, test) for lam in plan.grid for train, test in splits]
    if plan.workers > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            scores = list(pool.map(lambda job: _fold_score(data, plan, *job), jobs))
    else:
        scores = [_fold_score(data, plan, *job) for job in jobs]

    rows = []
    for index, lam in enumerate(plan.grid):
        chunk = np.asarray(scores[index * plan.folds:(index + 1) * plan.folds])
        stderr = float(chunk.std(ddof=1) / np.sqrt(chunk.size)) if chunk.size > 1 else 0.0
        rows.append(CvRow(lam=lam, mean=float(chunk.mean()), stderr=stderr, scores=chunk.tolist()))
        logger.info(f"CV lambda={lam:.6g}: {plan.metric}={rows[-1].mean:.6g} +- {stderr:.3g}")

    best_mean = min(row.mean for row in rows)
    slack = TIE_TOL * (1.0 + abs(best_mean))
    best = max(row.lam for row in rows if row.mean <= best_mean + slack)
    logger.info(f"CV selected lambda={best:.6g}")
    return best, rows


def fit_with_cv(data, plan):
    """Cross-validate, then refit on all of `data` at the selected lambda."""
    best, rows = cross_validate(data, plan)
    model, report = fit(data, plan.config_for(best))
    return model, report, best, rows


# ---------------- Multiclass ----------------

@dataclass(frozen=True, eq=False)
class MulticlassModel:
    """One binary scorer per class; the predicted class is the argmax."""

    classes: tuple
    models: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        classes, models = tuple(self.classes), tuple(self.models)
        if len(classes) < 2 or len(classes) != len(models):
            raise ValueError("need one model per class and at least two classes")
        dims = {m.dim for m in models}
        if len(dims) != 1:
            raise DimensionMismatchError(f"class models disagree on dimension: {sorted(dims)}")
        first = models[0].standardizer
        for m in models[1:]:
            if (first is None) != (m.standardizer is None) or (first is not None and not first.same_as(m.standardizer)):
                raise ValueError("class models must share one standardizer")
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "models", models)

    @property
    def dim(self):
        return self.models[0].dim

    def scores(self, X):
        """m x C matrix of class scores."""
        return np.column_stack([m.predict(X) for m in self.models])

    def predict_class(self, X):
        # argmax returns the first maximum, i.e. the smallest class index
        index = np.argmax(self.scores(X), axis=1)
        return np.asarray(self.classes, dtype=object)[index]


def fit_multiclass(x, labels, plan, standardize=True):
    """One-vs-rest hinge classifiers; lambda per class by CV when the plan's
    grid has more than one value."""
    labels = np.asarray(labels).reshape(-1)
    classes, codes = np.unique(labels, return_inverse=True)
    codes = codes.reshape(-1)
    if classes.size < 2:
        raise LabelError(f"need at least two classes, found {classes.tolist()}")
    base = Dataset.from_arrays(x, codes.astype(float), standardize=standardize)

    hinge_plan = CvPlan(grid=plan.grid, folds=plan.folds, loss="hinge", seed=plan.seed,
                        metric="misclassification", workers=plan.workers, fit_config=plan.fit_config)
    base_codes = base.y.astype(int)
    models, lambdas = [], []
    for index, label in enumerate(classes):
        data_c = base.with_labels(np.where(base_codes == index, 1.0, -1.0))
        if len(hinge_plan.grid) > 1:
            lam, _ = cross_validate(data_c, hinge_plan)
        else:
            lam = hinge_plan.grid[0]
        model, report = fit_hinge_binary(data_c, hinge_plan.config_for(lam))
        logger.info(f"Class {label!r}: lambda={lam:.6g}, iterations={report.iterations}")
        models.append(model)
        lambdas.append(lam)

    return MulticlassModel(
        classes=tuple(classes.tolist()),
        models=tuple(models),
        meta={"reduction": "one_vs_rest", "loss": "hinge", "lambdas": lambdas},
    )


# ---------------- Synthetic data ----------------

def ground_truth(x):
    """sin(pi s) + s^2 with s = sum(x) / sqrt(d)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = x.sum(axis=1) / np.sqrt(x.shape[1])
    return np.sin(np.pi * s) + s ** 2


def synthetic_arrays(n, d, noise_sd=0.25, seed=None):
    if n < 1 or d < 1:
        raise ValueError("n and d must be positive")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    y = ground_truth(x) + noise_sd * rng.standard_normal(n)
    return x, y


def generate_synthetic(n, d, noise_sd=0.25, seed=None, standardize=True):
    x, y = synthetic_arrays(n, d, noise_sd, seed)
    return Dataset.from_arrays(x, y, standardize=standardize)
