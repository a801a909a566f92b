import logging

import numpy as np

from pldc import config
from pldc.admm import FitConfig, fit
from pldc.discrepancy import lambda_grid
from pldc.models import Dataset
from pldc.select import CvPlan, decide, fit_multiclass, fit_with_cv
from pldc.utils.io import load_training_csv, save_model
from pldc.utils.report import emit

logger = logging.getLogger(__name__)

LOSS_NAMES = {"l2": "squared", "l1": "absolute", "hinge": "hinge"}


# ---------------- Parser ----------------
def register(subparsers):
    parser = subparsers.add_parser("fit", help="fit a PLDC model to a CSV dataset")
    parser.add_argument("--data", required=True, help="training CSV with a header row")
    parser.add_argument("--target", default="y", help="name of the response column")
    parser.add_argument("--loss", choices=sorted(LOSS_NAMES), default="l2")
    strength = parser.add_mutually_exclusive_group(required=True)
    strength.add_argument("--lambda", dest="lam", type=float, help="regularisation weight")
    strength.add_argument("--cv", type=int, metavar="K", help="pick lambda by K-fold cross-validation")
    parser.add_argument("--m-scale", type=float, default=1.0, help="scale of the lambda grid")
    parser.add_argument("--rho", type=float, default=config.DEFAULT_RHO)
    parser.add_argument("--max-iters", type=int, default=config.DEFAULT_MAX_ITERS)
    parser.add_argument("--tol", type=float, default=config.DEFAULT_TOL)
    parser.add_argument("--solver", choices=["admm", "lp"], default="admm")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=config.CV_WORKERS)
    parser.add_argument("--no-standardize", action="store_true")
    parser.add_argument("--out", required=True, help="model JSON to write")
    parser.add_argument("--report", help="also write the report to this file")
    parser.add_argument("--json", action="store_true", help="print the report as JSON")
    parser.set_defaults(func=run)
    return parser


# ---------------- Helper ----------------
def _fit_config(args, loss, lam):
    return FitConfig(
        lam=lam,
        rho=args.rho,
        max_iters=args.max_iters,
        tol_primal=args.tol,
        tol_dual=args.tol,
        loss=loss,
        solver=args.solver,
        record_history=False,
    )


def _cv_table(rows):
    return [{"lambda": row.lam, "mean": row.mean, "stderr": row.stderr} for row in rows]


def _fit_report(report):
    out = report.as_dict()
    # wall time would make reports differ between identical runs
    logger.info(f"Fit wall time: {out.pop('wall_time'):.3f}s")
    return out


def _is_binary(y):
    return set(np.unique(y).tolist()) == {-1.0, 1.0}


# ---------------- Command ----------------
def run(args):
    x, y, features = load_training_csv(args.data, target=args.target)
    loss = LOSS_NAMES[args.loss]
    standardize = not args.no_standardize

    if loss == "hinge" and not _is_binary(y):
        return _run_multiclass(args, x, y, features, standardize)

    data = Dataset.from_arrays(x, y, standardize=standardize)
    summary = {"task": "binary" if loss == "hinge" else "regression", "n": data.n, "d": data.d}

    if args.cv is not None:
        grid = lambda_grid(data, m_scale=args.m_scale)
        plan = CvPlan(grid=grid, folds=args.cv, loss=loss, seed=args.seed,
                      workers=args.workers, fit_config=_fit_config(args, loss, grid[0]))
        model, report, best, rows = fit_with_cv(data, plan)
        summary["lambda"] = best
        summary["cv_metric"] = plan.metric
        summary["cv_table"] = _cv_table(rows)
    else:
        model, report = fit(data, _fit_config(args, loss, args.lam))
        summary["lambda"] = args.lam

    summary.update(_fit_report(report))
    predictions = model.predict(data.raw_x)
    if loss == "hinge":
        summary["training_error"] = float(np.mean(decide(predictions) != data.y))
    else:
        summary["training_mse"] = float(np.mean((predictions - data.y) ** 2))
        summary["training_mae"] = float(np.mean(np.abs(predictions - data.y)))

    save_model(args.out, model, task=summary["task"], features=features, target=args.target,
               report={k: v for k, v in summary.items() if k != "cv_table"})
    emit(args, summary)
    return 0


def _run_multiclass(args, x, y, features, standardize):
    base = Dataset.from_arrays(x, y, standardize=standardize)
    cfg = _fit_config(args, "hinge", args.lam if args.lam is not None else 1.0)
    if args.cv is not None:
        grid = tuple(lambda_grid(base, m_scale=args.m_scale))
        folds = args.cv
    else:
        grid, folds = (args.lam,), config.CV_FOLDS
    plan = CvPlan(grid=grid, folds=folds, loss="hinge", seed=args.seed,
                  workers=args.workers, fit_config=cfg)
    model = fit_multiclass(base.raw_x, base.y, plan, standardize=standardize)

    predicted = np.asarray(model.predict_class(base.raw_x), dtype=float)
    summary = {
        "task": "multiclass",
        "n": base.n,
        "d": base.d,
        "classes": list(model.classes),
        "lambdas": list(model.meta["lambdas"]),
        "training_error": float(np.mean(predicted != base.y)),
    }
    save_model(args.out, model, task="multiclass", features=features, target=args.target, report=summary)
    emit(args, summary)
    return 0
