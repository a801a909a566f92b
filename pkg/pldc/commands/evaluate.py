import numpy as np

from pldc.errors import DataFormatError
from pldc.models import Dataset
from pldc.select import evaluate_nmse, metric_value
from pldc.utils.io import load_feature_csv, load_model, read_table
from pldc.utils.report import emit


def register(subparsers):
    parser = subparsers.add_parser("eval", help="score a saved model on a labelled test CSV")
    parser.add_argument("--model", required=True)
    parser.add_argument("--test", required=True, help="CSV with features and the target column")
    parser.add_argument("--target", help="target column (defaults to the one used for fitting)")
    parser.add_argument("--report", help="also write the report to this file")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(func=run)
    return parser


def run(args):
    model, payload = load_model(args.model)
    target = args.target or payload.get("target") or "y"
    frame = read_table(args.test)
    if target not in frame.columns:
        raise DataFormatError(f"target column {target!r} not found in {args.test}", column=target)
    y = frame[target].to_numpy(dtype=float)
    X = load_feature_csv(args.test, model.dim, features=payload.get("features"), target=target)
    if X.shape[0] == 0:
        raise ValueError(f"{args.test} has no rows")

    task = payload["task"]
    summary = {"task": task, "n": int(X.shape[0])}
    if task == "regression":
        test = Dataset(x=X, y=y, raw_x=X)
        summary["nmse"] = evaluate_nmse(model, test)
        summary["mse"] = metric_value("mse", model.predict(X), y)
    elif task == "binary":
        summary["misclassification"] = metric_value("misclassification", model.predict(X), y)
    else:
        predicted = np.asarray(model.predict_class(X), dtype=float)
        summary["misclassification"] = float(np.mean(predicted != y))
    emit(args, summary)
    return 0
