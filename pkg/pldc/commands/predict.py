import logging

import numpy as np

from pldc.select import MulticlassModel, decide
from pldc.utils.io import load_feature_csv, load_model, write_csv

logger = logging.getLogger(__name__)


def register(subparsers):
    parser = subparsers.add_parser("predict", help="score a CSV with a saved model")
    parser.add_argument("--model", required=True, help="model JSON written by `fit`")
    parser.add_argument("--data", required=True, help="CSV of inputs")
    parser.add_argument("--out", required=True, help="CSV of predictions to write")
    parser.set_defaults(func=run)
    return parser


def run(args):
    model, payload = load_model(args.model)
    X = load_feature_csv(args.data, model.dim, features=payload.get("features"), target=payload.get("target"))
    task = payload["task"]

    if task == "multiclass":
        columns = _multiclass_columns(model, X)
    elif task == "binary":
        scores = model.predict(X) if X.shape[0] else np.zeros(0)
        columns = {"label": decide(scores), "score": scores}
    else:
        columns = {"yhat": model.predict(X) if X.shape[0] else np.zeros(0)}

    write_csv(args.out, columns)
    logger.info(f"Wrote {X.shape[0]} predictions to {args.out}")
    return 0


def _multiclass_columns(model: MulticlassModel, X):
    if X.shape[0] == 0:
        scores = np.zeros((0, len(model.classes)))
        labels = np.zeros(0)
    else:
        scores = model.scores(X)
        labels = np.asarray(model.predict_class(X), dtype=float)
    columns = {"label": labels}
    for index, label in enumerate(model.classes):
        columns[f"score_{label:g}"] = scores[:, index]
    return columns
