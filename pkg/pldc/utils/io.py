"""CSV ingestion and JSON persistence for models and ReLU networks."""
import json
import logging

import numpy as np
import pandas as pd

from pldc import config
from pldc.errors import DataFormatError, DimensionMismatchError
from pldc.models import MaxAffine, PLDCModel, ReluNet, Standardizer
from pldc.select import MulticlassModel

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
TASKS = ("regression", "binary", "multiclass")


# ---------------- CSV ----------------

def read_table(path):
    """Numeric table with a header row; every cell must parse as a finite float."""
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError:
        return pd.DataFrame()
    except (OSError, UnicodeDecodeError) as exc:
        raise DataFormatError(f"cannot read {path}: {exc}") from exc
    except pd.errors.ParserError as exc:
        raise DataFormatError(f"malformed CSV {path}: {exc}") from exc

    frame.columns = [str(c).strip() for c in frame.columns]
    numeric = {}
    for column in frame.columns:
        values = pd.to_numeric(frame[column].str.strip(), errors="coerce")
        bad = ~np.isfinite(values.to_numpy(dtype=float))
        if bad.any():
            row = int(np.flatnonzero(bad)[0])
            # header is line 1
            raise DataFormatError(
                f"non-numeric value {frame[column].iloc[row]!r} in column {column!r} at line {row + 2}",
                row=row + 2,
                column=column,
            )
        numeric[column] = values.to_numpy(dtype=float)
    return pd.DataFrame(numeric, columns=list(frame.columns))


def load_training_csv(path, target="y"):
    """(x, y, feature_names) from a CSV whose target column is `target`."""
    frame = read_table(path)
    if target not in frame.columns:
        raise DataFormatError(
            f"target column {target!r} not found in {path}; columns are {list(frame.columns)}",
            column=target,
        )
    features = [c for c in frame.columns if c != target]
    if not features:
        raise DataFormatError(f"{path} has no feature columns besides {target!r}")
    return frame[features].to_numpy(dtype=float), frame[target].to_numpy(dtype=float), features


def load_feature_csv(path, dim, features=None, target=None):
    """Feature matrix for prediction. Columns named in `features` are used when
    all are present; otherwise every column except `target`."""
    frame = read_table(path)
    if frame.shape[1] == 0:
        return np.zeros((0, dim))
    if features and all(f in frame.columns for f in features):
        columns = list(features)
    else:
        columns = [c for c in frame.columns if c != target]
    if len(columns) != dim:
        raise DimensionMismatchError(f"model expects {dim} features, {path} provides {len(columns)}")
    return frame[columns].to_numpy(dtype=float)


def write_csv(path, columns):
    """Write named columns at round-trip precision."""
    pd.DataFrame(columns).to_csv(path, index=False, float_format=FLOAT_FORMAT)


# ---------------- Model JSON ----------------

def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def _part_to_dict(phi):
    return {"slopes": phi.slopes.tolist(), "offsets": phi.offsets.tolist()}


def model_to_dict(model):
    meta = {k: v for k, v in model.meta.items() if k != "witness"}
    return {"phi1": _part_to_dict(model.phi1), "phi2": _part_to_dict(model.phi2), "meta": _jsonable(meta)}


def save_model(path, model, task="regression", features=None, target=None, report=None):
    """Write a PLDCModel or MulticlassModel as versioned JSON."""
    if task not in TASKS:
        raise ValueError(f"task must be one of {TASKS}")
    if task == "multiclass":
        models, classes = list(model.models), list(model.classes)
        extra = dict(model.meta)
    else:
        models = [model]
        classes = [-1.0, 1.0] if task == "binary" else None
        extra = {}
    standardizer = models[0].standardizer
    payload = {
        "version": config.MODEL_FORMAT_VERSION,
        "task": task,
        "standardizer": None if standardizer is None else {
            "mean": standardizer.mean.tolist(),
            "scale": standardizer.scale.tolist(),
        },
        "classes": _jsonable(classes),
        "features": list(features) if features is not None else None,
        "target": target,
        "models": [model_to_dict(m) for m in models],
        "meta": _jsonable(extra),
        "report": _jsonable(report) if report is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
    logger.info(f"Saved {task} model to {path}")


def _part_from_dict(part):
    return MaxAffine(np.asarray(part["slopes"], dtype=float), np.asarray(part["offsets"], dtype=float))


def load_model(path):
    """Returns (model, payload); model is a PLDCModel or a MulticlassModel."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise DataFormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"model file {path} is not valid JSON: {exc}") from exc

    try:
        if payload["version"] != config.MODEL_FORMAT_VERSION:
            raise DataFormatError(f"unsupported model format version {payload['version']!r}")
        task = payload["task"]
        if task not in TASKS:
            raise DataFormatError(f"unknown task {task!r} in {path}")
        st = payload.get("standardizer")
        standardizer = None if st is None else Standardizer(st["mean"], st["scale"])
        models = tuple(
            PLDCModel(_part_from_dict(m["phi1"]), _part_from_dict(m["phi2"]),
                      standardizer=standardizer, meta=dict(m.get("meta") or {}))
            for m in payload["models"]
        )
        if task == "multiclass":
            model = MulticlassModel(classes=tuple(payload["classes"]), models=models,
                                    meta=dict(payload.get("meta") or {}))
        elif len(models) != 1:
            raise DataFormatError(f"{task} model file must hold exactly one model")
        else:
            model = models[0]
    except DataFormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"corrupted model file {path}: {exc}") from exc
    return model, payload


# ---------------- ReLU net JSON ----------------

def relu_to_dict(net):
    return {
        "weights": [W.tolist() for W in net.weights],
        "output": net.output.tolist(),
        "augmented": net.augmented,
    }


def save_relu(path, net):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(relu_to_dict(net), fh, indent=2)


def load_relu(path):
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        return ReluNet(
            tuple(np.asarray(W, dtype=float) for W in payload["weights"]),
            np.asarray(payload["output"], dtype=float),
            augmented=bool(payload.get("augmented", False)),
        )
    except OSError as exc:
        raise DataFormatError(f"cannot read network file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"network file {path} is not valid JSON: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise DataFormatError(f"corrupted network file {path}: {exc}") from exc
