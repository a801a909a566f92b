import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pldc.errors import DimensionMismatchError, DuplicateInputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Per-feature affine input transform x' = (x - mean) / scale."""

    mean: np.ndarray
    scale: np.ndarray

    def __post_init__(self):
        mean = np.array(self.mean, dtype=float, copy=True).reshape(-1)
        scale = np.array(self.scale, dtype=float, copy=True).reshape(-1)
        if mean.shape != scale.shape:
            raise DimensionMismatchError("standardizer mean and scale differ in length")
        if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
            raise ValueError("standardizer scales must be finite and strictly positive")
        mean.setflags(write=False)
        scale.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "scale", scale)

    @classmethod
    def fit(cls, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        scale = X.std(axis=0)
        # constant columns keep unit scale
        scale[scale <= 0] = 1.0
        return cls(X.mean(axis=0), scale)

    @property
    def dim(self):
        return self.mean.shape[0]

    def transform(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise DimensionMismatchError(f"expected inputs of width {self.dim}, got {X.shape[-1]}")
        return (X - self.mean) / self.scale

    def same_as(self, other):
        if other is None:
            return False
        return np.array_equal(self.mean, other.mean) and np.array_equal(self.scale, other.scale)


def _dedupe(x, y):
    """Drop repeated (x, y) rows, keeping first occurrences in order.

    Returns the kept row indices. Raises if one x carries two responses.
    """
    _, first, inverse = np.unique(x, axis=0, return_index=True, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    for group in range(len(first)):
        rows = np.flatnonzero(inverse == group)
        if rows.size > 1 and np.any(y[rows] != y[rows[0]]):
            raise DuplicateInputError(
                f"rows {rows.tolist()} share the same inputs but have different responses"
            )
    return np.sort(first)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Predictors and responses; `x` is in model coordinates (standardized when
    a standardizer is present), `raw_x` keeps the original inputs."""

    x: np.ndarray
    y: np.ndarray
    standardizer: Optional[Standardizer] = None
    raw_x: Optional[np.ndarray] = None

    @classmethod
    def from_arrays(cls, x, y, standardize=True):
        x = np.array(x, dtype=float, copy=True)
        if x.ndim == 1:
            x = x.reshape(-1, 1)
        y = np.array(y, dtype=float, copy=True).reshape(-1)
        if x.ndim != 2 or x.shape[0] != y.shape[0]:
            raise DimensionMismatchError(f"x has shape {x.shape} but y has {y.shape[0]} entries")
        if x.shape[0] == 0:
            raise ValueError("dataset is empty")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")

        keep = _dedupe(x, y)
        if keep.size < x.shape[0]:
            logger.warning(f"Removed {x.shape[0] - keep.size} duplicate rows")
            x, y = x[keep], y[keep]

        standardizer = Standardizer.fit(x) if standardize else None
        model_x = standardizer.transform(x) if standardizer is not None else x.copy()
        for array in (x, y, model_x):
            array.setflags(write=False)
        return cls(x=model_x, y=y, standardizer=standardizer, raw_x=x)

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def d(self):
        return self.x.shape[1]

    @property
    def standardized(self):
        return self.standardizer is not None

    def take(self, indices, standardize=None):
        """Sub-dataset of the given rows, re-standardized on those rows."""
        if standardize is None:
            standardize = self.standardized
        raw = self.raw_x if self.raw_x is not None else self.x
        indices = np.asarray(indices, dtype=int)
        return Dataset.from_arrays(raw[indices], self.y[indices], standardize=standardize)

    def with_labels(self, y):
        """Same inputs and standardization, new responses."""
        y = np.array(y, dtype=float, copy=True).reshape(-1)
        if y.shape[0] != self.n:
            raise DimensionMismatchError(f"expected {self.n} labels, got {y.shape[0]}")
        y.setflags(write=False)
        return Dataset(x=self.x, y=y, standardizer=self.standardizer, raw_x=self.raw_x)

    def __repr__(self):
        return f"<Dataset n={self.n} d={self.d} standardized={self.standardized}>"
