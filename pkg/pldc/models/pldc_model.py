from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from pldc.errors import DimensionMismatchError
from pldc.models.dataset import Standardizer
from pldc.models.max_affine import MaxAffine


@dataclass(frozen=True, eq=False)
class PLDCModel:
    """Difference of two max-affine functions, f(x) = phi1(x') - phi2(x'),
    where x' is the standardized input when a standardizer is attached.

    Instances are never mutated after construction, so concurrent reads and
    evaluations are safe.
    """

    phi1: MaxAffine
    phi2: MaxAffine
    standardizer: Optional[Standardizer] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.phi1.dim != self.phi2.dim:
            raise DimensionMismatchError(
                f"convex parts disagree on dimension: {self.phi1.dim} vs {self.phi2.dim}"
            )
        if self.standardizer is not None and self.standardizer.dim != self.phi1.dim:
            raise DimensionMismatchError("standardizer width does not match the planes")

    @property
    def dim(self):
        return self.phi1.dim

    def to_model_coordinates(self, X):
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise DimensionMismatchError(f"model expects {self.dim} features, got {X.shape[-1]}")
        if self.standardizer is None:
            return X
        return self.standardizer.transform(X)

    def predict(self, X):
        """Vectorised evaluation over the rows of X by a linear scan of all planes."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Z = self.to_model_coordinates(X)
        return self.phi1.value(Z) - self.phi2.value(Z)

    def __call__(self, x):
        return float(self.predict(np.reshape(x, (1, -1)))[0])

    def __repr__(self):
        return (
            f"<PLDCModel d={self.dim} K1={self.phi1.n_planes} K2={self.phi2.n_planes} "
            f"standardized={self.standardizer is not None}>"
        )
