from dataclasses import dataclass

import numpy as np

from pldc.errors import DimensionMismatchError


def _frozen(array):
    array = np.array(array, dtype=float, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MaxAffine:
    """Pointwise maximum of K affine functions x -> <slope_k, x> + offset_k."""

    slopes: np.ndarray   # K x d
    offsets: np.ndarray  # K

    def __post_init__(self):
        slopes = _frozen(self.slopes)
        offsets = _frozen(self.offsets)
        if slopes.ndim != 2:
            raise DimensionMismatchError(f"slopes must be a K x d matrix, got shape {slopes.shape}")
        if offsets.shape != (slopes.shape[0],):
            raise DimensionMismatchError(
                f"offsets shape {offsets.shape} does not match {slopes.shape[0]} planes"
            )
        if slopes.shape[0] == 0:
            raise DimensionMismatchError("a max-affine function needs at least one plane")
        if slopes.shape[1] == 0:
            raise DimensionMismatchError("planes must have positive dimension")
        object.__setattr__(self, "slopes", slopes)
        object.__setattr__(self, "offsets", offsets)

    @classmethod
    def from_planes(cls, planes):
        """Build from an iterable of (slope, offset) pairs."""
        planes = list(planes)
        if not planes:
            raise DimensionMismatchError("a max-affine function needs at least one plane")
        slopes = np.array([np.atleast_1d(np.asarray(s, dtype=float)) for s, _ in planes])
        offsets = np.array([float(c) for _, c in planes])
        return cls(slopes, offsets)

    @classmethod
    def constant(cls, value, dim):
        return cls(np.zeros((1, dim)), np.array([float(value)]))

    @property
    def dim(self):
        return self.slopes.shape[1]

    @property
    def n_planes(self):
        return self.slopes.shape[0]

    @property
    def planes(self):
        return [(self.slopes[k], float(self.offsets[k])) for k in range(self.n_planes)]

    def affine_values(self, X):
        """m x K matrix of every plane evaluated at every row of X."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.dim:
            raise DimensionMismatchError(f"expected inputs of width {self.dim}, got {X.shape[1]}")
        return X @ self.slopes.T + self.offsets

    def value(self, x):
        """Evaluate at a vector (returns a float) or at the rows of a matrix."""
        x = np.asarray(x, dtype=float)
        values = self.affine_values(x).max(axis=1)
        if x.ndim <= 1:
            return float(values[0])
        return values

    def active_plane(self, x):
        # ties go to the lowest index; the value does not depend on the choice
        return int(np.argmax(self.affine_values(x)[0]))

    def max_slope_l1(self):
        return float(np.abs(self.slopes).sum(axis=1).max())

    def scaled(self, c):
        """c * phi for c >= 0."""
        if c < 0:
            raise ValueError("max-affine functions are only closed under non-negative scaling")
        return MaxAffine(c * self.slopes, c * self.offsets)

    def minkowski_sum(self, other):
        """phi + psi as a max over all K1*K2 pairwise plane sums."""
        if other.dim != self.dim:
            raise DimensionMismatchError(f"cannot add dimensions {self.dim} and {other.dim}")
        slopes = (self.slopes[:, None, :] + other.slopes[None, :, :]).reshape(-1, self.dim)
        offsets = (self.offsets[:, None] + other.offsets[None, :]).reshape(-1)
        return MaxAffine(slopes, offsets)

    def __repr__(self):
        return f"<MaxAffine K={self.n_planes} d={self.dim}>"
