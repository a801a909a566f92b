from dataclasses import dataclass

import numpy as np

from pldc.errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class ReluNet:
    """Bias-free fully connected ReLU network

        a^1 = max(W^1 x, 0),  a^{l+1} = max(W^{l+1} a^l, 0),  f(x) = <w^{D+1}, a^D>.

    With `augmented` set, a constant 1 is appended to every input before the
    first layer, which stands in for biases.
    """

    weights: tuple
    output: np.ndarray
    augmented: bool = False

    def __post_init__(self):
        weights = tuple(np.array(W, dtype=float, copy=True) for W in self.weights)
        output = np.array(self.output, dtype=float, copy=True).reshape(-1)
        if not weights:
            raise DimensionMismatchError("a ReLU net needs at least one hidden layer")
        for layer, W in enumerate(weights, start=1):
            if W.ndim != 2:
                raise DimensionMismatchError(f"layer {layer} weights must be a matrix")
            if layer > 1 and W.shape[1] != weights[layer - 2].shape[0]:
                raise DimensionMismatchError(
                    f"layer {layer} expects {W.shape[1]} inputs but layer {layer - 1} "
                    f"has {weights[layer - 2].shape[0]} units"
                )
        if output.shape[0] != weights[-1].shape[0]:
            raise DimensionMismatchError(
                f"output vector has {output.shape[0]} entries for {weights[-1].shape[0]} units"
            )
        for array in (*weights, output):
            array.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "output", output)

    @property
    def depth(self):
        return len(self.weights)

    @property
    def widths(self):
        return [W.shape[0] for W in self.weights]

    @property
    def input_dim(self):
        """Width of the caller's inputs (without the appended constant)."""
        return self.weights[0].shape[1] - int(self.augmented)

    def forward(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.input_dim:
            raise DimensionMismatchError(f"network expects {self.input_dim} inputs, got {X.shape[1]}")
        if self.augmented:
            X = np.hstack([X, np.ones((X.shape[0], 1))])
        hidden = X
        for W in self.weights:
            hidden = np.maximum(hidden @ W.T, 0.0)
        return hidden @ self.output

    def __call__(self, x):
        return float(self.forward(np.reshape(x, (1, -1)))[0])

    def __repr__(self):
        return f"<ReluNet depth={self.depth} widths={self.widths} augmented={self.augmented}>"
