"""scikit-learn compatible front end for the batch-backprop MLP.

The numerical work stays in the pure-Python kernels; this module only
validates array-likes and converts them to and from :class:`Matrix`.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .batching import TrainConfig, evaluate, train
from .network import Network, Topology, predict
from .tensor import Matrix


def to_matrix(a) -> Matrix:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(-1, 1)
    return Matrix(a.shape[0], a.shape[1], a.ravel().tolist())


def to_array(m: Matrix) -> np.ndarray:
    return np.array(m.data, dtype=np.float64).reshape(m.rows, m.cols)


class BatchMLPRegressor(RegressorMixin, BaseEstimator):
    """Sigmoid MLP trained with batch backpropagation on squared error.

    Targets are expected in (0, 1) because the output layer is a sigmoid.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
        Widths of the hidden layers; input and output widths come from the data.
    eta : float
        Learning rate.
    epochs : int
        Passes over the training data.
    batch_size : int
        Rows per weight update; clipped to the number of samples.
    shards : int
        Micro-batches per batch, computed concurrently and combined.
    seed : int
        Weight-initialization seed.
    """

    def __init__(self, hidden_layer_sizes=(2,), eta=0.5, epochs=1000, batch_size=4, shards=1, seed=1):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.eta = eta
        self.epochs = epochs
        self.batch_size = batch_size
        self.shards = shards
        self.seed = seed

    def fit(self, X, y):
        X, y = check_X_y(X, y, multi_output=True, y_numeric=True, dtype=np.float64)
        self._y_1d = y.ndim == 1
        Y = y.reshape(-1, 1) if self._y_1d else y
        self.n_features_in_ = X.shape[1]
        topology = Topology([X.shape[1], *self.hidden_layer_sizes, Y.shape[1]])
        batch_size = min(self.batch_size, X.shape[0])
        config = TrainConfig(topology, eta=self.eta, epochs=self.epochs, batch_size=batch_size,
                             shards=min(self.shards, batch_size), seed=self.seed)
        result = train(config, to_matrix(X), to_matrix(Y))
        self.network_: Network = result.network
        self.loss_curve_ = [r.total for r in result.history]
        self.loss_ = (self.loss_curve_[-1] if self.loss_curve_
                      else evaluate(result.network, to_matrix(X), to_matrix(Y)).total)
        return self

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, but {type(self).__name__} "
                             f"is expecting {self.n_features_in_} features as input")
        out = to_array(predict(self.network_, to_matrix(X)))
        return out.ravel() if self._y_1d else out
