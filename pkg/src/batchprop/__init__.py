"""Dense MLP training with tensor-form batch backpropagation."""
from .backprop import GradientSet, activation_derivative, apply_update, backward, hidden_delta, layer_gradient, output_delta
from .batching import MicroBatch, TrainConfig, TrainResult, batch_gradient, combine, evaluate, split, train
from .gradcheck import GradCheckReport, compare, numeric_gradient
from .loss import ErrorReport, sse
from .network import ForwardTrace, Network, Topology, forward, init_weights, predict, sigmoid
from .persistence import (CheckpointError, DatasetError, Fingerprint, load_checkpoint, load_dataset,
                          save_checkpoint, write_dataset)
from .tensor import Matrix, ShapeError, add, augment_bias, hadamard, matmul, scale, sub, transpose

__version__ = "0.1.0"


def __getattr__(name):
    # sklearn is heavy; only import the estimator on demand
    if name == "BatchMLPRegressor":
        from .estimator import BatchMLPRegressor
        return BatchMLPRegressor
    raise AttributeError(name)
