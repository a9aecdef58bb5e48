"""Topology, bias-folded weights, sigmoid and batched forward propagation."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

from .tensor import Matrix, ShapeError, augment_bias, matmul


@dataclass(frozen=True)
class Topology:
    """Layer widths ``[n0, n1, ..., nL]``; n0 is the feature count."""

    layer_sizes: tuple[int, ...]

    def __init__(self, layer_sizes: Sequence[int]):
        sizes = tuple(int(n) for n in layer_sizes)
        if len(sizes) < 2:
            raise ValueError(f"topology needs at least 2 layer sizes, got {list(sizes)}")
        if any(n < 1 for n in sizes):
            raise ValueError(f"layer sizes must be positive, got {list(sizes)}")
        object.__setattr__(self, "layer_sizes", sizes)

    @classmethod
    def parse(cls, text: str) -> Topology:
        try:
            return cls([int(t) for t in text.split(",")])
        except ValueError as exc:
            raise ValueError(f"bad topology {text!r}: {exc}") from None

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    @property
    def n_layers(self) -> int:
        return len(self.layer_sizes) - 1

    def weight_shapes(self) -> list[tuple[int, int]]:
        s = self.layer_sizes
        return [(s[l] + 1, s[l + 1]) for l in range(len(s) - 1)]

    def __str__(self) -> str:
        return ",".join(map(str, self.layer_sizes))


@dataclass(frozen=True)
class Network:
    """Ordered weight matrices; ``weights[l]`` is ``(n_l + 1, n_{l+1})`` with
    the bias weights in row 0."""

    weights: tuple[Matrix, ...]

    def __init__(self, weights: Sequence[Matrix]):
        weights = tuple(weights)
        if not weights:
            raise ValueError("network needs at least one weight matrix")
        for l in range(len(weights) - 1):
            if weights[l].cols + 1 != weights[l + 1].rows:
                raise ShapeError("network chain", weights[l].shape, weights[l + 1].shape)
        for w in weights:
            if w.rows < 2 or w.cols < 1:
                raise ShapeError("network layer", w.shape)
        object.__setattr__(self, "weights", weights)

    @property
    def topology(self) -> Topology:
        return Topology([self.weights[0].rows - 1] + [w.cols for w in self.weights])

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def with_weight(self, layer: int, i: int, j: int, value: float) -> Network:
        ws = list(self.weights)
        ws[layer] = ws[layer].replace(i, j, value)
        return Network(ws)


@dataclass(frozen=True)
class ForwardTrace:
    phis: tuple[Matrix, ...]
    psis: tuple[Matrix, ...]

    @property
    def output(self) -> Matrix:
        return self.psis[-1]


def sigmoid_scalar(x: float) -> float:
    # two branches so exp never overflows
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


def sigmoid(x: Matrix) -> Matrix:
    return Matrix(x.rows, x.cols, [sigmoid_scalar(v) for v in x.data])


def init_weights(topology: Topology, seed: int) -> Network:
    """Uniform weights in ``[-1/sqrt(fan_in), 1/sqrt(fan_in)]``, fan_in counting
    the bias input.

    Uses the stdlib Mersenne Twister (``random.Random(seed)``), drawing layer by
    layer in row-major order, so a (topology, seed) pair gives the same weights
    on every platform.
    """
    rng = random.Random(seed)
    weights = []
    for rows, cols in topology.weight_shapes():
        bound = 1.0 / math.sqrt(rows)
        weights.append(Matrix(rows, cols, [rng.uniform(-bound, bound) for _ in range(rows * cols)]))
    return Network(weights)


def zero_network(topology: Topology) -> Network:
    return Network([Matrix.zeros(r, c) for r, c in topology.weight_shapes()])


def forward(net: Network, inputs: Matrix) -> ForwardTrace:
    """Propagate a ``(b, n0)`` batch, keeping each layer's augmented input and
    activated output for backprop."""
    if inputs.cols != net.weights[0].rows - 1:
        raise ShapeError("forward input", inputs.shape, net.weights[0].shape)
    phis, psis = [], []
    x = inputs
    for w in net.weights:
        phi = augment_bias(x)
        x = sigmoid(matmul(phi, w))
        phis.append(phi)
        psis.append(x)
    return ForwardTrace(tuple(phis), tuple(psis))


def predict(net: Network, inputs: Matrix) -> Matrix:
    return forward(net, inputs).output
