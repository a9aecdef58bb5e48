"""Delta-rule backpropagation expressed as matrix products."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .network import ForwardTrace, Network
from .tensor import Matrix, ShapeError, hadamard, matmul, scale, strip_bias_row, sub, transpose


@dataclass(frozen=True)
class GradientSet:
    """Per-layer dE/dW, shape-identical to the network's weights."""

    grads: tuple[Matrix, ...]

    def __init__(self, grads: Sequence[Matrix]):
        object.__setattr__(self, "grads", tuple(grads))

    def shapes(self) -> list[tuple[int, int]]:
        return [g.shape for g in self.grads]

    def __len__(self) -> int:
        return len(self.grads)

    def __getitem__(self, l: int) -> Matrix:
        return self.grads[l]

    def is_zero(self) -> bool:
        return all(v == 0.0 for g in self.grads for v in g.data)


def activation_derivative(psi: Matrix) -> Matrix:
    """Sigmoid slope from its output: ``psi * (1 - psi)``."""
    return Matrix(psi.rows, psi.cols, [p * (1.0 - p) for p in psi.data])


def output_delta(psi: Matrix, targets: Matrix) -> Matrix:
    """``((psi - t) / b) * psi(1 - psi)`` for the output layer.

    The ``1/b`` is the batch-mean factor of the loss; keeping it here leaves
    :func:`layer_gradient` a bare matrix product.
    """
    if psi.shape != targets.shape:
        raise ShapeError("output_delta", psi.shape, targets.shape)
    de_dpsi = scale(sub(psi, targets), 1.0 / psi.rows)
    return hadamard(de_dpsi, activation_derivative(psi))


def hidden_delta(delta_next: Matrix, weights_next: Matrix, psi_l: Matrix) -> Matrix:
    """Pull the downstream delta back through ``weights_next``.

    The bias row is dropped first: the constant-1 input does not depend on
    this layer's output, so it receives no credit.
    """
    if delta_next.cols != weights_next.cols or weights_next.rows - 1 != psi_l.cols \
            or delta_next.rows != psi_l.rows:
        raise ShapeError("hidden_delta", delta_next.shape, weights_next.shape, psi_l.shape)
    de_dpsi = matmul(delta_next, transpose(strip_bias_row(weights_next)))
    return hadamard(de_dpsi, activation_derivative(psi_l))


def layer_gradient(phi: Matrix, delta: Matrix) -> Matrix:
    """``phi^T . delta``; row 0 comes out as the column sums of delta."""
    if phi.rows != delta.rows:
        raise ShapeError("layer_gradient", phi.shape, delta.shape)
    return matmul(transpose(phi), delta)


def backward(net: Network, trace: ForwardTrace, targets: Matrix) -> GradientSet:
    L = net.n_layers
    if len(trace.phis) != L or len(trace.psis) != L:
        raise ValueError(f"trace has {len(trace.psis)} layers, network has {L}")
    for l, (w, phi, psi) in enumerate(zip(net.weights, trace.phis, trace.psis)):
        if phi.cols != w.rows or psi.cols != w.cols:
            raise ShapeError(f"backward layer {l}", phi.shape, w.shape, psi.shape)
    if targets.shape != trace.output.shape:
        raise ShapeError("backward targets", trace.output.shape, targets.shape)

    grads: list[Matrix] = [None] * L  # type: ignore[list-item]
    delta = output_delta(trace.output, targets)
    grads[L - 1] = layer_gradient(trace.phis[L - 1], delta)
    for l in range(L - 2, -1, -1):
        delta = hidden_delta(delta, net.weights[l + 1], trace.psis[l])
        grads[l] = layer_gradient(trace.phis[l], delta)
    return GradientSet(grads)


def apply_update(net: Network, grads: GradientSet, eta: float) -> Network:
    """Return a new network with ``W - eta * dE/dW`` per layer."""
    if not eta > 0:
        raise ValueError(f"learning rate must be positive, got {eta}")
    if len(grads) != net.n_layers:
        raise ValueError(f"gradient has {len(grads)} layers, network has {net.n_layers}")
    new = []
    for w, g in zip(net.weights, grads.grads):
        if w.shape != g.shape:
            raise ShapeError("apply_update", w.shape, g.shape)
        new.append(Matrix(w.rows, w.cols, [x - eta * d for x, d in zip(w.data, g.data)]))
    return Network(new)
