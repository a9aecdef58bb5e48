"""Central finite-difference gradient oracle and comparison report."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .backprop import GradientSet, backward
from .loss import sse
from .network import Network, Topology, forward, init_weights
from .tensor import Matrix, ShapeError

DEFAULT_EPSILON = 1e-5
DEFAULT_RTOL = 1e-5
RELATIVE_FLOOR = 1e-8


def _loss(net: Network, inputs: Matrix, targets: Matrix) -> float:
    return sse(forward(net, inputs).output, targets).total


def numeric_gradient(net: Network, inputs: Matrix, targets: Matrix,
                     epsilon: float = DEFAULT_EPSILON) -> GradientSet:
    """Perturb every weight by +/- epsilon and difference the batch loss.

    Each perturbation is made on a copy; ``net`` is never touched.
    """
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    grads = []
    for l, w in enumerate(net.weights):
        vals = []
        for i in range(w.rows):
            for j in range(w.cols):
                base = w[i, j]
                up = _loss(net.with_weight(l, i, j, base + epsilon), inputs, targets)
                down = _loss(net.with_weight(l, i, j, base - epsilon), inputs, targets)
                vals.append((up - down) / (2.0 * epsilon))
        grads.append(Matrix(w.rows, w.cols, vals))
    return GradientSet(grads)


def relative_error(a: float, n: float) -> float:
    return abs(a - n) / max(RELATIVE_FLOOR, abs(a) + abs(n))


@dataclass(frozen=True)
class GradCheckReport:
    max_relative_error: float
    worst_location: tuple[int, int, int]
    per_layer_max: tuple[float, ...]
    rtol: float

    @property
    def passed(self) -> bool:
        return self.max_relative_error <= self.rtol

    def lines(self) -> list[str]:
        l, i, j = self.worst_location
        out = [
            f"max_relative_error={self.max_relative_error:.6e}",
            f"worst_location=layer {l}, row {i}, col {j}",
        ]
        out += [f"layer_{k}_max={v:.6e}" for k, v in enumerate(self.per_layer_max)]
        out += [f"rtol={self.rtol:g}", f"passed={'yes' if self.passed else 'no'}"]
        return out


def compare(analytic: GradientSet, numeric: GradientSet, rtol: float = DEFAULT_RTOL) -> GradCheckReport:
    if analytic.shapes() != numeric.shapes():
        raise ShapeError("compare", *analytic.shapes(), *numeric.shapes())
    worst = -1.0
    where = (0, 0, 0)
    per_layer = []
    for l, (a, n) in enumerate(zip(analytic.grads, numeric.grads)):
        layer_max = 0.0
        for k, (x, y) in enumerate(zip(a.data, n.data)):
            r = relative_error(x, y)
            layer_max = max(layer_max, r)
            if r > worst:
                worst = r
                where = (l, k // a.cols, k % a.cols)
        per_layer.append(layer_max)
    return GradCheckReport(max(per_layer), where, tuple(per_layer), rtol)


def random_instance(topology: Topology, seed: int, batch: int) -> tuple[Network, Matrix, Matrix]:
    """Seeded network plus inputs in [-1, 1] and targets in [0, 1]."""
    net = init_weights(topology, seed)
    rng = random.Random(f"gradcheck-data-{seed}")
    x = Matrix(batch, topology.n_inputs, [rng.uniform(-1, 1) for _ in range(batch * topology.n_inputs)])
    t = Matrix(batch, topology.n_outputs, [rng.random() for _ in range(batch * topology.n_outputs)])
    return net, x, t


def check(net: Network, inputs: Matrix, targets: Matrix, epsilon: float = DEFAULT_EPSILON,
          rtol: float = DEFAULT_RTOL) -> GradCheckReport:
    analytic = backward(net, forward(net, inputs), targets)
    return compare(analytic, numeric_gradient(net, inputs, targets, epsilon), rtol)
