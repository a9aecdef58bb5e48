"""Micro-batch gradient computation, deterministic combination, and the
epoch-level training loop."""
from __future__ import annotations

import math
from concurrent.futures import Executor, ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .backprop import GradientSet, apply_update, backward
from .loss import ErrorReport, sse
from .network import Network, Topology, forward, init_weights
from .tensor import Matrix, ShapeError

WEIGHT_SUM_TOL = 1e-12


@dataclass(frozen=True)
class TrainConfig:
    topology: Topology
    eta: float = 0.5
    epochs: int = 1
    batch_size: int = 4
    shards: int = 1
    seed: int = 1

    def __post_init__(self):
        if not isinstance(self.topology, Topology):
            object.__setattr__(self, "topology", Topology(self.topology))
        if not (self.eta > 0 and math.isfinite(self.eta)):
            raise ValueError(f"eta must be a positive finite number, got {self.eta}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 1 <= self.shards <= self.batch_size:
            raise ValueError(f"shards must be in [1, batch_size={self.batch_size}], got {self.shards}")


@dataclass(frozen=True)
class MicroBatch:
    inputs: Matrix
    targets: Matrix
    weight: float


def split(inputs: Matrix, targets: Matrix, k: int) -> list[MicroBatch]:
    """Contiguous partition into ``k`` shards whose sizes differ by at most
    one; larger shards come first. Each shard is weighted by its share of
    the rows."""
    if inputs.rows != targets.rows:
        raise ShapeError("split", inputs.shape, targets.shape)
    B = inputs.rows
    if not 1 <= k <= B:
        raise ValueError(f"shard count {k} out of range [1, {B}]")
    base, extra = divmod(B, k)
    out = []
    start = 0
    for s in range(k):
        size = base + (1 if s < extra else 0)
        stop = start + size
        out.append(MicroBatch(inputs.select_rows(start, stop), targets.select_rows(start, stop), size / B))
        start = stop
    return out


def combine(grad_sets: Sequence[GradientSet], weights: Sequence[float]) -> GradientSet:
    """Weighted sum of gradient sets, folded in list order."""
    if not grad_sets or len(grad_sets) != len(weights):
        raise ValueError(f"need matching non-empty lists, got {len(grad_sets)} sets and {len(weights)} weights")
    if abs(math.fsum(weights) - 1.0) > WEIGHT_SUM_TOL:
        raise ValueError(f"combine weights must sum to 1, got {math.fsum(weights)!r}")
    shapes = grad_sets[0].shapes()
    for gs in grad_sets[1:]:
        if gs.shapes() != shapes:
            raise ShapeError("combine", *shapes, *gs.shapes())
    layers = []
    for l, (r, c) in enumerate(shapes):
        acc = [0.0] * (r * c)
        for gs, w in zip(grad_sets, weights):
            acc = [a + w * g for a, g in zip(acc, gs.grads[l].data)]
        layers.append(Matrix(r, c, acc))
    return GradientSet(layers)


def shard_gradient(net: Network, shard: MicroBatch) -> GradientSet:
    return backward(net, forward(net, shard.inputs), shard.targets)


def batch_gradient(net: Network, inputs: Matrix, targets: Matrix, shards: int = 1,
                   executor: Optional[Executor] = None) -> GradientSet:
    """Gradient of one batch, optionally computed shard by shard.

    Shards only read ``net``; with an executor they run concurrently and the
    results are still combined in shard order.
    """
    k = min(shards, inputs.rows)
    if k == 1:
        return backward(net, forward(net, inputs), targets)
    parts = split(inputs, targets, k)
    if executor is None:
        results = [shard_gradient(net, p) for p in parts]
    else:
        results = list(executor.map(lambda p: shard_gradient(net, p), parts))
    return combine(results, [p.weight for p in parts])


def _check_dataset(config: TrainConfig, inputs: Matrix, targets: Matrix) -> None:
    if inputs.rows != targets.rows:
        raise ShapeError("dataset rows", inputs.shape, targets.shape)
    topo = config.topology
    if inputs.cols != topo.n_inputs:
        raise ValueError(f"dataset has {inputs.cols} input columns, topology expects {topo.n_inputs}")
    if targets.cols != topo.n_outputs:
        raise ValueError(f"dataset has {targets.cols} target columns, topology expects {topo.n_outputs}")


def evaluate(net: Network, inputs: Matrix, targets: Matrix) -> ErrorReport:
    return sse(forward(net, inputs).output, targets)


@dataclass
class TrainResult:
    network: Network
    history: list[ErrorReport] = field(default_factory=list)


def train(config: TrainConfig, inputs: Matrix, targets: Matrix,
          network: Optional[Network] = None,
          on_epoch: Optional[Callable[[int, ErrorReport], None]] = None) -> TrainResult:
    """Full-batch-order training: one weight update per batch of
    ``config.batch_size`` rows (the last batch may be short), no shuffling.

    The error on the whole dataset is recorded after every epoch.
    """
    _check_dataset(config, inputs, targets)
    net = network if network is not None else init_weights(config.topology, config.seed)
    if net.topology != config.topology:
        raise ValueError(f"network topology {net.topology} does not match config {config.topology}")
    B = inputs.rows
    bounds = [(s, min(s + config.batch_size, B)) for s in range(0, B, config.batch_size)]
    batches = [(inputs.select_rows(a, b), targets.select_rows(a, b)) for a, b in bounds]

    history: list[ErrorReport] = []
    pool = ThreadPoolExecutor(max_workers=config.shards) if config.shards > 1 else None
    try:
        for epoch in range(config.epochs):
            for x, t in batches:
                g = batch_gradient(net, x, t, config.shards, pool)
                net = apply_update(net, g, config.eta)
            report = evaluate(net, inputs, targets)
            history.append(report)
            if on_epoch is not None:
                on_epoch(epoch, report)
    finally:
        if pool is not None:
            pool.shutdown()
    return TrainResult(net, history)
