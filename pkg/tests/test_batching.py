import random
import threading

import pytest

from batchprop.backprop import GradientSet, backward
from batchprop.batching import TrainConfig, batch_gradient, combine, split, train
from batchprop.network import Topology, forward, init_weights
from batchprop.persistence import Fingerprint, dumps_checkpoint
from batchprop.tensor import Matrix, vstack

from conftest import random_matrix


def _data(rng, B, n_in=3, n_out=2):
    return random_matrix(rng, B, n_in), random_matrix(rng, B, n_out, 0, 1)


def test_split_identity_and_even():
    x, t = _data(random.Random(0), 4)
    [only] = split(x, t, 1)
    assert only.inputs == x and only.targets == t and only.weight == 1.0
    halves = split(x, t, 2)
    assert [p.inputs.rows for p in halves] == [2, 2]
    assert [p.weight for p in halves] == [0.5, 0.5]


def test_split_uneven():
    x, t = _data(random.Random(0), 5)
    parts = split(x, t, 2)
    assert [p.inputs.rows for p in parts] == [3, 2]
    assert [p.weight for p in parts] == [0.6, 0.4]


@pytest.mark.parametrize("B,k", [(5, 3), (7, 7), (9, 4), (1, 1)])
def test_split_partition(B, k):
    x, t = _data(random.Random(B * 10 + k), B)
    parts = split(x, t, k)
    sizes = [p.inputs.rows for p in parts]
    assert len(parts) == k and max(sizes) - min(sizes) <= 1
    assert vstack([p.inputs for p in parts]) == x
    assert vstack([p.targets for p in parts]) == t
    assert sum(p.weight for p in parts) == pytest.approx(1.0, abs=1e-15)


def test_split_range():
    x, t = _data(random.Random(0), 3)
    for k in (0, 4):
        with pytest.raises(ValueError):
            split(x, t, k)


def test_combine_trivial_cases():
    rng = random.Random(1)
    g = GradientSet([random_matrix(rng, 3, 2), random_matrix(rng, 3, 1)])
    assert combine([g], [1.0]) == g
    assert combine([g, g], [0.5, 0.5]) == g
    with pytest.raises(ValueError):
        combine([g, g], [0.5, 0.6])
    with pytest.raises(ValueError):
        combine([g], [1.0, 0.0])
    with pytest.raises(Exception):
        combine([g, GradientSet([random_matrix(rng, 2, 2)])], [0.5, 0.5])


@pytest.mark.parametrize("B", [4, 5, 8, 11])
def test_shard_combine_equals_whole_batch(B):
    rng = random.Random(B)
    net = init_weights(Topology([3, 4, 2]), B)
    x, t = _data(rng, B)
    whole = backward(net, forward(net, x), t)
    for k in range(1, B + 1):
        parts = split(x, t, k)
        combined = combine([backward(net, forward(net, p.inputs), p.targets) for p in parts],
                           [p.weight for p in parts])
        diff = max(abs(a - b) for g, h in zip(whole.grads, combined.grads) for a, b in zip(g.data, h.data))
        assert diff <= 1e-12


def test_parallel_shards_match_serial_and_do_not_write():
    from concurrent.futures import ThreadPoolExecutor

    rng = random.Random(3)
    net = init_weights(Topology([3, 5, 2]), 3)
    x, t = _data(rng, 16)
    before = dumps_checkpoint(net, Fingerprint())
    serial = batch_gradient(net, x, t, shards=4)
    with ThreadPoolExecutor(4) as pool:
        parallel = batch_gradient(net, x, t, shards=4, executor=pool)
    assert parallel == serial
    assert dumps_checkpoint(net, Fingerprint()) == before


def test_train_config_validation():
    topo = Topology([2, 2, 1])
    for kwargs in ({"eta": 0}, {"eta": -1}, {"epochs": -1}, {"batch_size": 0},
                   {"shards": 0}, {"shards": 5, "batch_size": 4}):
        with pytest.raises(ValueError):
            TrainConfig(topo, **kwargs)
    assert TrainConfig([2, 2, 1]).topology == topo


def test_zero_epochs_returns_initialization(xor):
    cfg = TrainConfig(Topology([2, 2, 1]), epochs=0, seed=7)
    result = train(cfg, *xor)
    assert result.network == init_weights(cfg.topology, 7)
    assert result.history == []


def test_train_rejects_mismatched_data(xor):
    with pytest.raises(ValueError):
        train(TrainConfig(Topology([3, 2, 1]), epochs=1), *xor)
    with pytest.raises(ValueError):
        train(TrainConfig(Topology([2, 2, 2]), epochs=1), *xor)


def test_shards_1_vs_4_equivalent():
    rng = random.Random(12)
    x, t = _data(rng, 10)
    base = dict(topology=Topology([3, 3, 2]), eta=0.8, epochs=40, batch_size=4, seed=2)
    one = train(TrainConfig(shards=1, **base), x, t)
    four = train(TrainConfig(shards=4, **base), x, t)
    diff = max(abs(a - b) for u, v in zip(one.network.weights, four.network.weights)
               for a, b in zip(u.data, v.data))
    assert diff <= 1e-9


def test_training_is_deterministic_with_threads():
    rng = random.Random(4)
    x, t = _data(rng, 12)
    cfg = TrainConfig(Topology([3, 4, 2]), eta=0.5, epochs=15, batch_size=6, shards=3, seed=9)
    a, b = train(cfg, x, t), train(cfg, x, t)
    assert a.network == b.network
    assert [r.total for r in a.history] == [r.total for r in b.history]


def test_short_final_batch_and_epoch_reports(xor):
    x = vstack([xor[0], xor[0].select_rows(0, 1)])
    t = vstack([xor[1], xor[1].select_rows(0, 1)])
    seen = []
    cfg = TrainConfig(Topology([2, 2, 1]), epochs=3, batch_size=4, shards=2)
    result = train(cfg, x, t, on_epoch=lambda e, r: seen.append(e))
    assert seen == [0, 1, 2] and len(result.history) == 3


def test_training_reduces_error(xor):
    result = train(TrainConfig(Topology([2, 3, 1]), eta=2.0, epochs=300, batch_size=2), *xor)
    assert result.history[-1].total < result.history[0].total


def test_batch_gradient_with_more_shards_than_rows():
    rng = random.Random(5)
    net = init_weights(Topology([3, 2]), 0)
    x, t = _data(rng, 2)
    assert batch_gradient(net, x, t, shards=4) == batch_gradient(net, x, t, shards=2)
