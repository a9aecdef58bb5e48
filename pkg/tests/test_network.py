import math
import random

import pytest

from batchprop.network import Network, Topology, forward, init_weights, sigmoid, sigmoid_scalar, zero_network
from batchprop.tensor import Matrix, ShapeError, augment_bias

from conftest import random_matrix, random_topology

# high-precision (mpmath, 50 digits) value of 1/(1+e^-2)
SIGMOID_2 = 0.8807970779778824

# seed 42, topology [2,2,2], input [[0, 1]]: computed by a separate script that
# redraws the weights from random.Random(42) and evaluates the layers in mpmath
SEED42_OUTPUT = [0.565471199337081, 0.30919674476908976]


def test_sigmoid_scalar_forms_agree():
    for v in (-7.5, -0.3, 0.0, 0.3, 7.5):
        assert sigmoid_scalar(v) == pytest.approx(1 / (1 + math.exp(-v)), rel=1e-15)


def test_sigmoid_values():
    assert sigmoid(Matrix.zeros(1, 1)).data == (0.5,)
    assert sigmoid(Matrix.from_rows([[2.0]])).data[0] == pytest.approx(SIGMOID_2, abs=1e-15)
    assert sigmoid(Matrix.from_rows([[2.0]])).data[0] == pytest.approx(0.8807970779778823, abs=1e-15)


@pytest.mark.parametrize("x", [-30.0, -3.1, -0.5, 0.0, 0.25, 4.0, 17.0])
def test_sigmoid_symmetry(x):
    s = sigmoid(Matrix.from_rows([[x, -x]])).data
    assert s[0] + s[1] == pytest.approx(1.0, abs=1e-15)


def test_sigmoid_bounds_and_saturation():
    s = sigmoid(Matrix.from_rows([[-30.0, -5.0, 5.0, 30.0]])).data
    assert all(0.0 < v < 1.0 for v in s)
    extreme = sigmoid(Matrix.from_rows([[-1000.0, 1000.0]])).data
    assert all(math.isfinite(v) for v in extreme)
    assert extreme[0] >= 0.0 and extreme[1] <= 1.0


def test_topology_validation():
    assert Topology([2, 2, 2]).weight_shapes() == [(3, 2), (3, 2)]
    assert Topology.parse("2,3,1").layer_sizes == (2, 3, 1)
    for bad in ([2], [2, 0], []):
        with pytest.raises(ValueError):
            Topology(bad)
    with pytest.raises(ValueError):
        Topology.parse("2,x")


def test_init_weights_deterministic_and_bounded():
    topo = Topology([2, 2, 2])
    a, b = init_weights(topo, 42), init_weights(topo, 42)
    assert a == b
    assert init_weights(topo, 43) != a
    assert [w.shape for w in a.weights] == [(3, 2), (3, 2)]
    bound = 1 / math.sqrt(3)
    assert all(-bound <= v <= bound for w in a.weights for v in w.data)
    assert a.topology == topo


def test_network_chain_check():
    with pytest.raises(ShapeError):
        Network([Matrix.zeros(3, 2), Matrix.zeros(4, 1)])


def test_zero_weights_give_half():
    net = zero_network(Topology([3, 4, 2]))
    out = forward(net, random_matrix(random.Random(0), 5, 3)).output
    assert out == Matrix.full(5, 2, 0.5)


def test_seed42_reference_output():
    out = forward(init_weights(Topology([2, 2, 2]), 42), Matrix.from_rows([[0, 1]])).output
    assert list(out.data) == pytest.approx(SEED42_OUTPUT, rel=1e-14)


def test_single_row_matches_sequential_layers():
    net = init_weights(Topology([2, 2, 2]), 5)
    x1, x2 = 0.3, -0.8
    (w0, w1), (w2, w3), (w4, w5) = net.weights[0].to_rows()
    (w6, w7), (w8, w9), (w10, w11) = net.weights[1].to_rows()
    sig = sigmoid_scalar
    # [1 x1 x2] . W1, activate, [1 a1 a2] . W2, activate; accumulation order matches the kernel
    a1 = sig(0.0 + 1 * w0 + x1 * w2 + x2 * w4)
    a2 = sig(0.0 + 1 * w1 + x1 * w3 + x2 * w5)
    o1 = sig(0.0 + 1 * w6 + a1 * w8 + a2 * w10)
    o2 = sig(0.0 + 1 * w7 + a1 * w9 + a2 * w11)
    trace = forward(net, Matrix.from_rows([[x1, x2]]))
    assert trace.psis[0].data == (a1, a2)
    assert trace.output.data == (o1, o2)


def test_trace_structure():
    rng = random.Random(3)
    for _ in range(20):
        topo = random_topology(rng)
        net = init_weights(topo, rng.randrange(1000))
        x = random_matrix(rng, rng.randint(1, 4), topo.n_inputs)
        tr = forward(net, x)
        assert tr.phis[0] == augment_bias(x)
        for l in range(net.n_layers):
            assert tr.psis[l].cols == net.weights[l].cols
            assert tr.phis[l].column(0) == (1.0,) * x.rows
            if l + 1 < net.n_layers:
                assert tr.phis[l + 1] == augment_bias(tr.psis[l])
        assert all(0 < v < 1 for v in tr.output.data)


def test_forward_rejects_wrong_width():
    net = init_weights(Topology([2, 2, 1]), 1)
    with pytest.raises(ShapeError):
        forward(net, Matrix.ones(1, 3))
