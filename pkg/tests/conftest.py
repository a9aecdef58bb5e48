import random

import pytest

from batchprop import Matrix, Topology
from batchprop.persistence import write_dataset

XOR_X = [[0, 0], [0, 1], [1, 0], [1, 1]]
XOR_T = [[0], [1], [1], [0]]


def random_matrix(rng, rows, cols, lo=-1.0, hi=1.0):
    return Matrix(rows, cols, [rng.uniform(lo, hi) for _ in range(rows * cols)])


def random_topology(rng, max_layers=3, max_width=5):
    n_layers = rng.randint(1, max_layers)
    return Topology([rng.randint(1, max_width) for _ in range(n_layers + 1)])


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def xor():
    return Matrix.from_rows(XOR_X), Matrix.from_rows(XOR_T)


@pytest.fixture
def xor_csv(tmp_path, xor):
    path = tmp_path / "xor.csv"
    write_dataset(path, *xor)
    return path


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
