"""Text checkpoints and CSV datasets.

Checkpoint layout (version 1), one item per line::

    batchprop-checkpoint 1
    topology 2,2,2
    eta 0.5
    batch_size 4
    shards 1
    seed 42
    epochs_completed 0
    layers 2
    layer 0 3 2
    <row-major values, one matrix row per line, space separated>
    layer 1 3 2
    ...
    end

Floats are written with ``repr``, Python's shortest decimal that round-trips
a 64-bit value exactly, so save -> load -> save is byte-identical.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import Union

from .network import Network, Topology
from .tensor import Matrix

FORMAT_VERSION = 1
MAGIC = "batchprop-checkpoint"

PathLike = Union[str, "os.PathLike[str]"]


class CheckpointError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class DatasetError(ValueError):
    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


@dataclass(frozen=True)
class Fingerprint:
    """Training settings stored alongside the weights."""

    eta: float = 0.5
    batch_size: int = 4
    shards: int = 1
    seed: int = 1
    epochs_completed: int = 0


def _fmt(v: float) -> str:
    return repr(float(v))


def dumps_checkpoint(net: Network, meta: Fingerprint) -> str:
    lines = [
        f"{MAGIC} {FORMAT_VERSION}",
        f"topology {net.topology}",
        f"eta {_fmt(meta.eta)}",
        f"batch_size {meta.batch_size}",
        f"shards {meta.shards}",
        f"seed {meta.seed}",
        f"epochs_completed {meta.epochs_completed}",
        f"layers {net.n_layers}",
    ]
    for l, w in enumerate(net.weights):
        lines.append(f"layer {l} {w.rows} {w.cols}")
        for i in range(w.rows):
            lines.append(" ".join(_fmt(v) for v in w.row(i)))
    lines.append("end")
    return "\n".join(lines) + "\n"


def save_checkpoint(net: Network, meta: Fingerprint, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_checkpoint(net, meta))


class _Lines:
    def __init__(self, text: str):
        self.lines = text.split("\n")
        if self.lines and self.lines[-1] == "":
            self.lines.pop()
        self.pos = 0

    @property
    def lineno(self) -> int:
        return self.pos + 1

    def next(self, what: str) -> str:
        if self.pos >= len(self.lines):
            raise CheckpointError(f"unexpected end of file, expected {what}", self.lineno)
        line = self.lines[self.pos]
        self.pos += 1
        return line

    def keyed(self, key: str) -> str:
        line = self.next(key)
        parts = line.split(" ", 1)
        if len(parts) != 2 or parts[0] != key:
            raise CheckpointError(f"expected '{key} <value>', got {line!r}", self.pos)
        return parts[1]


def _int(text: str, lineno: int, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise CheckpointError(f"{what} is not an integer: {text!r}", lineno) from None


def _float(text: str, lineno: int, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise CheckpointError(f"{what} is not a number: {text!r}", lineno) from None
    if not math.isfinite(v):
        raise CheckpointError(f"{what} is not finite: {text!r}", lineno)
    return v


def loads_checkpoint(text: str) -> tuple[Network, Fingerprint]:
    src = _Lines(text)
    header = src.next("header").split(" ")
    if len(header) != 2 or header[0] != MAGIC:
        raise CheckpointError(f"not a checkpoint file (header {' '.join(header)!r})", 1)
    version = _int(header[1], 1, "format version")
    if version != FORMAT_VERSION:
        raise CheckpointError(f"unsupported format version {version}, expected {FORMAT_VERSION}", 1)

    try:
        topology = Topology.parse(src.keyed("topology"))
    except ValueError as exc:
        if isinstance(exc, CheckpointError):
            raise
        raise CheckpointError(str(exc), src.pos) from None
    eta = _float(src.keyed("eta"), src.pos, "eta")
    batch_size = _int(src.keyed("batch_size"), src.pos, "batch_size")
    shards = _int(src.keyed("shards"), src.pos, "shards")
    seed = _int(src.keyed("seed"), src.pos, "seed")
    epochs = _int(src.keyed("epochs_completed"), src.pos, "epochs_completed")
    n_layers = _int(src.keyed("layers"), src.pos, "layers")
    if n_layers != topology.n_layers:
        raise CheckpointError(f"layer count {n_layers} disagrees with topology {topology}", src.pos)

    weights = []
    for l, (rows, cols) in enumerate(topology.weight_shapes()):
        line = src.next(f"layer {l} header")
        parts = line.split(" ")
        if len(parts) != 4 or parts[0] != "layer":
            raise CheckpointError(f"expected 'layer {l} <rows> <cols>', got {line!r}", src.pos)
        got = tuple(_int(p, src.pos, "layer header field") for p in parts[1:])
        if got != (l, rows, cols):
            raise CheckpointError(
                f"layer header {got} inconsistent with topology {topology}: expected {(l, rows, cols)}",
                src.pos,
            )
        values = []
        for i in range(rows):
            fields = src.next(f"layer {l} row {i}").split(" ")
            if len(fields) != cols:
                raise CheckpointError(f"layer {l} row {i} has {len(fields)} values, expected {cols}", src.pos)
            values.extend(_float(f, src.pos, "weight") for f in fields)
        weights.append(Matrix(rows, cols, values))
    if src.next("end") != "end":
        raise CheckpointError("expected 'end'", src.pos)
    if src.pos != len(src.lines):
        raise CheckpointError("trailing content after 'end'", src.pos + 1)
    return Network(weights), Fingerprint(eta, batch_size, shards, seed, epochs)


def load_checkpoint(path: PathLike) -> tuple[Network, Fingerprint]:
    with open(path, encoding="utf-8", newline="") as fh:
        text = fh.read()
    return loads_checkpoint(text)


def load_dataset(path: PathLike) -> tuple[Matrix, Matrix]:
    """Read a CSV with header ``x1,...,xn,t1,...,tm``.

    Input columns must all precede target columns. Row numbers in errors
    count the header as row 1.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DatasetError("empty file: no header row") from None
        header = [h.strip() for h in header]
        n = 0
        while n < len(header) and header[n].startswith("x"):
            n += 1
        m = len(header) - n
        if n == 0 or m == 0 or not all(h.startswith("t") for h in header[n:]):
            raise DatasetError(
                f"header must be x-columns followed by t-columns, got {','.join(header)!r}", 1
            )
        xs, ts = [], []
        for rownum, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != n + m:
                raise DatasetError(f"expected {n + m} fields, got {len(row)}", rownum)
            vals = []
            for col, text in enumerate(row):
                try:
                    v = float(text)
                except ValueError:
                    raise DatasetError(f"column {header[col]!r}: non-numeric value {text!r}", rownum) from None
                if not math.isfinite(v):
                    raise DatasetError(f"column {header[col]!r}: non-finite value {text!r}", rownum)
                vals.append(v)
            xs.extend(vals[:n])
            ts.extend(vals[n:])
    rows = len(xs) // n
    if rows == 0:
        raise DatasetError("dataset has no data rows")
    return Matrix(rows, n, xs), Matrix(rows, m, ts)


def write_dataset(path: PathLike, inputs: Matrix, targets: Matrix) -> None:
    if inputs.rows != targets.rows:
        raise ValueError(f"row count mismatch: {inputs.rows} inputs vs {targets.rows} targets")
    header = [f"x{i + 1}" for i in range(inputs.cols)] + [f"t{j + 1}" for j in range(targets.cols)]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(inputs.rows):
            w.writerow([_fmt(v) for v in inputs.row(i)] + [_fmt(v) for v in targets.row(i)])
