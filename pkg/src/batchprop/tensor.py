"""
Minimal dense 2-D matrix of 64-bit floats.

Row-major, no broadcasting, no BLAS. Summation inside ``matmul`` always runs
left to right over the inner index, so results depend only on the operands and
never on the batch size they happen to sit in.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested operation."""

    def __init__(self, op: str, *shapes: tuple[int, int]):
        self.op = op
        self.shapes = shapes
        shown = " vs ".join(f"({r}x{c})" for r, c in shapes)
        super().__init__(f"{op}: incompatible shapes {shown}")


class Matrix:
    """Immutable dense matrix.

    ``data`` is a flat tuple of floats in row-major order. Zero-column
    matrices are allowed only as the input to :func:`augment_bias`.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Iterable[float]):
        data = tuple(float(v) for v in data)
        if rows < 1 or cols < 0:
            raise ValueError(f"invalid matrix shape ({rows}x{cols})")
        if len(data) != rows * cols:
            raise ValueError(
                f"data length {len(data)} does not match shape ({rows}x{cols})"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> Matrix:
        if len(rows) == 0:
            raise ValueError("matrix needs at least one row")
        width = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != width:
                raise ValueError(f"ragged row {i}: length {len(r)}, expected {width}")
        return cls(len(rows), width, (v for r in rows for v in r))

    @classmethod
    def full(cls, rows: int, cols: int, value: float) -> Matrix:
        return cls(rows, cols, [value] * (rows * cols))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> Matrix:
        return cls.full(rows, cols, 0.0)

    @classmethod
    def ones(cls, rows: int, cols: int) -> Matrix:
        return cls.full(rows, cols, 1.0)

    @classmethod
    def identity(cls, n: int) -> Matrix:
        return cls(n, n, (1.0 if i == j else 0.0 for i in range(n) for j in range(n)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, idx: tuple[int, int]) -> float:
        i, j = idx
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) out of range for {self.shape}")
        return self.data[i * self.cols + j]

    def row(self, i: int) -> tuple[float, ...]:
        return self.data[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple[float, ...]:
        return self.data[j::self.cols] if self.cols else ()

    def to_rows(self) -> list[list[float]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def select_rows(self, start: int, stop: int) -> Matrix:
        """Contiguous row slice ``[start, stop)`` as a new matrix."""
        if not 0 <= start < stop <= self.rows:
            raise IndexError(f"row range [{start}, {stop}) invalid for {self.rows} rows")
        return Matrix(stop - start, self.cols, self.data[start * self.cols:stop * self.cols])

    def replace(self, i: int, j: int, value: float) -> Matrix:
        """Copy with a single entry changed."""
        k = i * self.cols + j
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(f"index ({i}, {j}) out of range for {self.shape}")
        return Matrix(self.rows, self.cols, self.data[:k] + (float(value),) + self.data[k + 1:])

    def is_finite(self) -> bool:
        return all(math.isfinite(v) for v in self.data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"Matrix({self.to_rows()!r})"

    def __matmul__(self, other: Matrix) -> Matrix:
        return matmul(self, other)

    @property
    def T(self) -> Matrix:
        return transpose(self)


def _same_shape(op: str, a: Matrix, b: Matrix) -> None:
    if a.shape != b.shape:
        raise ShapeError(op, a.shape, b.shape)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Inner (dot) product ``a @ b``."""
    if a.cols != b.rows:
        raise ShapeError("matmul", a.shape, b.shape)
    bcols = [b.column(j) for j in range(b.cols)]
    out = []
    for i in range(a.rows):
        arow = a.row(i)
        for col in bcols:
            s = 0.0
            for x, y in zip(arow, col):
                s += x * y
            out.append(s)
    return Matrix(a.rows, b.cols, out)


def hadamard(a: Matrix, b: Matrix) -> Matrix:
    _same_shape("hadamard", a, b)
    return Matrix(a.rows, a.cols, [x * y for x, y in zip(a.data, b.data)])


def transpose(a: Matrix) -> Matrix:
    return Matrix(a.cols, a.rows, [v for j in range(a.cols) for v in a.column(j)])


def augment_bias(a: Matrix) -> Matrix:
    """Prepend a constant-1 column: ``[x1 x2] -> [1 x1 x2]``."""
    out = []
    for i in range(a.rows):
        out.append(1.0)
        out.extend(a.row(i))
    return Matrix(a.rows, a.cols + 1, out)


def strip_bias_row(a: Matrix) -> Matrix:
    """Drop row 0 (the folded bias weights)."""
    if a.rows < 2:
        raise ShapeError("strip_bias_row", a.shape)
    return a.select_rows(1, a.rows)


def scale(a: Matrix, c: float) -> Matrix:
    c = float(c)
    return Matrix(a.rows, a.cols, [v * c for v in a.data])


def add(a: Matrix, b: Matrix) -> Matrix:
    _same_shape("add", a, b)
    return Matrix(a.rows, a.cols, [x + y for x, y in zip(a.data, b.data)])


def sub(a: Matrix, b: Matrix) -> Matrix:
    _same_shape("sub", a, b)
    return Matrix(a.rows, a.cols, [x - y for x, y in zip(a.data, b.data)])


def apply(a: Matrix, fn) -> Matrix:
    """Elementwise map."""
    return Matrix(a.rows, a.cols, [fn(v) for v in a.data])


def vstack(parts: Sequence[Matrix]) -> Matrix:
    if not parts:
        raise ValueError("vstack needs at least one matrix")
    cols = parts[0].cols
    for p in parts[1:]:
        if p.cols != cols:
            raise ShapeError("vstack", parts[0].shape, p.shape)
    return Matrix(sum(p.rows for p in parts), cols, (v for p in parts for v in p.data))
