"""Sum-of-squares error for a batch of outputs."""
from __future__ import annotations

from dataclasses import dataclass

from .tensor import Matrix, ShapeError


@dataclass(frozen=True)
class ErrorReport:
    per_element: Matrix
    per_row_total: tuple[float, ...]
    per_output_mean: tuple[float, ...]
    total: float


def sse(psi: Matrix, targets: Matrix) -> ErrorReport:
    """Batch squared error, each element scaled by ``1/(2b)`` with b the
    number of rows.

    ``per_row_total`` sums each row of the scaled matrix and
    ``per_output_mean`` averages each column. ``total`` adds the row totals,
    which equals the per-item error ``0.5 * sum_j (t - psi)**2`` averaged over
    the batch; it is the quantity backprop differentiates. With b = 1 all of
    this reduces to ``0.5 * sum((t - psi)**2)``.
    """
    if psi.shape != targets.shape:
        raise ShapeError("sse", psi.shape, targets.shape)
    b = psi.rows
    denom = 2.0 * b
    per_element = Matrix(
        psi.rows, psi.cols, [(t - p) ** 2 / denom for p, t in zip(psi.data, targets.data)]
    )
    row_totals = []
    for i in range(b):
        s = 0.0
        for v in per_element.row(i):
            s += v
        row_totals.append(s)
    col_means = []
    for j in range(psi.cols):
        s = 0.0
        for v in per_element.column(j):
            s += v
        col_means.append(s / b)
    total = 0.0
    for v in row_totals:
        total += v
    return ErrorReport(per_element, tuple(row_totals), tuple(col_means), total)
