"""Dense float64 matrix primitives with a fixed, reproducible summation order.

A matrix is a 2-D C-contiguous float64 numpy array. ``matmul`` accumulates
rank-1 updates over the inner dimension in index order, so every output
entry receives its additions in the same order as the naive row-major
triple loop. That makes results bit-identical across runs and platforms,
which the reuse-vs-oracle equivalence tests rely on.
"""

from __future__ import annotations

import numpy as np

Matrix = np.ndarray


def matrix(data) -> Matrix:
    """Coerce ``data`` to a 2-D C-contiguous float64 array."""
    m = np.ascontiguousarray(np.asarray(data, dtype=np.float64))
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got {m.ndim} dimension(s)")
    return m


def require_finite(m: Matrix, name: str = "matrix") -> None:
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains non-finite entries")


def zeros(rows: int, cols: int) -> Matrix:
    return np.zeros((rows, cols), dtype=np.float64)


def transpose(a: Matrix) -> Matrix:
    return np.ascontiguousarray(matrix(a).T)


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Matrix product with deterministic accumulation.

    The sum over the inner dimension k runs in ascending order, one rank-1
    update per k, which is bit-identical to the scalar i/j/k loop.
    """
    a = matrix(a)
    b = matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul dimension mismatch: {a.shape} by {b.shape}")
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.float64)
    for k in range(a.shape[1]):
        out += np.outer(a[:, k], b[k, :])
    return out


def row_softmax(a: Matrix) -> Matrix:
    """Softmax over each row, stabilised by per-row max subtraction."""
    a = matrix(a)
    if a.shape[1] == 0:
        raise ValueError("softmax of a zero-column matrix is undefined")
    require_finite(a)
    shifted = a - a.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)
