"""Packed storage for symmetric matrices.

A symmetric ``n x n`` matrix is stored as its upper triangle (diagonal
included) in row-major order, a flat array of length ``n*(n+1)/2``::

    index(i, j) = i*n - i*(i-1)/2 + (j - i)      for i <= j

Row ``i`` occupies a contiguous segment of ``n - i`` entries starting at
``row_offset(i, n)``, which is what makes banded writes cheap.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "packed_length",
    "order_from_length",
    "row_offset",
    "packed_index",
    "diagonal_indices",
    "identity_packed",
    "pack_dense",
    "unpack_packed",
]


def packed_length(n: int) -> int:
    """Number of stored entries for an ``n x n`` symmetric matrix."""
    return n * (n + 1) // 2


def order_from_length(length: int) -> int:
    """Invert :func:`packed_length`; raise if ``length`` is not triangular."""
    n = (math.isqrt(8 * length + 1) - 1) // 2
    if packed_length(n) != length:
        raise ValueError(f"{length} is not a triangular number")
    return n


def row_offset(i: int, n: int) -> int:
    """Flat index where row ``i``'s stored segment (columns i..n-1) begins."""
    return i * n - (i * (i - 1)) // 2


def packed_index(i: int, j: int, n: int) -> int:
    """Flat index of entry ``(i, j)``; the two orders are interchangeable."""
    if i > j:
        i, j = j, i
    return row_offset(i, n) + (j - i)


def diagonal_indices(n: int) -> np.ndarray:
    """Flat indices of the diagonal entries, as an int64 array."""
    i = np.arange(n, dtype=np.int64)
    return i * n - (i * (i - 1)) // 2


def identity_packed(n: int, dtype=np.float64) -> np.ndarray:
    """Packed identity matrix."""
    out = np.zeros(packed_length(n), dtype=dtype)
    out[diagonal_indices(n)] = 1.0
    return out


def pack_dense(dense: np.ndarray) -> np.ndarray:
    """Pack the upper triangle of a square array (values copied as-is)."""
    n = dense.shape[0]
    if dense.shape != (n, n):
        raise ValueError(f"expected a square array, got shape {dense.shape}")
    out = np.empty(packed_length(n), dtype=dense.dtype)
    pos = 0
    for i in range(n):
        out[pos : pos + n - i] = dense[i, i:]
        pos += n - i
    return out


def unpack_packed(packed: np.ndarray, n: int | None = None) -> np.ndarray:
    """Expand a packed triangle into a full symmetric dense array."""
    if n is None:
        n = order_from_length(packed.shape[0])
    out = np.empty((n, n), dtype=packed.dtype)
    pos = 0
    for i in range(n):
        row = packed[pos : pos + n - i]
        out[i, i:] = row
        out[i:, i] = row
        pos += n - i
    return out
