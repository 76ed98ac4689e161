"""Constructors for shift, triangular block Toeplitz/Hankel, diagonal, and
Vandermonde matrices.

Conventions (0-based internally, translated once here):
  * ``shift_matrix(n, f)`` has ones on the subdiagonal and ``f`` in the
    top-right corner; left-multiplying shifts rows down, right-multiplying
    shifts columns left.
  * A block column W of shape (n, s) is read as m stacked s-by-s blocks
    w_0 .. w_{m-1}.
  * ``lower_block_toeplitz(W)`` puts block w_{i-j} at block position
    (i, j) for i >= j; its transpose is the matching upper factor.
  * ``anti_lower_block_hankel(W)`` puts w_{i+j} at (i, j) for
    i + j <= m - 1 and zero below the main anti-diagonal.

These dense materializations serve as oracles; the recovery kernels in
the displacement module never form them.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionMismatchError
from .matrix import DenseMatrix

__all__ = [
    "shift_matrix",
    "split_block_column",
    "split_block_row",
    "lower_block_toeplitz",
    "upper_block_toeplitz",
    "anti_lower_block_hankel",
    "block_diagonal",
    "vandermonde",
    "block_toeplitz",
    "block_hankel",
]


def shift_matrix(field, n, f=0, transposed=False) -> DenseMatrix:
    """Circulant-style shift Z_f: subdiagonal of ones, corner entry f."""
    z = np.zeros((n, n), dtype=np.int64)
    if n > 1:
        z[np.arange(1, n), np.arange(n - 1)] = 1
    if n > 0:
        z[0, n - 1] = int(f) % field.modulus
    if transposed:
        z = z.T.copy()
    return DenseMatrix(field, z)


def split_block_column(w: DenseMatrix):
    """List of the m stacked s-by-s blocks of an (n, s) block column."""
    n, s = w.rows, w.cols
    if s == 0 or n % s != 0:
        raise DimensionMismatchError(f"(n, s) = ({n}, {s}) is not a block column")
    return [w.data[i * s : (i + 1) * s, :] for i in range(n // s)]


def split_block_row(w: DenseMatrix):
    """List of the m side-by-side s-by-s blocks of an (s, n) block row."""
    s, n = w.rows, w.cols
    if s == 0 or n % s != 0:
        raise DimensionMismatchError(f"(s, n) = ({s}, {n}) is not a block row")
    return [w.data[:, j * s : (j + 1) * s] for j in range(n // s)]


def lower_block_toeplitz(w: DenseMatrix) -> DenseMatrix:
    """Block lower-triangular block Toeplitz matrix with first block column w."""
    blocks = split_block_column(w)
    m, s = len(blocks), w.cols
    out = np.zeros((m * s, m * s), dtype=w.data.dtype)
    for i in range(m):
        for j in range(i + 1):
            out[i * s : (i + 1) * s, j * s : (j + 1) * s] = blocks[i - j]
    return DenseMatrix(w.field, out)


def upper_block_toeplitz(w: DenseMatrix) -> DenseMatrix:
    """Transpose of the lower factor built from the same block column."""
    return lower_block_toeplitz(w).T


def anti_lower_block_hankel(w: DenseMatrix) -> DenseMatrix:
    """Anti-triangular block Hankel: block (i, j) = w_{i+j}, zero past the anti-diagonal."""
    blocks = split_block_column(w)
    m, s = len(blocks), w.cols
    out = np.zeros((m * s, m * s), dtype=w.data.dtype)
    for i in range(m):
        for j in range(m - i):
            out[i * s : (i + 1) * s, j * s : (j + 1) * s] = blocks[i + j]
    return DenseMatrix(w.field, out)


def block_diagonal(field, blocks) -> DenseMatrix:
    """D(U) from square parameter blocks (s = 1 gives a plain diagonal)."""
    blocks = [np.asarray(b) for b in blocks]
    if not blocks:
        raise DimensionMismatchError("need at least one block")
    s = blocks[0].shape[0]
    for b in blocks:
        if b.shape != (s, s):
            raise DimensionMismatchError("blocks must be square and equal-sized")
    n = s * len(blocks)
    out = np.zeros((n, n), dtype=np.int64 if field.dtype != object else object)
    for i, b in enumerate(blocks):
        out[i * s : (i + 1) * s, i * s : (i + 1) * s] = b
    return DenseMatrix(field, out)


def vandermonde(field, points) -> DenseMatrix:
    """Square Vandermonde matrix: row i is (1, u_i, u_i^2, ...)."""
    pts = [int(u) % field.modulus for u in points]
    n = len(pts)
    out = np.zeros((n, n), dtype=np.int64 if field.dtype != object else object)
    field.counter.muls += n * max(n - 1, 0)
    for i, u in enumerate(pts):
        acc = 1
        for j in range(n):
            out[i, j] = acc
            acc = (acc * u) % field.modulus
    return DenseMatrix(field, out)


def _check_block_family(blocks):
    blocks = [np.asarray(b) for b in blocks]
    s = blocks[0].shape[0]
    for b in blocks:
        if b.shape != (s, s):
            raise DimensionMismatchError("inconsistent block dimensions")
    return blocks, s


def block_toeplitz(field, first_col_blocks, first_row_blocks) -> DenseMatrix:
    """Block Toeplitz from its first block column and first block row.

    Block (i, j) is first_col[i - j] when i >= j, else first_row[j - i];
    the two families must agree on block 0.
    """
    col, s = _check_block_family(first_col_blocks)
    row, s2 = _check_block_family(first_row_blocks)
    if s != s2 or len(col) != len(row):
        raise DimensionMismatchError("column and row block families disagree")
    if not np.array_equal(col[0], row[0]):
        raise DimensionMismatchError("corner block mismatch between column and row")
    m = len(col)
    out = np.zeros((m * s, m * s), dtype=np.int64 if field.dtype != object else object)
    for i in range(m):
        for j in range(m):
            b = col[i - j] if i >= j else row[j - i]
            out[i * s : (i + 1) * s, j * s : (j + 1) * s] = b
    return DenseMatrix(field, out)


def block_hankel(field, blocks) -> DenseMatrix:
    """Block Hankel from the 2m-1 anti-diagonal blocks: block (i, j) = h_{i+j}."""
    blocks, s = _check_block_family(blocks)
    if len(blocks) % 2 == 0:
        raise DimensionMismatchError("need an odd number (2m - 1) of blocks")
    m = (len(blocks) + 1) // 2
    out = np.zeros((m * s, m * s), dtype=np.int64 if field.dtype != object else object)
    for i in range(m):
        for j in range(m):
            out[i * s : (i + 1) * s, j * s : (j + 1) * s] = blocks[i + j]
    return DenseMatrix(field, out)
