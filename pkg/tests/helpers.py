"""Shared fixture builders for the test suite."""

import numpy as np

from fflinalg import (
    DenseMatrix,
    PrimeField,
    SeededRng,
    SparseMatrix,
    anti_lower_block_hankel,
    dense_rank,
    lower_block_toeplitz,
    upper_block_toeplitz,
)


def random_invertible_sparse(field, n, extra_nnz, rng, max_tries=32):
    """Nonzero diagonal plus random off-diagonal noise, resampled until nonsingular."""
    for _ in range(max_tries):
        triplets = [(i, i, int(rng.nonzero_element(field))) for i in range(n)]
        for _ in range(extra_nnz):
            triplets.append(
                (
                    int(rng.integers(0, n)),
                    int(rng.integers(0, n)),
                    int(rng.nonzero_element(field)),
                )
            )
        a = SparseMatrix.from_triplets(field, n, n, triplets)
        if dense_rank(a.to_dense()) == n:
            return a
    raise AssertionError("could not sample an invertible sparse matrix")


def random_toeplitz_like(field, n, s, alpha, rng):
    """Sum of alpha lower-times-upper block Toeplitz products (structured oracle)."""
    total = DenseMatrix.zeros(field, n, n)
    for _ in range(alpha):
        x = DenseMatrix.random(field, n, s, rng)
        y = DenseMatrix.random(field, n, s, rng)
        total = total + lower_block_toeplitz(x) @ upper_block_toeplitz(y)
    return total


def random_hankel_like(field, n, s, alpha, rng):
    """Sum of alpha anti-Hankel-times-upper-Toeplitz products (structured oracle)."""
    total = DenseMatrix.zeros(field, n, n)
    for _ in range(alpha):
        x = DenseMatrix.random(field, n, s, rng)
        y = DenseMatrix.random(field, n, s, rng)
        total = total + anti_lower_block_hankel(x) @ upper_block_toeplitz(y)
    return total


def random_nonsingular_dense(field, n, rng, max_tries=32):
    for _ in range(max_tries):
        a = DenseMatrix.random(field, n, n, rng)
        if dense_rank(a) == n:
            return a
    raise AssertionError("could not sample a nonsingular dense matrix")


def random_scalar_toeplitz(field, n, rng):
    """Plain (unstructured-rank-2) scalar Toeplitz matrix."""
    entries = rng.residues(field, 2 * n - 1)
    data = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            data[i, j] = entries[i - j + n - 1]
    return DenseMatrix(field, data)


def random_scalar_hankel(field, n, rng):
    entries = rng.residues(field, 2 * n - 1)
    data = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            data[i, j] = entries[i + j]
    return DenseMatrix(field, data)
