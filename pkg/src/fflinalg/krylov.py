"""Sparse inversion through block Krylov spaces and a block Hankel Gram matrix.

The driver factors a preconditioned matrix as K_v . A . K_u = H where K_u,
K_v are block Krylov matrices built from the stacked-identity projection u
and H is block Hankel.  H is inverted explicitly through the displacement
machinery, and the sandwich A^{-1} = K_u H^{-1} K_v is applied with
Horner-style structured products that never materialize K_u or K_v.

Any object with ``field``, ``rows``, ``cols``, ``apply`` (left
multiplication by A) and ``rapply`` (right multiplication) can drive the
pipeline; SparseMatrix is the standard one, and the diagonal-scaled
wrapper below implements the D A D preconditioning implicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .displacement import sum_along_antidiagonals
from .errors import (
    DimensionMismatchError,
    FieldMismatchError,
    FieldTooSmallError,
    NotStronglyRegularError,
    PreconditionFailureError,
    SingularInputError,
    SingularMatrixError,
)
from .field import SeededRng
from .geninv import GeneratorStrategy, block_struct_inv
from .matrix import DenseMatrix, SparseMatrix, dense_rank
from .structured import block_hankel

__all__ = [
    "Preconditioner",
    "KrylovBasis",
    "block_projection",
    "build_krylov",
    "build_block_hankel_gram",
    "offdiag_recover",
    "horner_left",
    "horner_right",
    "matrix_inv",
]


@dataclass(frozen=True)
class Preconditioner:
    """Diagonal of nonzero elements for the two-sided D A D scaling."""

    d: np.ndarray
    seed: int


class _DiagScaled:
    """Implicit D A D: scale in, apply the black box, scale out."""

    def __init__(self, a, d):
        self.inner = a
        self.field = a.field
        self.rows = a.rows
        self.cols = a.cols
        self.d = d.astype(object) if a.field.dtype == object else np.asarray(d, dtype=np.int64)

    def _scale_rows(self, x):
        self.field.counter.muls += x.size
        return (self.d[:, None] * x) % self.field.modulus

    def _scale_cols(self, x):
        self.field.counter.muls += x.size
        return (x * self.d[None, :]) % self.field.modulus

    def apply(self, x):
        return self._scale_rows(self.inner.apply(self._scale_rows(x)))

    def rapply(self, x):
        return self._scale_cols(self.inner.rapply(self._scale_cols(x)))


@dataclass
class KrylovBasis:
    """Slabs u, Au, ..., A^{m-1}u (right side) or their transposed analogues."""

    field: object
    s: int
    m: int
    side: str
    slabs: list

    def densify(self) -> DenseMatrix:
        if self.side == "right":
            return DenseMatrix(self.field, np.concatenate(self.slabs, axis=1))
        return DenseMatrix(self.field, np.concatenate(self.slabs, axis=0))


def block_projection(field, n, s) -> DenseMatrix:
    """The (n, s) projection made of n/s stacked identity blocks."""
    if s <= 0 or n % s != 0:
        raise DimensionMismatchError(f"block size {s} does not divide {n}")
    return DenseMatrix(field, np.tile(np.eye(s, dtype=np.int64), (n // s, 1)))


def build_krylov(a, s, m, side="right") -> KrylovBasis:
    """Krylov slabs from m - 1 black-box applications of a."""
    n = a.rows
    if a.rows != a.cols:
        raise DimensionMismatchError("Krylov bases need a square operator")
    if s * m != n:
        raise DimensionMismatchError(f"blocking ({s}, {m}) does not tile n={n}")
    u = block_projection(a.field, n, s).data
    slabs = []
    if side == "right":
        w = u
        for _ in range(m):
            slabs.append(w)
            w = a.apply(w)
    elif side == "left":
        w = u.T.copy()
        for _ in range(m):
            slabs.append(w)
            w = a.rapply(w)
    else:
        raise ValueError("side must be 'right' or 'left'")
    return KrylovBasis(a.field, s, m, side, slabs)


def _project_left(field, w, s, m):
    """u^T @ w for the stacked-identity u: the sum of the m row blocks of w."""
    k = w.shape[1]
    field.counter.adds += (m - 1) * s * k
    return w.reshape(m, s, k).sum(axis=0) % field.modulus


def _gram_blocks(a, ku: KrylovBasis):
    """The 2m - 1 distinct blocks u^T A^k u, 1 <= k <= 2m - 1."""
    s, m = ku.s, ku.m
    blocks = []
    w = None
    for k in range(1, 2 * m):
        if k < m:
            w = ku.slabs[k]
        else:
            w = a.apply(ku.slabs[m - 1] if k == m else w)
        blocks.append(_project_left(a.field, w, s, m))
    return blocks


def build_block_hankel_gram(a, ku: KrylovBasis, kv: KrylovBasis) -> DenseMatrix:
    """H = K_v A K_u assembled from its 2m - 1 distinct blocks.

    Block (i, j) is u^T A^{i+j+1} u (0-based), read off the right Krylov
    slabs plus at most m extra black-box applications; the dense triple
    product exists only in test oracles.
    """
    if ku.side != "right" or kv.side != "left":
        raise DimensionMismatchError("expected a right basis ku and a left basis kv")
    if (ku.s, ku.m) != (kv.s, kv.m):
        raise DimensionMismatchError("bases disagree on blocking")
    return block_hankel(a.field, _gram_blocks(a, ku))


def offdiag_recover(vbar: DenseMatrix, qstar_bar: DenseMatrix) -> DenseMatrix:
    """Product of the anti-triangular block Hankel factor stacked in vbar
    with the upper block Toeplitz factor laid out in qstar_bar.

    One (n, s) x (s, n) rectangular product, then anti-diagonal prefix
    sums; no multiplications after the product.
    """
    if vbar.field != qstar_bar.field:
        raise FieldMismatchError("factor halves over different fields")
    n, s = vbar.rows, vbar.cols
    if qstar_bar.shape != (s, n) or n % s != 0:
        raise DimensionMismatchError(
            f"expected ({n}, {s}) x ({s}, {n}), got {vbar.shape} x {qstar_bar.shape}"
        )
    from .matrix import _matmul_arrays

    prod = DenseMatrix(vbar.field, _matmul_arrays(vbar.field, vbar.data, qstar_bar.data))
    return sum_along_antidiagonals(prod, s)


# -- Horner-scheme structured products --------------------------------------


def _tile_rows(field, block, m):
    """u @ block: m stacked copies; placement only, no field operations."""
    return np.tile(block, (m, 1))


def _tile_cols(field, block, m):
    """block @ u^T: m side-by-side copies; placement only."""
    return np.tile(block, (1, m))


def _ku_times(a, m_mat: DenseMatrix, s, m) -> DenseMatrix:
    """K_u @ M by Horner: R <- A R + u M_i over the row slabs M_i of M."""
    field = a.field
    p = field.modulus
    arr = m_mat.data
    acc = _tile_rows(field, arr[(m - 1) * s : m * s, :], m)
    for i in range(m - 2, -1, -1):
        acc = a.apply(acc)
        field.counter.adds += acc.size
        acc = (acc + _tile_rows(field, arr[i * s : (i + 1) * s, :], m)) % p
    return DenseMatrix(field, acc)


def _times_kv(a, m_mat: DenseMatrix, s, m) -> DenseMatrix:
    """M @ K_v by Horner: R <- R A + M_i u^T over the column slabs of M."""
    field = a.field
    p = field.modulus
    arr = m_mat.data
    acc = _tile_cols(field, arr[:, (m - 1) * s : m * s], m)
    for i in range(m - 2, -1, -1):
        acc = a.rapply(acc)
        field.counter.adds += acc.size
        acc = (acc + _tile_cols(field, arr[:, i * s : (i + 1) * s], m)) % p
    return DenseMatrix(field, acc)


def horner_left(hinv: DenseMatrix, a, s, m) -> DenseMatrix:
    """K_u @ M for an arbitrary explicit M (M = H^{-1} in the pipeline).

    Cost: m - 1 black-box applications plus O(m n^2) additions; the
    stacked-identity structure makes each u-product a pure placement.
    """
    if hinv.rows != s * m or a.rows != s * m:
        raise DimensionMismatchError("blocking does not tile the operand")
    return _ku_times(a, hinv, s, m)


def horner_right(ka: DenseMatrix, a, s, m) -> DenseMatrix:
    """M @ K_v for an arbitrary explicit M, mirror of horner_left."""
    if ka.cols != s * m or a.rows != s * m:
        raise DimensionMismatchError("blocking does not tile the operand")
    return _times_kv(a, ka, s, m)


# -- the inversion driver -----------------------------------------------------


def matrix_inv(
    a: SparseMatrix,
    s: int | None = None,
    strategy: GeneratorStrategy = GeneratorStrategy.DENSE_ORACLE,
    rng: SeededRng | None = None,
    retry_budget: int = 8,
    stats: dict | None = None,
) -> DenseMatrix:
    """Explicit A^{-1} for a nonsingular sparse matrix over GF(p), p > 2n.

    Sample a diagonal preconditioner D, run the Krylov/Hankel pipeline on
    D A D, and undo the scaling at the end.  A singular Hankel stage is
    retried with a fresh D up to ``retry_budget``; once exhausted the
    input is checked densely so singular inputs are reported as such.
    ``stats``, when given, receives the chosen blocking and retry count.
    """
    n = a.rows
    if a.rows != a.cols:
        raise DimensionMismatchError("can only invert a square matrix")
    field = a.field
    if field.modulus <= 2 * n:
        raise FieldTooSmallError(
            f"need p > 2n = {2 * n} for the probabilistic pipeline, have p = {field.modulus};"
            " use the dense path instead"
        )
    if rng is None:
        rng = SeededRng(0)
    if s is None:
        from .costmodel import choose_blocking

        s, m = choose_blocking(n)
    else:
        if s <= 0 or n % s != 0:
            raise DimensionMismatchError(f"block size {s} does not divide n={n}")
        m = n // s

    attempts = 0
    for _ in range(retry_budget):
        attempts += 1
        child = rng.spawn()
        pre = Preconditioner(d=child.nonzero_residues(field, n), seed=child.seed)
        scaled = _DiagScaled(a, pre.d)
        ku = build_krylov(scaled, s, m, side="right")
        gram = block_hankel(field, _gram_blocks(scaled, ku))
        try:
            hinv = block_struct_inv(gram, s, m, op_kind="hankel", strategy=strategy)
        except (SingularMatrixError, NotStronglyRegularError):
            continue
        sandwich = _times_kv(scaled, _ku_times(scaled, hinv, s, m), s, m)
        inv_data = scaled._scale_cols(scaled._scale_rows(sandwich.data))
        if stats is not None:
            stats.update({"s": s, "m": m, "attempts": attempts})
        return DenseMatrix(field, inv_data)

    if dense_rank(a.to_dense()) < n:
        raise SingularInputError(f"input of size {n} is singular")
    raise PreconditionFailureError("block Hankel inversion", attempts)
