"""Displacement operators, generators, and O(n^2) decompression kernels.

An operator maps A to A - P A Q (Stein form) or P A - A Q (Sylvester
form, Cauchy only) where P, Q are block shifts or block diagonals that
are never materialized.  A matrix with a low-rank image under an operator
is represented by a generator pair (X, Y) with X Y^T equal to that image;
decompression reconstructs the matrix from one rectangular product
followed by block prefix sums, with zero multiplications after the
product for the Toeplitz and Hankel kinds.

Index conventions (0-based blocks; the single place where the recovery
sums are written down):

  Toeplitz kind   Delta(A) = A - (A shifted down one block and right one
                  block).  Unique solution of Delta(A) = M:
                      A[i, j] = M[i, j] + A[i-1, j-1]
                  i.e. prefix sums down each block diagonal.

  Hankel kind     Delta(A) = A - (A shifted up one block and right one
                  block).  Unique solution:
                      A[i, j] = M[i, j] + A[i+1, j-1]
                  i.e. prefix sums down-left along each block
                  anti-diagonal.

  Vandermonde     Delta(A) = A - D(U) A Z^T (Z^T shifts block columns
                  right).  Unique solution, column by column:
                      A[:, 0] = M[:, 0];  A[i, j] = M[i, j] + u_i A[i, j-1]

  Cauchy          Delta(A) = D(U) A - A D(V) with scalar-times-identity
                  parameter blocks, u_i != v_j.  Unique solution:
                      A[i, j] = (u_i - v_j)^{-1} M[i, j]

Generators are not unique; only X @ Y^T is contractual.  Widths are kept
at multiples of the block size by zero-padding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatchError, FieldMismatchError, OperatorSingularError
from .field import PrimeField
from .matrix import DenseMatrix, _matmul_arrays, rank_factorization

__all__ = [
    "ToeplitzOperator",
    "HankelOperator",
    "VandermondeOperator",
    "CauchyOperator",
    "DisplacementOperator",
    "GeneratorPair",
    "block_shifted",
    "apply_displacement",
    "displacement_rank",
    "compress",
    "decompress",
    "decompress_toeplitz",
    "decompress_hankel",
    "decompress_vandermonde",
    "decompress_cauchy",
    "sum_along_diagonals",
    "sum_along_antidiagonals",
]


def _check_blocking(n, s):
    if s <= 0 or n <= 0 or n % s != 0:
        raise DimensionMismatchError(f"block size {s} does not divide dimension {n}")


@dataclass(frozen=True)
class ToeplitzOperator:
    """Stein operator with down/right block shifts; fixes block Toeplitz structure."""

    n: int
    s: int = 1

    def __post_init__(self):
        _check_blocking(self.n, self.s)


@dataclass(frozen=True)
class HankelOperator:
    """Stein operator with up/right block shifts; fixes block Hankel structure."""

    n: int
    s: int = 1

    def __post_init__(self):
        _check_blocking(self.n, self.s)


class VandermondeOperator:
    """A - D(U) A Z^T with one s-by-s parameter block per block row."""

    def __init__(self, field: PrimeField, params):
        params = np.asarray(params, dtype=field.dtype)
        if params.ndim == 1:  # scalar parameters
            params = params.reshape(-1, 1, 1)
        if params.ndim != 3 or params.shape[1] != params.shape[2]:
            raise DimensionMismatchError("params must be m scalars or m square blocks")
        self.field = field
        self.params = params % field.modulus
        self.m = params.shape[0]
        self.s = params.shape[1]
        self.n = self.m * self.s

    def __repr__(self):
        return f"VandermondeOperator(n={self.n}, s={self.s})"


class CauchyOperator:
    """D(U) A - A D(V), Sylvester form, scalar-multiple-of-identity blocks."""

    def __init__(self, field: PrimeField, row_params, col_params, s: int = 1):
        u = np.asarray([int(x) % field.modulus for x in row_params], dtype=np.int64)
        v = np.asarray([int(x) % field.modulus for x in col_params], dtype=np.int64)
        if len(u) != len(v):
            raise DimensionMismatchError("row and column parameter counts differ")
        if np.any((u[:, None] - v[None, :]) % field.modulus == 0):
            raise OperatorSingularError("u_i = v_j for some pair; operator not invertible")
        self.field = field
        self.row_params = u
        self.col_params = v
        self.s = s
        self.m = len(u)
        self.n = self.m * s

    def __repr__(self):
        return f"CauchyOperator(n={self.n}, s={self.s})"


DisplacementOperator = Union[ToeplitzOperator, HankelOperator, VandermondeOperator, CauchyOperator]


@dataclass(frozen=True)
class GeneratorPair:
    """Rectangular generators X, Y with X @ Y^T = Delta(A); width = alpha * s."""

    x: DenseMatrix
    y: DenseMatrix
    op: DisplacementOperator

    def __post_init__(self):
        if self.x.field != self.y.field:
            raise FieldMismatchError("generator halves over different fields")
        if self.x.shape != self.y.shape or self.x.rows != self.op.n:
            raise DimensionMismatchError(
                f"generator shapes {self.x.shape}/{self.y.shape} for n={self.op.n}"
            )
        if self.width % self.op.s != 0:
            raise DimensionMismatchError("generator width must be a multiple of s")

    @property
    def field(self):
        return self.x.field

    @property
    def width(self):
        return self.x.cols

    @property
    def alpha(self):
        return self.width // self.op.s

    def slabs(self):
        """The alpha (X_i, Y_i) column slabs of width s."""
        s = self.op.s
        return [
            (
                DenseMatrix(self.field, self.x.data[:, i * s : (i + 1) * s].copy()),
                DenseMatrix(self.field, self.y.data[:, i * s : (i + 1) * s].copy()),
            )
            for i in range(self.alpha)
        ]

    def product(self) -> DenseMatrix:
        """The single rectangular product X @ Y^T."""
        return DenseMatrix(
            self.field, _matmul_arrays(self.field, self.x.data, self.y.data.T)
        )


# -- shift plumbing ----------------------------------------------------------


def block_shifted(a: DenseMatrix, s: int, down: int, right: int) -> DenseMatrix:
    """A moved by one block (+1 down / -1 up, +1 right / -1 left), zero fill."""
    arr = a.data
    n = arr.shape[0]
    out = np.zeros_like(arr)
    rs = slice(s, n) if down > 0 else slice(0, n - s) if down < 0 else slice(0, n)
    rsrc = slice(0, n - s) if down > 0 else slice(s, n) if down < 0 else slice(0, n)
    cs = slice(s, n) if right > 0 else slice(0, n - s) if right < 0 else slice(0, n)
    csrc = slice(0, n - s) if right > 0 else slice(s, n) if right < 0 else slice(0, n)
    out[rs, cs] = arr[rsrc, csrc]
    return DenseMatrix(a.field, out)


def _block_diag_times(field, params, w):
    """D(U) @ w for an (n, k) array w, params of shape (m, s, s)."""
    m, s, _ = params.shape
    k = w.shape[1]
    p = field.modulus
    field.counter.muls += m * s * s * k
    field.counter.adds += m * s * k * max(s - 1, 0)
    wb = w.reshape(m, s, k)
    if params.dtype != object and w.dtype != object and s * (p - 1) ** 2 < 2**63:
        return (np.matmul(params, wb) % p).reshape(m * s, k)
    out = np.empty((m, s, k), dtype=object)
    for i in range(m):
        out[i] = np.dot(params[i], wb[i]) % p
    return out.reshape(m * s, k)


def apply_displacement(op: DisplacementOperator, a: DenseMatrix) -> DenseMatrix:
    """Delta(A), computed with index shifts, never with dense P or Q."""
    if a.rows != op.n or a.cols != op.n:
        raise DimensionMismatchError(f"matrix {a.shape} under operator of size {op.n}")
    field = a.field
    p = field.modulus
    s = op.s
    if isinstance(op, ToeplitzOperator):
        shifted = block_shifted(a, s, down=1, right=1)
        field.counter.adds += (op.n - s) ** 2
        return DenseMatrix(field, (a.data - shifted.data) % p)
    if isinstance(op, HankelOperator):
        shifted = block_shifted(a, s, down=-1, right=1)
        field.counter.adds += (op.n - s) ** 2
        return DenseMatrix(field, (a.data - shifted.data) % p)
    if isinstance(op, VandermondeOperator):
        if field != op.field:
            raise FieldMismatchError("operator and matrix fields differ")
        shifted = block_shifted(a, s, down=0, right=1)
        scaled = _block_diag_times(field, op.params, shifted.data)
        field.counter.adds += op.n * op.n
        return DenseMatrix(field, (a.data - scaled) % p)
    if isinstance(op, CauchyOperator):
        if field != op.field:
            raise FieldMismatchError("operator and matrix fields differ")
        u = np.repeat(op.row_params, s)
        v = np.repeat(op.col_params, s)
        field.counter.muls += 2 * op.n * op.n
        field.counter.adds += op.n * op.n
        return DenseMatrix(field, (u[:, None] * a.data - a.data * v[None, :]) % p)
    raise TypeError(f"unknown operator {op!r}")


def displacement_rank(op: DisplacementOperator, a: DenseMatrix) -> int:
    from .matrix import dense_rank

    return dense_rank(apply_displacement(op, a))


def compress(op: DisplacementOperator, a: DenseMatrix, alpha_hint=None) -> GeneratorPair:
    """Rank-factor Delta(A) into generators, zero-padded to a multiple of s.

    This is the oracle/bridge compressor (echelon factorization); the fast
    generator paths live in the inverse-generator module.
    """
    delta = apply_displacement(op, a)
    c_part, r_part = rank_factorization(delta)
    rank = c_part.cols
    s = op.s
    width = -(-rank // s) * s
    if alpha_hint is not None:
        if alpha_hint * s < rank:
            raise ValueError(f"alpha_hint {alpha_hint} below actual block rank")
        width = alpha_hint * s
    x = np.zeros((op.n, width), dtype=a.data.dtype)
    y = np.zeros((op.n, width), dtype=a.data.dtype)
    x[:, :rank] = c_part.data
    y[:, :rank] = r_part.data.T
    return GeneratorPair(DenseMatrix(a.field, x), DenseMatrix(a.field, y), op)


# -- recovery kernels (zero multiplications) ---------------------------------


def sum_along_diagonals(m_prod: DenseMatrix, s: int) -> DenseMatrix:
    """Solve A - shift_down_right(A) = M by prefix sums along block diagonals."""
    _check_blocking(m_prod.rows, s)
    if m_prod.rows != m_prod.cols:
        raise DimensionMismatchError("recovery needs a square product")
    field = m_prod.field
    p = field.modulus
    out = m_prod.data.copy()
    n = m_prod.rows
    m = n // s
    for bi in range(1, m):
        lo = bi * s
        field.counter.adds += s * (n - s)
        out[lo : lo + s, s:] = (out[lo : lo + s, s:] + out[lo - s : lo, : n - s]) % p
    return DenseMatrix(field, out)


def sum_along_antidiagonals(m_prod: DenseMatrix, s: int) -> DenseMatrix:
    """Solve A - shift_up_right(A) = M by prefix sums along block anti-diagonals."""
    _check_blocking(m_prod.rows, s)
    if m_prod.rows != m_prod.cols:
        raise DimensionMismatchError("recovery needs a square product")
    field = m_prod.field
    p = field.modulus
    out = m_prod.data.copy()
    n = m_prod.rows
    m = n // s
    for bj in range(m - 2, -1, -1):
        lo = bj * s
        field.counter.adds += s * (n - s)
        out[lo : lo + s, s:] = (out[lo : lo + s, s:] + out[lo + s : lo + 2 * s, : n - s]) % p
    return DenseMatrix(field, out)


# -- decompression ------------------------------------------------------------


def decompress_toeplitz(g: GeneratorPair) -> DenseMatrix:
    """Unique A with Delta_Toeplitz(A) = X Y^T; one rectangular product, then sums."""
    if not isinstance(g.op, ToeplitzOperator):
        raise TypeError("generator pair is not Toeplitz-tagged")
    return sum_along_diagonals(g.product(), g.op.s)


def decompress_hankel(g: GeneratorPair) -> DenseMatrix:
    """Unique A with Delta_Hankel(A) = X Y^T; one rectangular product, then sums."""
    if not isinstance(g.op, HankelOperator):
        raise TypeError("generator pair is not Hankel-tagged")
    return sum_along_antidiagonals(g.product(), g.op.s)


def decompress_vandermonde(g: GeneratorPair) -> DenseMatrix:
    """Column recursion A[:, j] = M[:, j] + D(U) A[:, j-1].

    Costs m^2 block sums and m^2 products by the parameter blocks; each
    block column depends on its left neighbor, so columns are sequential.
    """
    op = g.op
    if not isinstance(op, VandermondeOperator):
        raise TypeError("generator pair is not Vandermonde-tagged")
    field = g.field
    p = field.modulus
    m_prod = g.product().data
    s, m = op.s, op.m
    out = m_prod.copy()
    for j in range(1, m):
        lo = j * s
        scaled = _block_diag_times(field, op.params, out[:, lo - s : lo])
        field.counter.adds += op.n * s
        out[:, lo : lo + s] = (m_prod[:, lo : lo + s] + scaled) % p
    return DenseMatrix(field, out)


def decompress_cauchy(g: GeneratorPair) -> DenseMatrix:
    """Blockwise scaling of X Y^T by (u_i - v_j)^{-1}."""
    op = g.op
    if not isinstance(op, CauchyOperator):
        raise TypeError("generator pair is not Cauchy-tagged")
    field = g.field
    p = field.modulus
    m_prod = g.product().data
    diff = (op.row_params[:, None] - op.col_params[None, :]) % p
    inv_table = np.zeros((op.m, op.m), dtype=np.int64)
    for i in range(op.m):
        for j in range(op.m):
            inv_table[i, j] = pow(int(diff[i, j]), -1, p)
    field.counter.invs += op.m * op.m
    field.counter.muls += op.m * op.m + op.n * op.n
    scale = np.repeat(np.repeat(inv_table, op.s, axis=0), op.s, axis=1)
    return DenseMatrix(field, (m_prod * scale) % p)


def decompress(g: GeneratorPair) -> DenseMatrix:
    op = g.op
    if isinstance(op, ToeplitzOperator):
        return decompress_toeplitz(g)
    if isinstance(op, HankelOperator):
        return decompress_hankel(g)
    if isinstance(op, VandermondeOperator):
        return decompress_vandermonde(g)
    if isinstance(op, CauchyOperator):
        return decompress_cauchy(g)
    raise TypeError(f"unknown operator {op!r}")
