"""Dense, sparse, and block-viewed matrices over GF(p).

All dense storage is a row-major numpy array of canonical residues
(int64 while products of residues fit a machine word, exact Python
integers beyond that).  Every kernel routes its operation tally through
the field's OpCounter so that benchmark claims are measured, not modeled.

Sparse matrices are coordinate triplets sorted row-major; applying one to
a dense block costs Theta(nnz * k) field operations and is backed by a
cached scipy CSR view when the modulus permits word arithmetic.
"""

from __future__ import annotations

import numpy as np
from scipy import sparse as _scipy_sparse

from .errors import (
    DimensionMismatchError,
    FieldMismatchError,
    FormatError,
    SingularMatrixError,
)
from .field import PrimeField

_INT64_LIMIT = 2**63 - 1


def _check_same_field(a, b):
    if a.field != b.field:
        raise FieldMismatchError(f"GF({a.field.modulus}) vs GF({b.field.modulus})")


def _canonical_array(field, data):
    arr = np.asarray(data, dtype=field.dtype)
    if arr.dtype == object:
        arr = np.vectorize(lambda v: int(v) % field.modulus, otypes=[object])(arr)
        return arr
    return np.mod(arr, field.modulus)


def _matmul_arrays(field, a, b):
    """Counted exact product of canonical residue arrays (r,k) @ (k,c)."""
    p = field.modulus
    r, k = a.shape
    k2, c = b.shape
    if k != k2:
        raise DimensionMismatchError(f"inner dimensions {k} != {k2}")
    field.counter.muls += r * k * c
    field.counter.adds += r * c * max(k - 1, 0)
    if k == 0:
        return np.zeros((r, c), dtype=field.dtype)
    if a.dtype == object or b.dtype == object:
        return np.dot(a, b) % p
    per_term = (p - 1) ** 2
    if per_term * k <= _INT64_LIMIT:
        return (a @ b) % p
    chunk = max(int(_INT64_LIMIT // per_term), 1)
    acc = np.zeros((r, c), dtype=np.int64)
    for lo in range(0, k, chunk):
        acc = (acc + a[:, lo : lo + chunk] @ b[lo : lo + chunk, :]) % p
    return acc


def _add_arrays(field, a, b):
    field.counter.adds += a.size
    return (a + b) % field.modulus


def _sub_arrays(field, a, b):
    field.counter.adds += a.size
    return (a - b) % field.modulus


def _scale_array(field, c, a):
    field.counter.muls += a.size
    return (c * a) % field.modulus


class DenseMatrix:
    """Immutable-by-convention dense matrix over a PrimeField."""

    __slots__ = ("field", "data")

    def __init__(self, field: PrimeField, data):
        self.field = field
        arr = _canonical_array(field, data)
        if arr.ndim != 2:
            raise DimensionMismatchError(f"expected 2-d data, got shape {arr.shape}")
        self.data = arr

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, field, rows, cols):
        return cls(field, np.zeros((rows, cols), dtype=field.dtype))

    @classmethod
    def identity(cls, field, n):
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, field, rows):
        return cls(field, rows)

    @classmethod
    def random(cls, field, rows, cols, rng):
        return cls(field, rng.residues(field, (rows, cols)))

    # -- shape -------------------------------------------------------------

    @property
    def rows(self):
        return self.data.shape[0]

    @property
    def cols(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape

    def is_square(self):
        return self.rows == self.cols

    # -- arithmetic --------------------------------------------------------

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other):
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"{self.shape} + {other.shape}")
        return DenseMatrix(self.field, _add_arrays(self.field, self.data, other.data))

    def __sub__(self, other):
        _check_same_field(self, other)
        if self.shape != other.shape:
            raise DimensionMismatchError(f"{self.shape} - {other.shape}")
        return DenseMatrix(self.field, _sub_arrays(self.field, self.data, other.data))

    def __neg__(self):
        return DenseMatrix(self.field, (-self.data) % self.field.modulus)

    def scale(self, c):
        c = int(c) % self.field.modulus
        return DenseMatrix(self.field, _scale_array(self.field, c, self.data))

    @property
    def T(self):
        return DenseMatrix(self.field, self.data.T.copy())

    def copy(self):
        return DenseMatrix(self.field, self.data.copy())

    def is_zero(self):
        return not np.any(self.data)

    def __eq__(self, other):
        return (
            isinstance(other, DenseMatrix)
            and other.field == self.field
            and np.array_equal(other.data, self.data)
        )

    def __repr__(self):
        return f"DenseMatrix({self.rows}x{self.cols} over GF({self.field.modulus}))"

    def block_view(self, s):
        return BlockView(self, s)

    def to_sparse(self):
        return SparseMatrix.from_dense(self)


class BlockView:
    """Interpretation of a dense matrix as an m-by-m grid of s-by-s blocks."""

    __slots__ = ("base", "s", "m")

    def __init__(self, base: DenseMatrix, s: int):
        n = base.rows
        if n != base.cols or s <= 0 or n % s != 0:
            raise DimensionMismatchError(f"block size {s} does not tile {base.shape}")
        self.base = base
        self.s = s
        self.m = n // s

    def block(self, i, j) -> np.ndarray:
        s = self.s
        return self.base.data[i * s : (i + 1) * s, j * s : (j + 1) * s]

    def gather(self) -> np.ndarray:
        """(m, m, s, s) array of blocks."""
        m, s = self.m, self.s
        return self.base.data.reshape(m, s, m, s).swapaxes(1, 2).copy()

    @staticmethod
    def scatter(field, blocks) -> DenseMatrix:
        """Inverse of gather: reassemble the base matrix from an (m, m, s, s) array."""
        blocks = np.asarray(blocks)
        m, m2, s, s2 = blocks.shape
        if m != m2 or s != s2:
            raise DimensionMismatchError(f"bad block array shape {blocks.shape}")
        return DenseMatrix(field, blocks.swapaxes(1, 2).reshape(m * s, m * s))


class SparseMatrix:
    """Coordinate-format sparse matrix acting as a matvec black box.

    Triplets are coalesced, sorted row-major, and strictly nonzero.  The
    matvec cost model is Theta(nnz) per applied column.
    """

    __slots__ = ("field", "rows", "cols", "row_idx", "col_idx", "values", "_csr", "_csr_t")

    def __init__(self, field, rows, cols, row_idx, col_idx, values):
        self.field = field
        self.rows = int(rows)
        self.cols = int(cols)
        row_idx = np.asarray(row_idx, dtype=np.int64)
        col_idx = np.asarray(col_idx, dtype=np.int64)
        values = np.asarray(values, dtype=object if field.dtype == object else np.int64)
        if not (len(row_idx) == len(col_idx) == len(values)):
            raise DimensionMismatchError("triplet arrays must have equal length")
        if len(row_idx) and (
            row_idx.min() < 0 or row_idx.max() >= rows or col_idx.min() < 0 or col_idx.max() >= cols
        ):
            raise DimensionMismatchError("triplet index out of range")
        values = values % field.modulus
        # Coalesce duplicates by summation, then drop explicit zeros.
        order = np.lexsort((col_idx, row_idx))
        row_idx, col_idx, values = row_idx[order], col_idx[order], values[order]
        if len(row_idx):
            flat = row_idx * cols + col_idx
            uniq, start = np.unique(flat, return_index=True)
            if len(uniq) != len(flat):
                sums = np.add.reduceat(values, start) % field.modulus
                row_idx, col_idx, values = uniq // cols, uniq % cols, sums
            keep = values != 0
            row_idx, col_idx, values = row_idx[keep], col_idx[keep], values[keep]
        self.row_idx, self.col_idx, self.values = row_idx, col_idx, values
        self._csr = None
        self._csr_t = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_triplets(cls, field, rows, cols, triplets):
        if triplets:
            r, c, v = zip(*triplets)
        else:
            r, c, v = (), (), ()
        return cls(field, rows, cols, r, c, v)

    @classmethod
    def from_dense(cls, dense: DenseMatrix):
        r, c = np.nonzero(dense.data)
        return cls(dense.field, dense.rows, dense.cols, r, c, dense.data[r, c])

    @classmethod
    def identity(cls, field, n):
        idx = np.arange(n)
        return cls(field, n, n, idx, idx, np.ones(n, dtype=np.int64))

    @property
    def nnz(self):
        return len(self.values)

    def to_dense(self) -> DenseMatrix:
        out = np.zeros((self.rows, self.cols), dtype=self.field.dtype)
        out[self.row_idx, self.col_idx] = self.values
        return DenseMatrix(self.field, out)

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.field, self.cols, self.rows, self.col_idx, self.row_idx, self.values)

    # -- black-box application ---------------------------------------------

    def _csr_view(self):
        if self._csr is None:
            self._csr = _scipy_sparse.csr_array(
                (self.values.astype(np.int64), (self.row_idx, self.col_idx)),
                shape=(self.rows, self.cols),
            )
        return self._csr

    def _max_row_nnz(self):
        if self.nnz == 0:
            return 0
        return int(np.bincount(self.row_idx, minlength=self.rows).max())

    def apply(self, x: np.ndarray) -> np.ndarray:
        """A @ x for a canonical residue array x of shape (cols, k)."""
        p = self.field.modulus
        k = x.shape[1] if x.ndim == 2 else 1
        self.field.counter.muls += self.nnz * k
        self.field.counter.adds += self.nnz * k
        if self.field.dtype != object and (p - 1) ** 2 * max(self._max_row_nnz(), 1) <= _INT64_LIMIT:
            return (self._csr_view() @ x) % p
        out = np.zeros((self.rows,) + x.shape[1:], dtype=object)
        for r, c, v in zip(self.row_idx, self.col_idx, self.values):
            out[r] = (out[r] + int(v) * x[c]) % p
        return out

    def rapply(self, x: np.ndarray) -> np.ndarray:
        """x @ A for a canonical residue array x of shape (k, rows)."""
        if self._csr_t is None:
            self._csr_t = self.transpose()
        return self._csr_t.apply(x.T).T


def mat_mul(a: DenseMatrix, b: DenseMatrix) -> DenseMatrix:
    """Exact schoolbook product; counts one field mul per scalar product."""
    _check_same_field(a, b)
    return DenseMatrix(a.field, _matmul_arrays(a.field, a.data, b.data))


def _next_pow2(n):
    return 1 << max(n - 1, 0).bit_length() if n > 1 else 1


def _strassen_rec(field, a, b, cutoff):
    n = a.shape[0]
    if n <= cutoff:
        return _matmul_arrays(field, a, b)
    h = n // 2
    a11, a12, a21, a22 = a[:h, :h], a[:h, h:], a[h:, :h], a[h:, h:]
    b11, b12, b21, b22 = b[:h, :h], b[:h, h:], b[h:, :h], b[h:, h:]
    add, sub = _add_arrays, _sub_arrays
    m1 = _strassen_rec(field, add(field, a11, a22), add(field, b11, b22), cutoff)
    m2 = _strassen_rec(field, add(field, a21, a22), b11, cutoff)
    m3 = _strassen_rec(field, a11, sub(field, b12, b22), cutoff)
    m4 = _strassen_rec(field, a22, sub(field, b21, b11), cutoff)
    m5 = _strassen_rec(field, add(field, a11, a12), b22, cutoff)
    m6 = _strassen_rec(field, sub(field, a21, a11), add(field, b11, b12), cutoff)
    m7 = _strassen_rec(field, sub(field, a12, a22), add(field, b21, b22), cutoff)
    c11 = add(field, sub(field, add(field, m1, m4), m5), m7)
    c12 = add(field, m3, m5)
    c21 = add(field, m2, m4)
    c22 = add(field, add(field, sub(field, m1, m2), m3), m6)
    out = np.empty((n, n), dtype=c11.dtype)
    out[:h, :h], out[:h, h:], out[h:, :h], out[h:, h:] = c11, c12, c21, c22
    return out


def mat_mul_strassen(a: DenseMatrix, b: DenseMatrix, cutoff: int = 32) -> DenseMatrix:
    """Strassen product, bitwise equal to mat_mul; falls back below cutoff.

    With cutoff >= n this is exactly schoolbook, counter trace included.
    """
    _check_same_field(a, b)
    if a.cols != b.rows:
        raise DimensionMismatchError(f"inner dimensions {a.cols} != {b.rows}")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    n = max(a.rows, a.cols, b.cols)
    if n <= cutoff:
        return mat_mul(a, b)
    size = _next_pow2(n)
    f = a.field
    pa = np.zeros((size, size), dtype=a.data.dtype)
    pb = np.zeros((size, size), dtype=b.data.dtype)
    pa[: a.rows, : a.cols] = a.data
    pb[: b.rows, : b.cols] = b.data
    out = _strassen_rec(f, pa, pb, cutoff)
    return DenseMatrix(f, out[: a.rows, : b.cols])


def sparse_matvec(a: SparseMatrix, x: DenseMatrix) -> DenseMatrix:
    """A @ x for a single column vector."""
    if x.rows != a.cols or x.cols != 1:
        raise DimensionMismatchError(f"matvec shape {x.shape} against {a.rows}x{a.cols}")
    _check_same_field(a, x)
    return DenseMatrix(a.field, a.apply(x.data))


def sparse_mat_apply(a: SparseMatrix, b: DenseMatrix) -> DenseMatrix:
    """A @ B against a dense block, Theta(nnz * k) field operations."""
    if b.rows != a.cols:
        raise DimensionMismatchError(f"apply shape {b.shape} against {a.rows}x{a.cols}")
    _check_same_field(a, b)
    return DenseMatrix(a.field, a.apply(b.data))


# -- Gaussian elimination --------------------------------------------------


def _eliminate(field, aug, r, c):
    """Gauss-Jordan elimination of column c against pivot row r, in place."""
    p = field.modulus
    inv = field.inv(int(aug[r, c]))
    aug[r] = _scale_array(field, inv, aug[r])
    col = aug[:, c].copy()
    col[r] = 0
    nz = np.nonzero(col)[0]
    if len(nz):
        field.counter.muls += len(nz) * aug.shape[1]
        field.counter.adds += len(nz) * aug.shape[1]
        aug[nz] = (aug[nz] - np.outer(col[nz], aug[r])) % p


def _row_reduce(field, arr):
    """Reduced row echelon form; returns (rref, pivot_columns)."""
    aug = arr.copy()
    rows, cols = aug.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(aug[r:, c])[0]
        if len(nz) == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            aug[[r, pr]] = aug[[pr, r]]
        _eliminate(field, aug, r, c)
        pivots.append(c)
        r += 1
    return aug, pivots


def dense_inverse(a: DenseMatrix) -> DenseMatrix:
    """Gauss-Jordan inverse with partial nonzero pivoting.

    Raises SingularMatrixError (with the rank reached) when some column
    has no usable pivot.
    """
    if not a.is_square():
        raise DimensionMismatchError(f"cannot invert {a.rows}x{a.cols}")
    n = a.rows
    field = a.field
    aug = np.concatenate([a.data, np.eye(n, dtype=np.int64).astype(a.data.dtype)], axis=1)
    for c in range(n):
        nz = np.nonzero(aug[c:, c])[0]
        if len(nz) == 0:
            raise SingularMatrixError(rank_hint=c)
        pr = c + int(nz[0])
        if pr != c:
            aug[[c, pr]] = aug[[pr, c]]
        _eliminate(field, aug, c, c)
    return DenseMatrix(field, aug[:, n:])


def dense_rank(a: DenseMatrix) -> int:
    _, pivots = _row_reduce(a.field, a.data)
    return len(pivots)


def dense_nullspace(a: DenseMatrix) -> DenseMatrix:
    """Columns spanning {x : a @ x = 0}; count = cols - rank, independent."""
    field = a.field
    rref, pivots = _row_reduce(field, a.data)
    free = [c for c in range(a.cols) if c not in set(pivots)]
    out = np.zeros((a.cols, len(free)), dtype=a.data.dtype)
    p = field.modulus
    for k, fc in enumerate(free):
        out[fc, k] = 1
        for i, pc in enumerate(pivots):
            out[pc, k] = (-rref[i, fc]) % p
    return DenseMatrix(field, out)


def rank_factorization(a: DenseMatrix):
    """(C, R) with a = C @ R, C of full column rank r, R of full row rank."""
    field = a.field
    rref, pivots = _row_reduce(field, a.data)
    r = len(pivots)
    c_part = a.data[:, pivots].copy() if r else np.zeros((a.rows, 0), dtype=a.data.dtype)
    r_part = rref[:r, :].copy() if r else np.zeros((0, a.cols), dtype=a.data.dtype)
    return DenseMatrix(field, c_part), DenseMatrix(field, r_part)


# -- text file formats -----------------------------------------------------


def _read_header(line, where):
    parts = line.split()
    if len(parts) != 3:
        raise FormatError(f"{where}: header must be 'rows cols p'")
    try:
        rows, cols, p = (int(x) for x in parts)
    except ValueError as exc:
        raise FormatError(f"{where}: non-integer header") from exc
    if rows <= 0 or cols <= 0:
        raise FormatError(f"{where}: non-positive dimensions")
    try:
        field = PrimeField(p)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from exc
    return rows, cols, field


def load_sparse_matrix(path) -> SparseMatrix:
    """Read 'rows cols p' then 1-based 'i j v' triplets ending with '0 0 0'."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    rows, cols, field = _read_header(lines[0], str(path))
    triplets = []
    terminated = False
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise FormatError(f"{path}: bad triplet line {ln!r}")
        try:
            i, j, v = (int(x) for x in parts)
        except ValueError as exc:
            raise FormatError(f"{path}: non-integer triplet {ln!r}") from exc
        if (i, j, v) == (0, 0, 0):
            terminated = True
            break
        if not (1 <= i <= rows and 1 <= j <= cols):
            raise FormatError(f"{path}: index out of range in {ln!r}")
        if not 0 < v < field.modulus:
            raise FormatError(f"{path}: value out of range in {ln!r}")
        triplets.append((i - 1, j - 1, v))
    if not terminated:
        raise FormatError(f"{path}: missing '0 0 0' terminator")
    return SparseMatrix.from_triplets(field, rows, cols, triplets)


def save_sparse_matrix(m: SparseMatrix, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.rows} {m.cols} {m.field.modulus}\n")
        for r, c, v in zip(m.row_idx, m.col_idx, m.values):
            fh.write(f"{r + 1} {c + 1} {v}\n")
        fh.write("0 0 0\n")


def load_dense_matrix(path) -> DenseMatrix:
    """Read 'rows cols p' then rows of space-separated residues."""
    with open(path, "r", encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise FormatError(f"{path}: empty file")
    rows, cols, field = _read_header(lines[0], str(path))
    if len(lines) != rows + 1:
        raise FormatError(f"{path}: expected {rows} rows, found {len(lines) - 1}")
    data = []
    for ln in lines[1:]:
        try:
            row = [int(x) for x in ln.split()]
        except ValueError as exc:
            raise FormatError(f"{path}: non-integer entry") from exc
        if len(row) != cols:
            raise FormatError(f"{path}: row of length {len(row)}, expected {cols}")
        if any(not 0 <= v < field.modulus for v in row):
            raise FormatError(f"{path}: entry out of range")
        data.append(row)
    return DenseMatrix(field, data)


def save_dense_matrix(m: DenseMatrix, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{m.rows} {m.cols} {m.field.modulus}\n")
        for row in m.data:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
