import numpy as np
import pytest

from fflinalg import (
    BlockView,
    DenseMatrix,
    PrimeField,
    SeededRng,
    SparseMatrix,
    dense_inverse,
    dense_nullspace,
    dense_rank,
    load_dense_matrix,
    load_sparse_matrix,
    mat_mul,
    mat_mul_strassen,
    rank_factorization,
    save_dense_matrix,
    save_sparse_matrix,
    sparse_mat_apply,
    sparse_matvec,
)
from fflinalg.errors import DimensionMismatchError, FormatError, SingularMatrixError

# ---------------------------------------------------------------------------
# dense product
# ---------------------------------------------------------------------------


def test_identity_product():
    f = PrimeField(7)
    a = DenseMatrix.random(f, 5, 5, SeededRng(1))
    assert mat_mul(DenseMatrix.identity(f, 5), a) == a


def test_hand_product():
    f = PrimeField(7)
    a = DenseMatrix(f, [[1, 2], [3, 4]])
    b = DenseMatrix(f, [[0, 1], [1, 0]])
    assert (a @ b).data.tolist() == [[2, 1], [4, 3]]


def test_associativity_random():
    f = PrimeField(101)
    rng = SeededRng(3)
    a, b, c = (DenseMatrix.random(f, 8, 8, rng) for _ in range(3))
    assert (a @ b) @ c == a @ (b @ c)


def test_dimension_mismatch():
    f = PrimeField(7)
    with pytest.raises(DimensionMismatchError):
        mat_mul(DenseMatrix.zeros(f, 2, 3), DenseMatrix.zeros(f, 2, 3))


def test_big_modulus_exact():
    # products overflow int64, exercising the object-dtype path
    p = (1 << 61) - 1
    f = PrimeField(p)
    rng = SeededRng(9)
    a = DenseMatrix(f, [[p - 1, p - 2], [1, p - 5]])
    b = DenseMatrix(f, [[p - 3, 2], [p - 1, p - 7]])
    expect = [
        [sum(int(a.data[i][k]) * int(b.data[k][j]) for k in range(2)) % p for j in range(2)]
        for i in range(2)
    ]
    assert (a @ b).data.tolist() == expect
    inv = dense_inverse(a)
    assert mat_mul(inv, a) == DenseMatrix.identity(f, 2)
    assert rng is not None


# ---------------------------------------------------------------------------
# Strassen
# ---------------------------------------------------------------------------


def test_strassen_matches_schoolbook_many_shapes():
    rng = SeededRng(17)
    checked = 0
    for p in (2, 5, 101):
        f = PrimeField(p)
        for _ in range(34):
            n = int(rng.integers(1, 65))
            k = int(rng.integers(1, 65))
            m = int(rng.integers(1, 65))
            a = DenseMatrix.random(f, n, k, rng)
            b = DenseMatrix.random(f, k, m, rng)
            assert mat_mul_strassen(a, b, cutoff=8) == mat_mul(a, b)
            checked += 1
    assert checked >= 100


def test_strassen_degenerate_cutoff_counts_like_schoolbook():
    f = PrimeField(101)
    rng = SeededRng(4)
    a = DenseMatrix.random(f, 24, 24, rng)
    b = DenseMatrix.random(f, 24, 24, rng)
    f.counter.reset()
    mat_mul(a, b)
    school = f.counter.snapshot()
    f.counter.reset()
    mat_mul_strassen(a, b, cutoff=24)
    assert f.counter.snapshot() == school


def test_strassen_beats_schoolbook_mul_count_at_128():
    f = PrimeField(101)
    rng = SeededRng(5)
    a = DenseMatrix.random(f, 128, 128, rng)
    b = DenseMatrix.random(f, 128, 128, rng)
    f.counter.reset()
    mat_mul(a, b)
    school_muls = f.counter.muls
    f.counter.reset()
    mat_mul_strassen(a, b, cutoff=32)
    assert f.counter.muls < school_muls


# ---------------------------------------------------------------------------
# sparse application
# ---------------------------------------------------------------------------


def test_sparse_empty_and_identity():
    f = PrimeField(7)
    x = DenseMatrix.random(f, 6, 1, SeededRng(2))
    empty = SparseMatrix.from_triplets(f, 6, 6, [])
    assert sparse_matvec(empty, x).is_zero()
    eye = SparseMatrix.identity(f, 6)
    assert sparse_matvec(eye, x) == x


def test_sparse_matches_dense_oracle():
    f = PrimeField(65537)
    rng = SeededRng(8)
    n = 32
    mask = rng.residues(f, (n, n)) < int(0.1 * f.modulus)
    data = rng.residues(f, (n, n)) * mask
    dense = DenseMatrix(f, data)
    sparse = SparseMatrix.from_dense(dense)
    block = DenseMatrix.random(f, n, 5, rng)
    assert sparse_mat_apply(sparse, block) == mat_mul(dense, block)
    row_block = DenseMatrix.random(f, 5, n, rng)
    assert DenseMatrix(f, sparse.rapply(row_block.data)) == mat_mul(row_block, dense)


def test_sparse_coalesces_duplicates_and_drops_zeros():
    f = PrimeField(7)
    a = SparseMatrix.from_triplets(f, 2, 2, [(0, 0, 3), (0, 0, 4), (1, 1, 2)])
    assert a.nnz == 1  # 3 + 4 = 0 mod 7 disappears
    assert a.to_dense().data.tolist() == [[0, 0], [0, 2]]


def test_sparse_cost_scales_with_nnz():
    f = PrimeField(65537)
    a = SparseMatrix.from_triplets(f, 50, 50, [(i, i, 1) for i in range(50)])
    x = DenseMatrix.random(f, 50, 3, SeededRng(6))
    f.counter.reset()
    sparse_mat_apply(a, x)
    assert f.counter.muls == a.nnz * 3


# ---------------------------------------------------------------------------
# elimination: inverse, rank, nullspace
# ---------------------------------------------------------------------------


def test_inverse_examples():
    f7 = PrimeField(7)
    assert dense_inverse(DenseMatrix.identity(f7, 4)) == DenseMatrix.identity(f7, 4)
    assert dense_inverse(DenseMatrix(f7, [[2, 0], [0, 3]])).data.tolist() == [[4, 0], [0, 5]]


def test_singular_reports_rank_hint():
    f5 = PrimeField(5)
    with pytest.raises(SingularMatrixError) as err:
        dense_inverse(DenseMatrix(f5, [[1, 1], [1, 1]]))
    assert err.value.rank_hint == 1


def test_inverse_two_sided_random():
    f = PrimeField(10007)
    rng = SeededRng(11)
    for _ in range(5):
        a = DenseMatrix.random(f, 9, 9, rng)
        if dense_rank(a) < 9:
            continue
        inv = dense_inverse(a)
        eye = DenseMatrix.identity(f, 9)
        assert mat_mul(inv, a) == eye and mat_mul(a, inv) == eye


def test_rank_nullspace_examples():
    f = PrimeField(7)
    zero = DenseMatrix.zeros(f, 4, 4)
    assert dense_rank(zero) == 0
    assert dense_nullspace(zero) == DenseMatrix.identity(f, 4)
    eye = DenseMatrix.identity(f, 4)
    assert dense_rank(eye) == 4
    assert dense_nullspace(eye).cols == 0
    a = DenseMatrix(f, [[1, 2], [2, 4]])
    assert dense_rank(a) == 1
    ns = dense_nullspace(a)
    assert ns.cols == 1
    assert mat_mul(a, ns).is_zero()
    # spans the same line as (2, -1) = (2, 6): cross product vanishes
    v = ns.data[:, 0]
    assert (v[0] * 6 - v[1] * 2) % 7 == 0 and (v[0], v[1]) != (0, 0)


def test_rank_plus_nullity_and_independence():
    f = PrimeField(101)
    rng = SeededRng(13)
    for _ in range(10):
        a = DenseMatrix.random(f, 7, 11, rng)
        r = dense_rank(a)
        ns = dense_nullspace(a)
        assert r + ns.cols == a.cols
        assert mat_mul(a, ns).is_zero()
        assert dense_rank(ns) == ns.cols


def test_rank_factorization_reconstructs():
    f = PrimeField(101)
    rng = SeededRng(14)
    low = mat_mul(DenseMatrix.random(f, 9, 3, rng), DenseMatrix.random(f, 3, 9, rng))
    c, r = rank_factorization(low)
    assert c.cols == dense_rank(low) <= 3
    assert mat_mul(c, r) == low


# ---------------------------------------------------------------------------
# block view
# ---------------------------------------------------------------------------


def test_block_view_round_trip():
    f = PrimeField(101)
    base = DenseMatrix.random(f, 12, 12, SeededRng(15))
    view = base.block_view(3)
    assert view.m == 4
    assert np.array_equal(view.block(1, 2), base.data[3:6, 6:9])
    assert BlockView.scatter(f, view.gather()) == base


def test_block_view_rejects_bad_tiling():
    f = PrimeField(7)
    with pytest.raises(DimensionMismatchError):
        DenseMatrix.zeros(f, 6, 6).block_view(4)


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def test_sparse_file_round_trip(tmp_path):
    f = PrimeField(13)
    a = SparseMatrix.from_triplets(f, 3, 4, [(0, 1, 5), (2, 3, 12)])
    path = tmp_path / "a.sms"
    save_sparse_matrix(a, path)
    b = load_sparse_matrix(path)
    assert b.rows == 3 and b.cols == 4 and b.field.modulus == 13
    assert b.to_dense() == a.to_dense()


def test_dense_file_round_trip(tmp_path):
    f = PrimeField(13)
    a = DenseMatrix.random(f, 3, 5, SeededRng(16))
    path = tmp_path / "a.txt"
    save_dense_matrix(a, path)
    assert load_dense_matrix(path) == a


@pytest.mark.parametrize(
    "content",
    [
        "",  # empty
        "3 3\n0 0 0\n",  # short header
        "3 3 4\n0 0 0\n",  # composite modulus
        "2 2 7\n1 1 3\n",  # missing terminator
        "2 2 7\n3 1 2\n0 0 0\n",  # row index out of range
        "2 2 7\n1 1 9\n0 0 0\n",  # value out of range
        "2 2 7\n1 1 0\n0 0 0\n",  # explicit zero value
    ],
)
def test_sparse_format_errors(tmp_path, content):
    path = tmp_path / "bad.sms"
    path.write_text(content)
    with pytest.raises(FormatError):
        load_sparse_matrix(path)


def test_dense_format_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 2 7\n1 2\n")
    with pytest.raises(FormatError):
        load_dense_matrix(path)
    path.write_text("2 2 7\n1 2 3\n4 5 6\n")
    with pytest.raises(FormatError):
        load_dense_matrix(path)
