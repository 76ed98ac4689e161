import numpy as np
import pytest

import helpers
from fflinalg import (
    CauchyOperator,
    DenseMatrix,
    GeneratorPair,
    HankelOperator,
    PrimeField,
    SeededRng,
    ToeplitzOperator,
    VandermondeOperator,
    anti_lower_block_hankel,
    apply_displacement,
    block_diagonal,
    block_shifted,
    compress,
    decompress,
    decompress_cauchy,
    decompress_hankel,
    decompress_toeplitz,
    decompress_vandermonde,
    dense_inverse,
    dense_rank,
    displacement_rank,
    lower_block_toeplitz,
    mat_mul,
    shift_matrix,
    sum_along_antidiagonals,
    sum_along_diagonals,
    upper_block_toeplitz,
    vandermonde,
)
from fflinalg.errors import OperatorSingularError

F7 = PrimeField(7)
F101 = PrimeField(101)
F65537 = PrimeField(65537)


def _dense_stein_oracle(a, p_mat, q_mat):
    """A - P A Q via explicit dense products."""
    return a - mat_mul(p_mat, mat_mul(a, q_mat))


# ---------------------------------------------------------------------------
# applying operators
# ---------------------------------------------------------------------------


def test_toeplitz_apply_identity_example():
    op = ToeplitzOperator(2, 1)
    out = apply_displacement(op, DenseMatrix.identity(F7, 2))
    assert out.data.tolist() == [[1, 0], [0, 0]]


def test_apply_is_linear_at_zero():
    zero = DenseMatrix.zeros(F101, 8, 8)
    for op in (
        ToeplitzOperator(8, 2),
        HankelOperator(8, 2),
        VandermondeOperator(F101, [1, 2, 3, 4, 5, 6, 7, 8]),
        CauchyOperator(F101, [1, 2], [3, 4], s=4),
    ):
        assert apply_displacement(op, zero).is_zero()


def test_toeplitz_apply_matches_dense_shift_oracle():
    rng = SeededRng(1)
    a = DenseMatrix.random(F101, 12, 12, rng)
    z_block = np.kron(np.eye(4, k=-1, dtype=np.int64), np.eye(3, dtype=np.int64))
    z = DenseMatrix(F101, z_block)
    oracle = _dense_stein_oracle(a, z, z.T)
    assert apply_displacement(ToeplitzOperator(12, 3), a) == oracle


def test_hankel_apply_matches_dense_shift_oracle():
    rng = SeededRng(2)
    a = DenseMatrix.random(F101, 12, 12, rng)
    z_block = np.kron(np.eye(4, k=-1, dtype=np.int64), np.eye(3, dtype=np.int64))
    z = DenseMatrix(F101, z_block)
    oracle = _dense_stein_oracle(a, z.T, z.T)
    assert apply_displacement(HankelOperator(12, 3), a) == oracle


def test_vandermonde_apply_matches_dense_oracle():
    rng = SeededRng(3)
    a = DenseMatrix.random(F101, 8, 8, rng)
    params = [rng.residues(F101, (2, 2)) for _ in range(4)]
    op = VandermondeOperator(F101, np.stack(params))
    d_mat = block_diagonal(F101, params)
    z_block = DenseMatrix(F101, np.kron(np.eye(4, k=-1, dtype=np.int64), np.eye(2, dtype=np.int64)))
    oracle = a - mat_mul(d_mat, mat_mul(a, z_block.T))
    assert apply_displacement(op, a) == oracle


def test_cauchy_apply_matches_sylvester_oracle():
    rng = SeededRng(4)
    a = DenseMatrix.random(F101, 6, 6, rng)
    op = CauchyOperator(F101, [1, 2, 3], [4, 5, 6], s=2)
    d_u = block_diagonal(F101, [v * np.eye(2, dtype=np.int64) for v in (1, 2, 3)])
    d_v = block_diagonal(F101, [v * np.eye(2, dtype=np.int64) for v in (4, 5, 6)])
    assert apply_displacement(op, a) == mat_mul(d_u, a) - mat_mul(a, d_v)


def test_toeplitz_matrix_displacement_support():
    rng = SeededRng(5)
    t = helpers.random_scalar_toeplitz(F101, 8, rng)
    delta = apply_displacement(ToeplitzOperator(8, 1), t)
    assert not np.any(delta.data[1:, 1:])
    assert displacement_rank(ToeplitzOperator(8, 1), t) <= 2


def test_displacement_rank_examples():
    assert displacement_rank(ToeplitzOperator(6, 1), DenseMatrix.zeros(F101, 6, 6)) == 0
    pts = [3, 5, 7, 11]
    v = vandermonde(F101, pts)
    op = VandermondeOperator(F101, pts)
    assert displacement_rank(op, v) == 1


def test_cauchy_operator_rejects_shared_parameters():
    with pytest.raises(OperatorSingularError):
        CauchyOperator(F7, [1, 2], [2, 5])


# ---------------------------------------------------------------------------
# compression
# ---------------------------------------------------------------------------


def test_compress_zero_displacement_gives_empty_generators():
    # a diagonal-constant (scalar Toeplitz) matrix built from a single value
    a = DenseMatrix(F7, 3 * np.eye(5, dtype=np.int64))
    op = ToeplitzOperator(5, 1)
    g = compress(op, a)
    assert g.width == 1  # rank-1 displacement: the (0, 0) corner survives
    all_zero = compress(op, DenseMatrix.zeros(F7, 5, 5))
    assert all_zero.width == 0
    assert decompress(all_zero).is_zero()


def test_compress_factorizes_exactly():
    rng = SeededRng(6)
    t = helpers.random_scalar_toeplitz(F101, 8, rng)
    op = ToeplitzOperator(8, 1)
    g = compress(op, t)
    assert g.width <= 2
    assert g.product() == apply_displacement(op, t)


def test_compress_pads_width_to_block_multiple():
    rng = SeededRng(7)
    h = helpers.random_hankel_like(F65537, 12, 2, 1, rng)
    op = HankelOperator(12, 2)
    g = compress(op, h)
    assert g.width % 2 == 0
    assert g.product() == apply_displacement(op, h)
    hinted = compress(op, h, alpha_hint=5)
    assert hinted.width == 10
    assert hinted.product() == apply_displacement(op, h)
    with pytest.raises(ValueError):
        compress(op, h, alpha_hint=0)


def test_block_hankel_gram_has_small_block_width():
    rng = SeededRng(8)
    h = helpers.random_hankel_like(F65537, 16, 4, 2, rng)
    g = compress(HankelOperator(16, 4), h)
    assert g.alpha <= 2


# ---------------------------------------------------------------------------
# decompression kernels
# ---------------------------------------------------------------------------


def test_toeplitz_unit_generators_give_identity():
    e1 = np.zeros((6, 1), dtype=np.int64)
    e1[0] = 1
    g = GeneratorPair(DenseMatrix(F7, e1), DenseMatrix(F7, e1), ToeplitzOperator(6, 1))
    assert decompress_toeplitz(g) == DenseMatrix.identity(F7, 6)


def test_hankel_unit_generators_give_corner():
    e1 = np.zeros((3, 1), dtype=np.int64)
    e1[0] = 1
    g = GeneratorPair(DenseMatrix(F7, e1), DenseMatrix(F7, e1), HankelOperator(3, 1))
    out = decompress_hankel(g)
    expected = np.zeros((3, 3), dtype=np.int64)
    expected[0, 0] = 1
    assert out.data.tolist() == expected.tolist()


def test_toeplitz_round_trip_scalar():
    rng = SeededRng(9)
    t = helpers.random_scalar_toeplitz(F7, 8, rng)
    op = ToeplitzOperator(8, 1)
    assert decompress(compress(op, t)) == t


def test_toeplitz_decompress_matches_lu_sum_oracle():
    rng = SeededRng(10)
    n, s, alpha = 12, 2, 3
    xs = [DenseMatrix.random(F65537, n, s, rng) for _ in range(alpha)]
    ys = [DenseMatrix.random(F65537, n, s, rng) for _ in range(alpha)]
    oracle = DenseMatrix.zeros(F65537, n, n)
    for x, y in zip(xs, ys):
        oracle = oracle + mat_mul(lower_block_toeplitz(x), upper_block_toeplitz(y))
    g = GeneratorPair(
        DenseMatrix(F65537, np.concatenate([x.data for x in xs], axis=1)),
        DenseMatrix(F65537, np.concatenate([y.data for y in ys], axis=1)),
        ToeplitzOperator(n, s),
    )
    assert decompress_toeplitz(g) == oracle


def test_hankel_decompress_matches_gu_sum_oracle():
    rng = SeededRng(11)
    n, s, alpha = 12, 2, 2
    xs = [DenseMatrix.random(F65537, n, s, rng) for _ in range(alpha)]
    ys = [DenseMatrix.random(F65537, n, s, rng) for _ in range(alpha)]
    oracle = DenseMatrix.zeros(F65537, n, n)
    for x, y in zip(xs, ys):
        oracle = oracle + mat_mul(anti_lower_block_hankel(x), upper_block_toeplitz(y))
    g = GeneratorPair(
        DenseMatrix(F65537, np.concatenate([x.data for x in xs], axis=1)),
        DenseMatrix(F65537, np.concatenate([y.data for y in ys], axis=1)),
        HankelOperator(n, s),
    )
    out = decompress_hankel(g)
    assert out == oracle
    assert apply_displacement(HankelOperator(n, s), out) == g.product()


def test_vandermonde_scalar_solution_example():
    op = VandermondeOperator(F7, [2, 3])
    g = GeneratorPair(DenseMatrix.identity(F7, 2), DenseMatrix.identity(F7, 2), op)
    assert decompress_vandermonde(g).data.tolist() == [[1, 2], [0, 1]]


def test_vandermonde_scalar_matches_closed_form_oracle():
    # commuting scalar parameters: A = sum D(x_i) V(U) L(y_i)^T
    rng = SeededRng(12)
    n, alpha = 6, 2
    pts = [1, 2, 3, 4, 5, 6]
    op = VandermondeOperator(F101, pts)
    xs = [DenseMatrix.random(F101, n, 1, rng) for _ in range(alpha)]
    ys = [DenseMatrix.random(F101, n, 1, rng) for _ in range(alpha)]
    v_mat = vandermonde(F101, pts)
    oracle = DenseMatrix.zeros(F101, n, n)
    for x, y in zip(xs, ys):
        d_x = block_diagonal(F101, [x.data[i].reshape(1, 1) for i in range(n)])
        l_y = lower_block_toeplitz(y)
        oracle = oracle + mat_mul(d_x, mat_mul(v_mat, l_y.T))
    g = GeneratorPair(
        DenseMatrix(F101, np.concatenate([x.data for x in xs], axis=1)),
        DenseMatrix(F101, np.concatenate([y.data for y in ys], axis=1)),
        op,
    )
    assert decompress_vandermonde(g) == oracle


def test_vandermonde_zero_parameters_collapse():
    rng = SeededRng(13)
    op = VandermondeOperator(F101, [0, 0, 0])
    x = DenseMatrix.random(F101, 3, 1, rng)
    y = DenseMatrix.random(F101, 3, 1, rng)
    g = GeneratorPair(x, y, op)
    assert decompress_vandermonde(g) == g.product()


def test_vandermonde_block_right_inverse_of_apply():
    rng = SeededRng(14)
    params = np.stack([rng.residues(F65537, (3, 3)) for _ in range(4)])
    op = VandermondeOperator(F65537, params)
    g = GeneratorPair(
        DenseMatrix.random(F65537, 12, 6, rng), DenseMatrix.random(F65537, 12, 6, rng), op
    )
    a = decompress_vandermonde(g)
    assert apply_displacement(op, a) == g.product()


def test_cauchy_matches_bruteforce_scalar_oracle():
    rng = SeededRng(15)
    op = CauchyOperator(F7, [1, 2], [3, 4])
    x = DenseMatrix(F7, [[1], [1]])
    y = DenseMatrix(F7, [[1], [1]])
    g = GeneratorPair(x, y, op)
    out = decompress_cauchy(g)
    # independent elementwise oracle through FieldElement arithmetic
    m = g.product()
    for i, u in enumerate((1, 2)):
        for j, v in enumerate((3, 4)):
            lhs = (F7.element(u) - F7.element(v)).inverse() * F7.element(int(m.data[i, j]))
            assert out.data[i, j] == lhs.value
    assert rng is not None


def test_cauchy_zero_and_round_trip():
    rng = SeededRng(16)
    op = CauchyOperator(F65537, [1, 2, 3], [4, 5, 6], s=2)
    zero = GeneratorPair(DenseMatrix.zeros(F65537, 6, 2), DenseMatrix.zeros(F65537, 6, 2), op)
    assert decompress_cauchy(zero).is_zero()
    g = GeneratorPair(
        DenseMatrix.random(F65537, 6, 2, rng), DenseMatrix.random(F65537, 6, 2, rng), op
    )
    a = decompress_cauchy(g)
    assert apply_displacement(op, a) == g.product()
    assert decompress(compress(op, a)) == a


# ---------------------------------------------------------------------------
# kernels do no multiplication after the product
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("kernel", [sum_along_diagonals, sum_along_antidiagonals])
def test_recovery_kernels_multiply_nothing(kernel):
    rng = SeededRng(17)
    m_prod = DenseMatrix.random(F65537, 20, 20, rng)
    F65537.counter.reset()
    kernel(m_prod, 4)
    assert F65537.counter.muls == 0
    assert F65537.counter.adds > 0


def test_decompress_counts_only_the_rectangular_product():
    rng = SeededRng(18)
    n, s = 16, 2
    h = helpers.random_hankel_like(F65537, n, s, 2, rng)
    g = compress(HankelOperator(n, s), h)
    F65537.counter.reset()
    decompress_hankel(g)
    assert F65537.counter.muls == n * n * g.width


# ---------------------------------------------------------------------------
# uniqueness and the inverse-displacement theorem
# ---------------------------------------------------------------------------


def test_operator_injectivity_spot_check():
    rng = SeededRng(19)
    op = HankelOperator(10, 2)
    a = DenseMatrix.random(F101, 10, 10, rng)
    b = DenseMatrix.random(F101, 10, 10, rng)
    assert a != b
    assert apply_displacement(op, a) != apply_displacement(op, b)


def test_round_trip_every_kind_small_batch():
    rng = SeededRng(20)
    for n, s in ((8, 1), (8, 2), (12, 4)):
        for _ in range(5):
            t = helpers.random_toeplitz_like(F65537, n, s, 2, rng)
            assert decompress(compress(ToeplitzOperator(n, s), t)) == t
            h = helpers.random_hankel_like(F65537, n, s, 2, rng)
            assert decompress(compress(HankelOperator(n, s), h)) == h
    for _ in range(5):
        op = VandermondeOperator(F65537, list(rng.residues(F65537, 8)))
        a = decompress(GeneratorPair(
            DenseMatrix.random(F65537, 8, 2, rng), DenseMatrix.random(F65537, 8, 2, rng), op))
        assert decompress(compress(op, a)) == a


def test_inverse_swaps_displacement_rank():
    # rank of the up-left displacement of A^{-1} equals the rank of the
    # down-right displacement of A, for planted displacement ranks
    rng = SeededRng(21)
    n = 12
    flip = DenseMatrix(F65537, np.eye(n, dtype=np.int64)[::-1].copy())
    for alpha in (1, 2, 3):
        for _ in range(3):
            a = helpers.random_toeplitz_like(F65537, n, 1, alpha, rng)
            if dense_rank(a) < n:
                continue
            plus_rank = displacement_rank(ToeplitzOperator(n, 1), a)
            inv = dense_inverse(a)
            minus = inv - block_shifted(inv, 1, down=-1, right=-1)
            assert dense_rank(minus) == plus_rank
            assert flip is not None
