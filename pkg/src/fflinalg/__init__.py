"""Exact linear algebra over prime fields.

Sparse-matrix inversion through block Krylov spaces and explicit block
Hankel inversion, displacement-rank compression and O(n^2) decompression
for Toeplitz/Hankel/Vandermonde/Cauchy structure, certified rank and
nullspace computation, and drivers for simplicial homology and group-ring
units.
"""

from .field import FieldElement, OpCounter, PrimeField, SeededRng, is_prime
from .matrix import (
    BlockView,
    DenseMatrix,
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
from .structured import (
    anti_lower_block_hankel,
    block_diagonal,
    block_hankel,
    block_toeplitz,
    lower_block_toeplitz,
    shift_matrix,
    upper_block_toeplitz,
    vandermonde,
)
from .displacement import (
    CauchyOperator,
    GeneratorPair,
    HankelOperator,
    ToeplitzOperator,
    VandermondeOperator,
    apply_displacement,
    block_shifted,
    compress,
    decompress,
    decompress_cauchy,
    decompress_hankel,
    decompress_toeplitz,
    decompress_vandermonde,
    displacement_rank,
    sum_along_antidiagonals,
    sum_along_diagonals,
)
from .geninv import GeneratorStrategy, block_struct_inv, inverse_generators
from .krylov import (
    KrylovBasis,
    Preconditioner,
    block_projection,
    build_block_hankel_gram,
    build_krylov,
    horner_left,
    horner_right,
    matrix_inv,
    offdiag_recover,
)
from .rank import (
    RankCertificate,
    RankPreconditioner,
    berlekamp_massey,
    rank_and_nullspace,
    rank_estimate,
    schur_complement_check,
)
from .costmodel import (
    ExponentReport,
    OmegaTable,
    bundled_table,
    choose_blocking,
    load_table,
    omega_of_k,
    solve_crossing,
)
from .apps import (
    GroupRingElement,
    MetacyclicGroup,
    SimplicialComplex,
    betti_numbers,
    boundary_matrix,
    group_ring_product,
    group_ring_unit,
    load_complex,
    load_group_ring_element,
    right_multiplication_matrix,
)
from . import errors

__version__ = "0.1.0"
