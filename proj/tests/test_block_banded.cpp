#include "dsid/block_banded.hpp"

#include "dsid/rng.hpp"
#include "dsid/types.hpp"
#include "helpers.hpp"

#include <doctest.h>

using namespace dsid;
using dsid::testing::rel_err;

namespace {

/// Random block-banded test matrix with every in-band block filled.
BlockBandedMatrix random_banded(Index brows, Index bcols, Index rbs, Index cbs, Index bw,
                                std::uint64_t seed) {
    BlockBandedMatrix M(brows, bcols, rbs, cbs, bw);
    for (Index i = 0; i < brows; ++i) {
        for (Index j = 0; j < bcols; ++j) {
            if (M.in_band(i, j)) {
                M.block(i, j) = uniform_matrix(rbs, cbs, derive_seed(seed, i, j));
            }
        }
    }
    return M;
}

}  // namespace

TEST_CASE("construction yields an all-zero matrix of the declared shape") {
    const BlockBandedMatrix M(4, 5, 2, 3, 1);
    CHECK(M.rows() == 8);
    CHECK(M.cols() == 15);
    CHECK(M.bandwidth() == 1);
    CHECK(M.to_dense() == Matrix::Zero(8, 15));
}

TEST_CASE("in-band predicate and block access respect the band") {
    BlockBandedMatrix M(4, 4, 2, 2, 1);
    CHECK(M.in_band(0, 0));
    CHECK(M.in_band(0, 1));
    CHECK_FALSE(M.in_band(0, 2));
    CHECK_FALSE(M.in_band(3, 0));
    CHECK_FALSE(M.in_band(-1, 0));
    CHECK_FALSE(M.in_band(0, 4));

    M.block(2, 1) = Matrix::Ones(2, 2);
    CHECK(M.to_dense().block(4, 2, 2, 2) == Matrix::Ones(2, 2));
    CHECK_THROWS_AS(M.block(0, 3), InvalidArgument);
    CHECK_THROWS_AS(std::as_const(M).block(3, 0), InvalidArgument);
}

TEST_CASE("dense round trip preserves the matrix and polices the band") {
    const BlockBandedMatrix M = random_banded(5, 5, 2, 2, 1, 17);
    const Matrix dense = M.to_dense();
    const BlockBandedMatrix back = BlockBandedMatrix::from_dense(dense, 2, 2, 1);
    CHECK(back.to_dense() == dense);

    SUBCASE("out-of-band mass is rejected") {
        Matrix bad = dense;
        bad(0, 9) = 0.5;  // block (0, 4), far outside bandwidth 1
        CHECK_THROWS_AS(BlockBandedMatrix::from_dense(bad, 2, 2, 1), InvalidArgument);
        // but tolerated when within tol
        bad(0, 9) = 1e-14;
        const BlockBandedMatrix cleaned = BlockBandedMatrix::from_dense(bad, 2, 2, 1, 1e-12);
        CHECK(cleaned.to_dense()(0, 9) == 0.0);
    }

    SUBCASE("a wider declared band also accepts it") {
        CHECK(BlockBandedMatrix::from_dense(dense, 2, 2, 3).to_dense() == dense);
    }
}

TEST_CASE("banded product matches the dense product") {
    const BlockBandedMatrix A = random_banded(6, 6, 2, 3, 1, 3);
    const BlockBandedMatrix B = random_banded(6, 6, 3, 2, 2, 4);
    const BlockBandedMatrix C = A.multiply(B);
    CHECK(C.bandwidth() == 3);  // sum of the operand bands
    CHECK(rel_err(C.to_dense(), A.to_dense() * B.to_dense()) < 1e-13);
}

TEST_CASE("transpose_times_self matches dense Gram computation") {
    const BlockBandedMatrix A = random_banded(6, 6, 3, 2, 2, 9);
    const BlockBandedMatrix G = A.transpose_times_self();
    CHECK(G.bandwidth() == 4);  // 2 * operand band
    const Matrix dense = A.to_dense();
    CHECK(rel_err(G.to_dense(), dense.transpose() * dense) < 1e-13);
}

TEST_CASE("matrix-vector application agrees with the dense form") {
    const BlockBandedMatrix A = random_banded(5, 7, 2, 3, 2, 23);
    const Vector x = gaussian_vector(A.cols(), 1);
    const Vector y = gaussian_vector(A.rows(), 2);
    CHECK((A.apply(x) - A.to_dense() * x).norm() < 1e-13 * x.norm());
    CHECK((A.apply_transpose(y) - A.to_dense().transpose() * y).norm() < 1e-13 * y.norm());
}

TEST_CASE("measured block bandwidth detects the tight band") {
    BlockBandedMatrix M(5, 5, 2, 2, 2);
    CHECK(measured_block_bandwidth(M.to_dense(), 2, 2) == 0);  // zero matrix

    M.block(2, 2) = Matrix::Ones(2, 2);
    CHECK(measured_block_bandwidth(M.to_dense(), 2, 2) == 0);

    M.block(1, 2) = Matrix::Ones(2, 2);
    CHECK(measured_block_bandwidth(M.to_dense(), 2, 2) == 1);

    M.block(4, 2) = 1e-9 * Matrix::Ones(2, 2);
    CHECK(measured_block_bandwidth(M.to_dense(), 2, 2) == 2);
    // small entries fall below an explicit tolerance
    CHECK(measured_block_bandwidth(M.to_dense(), 2, 2, 1e-6) == 1);
}

TEST_CASE("bad constructions are rejected") {
    CHECK_THROWS_AS(BlockBandedMatrix(0, 3, 2, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(BlockBandedMatrix(3, 3, 0, 2, 1), InvalidArgument);
    CHECK_THROWS_AS(BlockBandedMatrix(3, 3, 2, 2, -1), InvalidArgument);
    // from_dense needs dimensions divisible by the block sizes
    CHECK_THROWS_AS(BlockBandedMatrix::from_dense(Matrix::Zero(5, 6), 2, 2, 1), DimensionError);
}
