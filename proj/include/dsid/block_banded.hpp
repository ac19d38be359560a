#pragma once

#include "dsid/types.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace dsid {

/// Block matrix with uniform block sizes where block (i, j) is zero whenever
/// |i - j| > bandwidth. Only in-band blocks are stored (dense per block); the
/// band is a declared upper bound, so in-band blocks may still be zero.
class BlockBandedMatrix {
public:
    BlockBandedMatrix() = default;

    /// Zero matrix with the given block grid and declared block bandwidth.
    BlockBandedMatrix(Index block_rows, Index block_cols, Index row_block_size,
                      Index col_block_size, Index bandwidth);

    Index block_rows() const { return brows_; }
    Index block_cols() const { return bcols_; }
    Index row_block_size() const { return rbs_; }
    Index col_block_size() const { return cbs_; }
    Index bandwidth() const { return bw_; }
    Index rows() const { return brows_ * rbs_; }
    Index cols() const { return bcols_ * cbs_; }

    bool in_band(Index i, Index j) const {
        return i >= 0 && i < brows_ && j >= 0 && j < bcols_ && (i > j ? i - j : j - i) <= bw_;
    }

    /// In-band block access; throws InvalidArgument outside the band.
    Matrix& block(Index i, Index j);
    const Matrix& block(Index i, Index j) const;

    Matrix to_dense() const;

    /// Reinterprets a dense matrix; throws InvalidArgument if any entry
    /// outside the declared band exceeds `tol` in magnitude.
    static BlockBandedMatrix from_dense(const Matrix& M, Index row_block_size,
                                        Index col_block_size, Index bandwidth,
                                        double tol = 0.0);

    /// Banded product; the result band is the sum of the operand bands
    /// (clipped to the grid).
    BlockBandedMatrix multiply(const BlockBandedMatrix& other) const;

    /// thisᵀ · this, band-aware; result bandwidth 2·bw (Eq. 11 uses this for
    /// 𝒥 = 𝒪ᵀ𝒪).
    BlockBandedMatrix transpose_times_self() const;

    Vector apply(const Vector& x) const;
    Vector apply_transpose(const Vector& x) const;

    /// Debug dump: one CSV row (block_row, block_col, flattened block) per
    /// stored in-band block.
    void dump_csv(std::ostream& os) const;

private:
    Index slot(Index i, Index j) const { return i * (2 * bw_ + 1) + (j - i + bw_); }

    Index brows_ = 0, bcols_ = 0, rbs_ = 0, cbs_ = 0, bw_ = 0;
    std::vector<Matrix> blocks_;
};

/// Smallest block bandwidth covering every entry of M with |entry| > tol,
/// for the given uniform block sizes. Used to check declared bands are tight.
Index measured_block_bandwidth(const Matrix& M, Index row_block_size, Index col_block_size,
                               double tol = 0.0);

}  // namespace dsid
