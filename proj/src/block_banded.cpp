#include "dsid/block_banded.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace dsid {

BlockBandedMatrix::BlockBandedMatrix(Index block_rows, Index block_cols, Index row_block_size,
                                     Index col_block_size, Index bandwidth)
    : brows_(block_rows), bcols_(block_cols), rbs_(row_block_size), cbs_(col_block_size),
      bw_(bandwidth) {
    if (brows_ < 1 || bcols_ < 1 || rbs_ < 1 || cbs_ < 1 || bw_ < 0) {
        throw InvalidArgument("block-banded matrix needs positive grid and block sizes");
    }
    blocks_.assign(static_cast<size_t>(brows_ * (2 * bw_ + 1)), Matrix());
    for (Index i = 0; i < brows_; ++i) {
        for (Index j = std::max<Index>(0, i - bw_); j <= std::min(bcols_ - 1, i + bw_); ++j) {
            blocks_[static_cast<size_t>(slot(i, j))] = Matrix::Zero(rbs_, cbs_);
        }
    }
}

Matrix& BlockBandedMatrix::block(Index i, Index j) {
    if (!in_band(i, j)) {
        throw InvalidArgument("block (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") is outside the declared band " + std::to_string(bw_));
    }
    return blocks_[static_cast<size_t>(slot(i, j))];
}

const Matrix& BlockBandedMatrix::block(Index i, Index j) const {
    return const_cast<BlockBandedMatrix*>(this)->block(i, j);
}

Matrix BlockBandedMatrix::to_dense() const {
    Matrix M = Matrix::Zero(rows(), cols());
    for (Index i = 0; i < brows_; ++i) {
        for (Index j = std::max<Index>(0, i - bw_); j <= std::min(bcols_ - 1, i + bw_); ++j) {
            M.block(i * rbs_, j * cbs_, rbs_, cbs_) = block(i, j);
        }
    }
    return M;
}

BlockBandedMatrix BlockBandedMatrix::from_dense(const Matrix& M, Index row_block_size,
                                                Index col_block_size, Index bandwidth,
                                                double tol) {
    if (M.rows() % row_block_size != 0 || M.cols() % col_block_size != 0) {
        throw DimensionError("dense matrix dimensions are not multiples of the block sizes");
    }
    const Index brows = M.rows() / row_block_size;
    const Index bcols = M.cols() / col_block_size;
    BlockBandedMatrix out(brows, bcols, row_block_size, col_block_size, bandwidth);
    for (Index i = 0; i < brows; ++i) {
        for (Index j = 0; j < bcols; ++j) {
            const auto blk = M.block(i * row_block_size, j * col_block_size,
                                     row_block_size, col_block_size);
            if (out.in_band(i, j)) {
                out.block(i, j) = blk;
            } else if (blk.cwiseAbs().maxCoeff() > tol) {
                throw InvalidArgument("dense matrix has a nonzero block (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ") outside bandwidth " +
                                      std::to_string(bandwidth));
            }
        }
    }
    return out;
}

BlockBandedMatrix BlockBandedMatrix::multiply(const BlockBandedMatrix& other) const {
    if (bcols_ != other.brows_ || cbs_ != other.rbs_) {
        throw DimensionError("block-banded product dimension mismatch");
    }
    const Index bw = std::min(bw_ + other.bw_, std::max(brows_, other.bcols_) - 1);
    BlockBandedMatrix out(brows_, other.bcols_, rbs_, other.cbs_, bw);
    for (Index i = 0; i < brows_; ++i) {
        const Index k_lo = std::max<Index>(0, i - bw_);
        const Index k_hi = std::min(bcols_ - 1, i + bw_);
        for (Index j = std::max<Index>(0, i - bw); j <= std::min(other.bcols_ - 1, i + bw); ++j) {
            Matrix acc = Matrix::Zero(rbs_, other.cbs_);
            for (Index k = std::max(k_lo, j - other.bw_); k <= std::min(k_hi, j + other.bw_); ++k) {
                acc.noalias() += block(i, k) * other.block(k, j);
            }
            out.block(i, j) = std::move(acc);
        }
    }
    return out;
}

BlockBandedMatrix BlockBandedMatrix::transpose_times_self() const {
    const Index bw = std::min(2 * bw_, bcols_ - 1);
    BlockBandedMatrix out(bcols_, bcols_, cbs_, cbs_, bw);
    for (Index i = 0; i < bcols_; ++i) {
        for (Index j = std::max<Index>(0, i - bw); j <= std::min(bcols_ - 1, i + bw); ++j) {
            Matrix acc = Matrix::Zero(cbs_, cbs_);
            const Index k_lo = std::max({Index(0), i - bw_, j - bw_});
            const Index k_hi = std::min({brows_ - 1, i + bw_, j + bw_});
            for (Index k = k_lo; k <= k_hi; ++k) {
                acc.noalias() += block(k, i).transpose() * block(k, j);
            }
            out.block(i, j) = std::move(acc);
        }
    }
    return out;
}

Vector BlockBandedMatrix::apply(const Vector& x) const {
    if (x.size() != cols()) {
        throw DimensionError("matvec length mismatch: " + std::to_string(x.size()) + " vs " +
                             std::to_string(cols()));
    }
    Vector y = Vector::Zero(rows());
    for (Index i = 0; i < brows_; ++i) {
        for (Index j = std::max<Index>(0, i - bw_); j <= std::min(bcols_ - 1, i + bw_); ++j) {
            y.segment(i * rbs_, rbs_).noalias() += block(i, j) * x.segment(j * cbs_, cbs_);
        }
    }
    return y;
}

Vector BlockBandedMatrix::apply_transpose(const Vector& x) const {
    if (x.size() != rows()) {
        throw DimensionError("transpose matvec length mismatch: " + std::to_string(x.size()) +
                             " vs " + std::to_string(rows()));
    }
    Vector y = Vector::Zero(cols());
    for (Index i = 0; i < brows_; ++i) {
        for (Index j = std::max<Index>(0, i - bw_); j <= std::min(bcols_ - 1, i + bw_); ++j) {
            y.segment(j * cbs_, cbs_).noalias() += block(i, j).transpose() * x.segment(i * rbs_, rbs_);
        }
    }
    return y;
}

void BlockBandedMatrix::dump_csv(std::ostream& os) const {
    os << "block_row,block_col,entries\n";
    char buf[64];
    for (Index i = 0; i < brows_; ++i) {
        for (Index j = std::max<Index>(0, i - bw_); j <= std::min(bcols_ - 1, i + bw_); ++j) {
            os << i << ',' << j;
            const Matrix& blk = block(i, j);
            for (Index rw = 0; rw < blk.rows(); ++rw) {
                for (Index c = 0; c < blk.cols(); ++c) {
                    std::snprintf(buf, sizeof(buf), "%.17g", blk(rw, c));
                    os << ',' << buf;
                }
            }
            os << "\n";
        }
    }
}

Index measured_block_bandwidth(const Matrix& M, Index row_block_size, Index col_block_size,
                               double tol) {
    if (M.rows() % row_block_size != 0 || M.cols() % col_block_size != 0) {
        throw DimensionError("dense matrix dimensions are not multiples of the block sizes");
    }
    const Index brows = M.rows() / row_block_size;
    const Index bcols = M.cols() / col_block_size;
    Index bw = 0;
    for (Index i = 0; i < brows; ++i) {
        for (Index j = 0; j < bcols; ++j) {
            const Index dist = i > j ? i - j : j - i;
            if (dist <= bw) continue;
            if (M.block(i * row_block_size, j * col_block_size, row_block_size, col_block_size)
                    .cwiseAbs()
                    .maxCoeff() > tol) {
                bw = dist;
            }
        }
    }
    return bw;
}

}  // namespace dsid
