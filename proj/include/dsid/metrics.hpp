#pragma once

#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <Eigen/Dense>

#include <utility>
#include <vector>

namespace dsid {

/// Variance Accounted For of a single channel, in percent:
/// max(0, 1 - var(y_true - y_pred)/var(y_true)) * 100, clamped to [0, 100].
/// Non-finite predictions (diverged identified models) score 0.
double vaf(const Vector& y_true, const Vector& y_pred);

/// Row-wise VAF of multichannel series.
Vector vaf_per_channel(const Matrix& y_true, const Matrix& y_pred);

/// Eigenvalues of both matrices, greedily matched by distance in the complex
/// plane (nearest pair first).
struct EigenCompare {
    Eigen::VectorXcd eig_a;                      // eigenvalues of A_hat
    Eigen::VectorXcd eig_b;                      // eigenvalues of A_true
    std::vector<std::pair<Index, Index>> pairs;  // (index into eig_a, index into eig_b)
    Vector distances;                            // per matched pair
    double max_distance = 0;
};

EigenCompare eigen_compare(const Matrix& A_hat, const Matrix& A_true);

/// Per-subsystem similarity fit: the Q_i best explaining Eq. (23),
///   Q_i Â_ii = A_ii Q_i, Q_i B̂_i = B_i, Ĉ_i = C_i Q_i   (solved jointly),
/// with the coupling relations Q_i Ê_ij = E_ij Q_j evaluated as residuals
/// afterwards. Diagnostic only; no exactness claim on noisy runs.
struct SimilarityFit {
    std::vector<Matrix> Q;
    Vector residuals;  // per subsystem, relative
    double max_residual = 0;
    std::vector<Index> singular;  // subsystems whose fitted Q_i is singular
};

SimilarityFit similarity_fit(const GlobalModel& identified, const GlobalModel& truth);

}  // namespace dsid
