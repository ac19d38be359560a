#pragma once

#include "dsid/types.hpp"

#include <Eigen/Sparse>

#include <optional>
#include <vector>

namespace dsid {

/// One subsystem of a chain-interconnected system:
///   x_i(k+1) = A x_i(k) + E_left x_{i-1}(k) + E_right x_{i+1}(k) + B u_i(k)
///   y_i(k)   = C x_i(k) + n_i(k)
/// E_left / E_right are absent at the chain endpoints.
struct LocalModel {
    Matrix A;
    std::optional<Matrix> E_left;
    std::optional<Matrix> E_right;
    Matrix B;
    Matrix C;

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index r() const { return C.rows(); }

    /// Checks internal dimension consistency; throws DimensionError.
    void validate() const;
};

/// The interconnection of N local subsystems. The assembled state matrix is
/// block-tridiagonal, the input and output matrices block-diagonal.
struct GlobalModel {
    std::vector<LocalModel> locals;

    Index N() const { return static_cast<Index>(locals.size()); }
    Index n() const { return locals.front().n(); }
    Index m() const { return locals.front().m(); }
    Index r() const { return locals.front().r(); }

    const LocalModel& local(Index i) const { return locals[static_cast<size_t>(i)]; }

    /// Dense assembled matrices (block-tridiagonal A, block-diagonal B, C).
    Matrix A_dense() const;
    Matrix B_dense() const;
    Matrix C_dense() const;

    /// Sparse assembled state matrix, for long simulations.
    Eigen::SparseMatrix<double> A_sparse() const;

    /// y = A_global * x without assembling anything.
    Vector apply_A(const Vector& x) const;
};

/// Block-diagonal change of state coordinates Q = diag(Q_1, ..., Q_N) that
/// preserves the interconnection sparsity pattern.
struct StructureSimilarity {
    std::vector<Matrix> Q;

    /// Largest condition number among the Q_i.
    double max_condition() const;
};

/// The two-state heat-diffusion local model used throughout the numerical
/// study. Constant matrices; both couplings present (interior template).
LocalModel make_heat_benchmark();

/// Validates the chain (endpoint couplings absent, interior both present,
/// identical local dimensions) and returns the assembled global model.
GlobalModel assemble_global(std::vector<LocalModel> locals);

/// Chain of N copies of the heat benchmark with endpoint couplings stripped.
GlobalModel make_benchmark_chain(Index N);

/// Transformed model: A_ii -> Q_i^{-1} A_ii Q_i, E_ij -> Q_i^{-1} E_ij Q_j,
/// B_i -> Q_i^{-1} B_i, C_i -> C_i Q_i. Same input-output map.
GlobalModel apply_similarity(const GlobalModel& model, const StructureSimilarity& sim);

}  // namespace dsid
