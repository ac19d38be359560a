#pragma once

// Shared oracles for the test suite. Everything here is built densely and
// straight from the definitions, deliberately independent of the library's
// banded/permuted code paths, so the two can be checked against each other.

#include "dsid/lifting.hpp"
#include "dsid/model.hpp"
#include "dsid/rng.hpp"
#include "dsid/types.hpp"

#include <Eigen/Eigenvalues>

#include <cstdint>
#include <vector>

namespace dsid::testing {

/// Time-major extended observability matrix O_p = [C; CA; ...; CA^p],
/// (p+1)*N*r x N*n, from the dense assembled matrices.
inline Matrix dense_observability(const GlobalModel& model, Index p) {
    const Matrix A = model.A_dense();
    const Matrix C = model.C_dense();
    Matrix O((p + 1) * C.rows(), A.cols());
    Matrix power = Matrix::Identity(A.rows(), A.cols());
    for (Index tau = 0; tau <= p; ++tau) {
        O.middleRows(tau * C.rows(), C.rows()) = C * power;
        power = power * A;
    }
    return O;
}

/// Time-major impulse-response block Toeplitz G mapping the stacked inputs
/// col(u(k-p), ..., u(k-1)) to the stacked outputs col(y(k-p), ..., y(k)):
/// block (tau, e) = C A^{tau-1-e} B for tau > e, zero otherwise.
inline Matrix dense_toeplitz(const GlobalModel& model, Index p) {
    const Matrix A = model.A_dense();
    const Matrix B = model.B_dense();
    const Matrix C = model.C_dense();
    std::vector<Matrix> markov;  // markov[d] = C A^d B
    Matrix power = Matrix::Identity(A.rows(), A.cols());
    for (Index d = 0; d < p; ++d) {
        markov.push_back(C * power * B);
        power = power * A;
    }
    Matrix G = Matrix::Zero((p + 1) * C.rows(), p * B.cols());
    for (Index tau = 1; tau <= p; ++tau) {
        for (Index e = 0; e < tau; ++e) {
            G.block(tau * C.rows(), e * B.cols(), C.rows(), B.cols()) = markov[tau - 1 - e];
        }
    }
    return G;
}

/// Time-major input-to-state tail R = [A^{p-1}B, ..., AB, B], N*n x p*N*m,
/// so that x(k) = A^p x(k-p) + R col(u(k-p), ..., u(k-1)).
inline Matrix dense_input_tail(const GlobalModel& model, Index p) {
    const Matrix A = model.A_dense();
    const Matrix B = model.B_dense();
    Matrix R(A.rows(), p * B.cols());
    Matrix power = Matrix::Identity(A.rows(), A.cols());
    for (Index e = p - 1; e >= 0; --e) {  // rightmost block is B itself
        R.middleCols(e * B.cols(), B.cols()) = power * B;
        power = power * A;
    }
    return R;
}

/// Chain of N random subsystems with common local dimensions, scaled so the
/// assembled state matrix has the requested spectral radius (< 1 = stable).
inline GlobalModel random_chain(Index N, Index n, Index m, Index r, std::uint64_t seed,
                                double radius = 0.8) {
    std::vector<LocalModel> locals;
    for (Index i = 0; i < N; ++i) {
        LocalModel local;
        local.A = uniform_matrix(n, n, derive_seed(seed, 1, i));
        local.B = uniform_matrix(n, m, derive_seed(seed, 2, i));
        local.C = uniform_matrix(r, n, derive_seed(seed, 3, i));
        if (i > 0) local.E_left = 0.3 * uniform_matrix(n, n, derive_seed(seed, 4, i));
        if (i + 1 < N) local.E_right = 0.3 * uniform_matrix(n, n, derive_seed(seed, 5, i));
        locals.push_back(std::move(local));
    }
    GlobalModel model = assemble_global(std::move(locals));
    // Uniformly rescaling every state-coupling block rescales the assembled
    // spectrum by the same factor.
    const double rho = Eigen::EigenSolver<Matrix>(model.A_dense(), false)
                           .eigenvalues()
                           .cwiseAbs()
                           .maxCoeff();
    const double scale = radius / rho;
    for (auto& local : model.locals) {
        local.A *= scale;
        if (local.E_left) *local.E_left *= scale;
        if (local.E_right) *local.E_right *= scale;
    }
    return model;
}

/// Random block-diagonal similarity with well-conditioned blocks
/// (I + 0.4 * uniform perturbation).
inline StructureSimilarity random_similarity(Index N, Index n, std::uint64_t seed) {
    StructureSimilarity sim;
    for (Index i = 0; i < N; ++i) {
        sim.Q.push_back(Matrix::Identity(n, n) + 0.4 * uniform_matrix(n, n, derive_seed(seed, 7, i)));
    }
    return sim;
}

/// Relative difference in the Frobenius norm, guarded for zero references.
inline double rel_err(const Matrix& actual, const Matrix& expected) {
    const double ref = expected.norm();
    return ref > 0.0 ? (actual - expected).norm() / ref : (actual - expected).norm();
}

}  // namespace dsid::testing
