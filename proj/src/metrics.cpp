#include "dsid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dsid {

double vaf(const Vector& y_true, const Vector& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DimensionError("VAF series lengths differ: " + std::to_string(y_true.size()) +
                             " vs " + std::to_string(y_pred.size()));
    }
    if (y_true.size() < 2) {
        throw InvalidArgument("VAF needs at least 2 samples");
    }
    auto variance = [](const Vector& v) {
        const double mean = v.mean();
        return (v.array() - mean).square().sum() / static_cast<double>(v.size());
    };
    const double var_true = variance(y_true);
    if (var_true <= 0.0) {
        throw DegenerateData("VAF undefined for a zero-variance reference signal");
    }
    if (!y_pred.allFinite()) {
        return 0.0;
    }
    const double score = (1.0 - variance(y_true - y_pred) / var_true) * 100.0;
    return std::clamp(score, 0.0, 100.0);
}

Vector vaf_per_channel(const Matrix& y_true, const Matrix& y_pred) {
    if (y_true.rows() != y_pred.rows()) {
        throw DimensionError("VAF channel counts differ");
    }
    Vector out(y_true.rows());
    for (Index ch = 0; ch < y_true.rows(); ++ch) {
        out(ch) = vaf(y_true.row(ch).transpose(), y_pred.row(ch).transpose());
    }
    return out;
}

EigenCompare eigen_compare(const Matrix& A_hat, const Matrix& A_true) {
    if (A_hat.rows() != A_hat.cols() || A_true.rows() != A_true.cols() ||
        A_hat.rows() != A_true.rows()) {
        throw DimensionError("eigen_compare needs square matrices of equal size");
    }
    EigenCompare cmp;
    cmp.eig_a = Eigen::EigenSolver<Matrix>(A_hat, false).eigenvalues();
    cmp.eig_b = Eigen::EigenSolver<Matrix>(A_true, false).eigenvalues();

    const Index sz = cmp.eig_a.size();
    std::vector<bool> used_a(static_cast<size_t>(sz), false);
    std::vector<bool> used_b(static_cast<size_t>(sz), false);
    cmp.distances.resize(sz);
    for (Index step = 0; step < sz; ++step) {
        double best = std::numeric_limits<double>::infinity();
        Index bi = -1, bj = -1;
        for (Index i = 0; i < sz; ++i) {
            if (used_a[static_cast<size_t>(i)]) continue;
            for (Index j = 0; j < sz; ++j) {
                if (used_b[static_cast<size_t>(j)]) continue;
                const double d = std::abs(cmp.eig_a(i) - cmp.eig_b(j));
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        }
        used_a[static_cast<size_t>(bi)] = true;
        used_b[static_cast<size_t>(bj)] = true;
        cmp.pairs.emplace_back(bi, bj);
        cmp.distances(step) = best;
        cmp.max_distance = std::max(cmp.max_distance, best);
    }
    return cmp;
}

namespace {

// vec(M) column-major, matching the Kronecker identity vec(AXB) = (Bᵀ⊗A)vec(X).
Vector vec(const Matrix& M) {
    return Eigen::Map<const Vector>(M.data(), M.size());
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i) {
        for (Index j = 0; j < A.cols(); ++j) {
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
        }
    }
    return K;
}

}  // namespace

SimilarityFit similarity_fit(const GlobalModel& identified, const GlobalModel& truth) {
    if (identified.N() != truth.N() || identified.n() != truth.n() ||
        identified.m() != truth.m() || identified.r() != truth.r()) {
        throw DimensionError("identified and true models have different dimensions");
    }
    const Index N = truth.N();
    const Index n = truth.n();
    const Matrix I_n = Matrix::Identity(n, n);

    SimilarityFit fit;
    fit.Q.reserve(static_cast<size_t>(N));
    for (Index i = 0; i < N; ++i) {
        const auto& est = identified.local(i);
        const auto& tru = truth.local(i);
        // Stack the Q_i-only relations of Eq. (23) as linear equations in
        // vec(Q_i): Q Â - A Q = 0, Q B̂ = B, C Q = Ĉ.
        Matrix lhs(n * n + n * tru.m() + tru.r() * n, n * n);
        Vector rhs(lhs.rows());
        Index at = 0;
        lhs.middleRows(at, n * n) = kron(est.A.transpose(), I_n) - kron(I_n, tru.A);
        rhs.segment(at, n * n).setZero();
        at += n * n;
        lhs.middleRows(at, n * tru.m()) = kron(est.B.transpose(), I_n);
        rhs.segment(at, n * tru.m()) = vec(tru.B);
        at += n * tru.m();
        lhs.middleRows(at, tru.r() * n) = kron(I_n, tru.C);
        rhs.segment(at, tru.r() * n) = vec(est.C);

        const Vector q = lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
        fit.Q.push_back(Eigen::Map<const Matrix>(q.data(), n, n));
        Eigen::JacobiSVD<Matrix> svd(fit.Q.back());
        const auto& sv = svd.singularValues();
        if (sv(0) <= 0.0 ||
            sv(sv.size() - 1) < 100.0 * std::numeric_limits<double>::epsilon() * sv(0)) {
            fit.singular.push_back(i);
        }
    }

    // Residuals over every relation, couplings included, now that all Q are in.
    fit.residuals.resize(N);
    for (Index i = 0; i < N; ++i) {
        const auto& est = identified.local(i);
        const auto& tru = truth.local(i);
        const Matrix& Q = fit.Q[static_cast<size_t>(i)];
        double num = (Q * est.A - tru.A * Q).squaredNorm() + (Q * est.B - tru.B).squaredNorm() +
                     (tru.C * Q - est.C).squaredNorm();
        double den = (tru.A * Q).squaredNorm() + tru.B.squaredNorm() + tru.C.squaredNorm();
        if (tru.E_left && est.E_left) {
            const Matrix& Qp = fit.Q[static_cast<size_t>(i - 1)];
            num += (Q * *est.E_left - *tru.E_left * Qp).squaredNorm();
            den += (*tru.E_left * Qp).squaredNorm();
        }
        if (tru.E_right && est.E_right) {
            const Matrix& Qn = fit.Q[static_cast<size_t>(i + 1)];
            num += (Q * *est.E_right - *tru.E_right * Qn).squaredNorm();
            den += (*tru.E_right * Qn).squaredNorm();
        }
        fit.residuals(i) = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
        fit.max_residual = std::max(fit.max_residual, fit.residuals(i));
    }
    return fit;
}

}  // namespace dsid
