#include "dsid/subspace.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

namespace dsid {

void SimConfig::validate() const {
    if (future_window < 1 || past_window < future_window) {
        throw InvalidArgument("need past_window >= future_window >= 1, got " +
                              std::to_string(past_window) + " / " +
                              std::to_string(future_window));
    }
    if (reg < 0.0) {
        throw InvalidArgument("ridge parameter must be >= 0, got " + std::to_string(reg));
    }
    if (order && *order < 1) {
        throw InvalidArgument("fixed model order must be >= 1");
    }
    if (max_order_candidates < 1) {
        throw InvalidArgument("order-candidate range must be >= 1");
    }
}

std::pair<Matrix, Matrix> build_data_matrices(const Matrix& omega, const Matrix& y,
                                              const SimConfig& cfg) {
    cfg.validate();
    if (omega.cols() != y.cols()) {
        throw DimensionError("omega and y series lengths differ: " +
                             std::to_string(omega.cols()) + " vs " + std::to_string(y.cols()));
    }
    const Index T = omega.cols();
    const Index fp = cfg.past_window;
    const Index ff = cfg.future_window;
    const Index Ns = T - fp - ff + 1;
    if (Ns < 1) {
        throw DegenerateData("horizon " + std::to_string(T) + " too short for windows " +
                             std::to_string(fp) + " + " + std::to_string(ff));
    }
    const Index q = omega.rows();
    const Index r = y.rows();
    Matrix Z(fp * q, Ns);
    Matrix Yf(ff * r, Ns);
    for (Index j = 0; j < Ns; ++j) {
        const Index k = fp + j;
        for (Index t = 0; t < fp; ++t) {
            Z.col(j).segment(t * q, q) = omega.col(k - fp + t);
        }
        for (Index t = 0; t < ff; ++t) {
            Yf.col(j).segment(t * r, r) = y.col(k + t);
        }
    }
    return {std::move(Z), std::move(Yf)};
}

namespace {

struct GramSolve {
    Matrix solution;  // solves (Gram [+ reg I]) X = Rhs
    double condition = std::numeric_limits<double>::infinity();
};

// Solves the normal equations on the sample-normalized Gram matrix. With
// ridge the system is positive definite. Without, this is plain ordinary
// least squares with no conditioning safeguards (QR without rank
// truncation): ill-conditioned Grams — lag-stacked regressors duplicate
// information — degrade the estimate instead of being silently repaired. We
// only refuse when there is no excitation at all or the solve breaks down
// outright.
GramSolve solve_normal_equations(const Matrix& gram, const Matrix& rhs, double reg) {
    GramSolve out;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the Gram matrix failed");
    }
    const double lam_max = eig.eigenvalues().maxCoeff();
    const double lam_min = eig.eigenvalues().minCoeff();
    if (lam_max <= 0.0) {
        throw IllConditionedData("regressor Gram matrix is zero; no excitation in the data",
                                 std::numeric_limits<double>::infinity());
    }
    out.condition = lam_min > 0.0 ? lam_max / lam_min : std::numeric_limits<double>::infinity();
    if (reg > 0.0) {
        Eigen::LLT<Matrix> llt(gram + reg * Matrix::Identity(gram.rows(), gram.cols()));
        if (llt.info() != Eigen::Success) {
            throw NumericalError("ridge system not positive definite");
        }
        out.solution = llt.solve(rhs);
        return out;
    }
    out.solution = gram.householderQr().solve(rhs);
    if (!out.solution.allFinite()) {
        throw IllConditionedData("ill-conditioned data matrix: ordinary least squares broke "
                                 "down on a singular Gram matrix",
                                 out.condition);
    }
    return out;
}

}  // namespace

Matrix estimate_markov(const Matrix& omega, const Matrix& y, const SimConfig& cfg) {
    auto [Z, Yf] = build_data_matrices(omega, y, cfg);
    const Index Ns = Z.cols();
    const Index r = y.rows();
    const Matrix Yc = Yf.topRows(r);  // y(k) over the valid range
    const Matrix gram = (Z * Z.transpose()) / static_cast<double>(Ns);
    const Matrix rhs = (Z * Yc.transpose()) / static_cast<double>(Ns);
    return solve_normal_equations(gram, rhs, cfg.reg).solution.transpose();
}

Index order_select(const Vector& singular_values, const std::optional<Index>& order,
                   Index max_candidates) {
    if (singular_values.size() == 0) {
        throw InvalidArgument("empty singular-value spectrum");
    }
    if (order) {
        return *order;
    }
    if (singular_values.size() < 2) {
        throw InvalidArgument("AUTO order selection needs at least 2 singular values");
    }
    const Index hi = std::min<Index>(max_candidates, singular_values.size() - 1);
    Index best = 1;
    double best_ratio = -1.0;
    for (Index i = 1; i <= hi; ++i) {
        const double denom = singular_values(i);
        const double ratio = denom > 0.0 ? singular_values(i - 1) / denom
                                         : std::numeric_limits<double>::infinity();
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    return best;
}

StateEstimate estimate_state_sequence(const Matrix& omega, const Matrix& y,
                                      const SimConfig& cfg) {
    auto [Z, Yf] = build_data_matrices(omega, y, cfg);
    const Index Ns = Z.cols();
    const Index q = omega.rows();
    const Index r = y.rows();
    const Index fp = cfg.past_window;
    const Index ff = cfg.future_window;

    const Matrix Yc = Yf.topRows(r);
    const Matrix gram = (Z * Z.transpose()) / static_cast<double>(Ns);
    const Matrix rhs = (Z * Yc.transpose()) / static_cast<double>(Ns);
    const auto solve = solve_normal_equations(gram, rhs, cfg.reg);
    const Matrix theta = solve.solution.transpose();  // r x fp*q, blocks [M_fp ... M_1]

    // Staircase predictor: row block i predicts y(k+i) from the past stack,
    // reusing the ARX Markov parameters shifted by i (contributions of
    // omega(k..k+i-1) are beyond the past window and drop out).
    Matrix Q = Matrix::Zero(ff * r, fp * q);
    for (Index i = 0; i < ff; ++i) {
        for (Index c = i; c < fp; ++c) {
            // M_j sits in theta block fp - j; here j = fp + i - c.
            Q.block(i * r, c * q, r, q) = theta.middleCols((c - i) * q, q);
        }
    }

    const Matrix F = Q * Z;  // ff*r x Ns, approximately O_ff * Xhat
    Eigen::SelfAdjointEigenSolver<Matrix> eig((F * F.transpose()) / static_cast<double>(Ns));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the predictor product failed");
    }
    // Eigenvalues ascending; flip to a non-increasing singular-value spectrum.
    const Index sz = eig.eigenvalues().size();
    Vector sv(sz);
    Matrix Usv(sz, sz);
    for (Index i = 0; i < sz; ++i) {
        sv(i) = std::sqrt(std::max(0.0, eig.eigenvalues()(sz - 1 - i)));
        Usv.col(i) = eig.eigenvectors().col(sz - 1 - i);
    }

    const Index n = order_select(sv, cfg.order, cfg.max_order_candidates);
    if (n > sz) {
        throw InvalidArgument("requested order " + std::to_string(n) +
                              " exceeds the spectrum size " + std::to_string(sz));
    }

    StateEstimate est;
    est.singular_values = sv;
    est.order_used = n;
    est.first_k = fp;
    est.gram_condition = solve.condition;
    if (sv(0) <= 0.0) {
        // identically zero predictor (e.g. zero outputs): zero state estimate
        est.P_x = Matrix::Zero(n, fp * q);
        est.Xhat = Matrix::Zero(n, Ns);
        return est;
    }
    // Same numerical-rank convention as the observability rank check: values
    // this far below the leading singular value are rounding noise, not rank.
    const double positive_tol =
        100.0 * std::numeric_limits<double>::epsilon() * sv(0) * static_cast<double>(sz);
    const Index positive = (sv.array() > positive_tol).count();
    if (n > positive) {
        throw DegenerateData("order " + std::to_string(n) + " exceeds the " +
                             std::to_string(positive) + " positive singular values");
    }
    const Vector scale = sv.head(n).array().sqrt().inverse();
    est.P_x = scale.asDiagonal() * Usv.leftCols(n).transpose() * Q;
    est.Xhat = est.P_x * Z;
    return est;
}

}  // namespace dsid
