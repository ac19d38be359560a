#include "dsid/gramian.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>

namespace dsid {

GramianBundle finite_time_gramian(const GlobalModel& model, Index p) {
    if (p < 1) {
        throw InvalidArgument("gramian needs p >= 1, got " + std::to_string(p));
    }
    const auto lifted = structured_lifted_matrices(model, p);
    GramianBundle bundle;
    bundle.p = p;
    bundle.g = 2 * p * model.n() + (model.n() - 1);
    bundle.J = lifted.O_struct.transpose_times_self().to_dense();

    Eigen::SelfAdjointEigenSolver<Matrix> eig(bundle.J);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the Gramian failed");
    }
    bundle.eig_min = eig.eigenvalues().minCoeff();
    bundle.eig_max = eig.eigenvalues().maxCoeff();
    const double thresh = kRankSafety * std::numeric_limits<double>::epsilon() *
                          std::max(bundle.eig_max, 0.0) * static_cast<double>(bundle.J.rows());
    const Index rank = (eig.eigenvalues().array() > thresh).count();
    if (rank < bundle.J.rows()) {
        throw RankDeficientGramian("finite-time Gramian is numerically singular (rank " +
                                       std::to_string(rank) + " of " +
                                       std::to_string(bundle.J.rows()) +
                                       "); increase p to at least the observability index",
                                   rank);
    }
    bundle.kappa = bundle.eig_max / bundle.eig_min;

    Eigen::LLT<Matrix> llt(bundle.J);
    if (llt.info() != Eigen::Success) {
        throw RankDeficientGramian("Cholesky factorization of the Gramian failed", rank);
    }
    bundle.D = llt.solve(Matrix::Identity(bundle.J.rows(), bundle.J.cols()));
    return bundle;
}

RankReport observability_rank_check(const GlobalModel& model, Index p) {
    if (p < 1) {
        throw InvalidArgument("rank check needs p >= 1, got " + std::to_string(p));
    }
    const Index full_rank = model.N() * model.n();
    auto rank_at = [&](Index depth) {
        const Matrix O = structured_lifted_matrices(model, depth).O_struct.to_dense();
        Eigen::BDCSVD<Matrix> svd(O);
        const auto& sv = svd.singularValues();
        if (sv.size() == 0 || sv(0) <= 0.0) return Index(0);
        const double thresh = kRankSafety * std::numeric_limits<double>::epsilon() * sv(0) *
                              static_cast<double>(std::max(O.rows(), O.cols()));
        return static_cast<Index>((sv.array() > thresh).count());
    };
    RankReport report;
    report.rank = rank_at(p);
    report.full = report.rank == full_rank;
    for (Index q = 1; q <= p; ++q) {
        if (rank_at(q) == full_rank) {
            report.nu = q;
            break;
        }
    }
    return report;
}

DecayEnvelope decay_envelope(const GramianBundle& bundle) {
    if (bundle.kappa < 1.0) {
        throw NumericalError("Gramian condition number " + std::to_string(bundle.kappa) +
                             " < 1 signals an upstream numerical failure");
    }
    const double sk = std::sqrt(bundle.kappa);
    DecayEnvelope env;
    env.lambda = std::pow((sk - 1.0) / (sk + 1.0), 1.0 / static_cast<double>(bundle.g));
    // ||D||_2 = 1/eig_min since J is symmetric positive definite.
    env.c = (1.0 / bundle.eig_min) * std::max(1.0, (1.0 + sk) * (1.0 + sk) / (2.0 * bundle.kappa));
    return env;
}

Matrix band_truncate(const Matrix& D, Index s) {
    if (s < 0) {
        throw InvalidArgument("truncation half-bandwidth must be >= 0");
    }
    Matrix out = Matrix::Zero(D.rows(), D.cols());
    for (Index i = 0; i < D.rows(); ++i) {
        const Index lo = std::max<Index>(0, i - s);
        const Index hi = std::min(D.cols() - 1, i + s);
        if (lo <= hi) out.row(i).segment(lo, hi - lo + 1) = D.row(i).segment(lo, hi - lo + 1);
    }
    return out;
}

BlockBandedMatrix band_truncate_blocks(const Matrix& D, Index n, Index t) {
    return BlockBandedMatrix::from_dense(band_truncate(D, n * t), n, n, t);
}

TruncationBound truncation_bound(const DecayEnvelope& envelope, Index s, Index N, Index n) {
    if (envelope.lambda < 0.0 || envelope.lambda >= 1.0) {
        if (envelope.lambda == 1.0) {
            throw NumericalError("decay rate lambda = 1: matrix too ill-conditioned for Eq. (16)");
        }
        throw InvalidArgument("decay rate must lie in [0, 1)");
    }
    if (s < 0 || s > N * n) {
        throw InvalidArgument("truncation bandwidth s must lie in [0, N*n]");
    }
    TruncationBound out;
    const double lam = envelope.lambda;
    if (lam == 0.0) {
        out.k1 = 0.0;
    } else {
        out.k1 = 2.0 * std::pow(lam, static_cast<double>(s + 1)) *
                 (1.0 - std::pow(lam, static_cast<double>(N * n - s))) / (1.0 - lam);
    }
    out.bound = envelope.c * out.k1;
    return out;
}

StateReconstructor::StateReconstructor(const GlobalModel& model, Index p, std::optional<Index> t)
    : model_(model), p_(p), t_(t), lifted_(structured_lifted_matrices(model, p)),
      gramian_(finite_time_gramian(model, p)) {
    if (t_) {
        D_used_ = band_truncate_blocks(gramian_.D, model.n(), *t_).to_dense();
    } else {
        D_used_ = gramian_.D;
    }
}

Vector StateReconstructor::reconstruct(const DataSet& data, Index k) const {
    if (k < p_ || k >= data.T()) {
        throw InvalidArgument("reconstruction time " + std::to_string(k) +
                              " outside the valid range [" + std::to_string(p_) + ", " +
                              std::to_string(data.T() - 1) + "]");
    }
    if (data.N != model_.N() || data.m != model_.m() || data.r != model_.r()) {
        throw DimensionError("dataset dimensions do not match the model");
    }
    const Vector Y = stack_outputs_space_major(data, k, p_);
    const Vector U = stack_inputs_space_major(data, k, p_);
    // Eq. (12): x(k) = A^p D (𝒪ᵀ𝒴 - 𝒪ᵀ𝒢𝒰 - 𝒪ᵀ𝒩) + ℛ𝒰, noise term zero.
    const Vector z = lifted_.O_struct.apply_transpose(Y - lifted_.G_struct.apply(U));
    Vector w = D_used_ * z;
    for (Index e = 0; e < p_; ++e) {
        w = model_.apply_A(w);
    }
    return w + lifted_.R_struct.apply(U);
}

Vector reconstruct_state(const GlobalModel& model, const DataSet& data, Index p,
                         std::optional<Index> t, Index k) {
    return StateReconstructor(model, p, t).reconstruct(data, k);
}

}  // namespace dsid
