#pragma once

#include "dsid/block_banded.hpp"
#include "dsid/dataset.hpp"
#include "dsid/lifting.hpp"
#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <optional>

namespace dsid {

/// Finite-time observability Gramian 𝒥_2p = 𝒪_pᵀ𝒪_p of Eq. (11)-(12) with
/// its dense inverse and the scalars entering the Theorem-2 envelope.
struct GramianBundle {
    Matrix J;           // Nn x Nn, symmetric positive definite, block bandwidth <= 2p
    Matrix D;           // J^{-1}
    double kappa = 0;   // condition number of J
    double eig_min = 0; // extreme eigenvalues of J (J is symmetric PD, so
    double eig_max = 0; //   singular values and eigenvalues coincide)
    Index g = 0;        // scalar half-bandwidth of J: 2p*n + (n-1)
    Index p = 0;
};

/// Exponential off-diagonal decay of D (Theorem 2): |d_ij| <= c * lambda^|i-j|.
struct DecayEnvelope {
    double c = 0;
    double lambda = 0;
};

struct RankReport {
    Index rank = 0;
    bool full = false;
    std::optional<Index> nu;  // smallest p' <= p reaching full rank, if any
};

/// Default numerical-rank threshold factor: values below
/// 100 * eps * max_value * max(rows, cols) count as zero.
inline constexpr double kRankSafety = 100.0;

/// Throws RankDeficientGramian when J is numerically singular (p < nu or
/// unobservable model).
GramianBundle finite_time_gramian(const GlobalModel& model, Index p);

/// Numerical rank of 𝒪_p via singular values.
RankReport observability_rank_check(const GlobalModel& model, Index p);

/// Constants of Eq. (14): lambda = ((sqrt(k)-1)/(sqrt(k)+1))^(1/g),
/// c = ||D||_2 * max{1, (1+sqrt(k))^2/(2k)}.
DecayEnvelope decay_envelope(const GramianBundle& bundle);

/// Definition 3: keep entries with |i-j| <= s, zero the rest.
Matrix band_truncate(const Matrix& D, Index s);

/// The paper's D̆_t: scalar truncation at s = n*t viewed block-wise.
BlockBandedMatrix band_truncate_blocks(const Matrix& D, Index n, Index t);

/// Proposition 1 / Eq. (16): k1 = 2 lambda^{s+1} (1 - lambda^{Nn-s}) / (1 - lambda)
/// and the induced bound c*k1 on ||D - D̆||_1.
struct TruncationBound {
    double k1 = 0;
    double bound = 0;
};

TruncationBound truncation_bound(const DecayEnvelope& envelope, Index s, Index N, Index n);

/// Theorem-1 state reconstruction with the full inverse (t absent) or the
/// Eq. (17) approximation with D̆_t. Caches everything that does not depend
/// on the data, so sweeping k is cheap.
class StateReconstructor {
public:
    StateReconstructor(const GlobalModel& model, Index p, std::optional<Index> t = std::nullopt);

    /// x̆(k) per Eq. (12)/(17); requires k >= p, k < data.T(). The noise term
    /// is taken as zero (unavailable at identification time).
    Vector reconstruct(const DataSet& data, Index k) const;

    const GramianBundle& gramian() const { return gramian_; }

private:
    GlobalModel model_;
    Index p_;
    std::optional<Index> t_;
    StructuredLifted lifted_;
    GramianBundle gramian_;
    Matrix D_used_;  // full D or its banded truncation
};

/// One-shot convenience wrapper around StateReconstructor.
Vector reconstruct_state(const GlobalModel& model, const DataSet& data, Index p,
                         std::optional<Index> t, Index k);

}  // namespace dsid
