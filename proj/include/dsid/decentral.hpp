#pragma once

#include "dsid/dataset.hpp"
#include "dsid/model.hpp"
#include "dsid/subspace.hpp"
#include "dsid/types.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dsid {

/// The five §V input selections plus the general Eq. (19) form.
enum class OmegaVariant { V1 = 1, V2 = 2, V3 = 3, V4 = 4, V5 = 5, General = 6 };

OmegaVariant omega_variant_from_string(const std::string& name);
std::string to_string(OmegaVariant variant);

/// Shape of the neighborhood input vector Ω̆_i:
///   V1      u_i(k)
///   V2      col(y_{i-1}(k), y_i(k), y_{i+1}(k), u_i(k))
///   V3      col(𝒴_{j,k-1}^k for j in [i-1,i+1], u_i(k), u_j(k-1) for j in [i-1,i+1])
///   V4      col(y_j(k-1) for j in [i-1,i+4], u_i(k), u_j(k-1) for j in [i-1,i+4])
///   V5      col(𝒴_{j,k-1}^k for j in [i-1,i+4], u_i(k), u_j(k-1) for j in [i-1,i+4])
///   General col(𝒴_{j,k-p}^k for j in [i-1-2p-t, i+1+2p+t], u_i(k),
///               𝒰_{j,k-p}^{k-1} for j in [i-3p-t, i+3p+t])           (Eq. 19)
/// Out-of-range neighbor indices are dropped (boundary truncation). V3/V5
/// fix the lifting depth at 1 as written in the paper; p only enters General.
struct OmegaSpec {
    OmegaVariant variant = OmegaVariant::V2;
    Index p = 1;
    Index t = 1;
    std::vector<Index> t_per_subsystem;  // optional per-subsystem override of t

    Index t_for(Index i) const;
    /// Deepest lag used, i.e. the earliest k at which Ω̆_i(k) exists.
    Index k_min() const;
    void validate() const;
};

/// Ω̆_i(k) as a single stacked vector.
Vector build_local_input(Index i, const DataSet& data, const OmegaSpec& spec, Index k);

/// Columns Ω̆_i(k) for k = spec.k_min() .. T-1 (column j is time k_min + j).
Matrix build_local_input_series(Index i, const DataSet& data, const OmegaSpec& spec);

/// Algorithm 1 steps 1-2 for one subsystem: SIM with omega = Ω̆_i series and
/// y = y_i. first_k in the returned estimate is absolute time.
StateEstimate identify_local_state(Index i, const DataSet& data, const OmegaSpec& spec,
                                   const SimConfig& cfg);

/// Eq. (24): ordinary least squares of x̂_i(k+1) on (x̂_i, x̂_{i-1}, x̂_{i+1},
/// u_i) and of y_i(k) on x̂_i(k). All series must be column-aligned on the
/// same time range; absent neighbors are skipped (boundary subsystems).
LocalModel fit_local_matrices(const std::optional<Matrix>& xhat_prev, const Matrix& xhat_i,
                              const std::optional<Matrix>& xhat_next, const Matrix& u_i,
                              const Matrix& y_i);

/// Output of Algorithm 1. `model` is present when every subsystem succeeded;
/// per-subsystem partial results are kept for diagnosis either way.
struct IdentifiedGlobal {
    std::optional<GlobalModel> model;
    std::vector<std::optional<LocalModel>> locals;
    std::vector<std::optional<StateEstimate>> states;  // only the computed ones
    std::vector<std::pair<Index, std::string>> failures;
    OmegaSpec spec;
    SimConfig cfg;
    bool shared = false;
};

/// Algorithm 1. With share_model (and verified identical locals) the SIM is
/// trained once per boundary-equivalence class of Ω̆ shapes and the fitted
/// matrices are replicated per class — the paper's "three identification
/// experiments" idea. Sharing also pins one similarity basis per class, so
/// the replicated couplings stay consistent.
IdentifiedGlobal run_algorithm1(const DataSet& data, const OmegaSpec& spec, const SimConfig& cfg,
                                bool share_model);

}  // namespace dsid
