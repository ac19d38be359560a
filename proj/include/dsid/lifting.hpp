#pragma once

#include "dsid/block_banded.hpp"
#include "dsid/dataset.hpp"
#include "dsid/model.hpp"
#include "dsid/types.hpp"

#include <vector>

namespace dsid {

enum class SignalKind { Output, Input, Noise };

/// One subsystem's signal stacked over a time window, ascending in time:
/// outputs/noise over [k-p, k] (length (p+1)*r), inputs over [k-p, k-1]
/// (length p*m).
struct LiftedSignal {
    SignalKind kind;
    Index i = 0;  // subsystem index
    Index k = 0;  // window anchor
    Index p = 0;  // window depth
    Vector stacked;
};

/// series holds one subsystem's channels as rows (r x T or m x T).
LiftedSignal lift_time(const Matrix& series, Index k, Index p, SignalKind kind, Index i = 0);

/// Permutations relating the time-major stacking (all subsystems at k-p, then
/// k-p+1, ...) to the space-major stacking (all times for subsystem 0, then
/// subsystem 1, ...). Stored as index maps with the convention
///   structured[j] = time_major[perm[j]],
/// i.e. perm[j] is the time-major source index of structured position j.
struct PermutationPair {
    std::vector<Index> P_Y;  // size N*(p+1)*r
    std::vector<Index> P_U;  // size N*p*m
};

PermutationPair build_permutations(Index N, Index p, Index r, Index m);

/// y = P x for an index map: y[j] = x[perm[j]].
Vector apply_permutation(const std::vector<Index>& perm, const Vector& x);
/// y = Pᵀ x: y[perm[j]] = x[j].
Vector apply_permutation_transpose(const std::vector<Index>& perm, const Vector& x);
/// Dense P for desk-scale checks.
Matrix permutation_matrix(const std::vector<Index>& perm);

/// Time-major stacks 𝐘_{k-p}^k (outputs; p+1 slots) and 𝐔_{k-p}^{k-1}
/// (inputs; p slots), and their space-major counterparts 𝒴, 𝒰.
Vector stack_outputs_time_major(const DataSet& data, Index k, Index p);
Vector stack_inputs_time_major(const DataSet& data, Index k, Index p);
Vector stack_outputs_space_major(const DataSet& data, Index k, Index p);
Vector stack_inputs_space_major(const DataSet& data, Index k, Index p);

/// The classical extended observability matrix O_p together with the
/// permuted structured operators of Eq. (9)-(10):
///   𝒪_p = P_Y O_p          (block bandwidth p)
///   𝒢   = P_Y G_{p-1} P_Uᵀ (block bandwidth p-1)
///   ℛ   = R_{p-1} P_Uᵀ     (block bandwidth p-1)
struct StructuredLifted {
    Matrix O_dense;
    BlockBandedMatrix O_struct;  // N x N blocks of (p+1)r x n
    BlockBandedMatrix G_struct;  // N x N blocks of (p+1)r x pm
    BlockBandedMatrix R_struct;  // N x N blocks of n x pm
};

StructuredLifted structured_lifted_matrices(const GlobalModel& model, Index p);

}  // namespace dsid
