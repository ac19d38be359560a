#include "dsid/lifting.hpp"

#include <string>

namespace dsid {

LiftedSignal lift_time(const Matrix& series, Index k, Index p, SignalKind kind, Index i) {
    if (p < 0) {
        throw InvalidArgument("lifting depth must be nonnegative");
    }
    if (k - p < 0 || k >= series.cols()) {
        throw InvalidArgument("lifting window [" + std::to_string(k - p) + ", " +
                              std::to_string(k) + "] exits the horizon of length " +
                              std::to_string(series.cols()));
    }
    const Index ch = series.rows();
    const bool is_input = kind == SignalKind::Input;
    const Index slots = is_input ? p : p + 1;  // inputs stop at k-1
    LiftedSignal out{kind, i, k, p, Vector(slots * ch)};
    for (Index t = 0; t < slots; ++t) {
        out.stacked.segment(t * ch, ch) = series.col(k - p + t);
    }
    return out;
}

PermutationPair build_permutations(Index N, Index p, Index r, Index m) {
    if (N < 1 || p < 0 || r < 1 || m < 1) {
        throw InvalidArgument("build_permutations needs N, r, m >= 1 and p >= 0");
    }
    PermutationPair pair;
    pair.P_Y.resize(static_cast<size_t>(N * (p + 1) * r));
    for (Index i = 0; i < N; ++i) {
        for (Index t = 0; t <= p; ++t) {
            for (Index c = 0; c < r; ++c) {
                pair.P_Y[static_cast<size_t>(i * (p + 1) * r + t * r + c)] = t * N * r + i * r + c;
            }
        }
    }
    pair.P_U.resize(static_cast<size_t>(N * p * m));
    for (Index i = 0; i < N; ++i) {
        for (Index t = 0; t < p; ++t) {
            for (Index c = 0; c < m; ++c) {
                pair.P_U[static_cast<size_t>(i * p * m + t * m + c)] = t * N * m + i * m + c;
            }
        }
    }
    return pair;
}

Vector apply_permutation(const std::vector<Index>& perm, const Vector& x) {
    if (x.size() != static_cast<Index>(perm.size())) {
        throw DimensionError("permutation size mismatch");
    }
    Vector y(x.size());
    for (size_t j = 0; j < perm.size(); ++j) {
        y[static_cast<Index>(j)] = x[perm[j]];
    }
    return y;
}

Vector apply_permutation_transpose(const std::vector<Index>& perm, const Vector& x) {
    if (x.size() != static_cast<Index>(perm.size())) {
        throw DimensionError("permutation size mismatch");
    }
    Vector y(x.size());
    for (size_t j = 0; j < perm.size(); ++j) {
        y[perm[j]] = x[static_cast<Index>(j)];
    }
    return y;
}

Matrix permutation_matrix(const std::vector<Index>& perm) {
    const Index sz = static_cast<Index>(perm.size());
    Matrix P = Matrix::Zero(sz, sz);
    for (Index j = 0; j < sz; ++j) {
        P(j, perm[static_cast<size_t>(j)]) = 1.0;
    }
    return P;
}

Vector stack_outputs_time_major(const DataSet& data, Index k, Index p) {
    if (k - p < 0 || k >= data.T()) {
        throw InvalidArgument("output stack window exits the horizon");
    }
    Vector v((p + 1) * data.N * data.r);
    for (Index t = 0; t <= p; ++t) {
        v.segment(t * data.N * data.r, data.N * data.r) = data.Y.col(k - p + t);
    }
    return v;
}

Vector stack_inputs_time_major(const DataSet& data, Index k, Index p) {
    if (k - p < 0 || k - 1 >= data.T()) {
        throw InvalidArgument("input stack window exits the horizon");
    }
    Vector v(p * data.N * data.m);
    for (Index t = 0; t < p; ++t) {
        v.segment(t * data.N * data.m, data.N * data.m) = data.U.col(k - p + t);
    }
    return v;
}

Vector stack_outputs_space_major(const DataSet& data, Index k, Index p) {
    Vector v((p + 1) * data.N * data.r);
    for (Index i = 0; i < data.N; ++i) {
        const auto lifted =
            lift_time(data.Y.middleRows(i * data.r, data.r), k, p, SignalKind::Output, i);
        v.segment(i * (p + 1) * data.r, (p + 1) * data.r) = lifted.stacked;
    }
    return v;
}

Vector stack_inputs_space_major(const DataSet& data, Index k, Index p) {
    Vector v(p * data.N * data.m);
    for (Index i = 0; i < data.N; ++i) {
        const auto lifted =
            lift_time(data.U.middleRows(i * data.m, data.m), k, p, SignalKind::Input, i);
        v.segment(i * p * data.m, p * data.m) = lifted.stacked;
    }
    return v;
}

StructuredLifted structured_lifted_matrices(const GlobalModel& model, Index p) {
    if (p < 1) {
        throw InvalidArgument("structured lifting needs p >= 1, got " + std::to_string(p));
    }
    const Index N = model.N();
    const Index n = model.n();
    const Index m = model.m();
    const Index r = model.r();

    // Banded versions of the assembled matrices.
    BlockBandedMatrix A_b(N, N, n, n, 1);
    BlockBandedMatrix B_b(N, N, n, m, 0);
    BlockBandedMatrix C_b(N, N, r, n, 0);
    for (Index i = 0; i < N; ++i) {
        const auto& li = model.local(i);
        A_b.block(i, i) = li.A;
        if (li.E_left) A_b.block(i, i - 1) = *li.E_left;
        if (li.E_right) A_b.block(i, i + 1) = *li.E_right;
        B_b.block(i, i) = li.B;
        C_b.block(i, i) = li.C;
    }

    // M_tau = C A^tau (bandwidth tau), H_e = C A^e B, W_e = A^e B.
    std::vector<BlockBandedMatrix> M(static_cast<size_t>(p + 1));
    std::vector<BlockBandedMatrix> H(static_cast<size_t>(p));
    std::vector<BlockBandedMatrix> W(static_cast<size_t>(p));
    M[0] = C_b;
    for (Index tau = 1; tau <= p; ++tau) {
        M[static_cast<size_t>(tau)] = M[static_cast<size_t>(tau - 1)].multiply(A_b);
    }
    for (Index e = 0; e < p; ++e) {
        H[static_cast<size_t>(e)] = M[static_cast<size_t>(e)].multiply(B_b);
    }
    W[0] = B_b;
    {
        BlockBandedMatrix A_pow = A_b;
        for (Index e = 1; e < p; ++e) {
            W[static_cast<size_t>(e)] = A_pow.multiply(B_b);
            if (e + 1 < p) A_pow = A_pow.multiply(A_b);
        }
    }

    StructuredLifted out;

    // Classical O_p stacks C A^tau time-major; dense for oracle comparisons.
    out.O_dense.resize((p + 1) * N * r, N * n);
    for (Index tau = 0; tau <= p; ++tau) {
        out.O_dense.middleRows(tau * N * r, N * r) = M[static_cast<size_t>(tau)].to_dense();
    }

    // 𝒪_p: block (i, j) stacks M_tau.block(i, j) over tau = 0..p.
    out.O_struct = BlockBandedMatrix(N, N, (p + 1) * r, n, p);
    for (Index i = 0; i < N; ++i) {
        for (Index j = std::max<Index>(0, i - p); j <= std::min(N - 1, i + p); ++j) {
            Matrix& blk = out.O_struct.block(i, j);
            for (Index tau = 0; tau <= p; ++tau) {
                const auto& Mt = M[static_cast<size_t>(tau)];
                if (Mt.in_band(i, j)) blk.middleRows(tau * r, r) = Mt.block(i, j);
            }
        }
    }

    // 𝒢: sub-block (t, e) of block (i, j) is (C A^{t-1-e} B)_{i,j} for t > e.
    out.G_struct = BlockBandedMatrix(N, N, (p + 1) * r, p * m, p - 1);
    for (Index i = 0; i < N; ++i) {
        for (Index j = std::max<Index>(0, i - (p - 1)); j <= std::min(N - 1, i + (p - 1)); ++j) {
            Matrix& blk = out.G_struct.block(i, j);
            for (Index t = 1; t <= p; ++t) {
                for (Index e = 0; e < t; ++e) {
                    const auto& He = H[static_cast<size_t>(t - 1 - e)];
                    if (He.in_band(i, j)) blk.block(t * r, e * m, r, m) = He.block(i, j);
                }
            }
        }
    }

    // ℛ: sub-block e of block (i, j) is (A^{p-1-e} B)_{i,j}.
    out.R_struct = BlockBandedMatrix(N, N, n, p * m, p - 1);
    for (Index i = 0; i < N; ++i) {
        for (Index j = std::max<Index>(0, i - (p - 1)); j <= std::min(N - 1, i + (p - 1)); ++j) {
            Matrix& blk = out.R_struct.block(i, j);
            for (Index e = 0; e < p; ++e) {
                const auto& We = W[static_cast<size_t>(p - 1 - e)];
                if (We.in_band(i, j)) blk.middleCols(e * m, m) = We.block(i, j);
            }
        }
    }

    return out;
}

}  // namespace dsid
