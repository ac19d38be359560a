#include "dsid/decentral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <map>
#include <sstream>

namespace dsid {

OmegaVariant omega_variant_from_string(const std::string& name) {
    if (name == "1") return OmegaVariant::V1;
    if (name == "2") return OmegaVariant::V2;
    if (name == "3") return OmegaVariant::V3;
    if (name == "4") return OmegaVariant::V4;
    if (name == "5") return OmegaVariant::V5;
    if (name == "general" || name == "GENERAL" || name == "6") return OmegaVariant::General;
    throw InvalidArgument("unknown omega variant '" + name + "' (expected 1..5 or general)");
}

std::string to_string(OmegaVariant variant) {
    switch (variant) {
        case OmegaVariant::V1: return "1";
        case OmegaVariant::V2: return "2";
        case OmegaVariant::V3: return "3";
        case OmegaVariant::V4: return "4";
        case OmegaVariant::V5: return "5";
        case OmegaVariant::General: return "general";
    }
    throw InvalidArgument("invalid omega variant");
}

Index OmegaSpec::t_for(Index i) const {
    if (t_per_subsystem.empty()) return t;
    if (i < 0 || i >= static_cast<Index>(t_per_subsystem.size())) {
        throw InvalidArgument("per-subsystem t has no entry for subsystem " + std::to_string(i));
    }
    return t_per_subsystem[static_cast<size_t>(i)];
}

Index OmegaSpec::k_min() const {
    switch (variant) {
        case OmegaVariant::V1:
        case OmegaVariant::V2: return 0;
        case OmegaVariant::V3:
        case OmegaVariant::V4:
        case OmegaVariant::V5: return 1;
        case OmegaVariant::General: return p;
    }
    throw InvalidArgument("invalid omega variant");
}

void OmegaSpec::validate() const {
    if (p < 1) {
        throw InvalidArgument("omega spec needs p >= 1");
    }
    if (t < 0) {
        throw InvalidArgument("omega spec needs t >= 0");
    }
    for (Index ti : t_per_subsystem) {
        if (ti < 0) throw InvalidArgument("per-subsystem t must be >= 0");
    }
}

namespace {

// One contiguous piece of Ω̆_i: subsystem j's outputs or inputs stacked over
// time offsets [off_lo, off_hi] relative to k, ascending.
struct Segment {
    bool is_output;
    Index j;
    Index off_lo;
    Index off_hi;
};

std::vector<Segment> omega_segments(Index i, Index N, const OmegaSpec& spec) {
    if (i < 0 || i >= N) {
        throw InvalidArgument("subsystem index " + std::to_string(i) + " outside 0.." +
                              std::to_string(N - 1));
    }
    std::vector<Segment> segs;
    auto clip = [&](Index lo, Index hi) {
        return std::pair<Index, Index>{std::max<Index>(0, lo), std::min(N - 1, hi)};
    };
    auto outputs = [&](Index lo, Index hi, Index off_lo, Index off_hi) {
        auto [a, b] = clip(lo, hi);
        for (Index j = a; j <= b; ++j) segs.push_back({true, j, off_lo, off_hi});
    };
    auto inputs = [&](Index lo, Index hi, Index off_lo, Index off_hi) {
        auto [a, b] = clip(lo, hi);
        for (Index j = a; j <= b; ++j) segs.push_back({false, j, off_lo, off_hi});
    };
    switch (spec.variant) {
        case OmegaVariant::V1:
            segs.push_back({false, i, 0, 0});
            break;
        case OmegaVariant::V2:
            outputs(i - 1, i + 1, 0, 0);
            segs.push_back({false, i, 0, 0});
            break;
        case OmegaVariant::V3:
            outputs(i - 1, i + 1, -1, 0);
            segs.push_back({false, i, 0, 0});
            inputs(i - 1, i + 1, -1, -1);
            break;
        case OmegaVariant::V4:
            outputs(i - 1, i + 4, -1, -1);
            segs.push_back({false, i, 0, 0});
            inputs(i - 1, i + 4, -1, -1);
            break;
        case OmegaVariant::V5:
            outputs(i - 1, i + 4, -1, 0);
            segs.push_back({false, i, 0, 0});
            inputs(i - 1, i + 4, -1, -1);
            break;
        case OmegaVariant::General: {
            // Eq. (19); u_i(k) added on top, as in every §V instantiation.
            const Index ti = spec.t_for(i);
            outputs(i - 1 - 2 * spec.p - ti, i + 1 + 2 * spec.p + ti, -spec.p, 0);
            segs.push_back({false, i, 0, 0});
            inputs(i - 3 * spec.p - ti, i + 3 * spec.p + ti, -spec.p, -1);
            break;
        }
    }
    return segs;
}

Index segments_size(const std::vector<Segment>& segs, Index m, Index r) {
    Index q = 0;
    for (const auto& s : segs) q += (s.off_hi - s.off_lo + 1) * (s.is_output ? r : m);
    return q;
}

// Boundary-equivalence key: the segment list relative to i.
std::string shape_key(Index i, const std::vector<Segment>& segs) {
    std::ostringstream key;
    for (const auto& s : segs) {
        key << (s.is_output ? 'y' : 'u') << (s.j - i) << ':' << s.off_lo << ':' << s.off_hi
            << ';';
    }
    return key.str();
}

void fill_omega_column(const DataSet& data, const std::vector<Segment>& segs, Index k,
                       Eigen::Ref<Vector> col) {
    Index at = 0;
    for (const auto& s : segs) {
        const Index ch = s.is_output ? data.r : data.m;
        const auto& series = s.is_output ? data.Y : data.U;
        for (Index off = s.off_lo; off <= s.off_hi; ++off) {
            col.segment(at, ch) = series.col(k + off).segment(s.j * ch, ch);
            at += ch;
        }
    }
}

}  // namespace

Vector build_local_input(Index i, const DataSet& data, const OmegaSpec& spec, Index k) {
    spec.validate();
    const auto segs = omega_segments(i, data.N, spec);
    if (k < spec.k_min() || k >= data.T()) {
        throw InvalidArgument("time " + std::to_string(k) + " outside the valid range [" +
                              std::to_string(spec.k_min()) + ", " + std::to_string(data.T() - 1) +
                              "] of variant " + to_string(spec.variant));
    }
    Vector omega(segments_size(segs, data.m, data.r));
    fill_omega_column(data, segs, k, omega);
    return omega;
}

Matrix build_local_input_series(Index i, const DataSet& data, const OmegaSpec& spec) {
    spec.validate();
    const auto segs = omega_segments(i, data.N, spec);
    const Index k0 = spec.k_min();
    if (data.T() <= k0) {
        throw DegenerateData("horizon too short for the variant's deepest lag");
    }
    Matrix omega(segments_size(segs, data.m, data.r), data.T() - k0);
    for (Index k = k0; k < data.T(); ++k) {
        fill_omega_column(data, segs, k, omega.col(k - k0));
    }
    return omega;
}

StateEstimate identify_local_state(Index i, const DataSet& data, const OmegaSpec& spec,
                                   const SimConfig& cfg) {
    const Index k0 = spec.k_min();
    const Matrix omega = build_local_input_series(i, data, spec);
    const Matrix y = data.Y.middleRows(i * data.r, data.r).rightCols(data.T() - k0);
    StateEstimate est = estimate_state_sequence(omega, y, cfg);
    est.first_k += k0;
    return est;
}

LocalModel fit_local_matrices(const std::optional<Matrix>& xhat_prev, const Matrix& xhat_i,
                              const std::optional<Matrix>& xhat_next, const Matrix& u_i,
                              const Matrix& y_i) {
    const Index L = xhat_i.cols();
    const Index n = xhat_i.rows();
    const Index m = u_i.rows();
    if (u_i.cols() != L || y_i.cols() != L || (xhat_prev && xhat_prev->cols() != L) ||
        (xhat_next && xhat_next->cols() != L)) {
        throw DimensionError("state/input/output sequences are not column-aligned");
    }
    if (L < 3 * n + m + 1) {
        throw DegenerateData("sequence length " + std::to_string(L) +
                             " too short for the Eq. (24) regression (need >= " +
                             std::to_string(3 * n + m + 1) + ")");
    }

    auto ols = [](const Matrix& R, const Matrix& targets) {
        // targets ≈ Theta * R; rows of R are regressors over time.
        const Matrix G = R * R.transpose();
        Eigen::SelfAdjointEigenSolver<Matrix> eig(G);
        if (eig.info() != Eigen::Success) {
            throw NumericalError("eigendecomposition of the regressor Gram failed");
        }
        const double lam_max = eig.eigenvalues().maxCoeff();
        const double lam_min = eig.eigenvalues().minCoeff();
        const double thresh = 100.0 * std::numeric_limits<double>::epsilon() *
                              std::max(lam_max, 0.0) * static_cast<double>(G.rows());
        if ((eig.eigenvalues().array() > thresh).count() < G.rows()) {
            const double cond = lam_min > 0.0 ? lam_max / lam_min
                                              : std::numeric_limits<double>::infinity();
            throw IllConditionedData(
                "state/input regressor for the local least squares is rank deficient", cond);
        }
        return Matrix((G.ldlt().solve(R * targets.transpose())).transpose());
    };

    // State equation: x̂_i(k+1) on (x̂_i, x̂_{i-1}, x̂_{i+1}, u_i) at time k.
    const Index n_prev = xhat_prev ? xhat_prev->rows() : 0;
    const Index n_next = xhat_next ? xhat_next->rows() : 0;
    Matrix R(n + n_prev + n_next + m, L - 1);
    Index at = 0;
    R.middleRows(at, n) = xhat_i.leftCols(L - 1);
    at += n;
    if (xhat_prev) {
        R.middleRows(at, n_prev) = xhat_prev->leftCols(L - 1);
        at += n_prev;
    }
    if (xhat_next) {
        R.middleRows(at, n_next) = xhat_next->leftCols(L - 1);
        at += n_next;
    }
    R.middleRows(at, m) = u_i.leftCols(L - 1);
    const Matrix theta = ols(R, xhat_i.rightCols(L - 1));

    LocalModel fit;
    at = 0;
    fit.A = theta.middleCols(at, n);
    at += n;
    if (xhat_prev) {
        fit.E_left = theta.middleCols(at, n_prev);
        at += n_prev;
    }
    if (xhat_next) {
        fit.E_right = theta.middleCols(at, n_next);
        at += n_next;
    }
    fit.B = theta.middleCols(at, m);

    // Output equation: y_i(k) on x̂_i(k).
    fit.C = ols(xhat_i, y_i);
    return fit;
}

namespace {

// Slices u_i / y_i to the estimate's absolute time range.
Matrix slice_channel(const Matrix& series, Index i, Index ch, Index first_k, Index len) {
    return series.block(i * ch, first_k, ch, len);
}

LocalModel fit_at(const IdentifiedGlobal& res, const DataSet& data, Index i) {
    const auto& est = res.states[static_cast<size_t>(i)];
    if (!est) {
        throw Error("no state estimate for subsystem " + std::to_string(i));
    }
    const Index L = est->Xhat.cols();
    std::optional<Matrix> xp;
    std::optional<Matrix> xn;
    if (i > 0) {
        const auto& prev = res.states[static_cast<size_t>(i - 1)];
        if (!prev) throw Error("no state estimate for neighbor " + std::to_string(i - 1));
        xp = prev->Xhat;
    }
    if (i < data.N - 1) {
        const auto& next = res.states[static_cast<size_t>(i + 1)];
        if (!next) throw Error("no state estimate for neighbor " + std::to_string(i + 1));
        xn = next->Xhat;
    }
    return fit_local_matrices(xp, est->Xhat, xn,
                              slice_channel(data.U, i, data.m, est->first_k, L),
                              slice_channel(data.Y, i, data.r, est->first_k, L));
}

void run_per_subsystem(IdentifiedGlobal& res, const DataSet& data, const OmegaSpec& spec,
                       const SimConfig& cfg) {
    const Index N = data.N;
    for (Index i = 0; i < N; ++i) {
        try {
            res.states[static_cast<size_t>(i)] = identify_local_state(i, data, spec, cfg);
        } catch (const std::exception& e) {
            res.failures.emplace_back(i, std::string("state estimation: ") + e.what());
        }
    }
    for (Index i = 0; i < N; ++i) {
        try {
            res.locals[static_cast<size_t>(i)] = fit_at(res, data, i);
        } catch (const std::exception& e) {
            res.failures.emplace_back(i, std::string("matrix fit: ") + e.what());
        }
    }
}

void run_shared(IdentifiedGlobal& res, const DataSet& data, const OmegaSpec& spec,
                const SimConfig& cfg) {
    const Index N = data.N;
    const Index k0 = spec.k_min();

    // Group subsystems by Ω̆ shape; one SIM training per group.
    std::map<std::string, std::vector<Index>> classes;
    std::vector<std::string> key_of(static_cast<size_t>(N));
    for (Index i = 0; i < N; ++i) {
        key_of[static_cast<size_t>(i)] = shape_key(i, omega_segments(i, N, spec));
        classes[key_of[static_cast<size_t>(i)]].push_back(i);
    }

    // Select the order on the most populous class (the typical interior
    // shape), then hold it fixed so neighbor estimates stay compatible.
    std::string lead_key;
    size_t lead_count = 0;
    for (const auto& [key, members] : classes) {
        if (members.size() > lead_count) {
            lead_count = members.size();
            lead_key = key;
        }
    }
    std::map<std::string, StateEstimate> trained;
    SimConfig cfg_fixed = cfg;
    try {
        const Index rep = classes.at(lead_key).front();
        StateEstimate est = identify_local_state(rep, data, spec, cfg);
        cfg_fixed.order = est.order_used;
        trained[lead_key] = std::move(est);
    } catch (const std::exception& e) {
        res.failures.emplace_back(classes.at(lead_key).front(),
                                  std::string("state estimation: ") + e.what());
    }
    for (const auto& [key, members] : classes) {
        if (key == lead_key) continue;
        try {
            trained[key] = identify_local_state(members.front(), data, spec, cfg_fixed);
        } catch (const std::exception& e) {
            res.failures.emplace_back(members.front(),
                                      std::string("state estimation: ") + e.what());
        }
    }

    // Fit classes: the triple of neighbor shapes determines the regression.
    auto fit_key = [&](Index i) {
        std::string key = i > 0 ? "[" + key_of[static_cast<size_t>(i - 1)] + "]" : "[]";
        key += "[" + key_of[static_cast<size_t>(i)] + "]";
        key += i < N - 1 ? "[" + key_of[static_cast<size_t>(i + 1)] + "]" : "[]";
        return key;
    };
    std::map<std::string, std::vector<Index>> fit_classes;
    for (Index i = 0; i < N; ++i) {
        fit_classes[fit_key(i)].push_back(i);
    }

    // State estimates are needed only around each fit representative; the
    // class projector P_x applies to every member's own past-stacked data.
    std::vector<Index> needed;
    for (const auto& [key, members] : fit_classes) {
        const Index rep = members.front();
        for (Index i = std::max<Index>(0, rep - 1); i <= std::min(N - 1, rep + 1); ++i) {
            needed.push_back(i);
        }
    }
    std::sort(needed.begin(), needed.end());
    needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
    for (Index i : needed) {
        try {
            const auto it = trained.find(key_of[static_cast<size_t>(i)]);
            if (it == trained.end()) {
                throw Error("the SIM training for this subsystem's shape class failed");
            }
            const StateEstimate& cls = it->second;
            StateEstimate est = cls;
            const Matrix omega = build_local_input_series(i, data, spec);
            const Matrix y = data.Y.middleRows(i * data.r, data.r).rightCols(data.T() - k0);
            const Matrix Z = build_data_matrices(omega, y, cfg_fixed).first;
            est.Xhat = cls.P_x * Z;
            est.first_k = cfg_fixed.past_window + k0;
            res.states[static_cast<size_t>(i)] = std::move(est);
        } catch (const std::exception& e) {
            res.failures.emplace_back(i, std::string("state estimation: ") + e.what());
        }
    }

    for (const auto& [key, members] : fit_classes) {
        const Index rep = members.front();
        try {
            const LocalModel fit = fit_at(res, data, rep);
            for (Index i : members) {
                res.locals[static_cast<size_t>(i)] = fit;
            }
        } catch (const std::exception& e) {
            res.failures.emplace_back(rep, std::string("matrix fit: ") + e.what());
        }
    }
}

}  // namespace

IdentifiedGlobal run_algorithm1(const DataSet& data, const OmegaSpec& spec, const SimConfig& cfg,
                                bool share_model) {
    spec.validate();
    cfg.validate();
    data.validate();
    IdentifiedGlobal res;
    res.spec = spec;
    res.cfg = cfg;
    res.shared = share_model;
    res.locals.assign(static_cast<size_t>(data.N), std::nullopt);
    res.states.assign(static_cast<size_t>(data.N), std::nullopt);

    if (share_model) {
        run_shared(res, data, spec, cfg);
    } else {
        run_per_subsystem(res, data, spec, cfg);
    }

    const bool complete = std::all_of(res.locals.begin(), res.locals.end(),
                                      [](const auto& l) { return l.has_value(); });
    if (complete) {
        std::vector<LocalModel> locals;
        locals.reserve(res.locals.size());
        for (const auto& l : res.locals) locals.push_back(*l);
        try {
            res.model = assemble_global(std::move(locals));
        } catch (const std::exception& e) {
            res.failures.emplace_back(-1, std::string("assembly: ") + e.what());
        }
    }
    return res;
}

}  // namespace dsid
