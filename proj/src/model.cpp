#include "dsid/model.hpp"

#include <Eigen/Dense>

#include <string>
#include <utility>

namespace dsid {

void LocalModel::validate() const {
    if (A.rows() == 0 || A.rows() != A.cols()) {
        throw DimensionError("local A must be square and non-empty, got " +
                             std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
    }
    if (B.rows() != A.rows()) {
        throw DimensionError("local B has " + std::to_string(B.rows()) +
                             " rows, expected " + std::to_string(A.rows()));
    }
    if (C.cols() != A.rows()) {
        throw DimensionError("local C has " + std::to_string(C.cols()) +
                             " cols, expected " + std::to_string(A.rows()));
    }
    if (B.cols() == 0 || C.rows() == 0) {
        throw DimensionError("local model needs at least one input and one output");
    }
    for (const auto* E : {&E_left, &E_right}) {
        if (E->has_value() && ((*E)->rows() != A.rows() || (*E)->cols() != A.cols())) {
            throw DimensionError("coupling matrix must match local state dimension " +
                                 std::to_string(A.rows()));
        }
    }
}

Matrix GlobalModel::A_dense() const {
    const Index nn = n();
    Matrix A = Matrix::Zero(N() * nn, N() * nn);
    for (Index i = 0; i < N(); ++i) {
        const auto& li = local(i);
        A.block(i * nn, i * nn, nn, nn) = li.A;
        if (li.E_left) A.block(i * nn, (i - 1) * nn, nn, nn) = *li.E_left;
        if (li.E_right) A.block(i * nn, (i + 1) * nn, nn, nn) = *li.E_right;
    }
    return A;
}

Matrix GlobalModel::B_dense() const {
    const Index nn = n();
    const Index mm = m();
    Matrix B = Matrix::Zero(N() * nn, N() * mm);
    for (Index i = 0; i < N(); ++i) {
        B.block(i * nn, i * mm, nn, mm) = local(i).B;
    }
    return B;
}

Matrix GlobalModel::C_dense() const {
    const Index nn = n();
    const Index rr = r();
    Matrix C = Matrix::Zero(N() * rr, N() * nn);
    for (Index i = 0; i < N(); ++i) {
        C.block(i * rr, i * nn, rr, nn) = local(i).C;
    }
    return C;
}

Eigen::SparseMatrix<double> GlobalModel::A_sparse() const {
    const Index nn = n();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(N() * nn * nn * 3));
    auto push_block = [&](Index bi, Index bj, const Matrix& M) {
        for (Index c = 0; c < nn; ++c) {
            for (Index rw = 0; rw < nn; ++rw) {
                if (M(rw, c) != 0.0) {
                    trip.emplace_back(bi * nn + rw, bj * nn + c, M(rw, c));
                }
            }
        }
    };
    for (Index i = 0; i < N(); ++i) {
        const auto& li = local(i);
        push_block(i, i, li.A);
        if (li.E_left) push_block(i, i - 1, *li.E_left);
        if (li.E_right) push_block(i, i + 1, *li.E_right);
    }
    Eigen::SparseMatrix<double> A(N() * nn, N() * nn);
    A.setFromTriplets(trip.begin(), trip.end());
    return A;
}

Vector GlobalModel::apply_A(const Vector& x) const {
    const Index nn = n();
    if (x.size() != N() * nn) {
        throw DimensionError("apply_A: state has length " + std::to_string(x.size()) +
                             ", expected " + std::to_string(N() * nn));
    }
    Vector y(x.size());
    for (Index i = 0; i < N(); ++i) {
        const auto& li = local(i);
        Vector acc = li.A * x.segment(i * nn, nn);
        if (li.E_left) acc += *li.E_left * x.segment((i - 1) * nn, nn);
        if (li.E_right) acc += *li.E_right * x.segment((i + 1) * nn, nn);
        y.segment(i * nn, nn) = acc;
    }
    return y;
}

double StructureSimilarity::max_condition() const {
    double worst = 1.0;
    for (const auto& Qi : Q) {
        Eigen::JacobiSVD<Matrix> svd(Qi);
        const double smin = svd.singularValues().minCoeff();
        if (smin <= 0.0) {
            throw InvalidArgument("similarity block is singular");
        }
        worst = std::max(worst, svd.singularValues().maxCoeff() / smin);
    }
    return worst;
}

LocalModel make_heat_benchmark() {
    LocalModel s;
    s.A.resize(2, 2);
    s.A << 0.5728, 0.1068,
           0.1068, 0.5728;
    Matrix E = 0.1068 * Matrix::Identity(2, 2);
    s.E_left = E;
    s.E_right = E;
    s.B.resize(2, 1);
    s.B << 0.2136,
           0.1068;
    s.C.resize(1, 2);
    s.C << 1.0, 0.0;
    return s;
}

GlobalModel assemble_global(std::vector<LocalModel> locals) {
    if (locals.empty()) {
        throw InvalidArgument("a chain needs at least one subsystem");
    }
    const Index N = static_cast<Index>(locals.size());
    for (Index i = 0; i < N; ++i) {
        const auto& li = locals[static_cast<size_t>(i)];
        li.validate();
        if (li.n() != locals.front().n() || li.m() != locals.front().m() ||
            li.r() != locals.front().r()) {
            throw DimensionError("subsystem " + std::to_string(i) +
                                 " has different local dimensions than subsystem 0");
        }
        const bool want_left = i > 0;
        const bool want_right = i < N - 1;
        if (li.E_left.has_value() != want_left) {
            throw InvalidArgument("subsystem " + std::to_string(i) + " must " +
                                  (want_left ? "have" : "not have") + " a left coupling");
        }
        if (li.E_right.has_value() != want_right) {
            throw InvalidArgument("subsystem " + std::to_string(i) + " must " +
                                  (want_right ? "have" : "not have") + " a right coupling");
        }
    }
    GlobalModel g;
    g.locals = std::move(locals);
    return g;
}

GlobalModel make_benchmark_chain(Index N) {
    if (N < 1) {
        throw InvalidArgument("benchmark chain needs N >= 1, got " + std::to_string(N));
    }
    std::vector<LocalModel> locals(static_cast<size_t>(N), make_heat_benchmark());
    locals.front().E_left.reset();
    locals.back().E_right.reset();
    return assemble_global(std::move(locals));
}

GlobalModel apply_similarity(const GlobalModel& model, const StructureSimilarity& sim) {
    if (static_cast<Index>(sim.Q.size()) != model.N()) {
        throw DimensionError("similarity has " + std::to_string(sim.Q.size()) +
                             " blocks, model has " + std::to_string(model.N()));
    }
    std::vector<LocalModel> out;
    out.reserve(sim.Q.size());
    for (Index i = 0; i < model.N(); ++i) {
        const auto& li = model.local(i);
        const Matrix& Qi = sim.Q[static_cast<size_t>(i)];
        if (Qi.rows() != li.n() || Qi.cols() != li.n()) {
            throw DimensionError("similarity block " + std::to_string(i) +
                                 " must be " + std::to_string(li.n()) + "x" +
                                 std::to_string(li.n()));
        }
        Eigen::PartialPivLU<Matrix> lu(Qi);
        LocalModel ti;
        ti.A = lu.solve(li.A * Qi);
        if (li.E_left) ti.E_left = lu.solve(*li.E_left * sim.Q[static_cast<size_t>(i - 1)]);
        if (li.E_right) ti.E_right = lu.solve(*li.E_right * sim.Q[static_cast<size_t>(i + 1)]);
        ti.B = lu.solve(li.B);
        ti.C = li.C * Qi;
        out.push_back(std::move(ti));
    }
    return assemble_global(std::move(out));
}

}  // namespace dsid
