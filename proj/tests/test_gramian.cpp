#include "dsid/gramian.hpp"

#include "dsid/block_banded.hpp"
#include "dsid/dataset.hpp"
#include "dsid/model.hpp"
#include "dsid/rng.hpp"
#include "dsid/types.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace dsid;
using dsid::testing::rel_err;

namespace {

/// Chain with C = I and A = 0: the depth-1 Gramian degenerates to the
/// identity, which pins down every downstream constant.
GlobalModel identity_output_chain(Index N) {
    std::vector<LocalModel> locals;
    for (Index i = 0; i < N; ++i) {
        LocalModel local;
        local.A = Matrix::Zero(2, 2);
        local.B = Matrix::Ones(2, 1);
        local.C = Matrix::Identity(2, 2);
        if (i > 0) local.E_left = Matrix::Zero(2, 2);
        if (i + 1 < N) local.E_right = Matrix::Zero(2, 2);
        locals.push_back(std::move(local));
    }
    return assemble_global(std::move(locals));
}

GlobalModel blind_chain(Index N) {
    GlobalModel model = make_benchmark_chain(N);
    for (auto& local : model.locals) local.C.setZero();
    return model;
}

}  // namespace

TEST_CASE("the Gramian equals the dense observability product") {
    const GlobalModel model = testing::random_chain(6, 2, 1, 1, 55);
    const Index p = 2;
    const GramianBundle bundle = finite_time_gramian(model, p);

    // J = 𝒪ᵀ𝒪 = OᵀO: the permutation cancels, so the unpermuted dense
    // observability matrix gives the same product.
    const Matrix O = testing::dense_observability(model, p);
    CHECK(rel_err(bundle.J, O.transpose() * O) < 1e-12);

    SUBCASE("inverse and conditioning are consistent") {
        CHECK(rel_err(bundle.D * bundle.J, Matrix::Identity(12, 12)) < 1e-8);
        CHECK(bundle.kappa == doctest::Approx(bundle.eig_max / bundle.eig_min).epsilon(1e-12));
        CHECK(bundle.eig_min > 0.0);
    }

    SUBCASE("scalar half-bandwidth is 2pn + n - 1") {
        CHECK(bundle.g == 2 * p * 2 + 1);
        CHECK(bundle.p == p);
    }
}

TEST_CASE("the benchmark Gramian is block-banded with bandwidth 2p") {
    const Index p = 2, n = 2;
    const GramianBundle bundle = finite_time_gramian(make_benchmark_chain(10), p);
    CHECK(measured_block_bandwidth(bundle.J, n, n) == 2 * p);
    // off-band blocks are exactly zero, so the reinterpretation succeeds at tol 0
    CHECK_NOTHROW(BlockBandedMatrix::from_dense(bundle.J, n, n, 2 * p));
}

TEST_CASE("an identity-output instant chain gives J = D = I") {
    const GramianBundle bundle = finite_time_gramian(identity_output_chain(3), 1);
    CHECK(rel_err(bundle.J, Matrix::Identity(6, 6)) < 1e-14);
    CHECK(rel_err(bundle.D, Matrix::Identity(6, 6)) < 1e-14);
    CHECK(bundle.kappa == doctest::Approx(1.0).epsilon(1e-12));

    SUBCASE("kappa = 1 collapses the decay envelope") {
        const DecayEnvelope env = decay_envelope(bundle);
        CHECK(env.lambda == 0.0);
        CHECK(env.c > 0.0);
    }
}

TEST_CASE("rank check certifies the benchmark and rejects a blind model") {
    SUBCASE("benchmark N=20 reaches full rank 40 with observability index 1") {
        for (Index p : {1, 2, 3}) {
            const RankReport report = observability_rank_check(make_benchmark_chain(20), p);
            CHECK(report.rank == 40);
            CHECK(report.full);
            REQUIRE(report.nu.has_value());
            CHECK(*report.nu == 1);
        }
    }

    SUBCASE("zero output matrix has rank zero") {
        const RankReport report = observability_rank_check(blind_chain(4), 2);
        CHECK(report.rank == 0);
        CHECK_FALSE(report.full);
        CHECK_FALSE(report.nu.has_value());
    }

    SUBCASE("permutation leaves the rank unchanged") {
        // the structured and time-major observability matrices have equal rank
        const GlobalModel model = testing::random_chain(5, 2, 1, 1, 91);
        const StructuredLifted ops = structured_lifted_matrices(model, 2);
        const auto rank_of = [](const Matrix& M) {
            return Eigen::ColPivHouseholderQR<Matrix>(M).rank();
        };
        CHECK(rank_of(ops.O_struct.to_dense()) == rank_of(ops.O_dense));
        CHECK(observability_rank_check(model, 2).rank == rank_of(ops.O_dense));
    }
}

TEST_CASE("a singular Gramian raises a rank-deficient error with the rank attached") {
    try {
        finite_time_gramian(blind_chain(3), 2);
        FAIL("expected RankDeficientGramian");
    } catch (const RankDeficientGramian& e) {
        CHECK(e.numerical_rank == 0);
    }
}

TEST_CASE("decay envelope follows the closed-form constants") {
    const GramianBundle bundle = finite_time_gramian(make_benchmark_chain(12), 2);
    const DecayEnvelope env = decay_envelope(bundle);

    const double root = std::sqrt(bundle.kappa);
    const double expected_lambda =
        std::pow((root - 1.0) / (root + 1.0), 1.0 / static_cast<double>(bundle.g));
    CHECK(env.lambda == doctest::Approx(expected_lambda).epsilon(1e-12));

    const double norm_d = 1.0 / bundle.eig_min;  // ||D||_2 for symmetric PD J
    const double expected_c = norm_d * std::max(1.0, (1.0 + root) * (1.0 + root) /
                                                         (2.0 * bundle.kappa));
    CHECK(env.c == doctest::Approx(expected_c).epsilon(1e-12));

    SUBCASE("lambda grows with kappa at fixed bandwidth") {
        GramianBundle worse = bundle;
        worse.kappa *= 4.0;
        CHECK(decay_envelope(worse).lambda > env.lambda);
    }
}

TEST_CASE("the envelope dominates the inverse entrywise") {
    const GramianBundle bundle = finite_time_gramian(make_benchmark_chain(20), 2);
    const DecayEnvelope env = decay_envelope(bundle);
    for (Index i = 0; i < bundle.D.rows(); ++i) {
        for (Index j = 0; j < bundle.D.cols(); ++j) {
            const double limit = env.c * std::pow(env.lambda, std::abs(i - j));
            REQUIRE(std::abs(bundle.D(i, j)) <= limit);
        }
    }
}

TEST_CASE("band truncation keeps exactly the requested diagonals") {
    const GramianBundle bundle = finite_time_gramian(make_benchmark_chain(6), 1);
    const Matrix& D = bundle.D;
    const Index nN = D.rows();

    CHECK(band_truncate(D, nN - 1) == D);
    CHECK(band_truncate(D, nN + 5) == D);
    CHECK(Matrix(band_truncate(D, 0)) == Matrix(D.diagonal().asDiagonal()));

    SUBCASE("block view matches the scalar truncation") {
        for (Index t : {0, 1, 2}) {
            const BlockBandedMatrix Dt = band_truncate_blocks(D, 2, t);
            CHECK(Dt.bandwidth() == t);
            CHECK(Dt.to_dense() == band_truncate(D, 2 * t));
        }
    }
}

TEST_CASE("the truncation bound of Eq. (16) behaves and holds") {
    const Index N = 20, n = 2;
    const GramianBundle bundle = finite_time_gramian(make_benchmark_chain(N), 2);
    const DecayEnvelope env = decay_envelope(bundle);

    SUBCASE("lambda = 0 kills the bound") {
        const TruncationBound t = truncation_bound({1.0, 0.0}, 3, N, n);
        CHECK(t.k1 == 0.0);
        CHECK(t.bound == 0.0);
    }

    SUBCASE("k1 decreases in the kept bandwidth") {
        double prev = truncation_bound(env, 0, N, n).k1;
        for (Index s = 1; s <= n * N; ++s) {
            const double cur = truncation_bound(env, s, N, n).k1;
            CHECK(cur < prev);
            prev = cur;
        }
    }

    SUBCASE("lambda = 1 is rejected as ill-conditioning") {
        CHECK_THROWS_AS(truncation_bound({1.0, 1.0}, 3, N, n), NumericalError);
    }

    SUBCASE("the actual truncation error stays below c * k1") {
        for (Index s = 0; s <= n * N; s += n) {
            const TruncationBound tb = truncation_bound(env, s, N, n);
            const double err = (bundle.D - band_truncate(bundle.D, s))
                                   .cwiseAbs()
                                   .colwise()
                                   .sum()
                                   .maxCoeff();
            if (s == n * N) {
                // nothing is truncated and the bound degenerates to zero
                CHECK(err == 0.0);
                CHECK(tb.bound == 0.0);
            } else {
                CHECK(err < tb.bound);
            }
        }
    }
}

TEST_CASE("full-inverse reconstruction reproduces the oracle states") {
    const GlobalModel model = make_benchmark_chain(8);
    const Index T = 40, p = 2;
    const Matrix U = white_noise_inputs(8, 1, T, 61);
    const DataSet data = simulate(model, U, Vector::Zero(16), T);
    const StateReconstructor rec(model, p);

    for (Index k = p; k < T; ++k) {
        const Vector x = rec.reconstruct(data, k);
        CHECK(rel_err(x, data.X->col(k)) <= 1e-8);
    }

    SUBCASE("time indices outside [p, T) are rejected") {
        CHECK_THROWS_AS(rec.reconstruct(data, p - 1), InvalidArgument);
        CHECK_THROWS_AS(rec.reconstruct(data, T), InvalidArgument);
    }

    SUBCASE("all-zero data reconstructs the zero state") {
        DataSet zero = data;
        zero.U.setZero();
        zero.Y.setZero();
        CHECK(rec.reconstruct(zero, 5).norm() == 0.0);
    }

    SUBCASE("the one-shot wrapper agrees") {
        const Vector x = reconstruct_state(model, data, p, std::nullopt, 10);
        CHECK(rel_err(x, data.X->col(10)) <= 1e-8);
    }

    SUBCASE("the cached bundle is the p = 2 Gramian") {
        CHECK(rec.gramian().p == 2);
        CHECK(rec.gramian().J.rows() == 16);
    }
}

TEST_CASE("banded-inverse reconstruction improves with the bandwidth") {
    const Index N = 10, p = 2, T = 50;
    const GlobalModel model = make_benchmark_chain(N);
    const Matrix U = white_noise_inputs(N, 1, T, 71);
    const DataSet data = simulate(model, U, Vector::Zero(2 * N), T);

    std::vector<double> avg_err;
    for (Index t = 0; t <= N; ++t) {
        const StateReconstructor rec(model, p, t);
        double sum = 0.0;
        Index count = 0;
        for (Index k = p; k < T; ++k) {
            sum += (rec.reconstruct(data, k) - data.X->col(k)).norm() /
                   data.X->col(k).norm();
            ++count;
        }
        avg_err.push_back(sum / static_cast<double>(count));
    }

    for (size_t t = 1; t < avg_err.size(); ++t) {
        CHECK(avg_err[t] <= avg_err[t - 1] + 1e-12);
    }
    CHECK(avg_err.back() <= 1e-8);  // t = N is the full inverse
}

TEST_CASE("reconstruction requires an observable model") {
    CHECK_THROWS_AS(StateReconstructor(blind_chain(4), 2), RankDeficientGramian);
}
