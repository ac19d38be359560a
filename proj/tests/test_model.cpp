#include "dsid/model.hpp"

#include "dsid/block_banded.hpp"
#include "dsid/dataset.hpp"
#include "dsid/rng.hpp"
#include "dsid/types.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <utility>
#include <vector>

using namespace dsid;
using dsid::testing::random_similarity;
using dsid::testing::rel_err;

TEST_CASE("heat benchmark carries the published constants") {
    const LocalModel local = make_heat_benchmark();
    local.validate();

    CHECK(local.n() == 2);
    CHECK(local.m() == 1);
    CHECK(local.r() == 1);

    CHECK(local.A(0, 0) == 0.5728);
    CHECK(local.A(0, 1) == 0.1068);
    CHECK(local.A(1, 0) == 0.1068);
    CHECK(local.A(1, 1) == 0.5728);
    CHECK(local.B(0, 0) == 0.2136);
    CHECK(local.B(1, 0) == 0.1068);
    CHECK(local.C(0, 0) == 1.0);
    CHECK(local.C(0, 1) == 0.0);

    REQUIRE(local.E_left.has_value());
    REQUIRE(local.E_right.has_value());
    CHECK(*local.E_left == 0.1068 * Matrix::Identity(2, 2));
    CHECK(*local.E_right == 0.1068 * Matrix::Identity(2, 2));
}

TEST_CASE("benchmark local state matrix has eigenvalues 0.6796 and 0.4660") {
    // symmetric 2x2 [[a, b], [b, a]] has spectrum {a + b, a - b}
    const Matrix A = make_heat_benchmark().A;
    const Vector eig = Eigen::SelfAdjointEigenSolver<Matrix>(A).eigenvalues();
    CHECK(eig(1) == doctest::Approx(0.6796).epsilon(1e-12));
    CHECK(eig(0) == doctest::Approx(0.4660).epsilon(1e-12));
}

TEST_CASE("local model validation rejects inconsistent dimensions") {
    LocalModel local = make_heat_benchmark();
    local.C = Matrix::Ones(1, 3);  // wrong state dimension
    CHECK_THROWS_AS(local.validate(), DimensionError);

    local = make_heat_benchmark();
    local.E_left = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(local.validate(), DimensionError);

    local = make_heat_benchmark();
    local.B = Matrix::Ones(3, 1);
    CHECK_THROWS_AS(local.validate(), DimensionError);
}

TEST_CASE("chain assembly strips endpoint couplings and checks the pattern") {
    const GlobalModel model = make_benchmark_chain(4);
    CHECK(model.N() == 4);
    CHECK_FALSE(model.local(0).E_left.has_value());
    CHECK(model.local(0).E_right.has_value());
    CHECK(model.local(1).E_left.has_value());
    CHECK(model.local(1).E_right.has_value());
    CHECK_FALSE(model.local(3).E_right.has_value());

    SUBCASE("first subsystem must not couple to the left") {
        std::vector<LocalModel> locals = model.locals;
        locals[0].E_left = Matrix::Identity(2, 2);
        CHECK_THROWS_AS(assemble_global(std::move(locals)), InvalidArgument);
    }
    SUBCASE("interior subsystems need both couplings") {
        std::vector<LocalModel> locals = model.locals;
        locals[2].E_right.reset();
        CHECK_THROWS_AS(assemble_global(std::move(locals)), InvalidArgument);
    }
    SUBCASE("local dimensions must agree across the chain") {
        std::vector<LocalModel> locals = model.locals;
        locals[1].C = Matrix::Ones(2, 2);  // r = 2 in a chain of r = 1
        CHECK_THROWS_AS(assemble_global(std::move(locals)), InvalidArgument);
    }
    SUBCASE("empty chain is rejected") {
        CHECK_THROWS_AS(assemble_global({}), InvalidArgument);
    }
}

TEST_CASE("single-subsystem chain assembles to the local matrices") {
    const GlobalModel model = make_benchmark_chain(1);
    CHECK(model.A_dense() == model.local(0).A);
    CHECK(model.B_dense() == model.local(0).B);
    CHECK(model.C_dense() == model.local(0).C);
}

TEST_CASE("two-subsystem assembly matches the hand-built block layout") {
    const GlobalModel model = make_benchmark_chain(2);
    const LocalModel t = make_heat_benchmark();
    Matrix expected = Matrix::Zero(4, 4);
    expected.topLeftCorner(2, 2) = t.A;
    expected.topRightCorner(2, 2) = *t.E_right;
    expected.bottomLeftCorner(2, 2) = *t.E_left;
    expected.bottomRightCorner(2, 2) = t.A;
    CHECK(model.A_dense() == expected);
}

TEST_CASE("assembled matrices have the Definition-1 sparsity pattern") {
    const GlobalModel model = make_benchmark_chain(7);
    CHECK(measured_block_bandwidth(model.A_dense(), 2, 2) == 1);
    CHECK(measured_block_bandwidth(model.B_dense(), 2, 1) == 0);
    CHECK(measured_block_bandwidth(model.C_dense(), 1, 2) == 0);
}

TEST_CASE("sparse assembly and matrix-free application agree with the dense form") {
    const GlobalModel model = testing::random_chain(6, 2, 1, 1, 99);
    const Matrix A = model.A_dense();
    CHECK(rel_err(Matrix(model.A_sparse()), A) == 0.0);

    const Vector x = gaussian_vector(A.cols(), 3);
    CHECK((model.apply_A(x) - A * x).norm() <= 1e-12 * (A * x).norm());
}

TEST_CASE("structure-preserving similarity transforms blocks per Definition 1") {
    const GlobalModel model = make_benchmark_chain(5);
    const StructureSimilarity sim = random_similarity(5, 2, 21);
    const GlobalModel mapped = apply_similarity(model, sim);

    SUBCASE("sparsity pattern survives") {
        CHECK_FALSE(mapped.local(0).E_left.has_value());
        CHECK_FALSE(mapped.local(4).E_right.has_value());
        CHECK(measured_block_bandwidth(mapped.A_dense(), 2, 2) == 1);
    }

    SUBCASE("block formulas hold") {
        const Index i = 2;
        const Matrix Qi_inv = sim.Q[i].inverse();
        CHECK(rel_err(mapped.local(i).A, Qi_inv * model.local(i).A * sim.Q[i]) < 1e-12);
        CHECK(rel_err(*mapped.local(i).E_left, Qi_inv * *model.local(i).E_left * sim.Q[i - 1]) <
              1e-12);
        CHECK(rel_err(*mapped.local(i).E_right, Qi_inv * *model.local(i).E_right * sim.Q[i + 1]) <
              1e-12);
        CHECK(rel_err(mapped.local(i).B, Qi_inv * model.local(i).B) < 1e-12);
        CHECK(rel_err(mapped.local(i).C, model.local(i).C * sim.Q[i]) < 1e-12);
    }

    SUBCASE("global spectrum is preserved") {
        const auto eig_a = Eigen::EigenSolver<Matrix>(model.A_dense(), false).eigenvalues();
        auto eig_b = Eigen::EigenSolver<Matrix>(mapped.A_dense(), false).eigenvalues();
        // compare as sorted real pairs; the benchmark spectrum is real
        Vector a = eig_a.real(), b = eig_b.real();
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK((a - b).cwiseAbs().maxCoeff() < 1e-9);
    }

    SUBCASE("input-output map is unchanged") {
        const Index T = 40;
        const Matrix U = white_noise_inputs(5, 1, T, 17);
        const DataSet base = simulate(model, U, Vector::Zero(10), T);
        const DataSet same = simulate(mapped, U, Vector::Zero(10), T);
        CHECK(rel_err(same.Y, base.Y) < 1e-9);
    }

    SUBCASE("inverse similarity round-trips the matrices") {
        StructureSimilarity inv;
        for (const auto& Q : sim.Q) inv.Q.push_back(Q.inverse());
        const GlobalModel back = apply_similarity(mapped, inv);
        CHECK(rel_err(back.A_dense(), model.A_dense()) < 1e-9);
        CHECK(rel_err(back.B_dense(), model.B_dense()) < 1e-9);
        CHECK(rel_err(back.C_dense(), model.C_dense()) < 1e-9);
    }
}

TEST_CASE("similarity condition tracker reports the worst block") {
    StructureSimilarity sim;
    sim.Q.push_back(Matrix::Identity(2, 2));
    Matrix stretched = Matrix::Identity(2, 2);
    stretched(0, 0) = 10.0;
    sim.Q.push_back(stretched);
    CHECK(sim.max_condition() == doctest::Approx(10.0).epsilon(1e-9));
}
