#include "kaczmarz/errors.hpp"
#include "kaczmarz/sweep.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

using namespace kaczmarz;
using namespace kaczmarz::testing;

TEST_CASE("single equation, single unknown") {
    const auto A = SparseMatrix::from_triplets(1, 1, std::vector<Triplet>{{0, 0, 2.0}});
    std::vector<double> b{4.0};
    std::vector<double> x{0.0};
    sweep(A, b, 1.0, Direction::down, x);
    CHECK(x[0] == 2.0);
    x = {0.0};
    sweep(A, b, 0.5, Direction::down, x);
    CHECK(x[0] == 1.0);
}

TEST_CASE("solution of a consistent system is a fixed point") {
    const auto A = random_matrix(12, 7, 3);
    const auto xs = random_vector(7, 4);
    const auto b = A.multiply(xs);
    for (auto dir : {Direction::down, Direction::up}) {
        auto x = xs;
        sweep(A, b, 1.3, dir, x);
        CHECK(distance(x, xs) <= 1e-12 * norm2(xs));
    }
}

TEST_CASE("sweep matches the closed-form oracle") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const std::size_t m = 3 + s % 9, n = 2 + (s * 7) % 8;
        const auto A = random_matrix(m, n, 100 + s, 0.7);
        const auto b = random_vector(m, 200 + s);
        const auto x0 = random_vector(n, 300 + s);
        const auto Ad = dense(A);
        for (double omega : {0.5, 1.0, 1.7}) {
            auto x = x0;
            sweep(A, b, omega, Direction::down, x);
            const Eigen::VectorXd ref = elfving_sweep(Ad, vec(b), vec(x0), omega);
            CHECK((vec(x) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
        }
    }
}

TEST_CASE("with omega = 1 each row equation holds right after its update") {
    const auto A = random_matrix(6, 9, 11);
    const auto b = random_vector(6, 12);
    std::vector<double> x(9, 0.0);
    // Update row by row with a one-row matrix and check the residual of that row.
    for (std::size_t j = 0; j < A.rows(); ++j) {
        const auto rv = A.row(j);
        std::vector<Triplet> t;
        for (std::size_t q = 0; q < rv.size(); ++q) t.push_back({0, rv.cols[q], rv.values[q]});
        const auto Aj = SparseMatrix::from_triplets(1, 9, t);
        std::vector<double> bj{b[j]};
        sweep(Aj, bj, 1.0, Direction::down, x);
        CHECK(std::abs(A.row_dot(j, x) - b[j]) <= 1e-12 * (1.0 + std::abs(b[j])));
    }
}

TEST_CASE("up-sweep equals down-sweep on row-reversed data") {
    const auto A = random_matrix(10, 6, 21);
    const auto b = random_vector(10, 22);
    const auto Ar = A.rows_reversed();
    std::vector<double> br(b.rbegin(), b.rend());
    std::vector<double> x1(6, 0.3), x2(6, 0.3);
    sweep(A, b, 1.2, Direction::up, x1);
    sweep(Ar, br, 1.2, Direction::down, x2);
    CHECK(x1 == x2);
}

TEST_CASE("zero rows are skipped and bad relaxation is rejected") {
    const auto A = SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{1, 1, 1.0}});
    std::vector<double> b{5.0, 3.0}, x{0.0, 0.0};
    sweep(A, b, 1.0, Direction::down, x);
    CHECK(x == std::vector<double>{0.0, 3.0});
    CHECK_THROWS_AS(sweep(A, b, 0.0, Direction::down, x), ConfigError);
    CHECK_THROWS_AS(sweep(A, b, 2.0, Direction::down, x), ConfigError);
    std::vector<double> shortb{1.0};
    CHECK_THROWS_AS(sweep(A, shortb, 1.0, Direction::down, x), ShapeError);
}

TEST_CASE("sweep and residual operation counts") {
    const auto A = random_matrix(8, 5, 31, 0.6);
    const auto b = random_vector(8, 32);
    std::vector<double> x(5, 0.0);
    OpCounter ops;
    sweep(A, b, 1.0, Direction::down, x, &ops);
    CHECK(ops.flops == 4 * A.nnz() + 3 * A.rows());
    OpCounter r;
    residual_norm(A, b, x, &r);
    CHECK(r.flops == 2 * A.nnz() + 3 * A.rows());
}

TEST_CASE("SweepState bookkeeping") {
    const auto A = random_matrix(4, 3, 41);
    const auto b = random_vector(4, 42);
    SweepState st{std::vector<double>(3, 0.0), 1.0, Direction::up, 0};
    sweep(A, b, st);
    sweep(A, b, st);
    CHECK(st.k == 2);
    SweepState bad{std::vector<double>(3, 0.0), 2.5, Direction::down, 0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("run produces one history entry per sweep") {
    const auto A = random_matrix(9, 4, 51);
    const auto xs = random_vector(4, 52);
    const auto b = A.multiply(xs);
    RunOptions o;
    o.n_sweeps = 7;
    o.x_star = xs;
    const auto out = run(A, b, o);
    CHECK(out.history.size() == 7);
    CHECK(out.history.true_error.size() == 7);
    CHECK(out.history.residual_norm.size() == 7);
    CHECK(out.history.gauge.empty());
    CHECK(out.history.true_error.back() < out.history.true_error.front());

    o.n_sweeps = 0;
    CHECK_THROWS_AS(run(A, b, o), ConfigError);
}

TEST_CASE("error contraction is governed by the spectral radius") {
    const auto A = random_matrix(30, 10, 61);
    const auto xs = random_vector(10, 62);
    const auto b = A.multiply(xs);
    const double omega = 1.0;
    const auto Ad = dense(A);
    Eigen::MatrixXd G(10, 10);
    for (Eigen::Index c = 0; c < 10; ++c) {
        Eigen::VectorXd e = Eigen::VectorXd::Unit(10, c);
        G.col(c) = elfving_sweep(Ad, Eigen::VectorXd::Zero(30), e, omega);
    }
    const double rho = G.eigenvalues().cwiseAbs().maxCoeff();
    REQUIRE(rho < 1.0);
    RunOptions o;
    o.omega = omega;
    o.n_sweeps = 20;
    o.x_star = xs;
    const auto h = run(A, b, o).history.true_error;
    REQUIRE(h[19] > 1e-10 * h[0]);
    const double rate = std::pow(h[19] / h[9], 1.0 / 10.0);
    CHECK(rate <= rho + 0.05);
}

TEST_CASE("relative error and history CSV") {
    std::vector<double> x{1.0, 1.0}, xs{1.0, 0.0};
    CHECK(relative_error(x, xs) == 1.0);
    std::vector<double> z{0.0, 0.0};
    CHECK(relative_error(x, z) == std::sqrt(2.0));

    History h;
    h.true_error = {0.5, 0.25};
    std::ostringstream os;
    write_history_csv(os, h);
    CHECK(os.str().rfind("k,true_error,residual_norm,gauge\n", 0) == 0);
    CHECK(os.str().find("1,0.5,,\n") != std::string::npos);
}
