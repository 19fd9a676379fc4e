#include "kaczmarz/errors.hpp"
#include "kaczmarz/gauge.hpp"
#include "kaczmarz/spectral_lab.hpp"
#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace kaczmarz;
using namespace kaczmarz::testing;

TEST_CASE("identity matrix examples") {
    const auto I = SparseMatrix::identity(2);
    const auto lab1 = build_lab(I, 1.0);
    CHECK(lab1.L.isApprox(Eigen::MatrixXd::Identity(2, 2)));
    CHECK(lab1.G.cwiseAbs().maxCoeff() == 0.0);
    const auto lab2 = build_lab(I, 0.5);
    CHECK((lab2.L - 2.0 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK((lab2.G - 0.5 * Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
    CHECK(verify_upsweep_transpose(I, 1.0) == 0.0);
    const auto rep = eigen_report(lab1);
    CHECK(rep.rho == 0.0);
    for (auto v : rep.eigenvalues) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("sparse sweep equals the closed form") {
    const auto A = random_matrix(8, 6, 1);
    const auto lab = build_lab(A, 1.2);
    const auto b = random_vector(8, 2);
    auto x = random_vector(6, 3);
    const Eigen::VectorXd ref = lab.sweep(vec(x), vec(b));
    sweep(A, b, 1.2, Direction::down, x);
    CHECK((vec(x) - ref).norm() <= 1e-10);
    CHECK((ref - elfving_sweep(dense(A), vec(b), vec(random_vector(6, 3)), 1.2)).norm() <= 1e-12);
}

TEST_CASE("normal operator plus G is the identity") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto A = random_matrix(7 + s, 5, 10 + s, 0.8);
        const auto lab = build_lab(A, 0.3 + 0.15 * s);
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
        CHECK((lab.normal_operator() + lab.G - I).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK((projector_product(A, lab.omega) - lab.G).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("up-sweep matrix is the transpose, symmetric A included") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto A = random_matrix(4 + s % 7, 3 + s % 5, 40 + s);
        CHECK(verify_upsweep_transpose(A, 0.2 + 0.08 * s) <= 1e-11);
    }
    const auto R = dense(random_matrix(6, 6, 99));
    const Eigen::MatrixXd S = R + R.transpose();
    std::vector<Triplet> t;
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) t.push_back({std::size_t(i), std::size_t(j), S(i, j)});
    const auto As = SparseMatrix::from_triplets(6, 6, t);
    CHECK(verify_upsweep_transpose(As, 1.0) <= 1e-12);
    const auto lab = build_lab(As, 1.0);
    CHECK((lab.G - lab.G.transpose()).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("G and its up-sweep twin share a spectrum") {
    const auto A = random_matrix(9, 6, 5);
    const auto down = eigen_report(build_lab(A, 1.1));
    const auto up = eigen_report(build_lab(A.rows_reversed(), 1.1));
    REQUIRE(down.eigenvalues.size() == up.eigenvalues.size());
    std::vector<std::complex<double>> rest = up.eigenvalues;
    for (auto v : down.eigenvalues) {
        auto it = std::min_element(rest.begin(), rest.end(),
                                   [v](auto a, auto b) { return std::abs(a - v) < std::abs(b - v); });
        CHECK(std::abs(*it - v) <= 1e-10);
        rest.erase(it);
    }
}

TEST_CASE("spectral radius below one on tall full-rank systems") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const auto A = random_matrix(12, 8, 200 + s);
        for (int i = 1; i <= 19; i += 3) {
            const double omega = 0.1 * i;
            const auto lab = build_lab(A, omega);
            const auto rho = lab.G.eigenvalues().cwiseAbs().maxCoeff();
            CHECK(rho < 1.0);
            CHECK(eigen_report(lab).rho == doctest::Approx(rho).epsilon(1e-10));
        }
    }
}

TEST_CASE("leading eigenvalue is typically ill-conditioned") {
    int above = 0, simple = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto rep = eigen_report(build_lab(random_matrix(10, 6, 300 + s), 1.0));
        if (!rep.leading_simple) {
            CHECK_FALSE(rep.kappa_1.has_value());
            CHECK_THROWS_AS(require_simple_leading(rep), MultipleLeadingEigenvalue);
            continue;
        }
        ++simple;
        if (*rep.kappa_1 > 1.0 + 1e-9) ++above;
    }
    CHECK(simple > 0);
    CHECK(above == simple);
}

TEST_CASE("iteration polynomials reproduce sweeps") {
    const auto A = random_matrix(8, 6, 7);
    const auto lab = build_lab(A, 1.0);
    const auto b = random_vector(8, 8);
    const auto x0 = random_vector(6, 9);
    const auto d0 = polynomial_check(lab, b, x0, 0);
    CHECK(d0.dev_p == 0.0);
    CHECK(d0.dev_q == 0.0);
    CHECK(polynomial_check(lab, b, x0, 1).dev_q <= 1e-12);
    const auto d20 = polynomial_check(lab, b, x0, 20);
    CHECK(d20.dev_q <= 1e-8);
    CHECK(d20.dev_p <= 1e-8);
    CHECK_THROWS_AS(polynomial_check(lab, b, x0, 51), ConfigError);
}

TEST_CASE("geometric series of G converges to the inverse of I - G") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto lab = build_lab(random_matrix(15, 5, 400 + s), 1.0);
        const double rho = lab.G.eigenvalues().cwiseAbs().maxCoeff();
        if (rho > 0.9) continue;
        ++checked;
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
        Eigen::MatrixXd sum = I, term = I;
        for (int k = 1; k <= 500; ++k) {
            term = term * lab.G;
            sum += term;
        }
        CHECK((sum * (I - lab.G) - I).norm() <= 1e-8);
    }
    CHECK(checked > 0);
}

TEST_CASE("proportionality constant predicts the gauge to error ratio") {
    int checked = 0;
    for (std::uint64_t s = 0; s < 60 && checked < 3; ++s) {
        const auto A = random_matrix(8, 6, 500 + s);
        const auto lab = build_lab(A, 1.0);
        const auto rep = eigen_report(lab);
        if (!rep.leading_simple || std::abs(rep.eigenvalues[0]) - std::abs(rep.eigenvalues[1]) < 0.05) continue;
        const double l1 = std::abs(rep.eigenvalues[0]), l2 = std::abs(rep.eigenvalues[1]);
        const std::size_t k = static_cast<std::size_t>(std::ceil(std::log(1e-4) / std::log(l2 / l1)));
        if (std::pow(l1, double(k)) < 1e-9) continue;
        ++checked;

        const auto xs = random_vector(6, 600 + s);
        const auto b = A.multiply(xs);
        const std::vector<double> x0(6, 0.0);
        const double c = proportionality_constant(lab, xs, x0);
        CHECK(c > 0.0);
        std::vector<double> x(6, 0.0), y(6, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            sweep(A, b, 1.0, Direction::down, x);
            sweep(A, b, 1.0, Direction::up, y);
        }
        const double ratio = std::pow(error_gauge(x, y) / distance(x, xs), 2);
        CHECK(std::abs(ratio / c - 1.0) <= 0.05);
    }
    CHECK(checked > 0);
}

TEST_CASE("errors") {
    const auto A = random_matrix(4, 3, 1);
    const auto lab = build_lab(A, 1.0);
    const auto xs = random_vector(3, 2);
    CHECK_THROWS_AS(proportionality_constant(lab, xs, xs), DegenerateComponent);
    const auto Z = SparseMatrix::from_triplets(2, 2, std::vector<Triplet>{{0, 0, 1.0}});
    CHECK_THROWS_AS(build_lab(Z, 1.0), DegenerateRowError);
    const auto big = SparseMatrix::from_triplets(2000, 1000, std::vector<Triplet>{{0, 0, 1.0}});
    CHECK_THROWS_AS(build_lab(big, 1.0), TooLargeError);
    CHECK_THROWS_AS(build_lab(A, 2.0), ConfigError);
}

TEST_CASE("exact influence trace matches the recursion oracle") {
    const auto A = random_matrix(10, 7, 11);
    const auto lab = build_lab(A, 1.0);
    const auto ex = exact_traces(dense(A), 1.0, 5);
    CHECK(exact_influence_trace(lab, 0) == 0.0);
    for (std::size_t k = 1; k <= 5; ++k) CHECK(exact_influence_trace(lab, k) == doctest::Approx(ex[k - 1]).epsilon(1e-10));
}

TEST_CASE("eigen report JSON") {
    const auto rep = eigen_report(build_lab(random_matrix(6, 4, 3), 1.0));
    std::ostringstream os;
    write_eigen_report_json(os, rep);
    CHECK(os.str().find("\"rho\"") != std::string::npos);
    CHECK(os.str().find("\"eigenvalues\"") != std::string::npos);
}
