#include "kaczmarz/spectral_lab.hpp"

#include "kaczmarz/errors.hpp"
#include "kaczmarz/sweep.hpp"

#include <json.hpp>

#include <algorithm>
#include <numeric>
#include <ostream>
#include <string>

namespace kaczmarz {

namespace {

Eigen::MatrixXd dense_of(const SparseMatrix& A) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(A.rows()), static_cast<Eigen::Index>(A.cols()));
    for (std::size_t j = 0; j < A.rows(); ++j) {
        const auto row = A.row(j);
        for (std::size_t p = 0; p < row.size(); ++p)
            d(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(row.cols[p])) = row.values[p];
    }
    return d;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct SortedEigen {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
};

SortedEigen sorted_eigen(const Eigen::MatrixXd& M) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, true);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver did not converge");
    const Eigen::VectorXcd vals = es.eigenvalues();
    const Eigen::MatrixXcd vecs = es.eigenvectors();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(vals.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(vals(a)) > std::abs(vals(b)); });
    SortedEigen out{Eigen::VectorXcd(vals.size()), Eigen::MatrixXcd(vecs.rows(), vecs.cols())};
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        out.values(i) = vals(order[static_cast<std::size_t>(i)]);
        out.vectors.col(i) = vecs.col(order[static_cast<std::size_t>(i)]).normalized();
    }
    return out;
}

} // namespace

Eigen::VectorXd DenseLab::apply_at_linv(const Eigen::VectorXd& v) const {
    return A.transpose() * L.triangularView<Eigen::Lower>().solve(v);
}

Eigen::VectorXd DenseLab::sweep(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const {
    return x + apply_at_linv(b - A * x);
}

Eigen::MatrixXd DenseLab::normal_operator() const {
    return A.transpose() * L.triangularView<Eigen::Lower>().solve(A);
}

DenseLab build_lab(const SparseMatrix& A, double omega) {
    check_relaxation(omega);
    if (A.rows() * A.cols() > kLabSizeLimit)
        throw TooLargeError("dense lab limited to m * n <= " + std::to_string(kLabSizeLimit));
    for (std::size_t j = 0; j < A.rows(); ++j) {
        if (A.row_norms_sq()[j] == 0.0) throw DegenerateRowError("row " + std::to_string(j) + " is zero");
    }
    DenseLab lab;
    lab.sparse = A;
    lab.omega = omega;
    lab.A = dense_of(A);
    const Eigen::MatrixXd aat = lab.A * lab.A.transpose();
    lab.L = aat.triangularView<Eigen::StrictlyLower>();
    lab.L.diagonal() = aat.diagonal() / omega;
    const auto n = static_cast<Eigen::Index>(A.cols());
    lab.G = Eigen::MatrixXd::Identity(n, n) - lab.normal_operator();
    return lab;
}

Eigen::MatrixXd projector_product(const SparseMatrix& A, double omega) {
    const Eigen::MatrixXd dense = dense_of(A);
    const auto n = dense.cols();
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index j = 0; j < dense.rows(); ++j) {
        const Eigen::VectorXd a = dense.row(j).transpose();
        const double nrm = a.squaredNorm();
        if (nrm == 0.0) continue;
        // P <- (I - omega a a^T / ||a||^2) P
        P -= (omega / nrm) * a * (a.transpose() * P);
    }
    return P;
}

double verify_upsweep_transpose(const SparseMatrix& A, double omega) {
    const DenseLab down = build_lab(A, omega);
    const DenseLab up = build_lab(A.rows_reversed(), omega);
    return (up.G - down.G.transpose()).cwiseAbs().maxCoeff();
}

EigenReport eigen_report(const DenseLab& lab) {
    EigenReport report;
    const SortedEigen right = sorted_eigen(lab.G);
    for (Eigen::Index i = 0; i < right.values.size(); ++i) report.eigenvalues.push_back(right.values(i));
    report.rho = report.eigenvalues.empty() ? 0.0 : std::abs(report.eigenvalues.front());
    report.leading_simple = report.eigenvalues.size() == 1 ||
                            (report.eigenvalues.size() > 1 &&
                             std::abs(report.eigenvalues[0]) - std::abs(report.eigenvalues[1]) > kLeadingGapThreshold);
    if (!report.leading_simple) return report;

    const std::complex<double> lambda1 = report.eigenvalues.front();
    report.v1 = right.vectors.col(0);

    const SortedEigen left = sorted_eigen(lab.G.transpose());
    Eigen::Index match = 0;
    for (Eigen::Index i = 1; i < left.values.size(); ++i) {
        if (std::abs(left.values(i) - lambda1) < std::abs(left.values(match) - lambda1)) match = i;
    }
    report.v1_left = left.vectors.col(match);
    // An eigenvector y of G^T gives the left eigenvector u = conj(y), so u^H v = y^T v.
    const std::complex<double> overlap = (report.v1_left.transpose() * report.v1)(0);
    report.kappa_1 = 1.0 / std::abs(overlap);
    return report;
}

void require_simple_leading(const EigenReport& report) {
    if (!report.leading_simple) throw MultipleLeadingEigenvalue("leading eigenvalue of G is not simple");
}

PolynomialDeviation polynomial_check(const DenseLab& lab, std::span<const double> b, std::span<const double> x0,
                                     std::size_t k) {
    if (k > 50) throw ConfigError("polynomial_check supports k <= 50");
    if (b.size() != lab.rows() || x0.size() != lab.cols()) throw ShapeError("polynomial_check: dimension mismatch");

    Vector xk(x0.begin(), x0.end());
    for (std::size_t i = 0; i < k; ++i) kaczmarz::sweep(lab.sparse, b, lab.omega, Direction::down, xk);

    const Eigen::VectorXd be = to_eigen(b);
    const Eigen::VectorXd x0e = to_eigen(x0);
    const Eigen::VectorXd xke = to_eigen(xk);
    const Eigen::VectorXd r0 = lab.apply_at_linv(be - lab.A * x0e);

    // Horner: q_k(G) r0 = r0 + G (r0 + G (...)), k terms.
    Eigen::VectorXd q = Eigen::VectorXd::Zero(r0.size());
    for (std::size_t i = 0; i < k; ++i) q = r0 + lab.G * q;
    Eigen::VectorXd p = r0;
    for (std::size_t i = 0; i < k; ++i) p = lab.G * p;

    const Eigen::VectorXd rk = lab.apply_at_linv(be - lab.A * xke);
    return {(xke - x0e - q).norm(), (rk - p).norm()};
}

double proportionality_constant(const DenseLab& lab, std::span<const double> x_star, std::span<const double> x0) {
    if (x_star.size() != lab.cols() || x0.size() != lab.cols())
        throw ShapeError("proportionality_constant: dimension mismatch");
    const EigenReport report = eigen_report(lab);
    require_simple_leading(report);

    const Eigen::VectorXcd e0 = (to_eigen(x0) - to_eigen(x_star)).cast<std::complex<double>>();
    const Eigen::VectorXcd& v = report.v1;
    const Eigen::VectorXcd& y = report.v1_left;
    // Spectral projectors for lambda_1 of G (v y^T / y^T v) and of G^T (y v^T / v^T y).
    const std::complex<double> yv = (y.transpose() * v)(0);
    const Eigen::VectorXcd down = v * ((y.transpose() * e0)(0) / yv);
    const Eigen::VectorXcd up = y * ((v.transpose() * e0)(0) / yv);

    const double lead = down.norm();
    if (!(lead > 1e-12 * std::max(e0.norm(), 1e-300)) || e0.norm() == 0.0)
        throw DegenerateComponent("initial error has no component along the leading eigenvector");
    return (down - up).squaredNorm() / (lead * lead);
}

double exact_influence_trace(const DenseLab& lab, std::size_t k) {
    if (k == 0) return 0.0;
    // B = A^T L^{-1}, formed as (L^{-T} A)^T.
    const Eigen::MatrixXd B = lab.L.transpose().triangularView<Eigen::Upper>().solve(lab.A).transpose();
    Eigen::MatrixXd S = B;
    for (std::size_t i = 1; i < k; ++i) S = B + lab.G * S;
    return (lab.A * S).trace();
}

void write_eigen_report_json(std::ostream& os, const EigenReport& report) {
    nlohmann::json j;
    auto& vals = j["eigenvalues"] = nlohmann::json::array();
    for (const auto& v : report.eigenvalues) vals.push_back({{"re", v.real()}, {"im", v.imag()}});
    j["rho"] = report.rho;
    j["leading_simple"] = report.leading_simple;
    j["kappa_1"] = report.kappa_1 ? nlohmann::json(*report.kappa_1) : nlohmann::json(nullptr);
    os << j.dump(2) << '\n';
}

} // namespace kaczmarz
