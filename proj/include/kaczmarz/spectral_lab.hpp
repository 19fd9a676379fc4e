#pragma once

#include "kaczmarz/sparse_matrix.hpp"

#include <Eigen/Dense>

#include <complex>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace kaczmarz {

/// Dense model of one Kaczmarz sweep for small systems.
///
/// L = slt(A A^T) + D / omega with D = diag(A A^T), and the sweep is the
/// affine map x -> G x + A^T L^{-1} b with G = I - A^T L^{-1} A. L^{-1} is
/// only ever applied through triangular solves.
struct DenseLab {
    SparseMatrix sparse;
    Eigen::MatrixXd A;
    Eigen::MatrixXd L;
    Eigen::MatrixXd G;
    double omega = 1.0;

    std::size_t rows() const { return static_cast<std::size_t>(A.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(A.cols()); }

    /// A^T L^{-1} v
    Eigen::VectorXd apply_at_linv(const Eigen::VectorXd& v) const;

    /// x + A^T L^{-1} (b - A x), one sweep in closed form.
    Eigen::VectorXd sweep(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const;

    /// A^T L^{-1} A
    Eigen::MatrixXd normal_operator() const;
};

/// Upper bound on m * n accepted by build_lab.
inline constexpr std::size_t kLabSizeLimit = 1'000'000;

/// Throws TooLargeError past the size guard and DegenerateRowError on zero rows.
DenseLab build_lab(const SparseMatrix& A, double omega);

/// Product of the row projectors (I - omega a_j a_j^T / ||a_j||^2) in sweep
/// order. Independent route to G for cross-checks.
Eigen::MatrixXd projector_product(const SparseMatrix& A, double omega);

/// max |G_up - G^T|, where G_up is built from the row-reversed matrix.
double verify_upsweep_transpose(const SparseMatrix& A, double omega);

struct EigenReport {
    std::vector<std::complex<double>> eigenvalues;  // sorted by modulus, descending
    double rho = 0.0;
    bool leading_simple = false;
    /// Present only when the leading eigenvalue is simple.
    std::optional<double> kappa_1;
    Eigen::VectorXcd v1;       // unit right eigenvector of lambda_1
    Eigen::VectorXcd v1_left;  // unit eigenvector of G^T for lambda_1
};

/// Leading eigenvalues closer than this in modulus are treated as multiple.
inline constexpr double kLeadingGapThreshold = 1e-10;

/// Full dense eigendecomposition of G. When the leading eigenvalue is not
/// simple the report carries no eigenvectors or kappa_1.
EigenReport eigen_report(const DenseLab& lab);

/// Throws MultipleLeadingEigenvalue unless the leading eigenvalue is simple.
void require_simple_leading(const EigenReport& report);

struct PolynomialDeviation {
    double dev_q = 0.0;
    double dev_p = 0.0;
};

/// Compares k sparse sweeps against x0 + q_k(G) r0 and the residual
/// A^T L^{-1} (b - A x_k) against G^k r0, where r0 = A^T L^{-1} (b - A x0).
PolynomialDeviation polynomial_check(const DenseLab& lab, std::span<const double> b, std::span<const double> x0,
                                     std::size_t k);

/// Predicted limit of (gauge / error)^2 for a consistent system: with P1 and
/// P1~ the spectral projectors of G and G^T for lambda_1 and e0 = x0 - x_star,
/// returns ||P1 e0 - P1~ e0||^2 / ||P1 e0||^2. Throws DegenerateComponent when
/// e0 has no lambda_1 component.
double proportionality_constant(const DenseLab& lab, std::span<const double> x_star, std::span<const double> x0);

/// Exact tr(A A#_k) with A#_k = q_k(G) A^T L^{-1}.
double exact_influence_trace(const DenseLab& lab, std::size_t k);

/// JSON object with sorted eigenvalues, rho and kappa_1.
void write_eigen_report_json(std::ostream& os, const EigenReport& report);

} // namespace kaczmarz
