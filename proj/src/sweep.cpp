#include "kaczmarz/sweep.hpp"

#include "kaczmarz/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace kaczmarz {

std::string_view to_string(Direction d) { return d == Direction::down ? "down" : "up"; }

Direction opposite(Direction d) { return d == Direction::down ? Direction::up : Direction::down; }

void check_relaxation(double omega) {
    if (!(omega > 0.0 && omega < 2.0)) throw ConfigError("relaxation parameter must lie in (0, 2)");
}

void SweepState::validate() const { check_relaxation(omega); }

namespace {

inline void project_row(const SparseMatrix& A, std::span<const double> b, double omega, std::size_t j,
                        std::span<double> x, std::uint64_t& flops) {
    const double norm_sq = A.row_norms_sq()[j];
    if (norm_sq == 0.0) return;
    const auto begin = A.row_ptr()[j];
    const auto end = A.row_ptr()[j + 1];
    const auto* cols = A.col_idx().data();
    const auto* vals = A.values().data();
    double ax = 0.0;
    for (auto p = begin; p < end; ++p) ax += vals[p] * x[cols[p]];
    const double s = omega * (b[j] - ax) / norm_sq;
    for (auto p = begin; p < end; ++p) x[cols[p]] += s * vals[p];
    flops += 4 * (end - begin) + 3;
}

} // namespace

void sweep(const SparseMatrix& A, std::span<const double> b, double omega, Direction direction,
           std::span<double> x, OpCounter* ops) {
    if (b.size() != A.rows()) throw ShapeError("sweep: data length does not match row count");
    if (x.size() != A.cols()) throw ShapeError("sweep: iterate length does not match column count");
    check_relaxation(omega);
    std::uint64_t flops = 0;
    const std::size_t m = A.rows();
    if (direction == Direction::down) {
        for (std::size_t j = 0; j < m; ++j) project_row(A, b, omega, j, x, flops);
    } else {
        for (std::size_t j = m; j-- > 0;) project_row(A, b, omega, j, x, flops);
    }
    count(ops, flops);
}

void sweep(const SparseMatrix& A, std::span<const double> b, SweepState& state, OpCounter* ops) {
    sweep(A, b, state.omega, state.direction, state.x, ops);
    ++state.k;
}

double residual_norm(const SparseMatrix& A, std::span<const double> b, std::span<const double> x,
                     OpCounter* ops) {
    if (b.size() != A.rows()) throw ShapeError("residual: data length does not match row count");
    const Vector ax = A.multiply(x);
    double s = 0.0;
    for (std::size_t j = 0; j < ax.size(); ++j) {
        const double r = b[j] - ax[j];
        s += r * r;
    }
    count(ops, 2 * A.nnz() + 3 * A.rows());
    return std::sqrt(s);
}

double relative_error(std::span<const double> x, std::span<const double> x_star) {
    const double ref = norm2(x_star);
    const double d = distance(x, x_star);
    return ref > 0.0 ? d / ref : d;
}

std::size_t History::size() const {
    return std::max({true_error.size(), residual_norm.size(), gauge.size()});
}

void write_history_csv(std::ostream& os, const History& h) {
    os << "k,true_error,residual_norm,gauge\n";
    const auto cell = [&os](const std::vector<double>& v, std::size_t i) {
        if (i < v.size()) os << v[i];
    };
    const auto old_precision = os.precision(17);
    for (std::size_t i = 0; i < h.size(); ++i) {
        os << (i + 1) << ',';
        cell(h.true_error, i);
        os << ',';
        cell(h.residual_norm, i);
        os << ',';
        cell(h.gauge, i);
        os << '\n';
    }
    os.precision(old_precision);
}

RunOutput run(const SparseMatrix& A, std::span<const double> b, const RunOptions& opts, OpCounter* ops) {
    if (opts.n_sweeps < 1) throw ConfigError("run needs at least one sweep");
    check_relaxation(opts.omega);
    if (b.size() != A.rows()) throw ShapeError("run: data length does not match row count");
    if (!opts.x_star.empty() && opts.x_star.size() != A.cols())
        throw ShapeError("run: ground truth length does not match column count");

    RunOutput out;
    if (opts.x0.empty()) {
        out.x.assign(A.cols(), 0.0);
    } else {
        if (opts.x0.size() != A.cols()) throw ShapeError("run: start vector length does not match column count");
        out.x.assign(opts.x0.begin(), opts.x0.end());
    }
    for (std::size_t k = 0; k < opts.n_sweeps; ++k) {
        sweep(A, b, opts.omega, opts.direction, out.x, ops);
        if (!opts.x_star.empty()) out.history.true_error.push_back(relative_error(out.x, opts.x_star));
        if (opts.track_residual) out.history.residual_norm.push_back(residual_norm(A, b, out.x, ops));
    }
    return out;
}

} // namespace kaczmarz
